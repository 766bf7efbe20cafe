#include "phiv/construct.hpp"

#include <algorithm>

namespace phiv::construct {

const char* to_string(Mode m) { return m == Mode::Strict ? "strict" : "relaxed"; }

Mode mode_from_string(const std::string& s) {
    if (s == "strict") return Mode::Strict;
    if (s == "relaxed") return Mode::Relaxed;
    throw Error(ErrorCode::InvalidArgument, "mode must be 'strict' or 'relaxed', got '" + s + "'");
}

bool ConditionRecord::all_ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const Condition& c) { return c.ok; });
}

const Condition* ConditionRecord::first_failure() const {
    auto it = std::find_if(entries.begin(), entries.end(), [](const Condition& c) { return !c.ok; });
    return it == entries.end() ? nullptr : &*it;
}

std::vector<unsigned> small_primes_of(int H) {
    std::vector<unsigned> out;
    if (H < 5) return out;
    for (std::uint32_t p : arith::small_primes(static_cast<std::uint32_t>(H) + 1))
        if (p >= 5) out.push_back(p);
    return out;
}

Nat pi_of(int H) {
    Nat pi = 1;
    for (unsigned p : small_primes_of(H)) pi *= p;
    return pi;
}

Nat compute_nh(int h, const Nat& p) {
    if (h % 3 != 2) return 2 * p;
    const Nat s = 2 * p + 1;
    return 2 * p * s * s * s;
}

Nat compute_nu(int h, const Nat& p) {
    const Nat s = 2 * p + 1;
    return h % 3 != 2 ? s : s * s * s * s;
}

namespace {

Nat cube_term(const Nat& p) {
    const Nat s = 2 * p + 1;
    return p * s * s * s;
}

// Conditions linking slot h (prime ph) with slot k (prime pk), h != k.
void pair_conditions(int h, const Nat& ph, int k, const Nat& pk, std::vector<Condition>& out) {
    const Nat target = pk * (2 * pk + 1);
    const Nat shift = 2 * (k - h);
    Nat g = arith::gcd(abs(ph - shift), target);
    out.push_back({"deux", h, k, 0, g, g == 1});
    g = arith::gcd(abs(cube_term(ph) - shift), target);
    out.push_back({"trois", h, k, 0, g, g == 1});
}

void small_prime_conditions(int h, const Nat& ph, const std::vector<unsigned>& smalls,
                            std::vector<Condition>& out) {
    for (unsigned p : smalls) {
        Nat g = arith::gcd(2 * h + ph, Nat(p));
        out.push_back({"modpiH1", h, 0, p, g, g == 1});
        g = arith::gcd(2 * h + cube_term(ph), Nat(p));
        out.push_back({"modpiH2", h, 0, p, g, g == 1});
    }
}

void distinct_and_coprime(int h, const Nat& ph, int k, const Nat& pk, std::vector<Condition>& out) {
    out.push_back({"distinct", h, k, 0, ph - pk, ph != pk});
    const Nat g = arith::gcd(compute_nh(h, ph) / 2, compute_nh(k, pk) / 2);
    out.push_back({"coprime_n", h, k, 0, g, g == 1});
}

// Cheap gcd-only conditions for a candidate appended as slot h.
bool candidate_fits(const std::vector<Nat>& primes, const Nat& x, const std::vector<unsigned>& smalls) {
    const int h = static_cast<int>(primes.size()) + 1;
    std::vector<Condition> scratch;
    small_prime_conditions(h, x, smalls, scratch);
    for (int k = 1; k < h; ++k) {
        const Nat& pk = primes[k - 1];
        distinct_and_coprime(h, x, k, pk, scratch);
        pair_conditions(h, x, k, pk, scratch);
        pair_conditions(k, pk, h, x, scratch);
    }
    return std::all_of(scratch.begin(), scratch.end(), [](const Condition& c) { return c.ok; });
}

struct SmallPrimeStep {
    std::vector<ResiduePlan::SmallPrimeChoice> choices;
    std::vector<std::vector<bool>> admissible;  // per small prime
};

SmallPrimeStep plan_small_primes(int h, const std::vector<unsigned>& smalls) {
    SmallPrimeStep step;
    for (unsigned p : smalls) {
        std::vector<bool> ok(p, false);
        unsigned forbidden = 0;
        for (unsigned r = 0; r < p; ++r) {
            const std::uint64_t s = (2 * r + 1) % p;
            const std::uint64_t quartic = (2 * h + std::uint64_t{r} * (s * s % p * s % p)) % p;
            ok[r] = r != 0 && s != 0 && (2 * h + r) % p != 0 && quartic != 0;
            forbidden += !ok[r];
        }
        auto first = std::find(ok.begin(), ok.end(), true);
        if (first == ok.end())
            throw Error(ErrorCode::InfeasibleResiduePlan,
                        "no admissible residue mod " + std::to_string(p) + " for slot " + std::to_string(h));
        step.choices.push_back({h, p, static_cast<unsigned>(first - ok.begin()), forbidden});
        step.admissible.push_back(std::move(ok));
    }
    return step;
}

ResiduePlan::PairChoice plan_pair(int step, int earlier, const Nat& pl) {
    const Nat mod = pl * (2 * pl + 1);
    const Nat shift = 2 * (earlier - step);
    for (Nat r = 0; r < mod; ++r) {
        const Nat s = 2 * r + 1;
        if (arith::gcd(r, mod) == 1 && arith::gcd(s, mod) == 1 && arith::gcd(abs(r - shift), mod) == 1 &&
            arith::gcd(abs(r * s * s * s - shift), mod) == 1)
            return {step, earlier, mod, r};
    }
    throw Error(ErrorCode::InfeasibleResiduePlan, "no admissible residue mod " + phiv::to_string(mod));
}

// Residues x mod 6*Pi_H with x = 5 (mod 6) and x admissible mod each small prime.
std::vector<std::uint64_t> wheel(const std::vector<unsigned>& smalls, const SmallPrimeStep& step,
                                 std::uint64_t modulus) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 5; x < modulus; x += 6) {
        bool ok = true;
        for (std::size_t i = 0; i < smalls.size() && ok; ++i) ok = step.admissible[i][x % smalls[i]];
        if (ok) out.push_back(x);
    }
    return out;
}

} // namespace

ConditionRecord check_family_conditions(const std::vector<Nat>& primes, int H, Mode mode,
                                        const PrimalityConfig& cfg) {
    ConditionRecord rec;
    auto& out = rec.entries;
    const int count = static_cast<int>(primes.size());
    out.push_back({"size", 0, 0, 0, Nat(count), count == H && H >= 1});
    if (count == 0) return rec;

    const auto smalls = small_primes_of(H);
    for (int h = 1; h <= count; ++h)
        out.push_back({"germain", h, 0, 0, primes[h - 1], arith::is_germain(primes[h - 1], cfg)});
    out.push_back({"lower", 1, 0, 0, Nat(4 * H + 1), primes[0] > 4 * H + 1});
    if (mode == Mode::Strict)
        for (int h = 1; h < count; ++h) {
            const Nat floor = 3 * cube_term(primes[h - 1]);
            out.push_back({"orderp", h + 1, h, 0, floor, primes[h] > floor});
        }
    for (int h = 1; h <= count; ++h) small_prime_conditions(h, primes[h - 1], smalls, out);
    for (int h = 1; h <= count; ++h)
        for (int k = h + 1; k <= count; ++k) distinct_and_coprime(h, primes[h - 1], k, primes[k - 1], out);
    for (int h = 1; h <= count; ++h)
        for (int k = 1; k <= count; ++k)
            if (h != k) pair_conditions(h, primes[h - 1], k, primes[k - 1], out);
    return rec;
}

std::vector<Nat> germain_in_ap(const Nat& a, const Nat& b, std::size_t count, const Nat& search_limit,
                               const PrimalityConfig& cfg) {
    if (a < 1) throw Error(ErrorCode::InvalidArgument, "progression difference must be >= 1");
    if (arith::gcd(b, a) != 1 || arith::gcd(2 * b + 1, a) != 1)
        throw Error(ErrorCode::PreconditionViolated, "need gcd(b, a) = gcd(2b+1, a) = 1");
    std::vector<Nat> found;
    Nat x;
    mpz_fdiv_r(x.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
    for (; found.size() < count && x < search_limit; x += a)
        if (arith::is_germain(x, cfg)) found.push_back(x);
    if (found.size() < count)
        throw PartialResultError("found " + std::to_string(found.size()) + " of " + std::to_string(count) +
                                     " Germain primes below " + phiv::to_string(search_limit),
                                 std::move(found));
    return found;
}

GermainFamily build_family(int H, Mode mode, const Nat& search_limit, const PrimalityConfig& cfg) {
    if (H < 1) throw Error(ErrorCode::InvalidArgument, "H must be >= 1");
    GermainFamily fam;
    fam.H = H;
    fam.mode = mode;
    fam.pi_H = pi_of(H);
    const auto smalls = small_primes_of(H);
    const std::uint64_t wheel_mod = 6 * fam.pi_H.get_ui();

    Nat floor = 4 * H + 1;  // candidates must exceed this
    for (int h = 1; h <= H; ++h) {
        const SmallPrimeStep step = plan_small_primes(h, smalls);
        fam.plan.small.insert(fam.plan.small.end(), step.choices.begin(), step.choices.end());
        std::vector<Congruence> seed_eqs;
        for (const auto& c : step.choices) seed_eqs.push_back({Nat(c.residue), Nat(c.prime)});
        fam.plan.seeds.push_back(arith::crt_solve(CongruenceSystem(std::move(seed_eqs))));
        for (int l = 1; l < h; ++l) fam.plan.pairs.push_back(plan_pair(h, l, fam.primes[l - 1]));

        const auto residues = wheel(smalls, step, wheel_mod);
        Nat base = floor + 1;
        base -= base % wheel_mod;
        std::optional<Nat> chosen;
        while (!chosen && base < search_limit) {
            for (std::uint64_t res : residues) {
                const Nat x = base + res;
                if (x <= floor) continue;
                if (x >= search_limit) break;
                if (candidate_fits(fam.primes, x, smalls) && arith::is_germain(x, cfg)) {
                    chosen = x;
                    break;
                }
            }
            base += wheel_mod;
        }
        if (!chosen)
            throw PartialResultError("no Germain prime for slot " + std::to_string(h) + " below " +
                                         phiv::to_string(search_limit),
                                     fam.primes);
        fam.primes.push_back(*chosen);
        fam.n.push_back(compute_nh(h, *chosen));
        floor = mode == Mode::Strict ? 3 * cube_term(*chosen) : *chosen;
    }
    fam.checks = check_family_conditions(fam.primes, H, mode, cfg);
    if (const Condition* bad = fam.checks.first_failure())
        throw Error(ErrorCode::ArithmeticMismatch, "built family fails its own audit: " + bad->name);
    return fam;
}

} // namespace phiv::construct
