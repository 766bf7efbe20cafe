#include "phiv/arith.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace phiv {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonCoprimeModuli: return "NonCoprimeModuli";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::CorruptCache: return "CorruptCache";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::ModulusTooLarge: return "ModulusTooLarge";
    case ErrorCode::MismatchedInputs: return "MismatchedInputs";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::InfeasibleResiduePlan: return "InfeasibleResiduePlan";
    case ErrorCode::FixedDivisorFound: return "FixedDivisorFound";
    case ErrorCode::ArithmeticMismatch: return "ArithmeticMismatch";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

const Nat kDeterministicCeiling("318665857834031151167461");

Nat nat_from_string(const std::string& decimal) {
    if (decimal.empty() || !std::all_of(decimal.begin(), decimal.end(),
                                        [](char c) { return c >= '0' && c <= '9'; }))
        throw Error(ErrorCode::InvalidArgument, "not a nonnegative decimal integer: '" + decimal + "'");
    return Nat(decimal, 10);
}

std::string to_string(const Nat& n) { return n.get_str(10); }

LinearPoly::LinearPoly(Nat a, Nat b) : lead(std::move(a)), constant(std::move(b)) {
    if (lead < 1)
        throw Error(ErrorCode::InvalidArgument, "linear polynomial needs a positive leading coefficient");
    if (constant < 0)
        throw Error(ErrorCode::InvalidArgument, "linear polynomial constant must be nonnegative");
}

CongruenceSystem::CongruenceSystem(std::vector<Congruence> eqs) : eqs_(std::move(eqs)) {
    for (auto& e : eqs_) {
        if (e.modulus < 1)
            throw Error(ErrorCode::InvalidArgument, "congruence modulus must be >= 1");
        mpz_fdiv_r(e.residue.get_mpz_t(), e.residue.get_mpz_t(), e.modulus.get_mpz_t());
    }
    for (std::size_t i = 0; i < eqs_.size(); ++i)
        for (std::size_t j = i + 1; j < eqs_.size(); ++j)
            if (arith::gcd(eqs_[i].modulus, eqs_[j].modulus) != 1)
                throw Error(ErrorCode::NonCoprimeModuli,
                            "moduli " + to_string(eqs_[i].modulus) + " and " +
                                to_string(eqs_[j].modulus) + " share a factor");
}

Nat CongruenceSystem::modulus_product() const {
    Nat prod = 1;
    for (const auto& e : eqs_) prod *= e.modulus;
    return prod;
}

namespace arith {
namespace {

constexpr std::array<unsigned, 12> kFixedBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

const std::vector<std::uint32_t>& trial_primes() {
    static const std::vector<std::uint32_t> primes = small_primes(1000);
    return primes;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// n odd, n > 3; n - 1 = d * 2^s.
struct Witness {
    const Nat& n;
    Nat n_minus_1;
    Nat d;
    mp_bitcnt_t s;

    explicit Witness(const Nat& n_) : n(n_), n_minus_1(n_ - 1) {
        s = mpz_scan1(n_minus_1.get_mpz_t(), 0);
        mpz_fdiv_q_2exp(d.get_mpz_t(), n_minus_1.get_mpz_t(), s);
    }

    bool strong_probable_prime(const Nat& base) const {
        Nat x;
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == n_minus_1) return true;
        for (mp_bitcnt_t r = 1; r < s; ++r) {
            mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
            if (x == n_minus_1) return true;
            if (x == 1) return false;
        }
        return false;
    }
};

// -1: composite, 1: prime, 0: undecided.
int trial_division(const Nat& n) {
    for (std::uint32_t p : trial_primes()) {
        if (n == p) return 1;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return -1;
    }
    Nat sq = 1000;
    return n < sq * sq ? 1 : 0;
}

} // namespace

Nat gcd(const Nat& a, const Nat& b) {
    Nat g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

Nat crt_solve(const CongruenceSystem& sys) {
    Nat x = 0, mod = 1;
    for (const auto& e : sys.equations()) {
        // x' = x + mod * ((r - x) * mod^-1 mod m)
        Nat inv;
        if (e.modulus == 1) continue;
        mpz_invert(inv.get_mpz_t(), mod.get_mpz_t(), e.modulus.get_mpz_t());
        Nat k = (e.residue - x) * inv;
        mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), e.modulus.get_mpz_t());
        x += mod * k;
        mod *= e.modulus;
    }
    return x == 0 ? mod : x;
}

bool passes_base2(const Nat& n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (mpz_even_p(n.get_mpz_t())) return false;
    return Witness(n).strong_probable_prime(Nat(2));
}

bool is_probable_prime(const Nat& n, const PrimalityConfig& cfg) {
    if (n < 2) return false;
    if (int td = trial_division(n); td != 0) return td > 0;

    const Witness w(n);
    const Nat& bound = cfg.deterministic_below < kDeterministicCeiling ? cfg.deterministic_below
                                                                       : kDeterministicCeiling;
    if (n < bound) {
        for (unsigned b : kFixedBases)
            if (!w.strong_probable_prime(Nat(b))) return false;
        return true;
    }

    if (!w.strong_probable_prime(Nat(2))) return false;

    // Bases depend only on (seed, n) so answers do not depend on call order.
    std::uint64_t state = cfg.seed ^ (mpz_getlimbn(n.get_mpz_t(), 0) * 0x2545f4914f6cdd1dULL) ^
                          mpz_sizeinbase(n.get_mpz_t(), 2);
    const Nat span = n - 3;
    const std::size_t limbs = mpz_size(n.get_mpz_t()) + 1;
    Nat a;
    for (int round = 0; round < cfg.error_exponent; ++round) {
        a = 0;
        for (std::size_t i = 0; i < limbs; ++i) {
            a <<= 64;
            a += static_cast<unsigned long>(splitmix64(state));
        }
        mpz_fdiv_r(a.get_mpz_t(), a.get_mpz_t(), span.get_mpz_t());
        a += 2;
        if (!w.strong_probable_prime(a)) return false;
    }
    return true;
}

bool is_germain(const Nat& p, const PrimalityConfig& cfg) {
    return is_probable_prime(p, cfg) && is_probable_prime(2 * p + 1, cfg);
}

Nat eval_poly(const LinearPoly& f, const Nat& t) { return f(t); }

std::vector<std::uint32_t> small_primes(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 3) return out;
    std::vector<bool> composite(limit, false);
    for (std::uint64_t i = 2; i < limit; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j < limit; j += i) composite[j] = true;
    }
    return out;
}

namespace {

Nat pollard_brent(const Nat& n, std::uint64_t c) {
    // n odd composite, no small factors.
    Nat y = 2, x, q = 1, g = 1, ys;
    std::uint64_t r = 1, m = 128;
    auto step = [&](Nat& v) {
        v = v * v + c;
        mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    while (g == 1) {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) step(y);
        for (std::uint64_t k = 0; k < r && g == 1; k += m) {
            ys = y;
            for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                step(y);
                q *= abs(x - y);
                mpz_fdiv_r(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            g = gcd(q, n);
        }
        r *= 2;
    }
    if (g == n) {
        do {
            step(ys);
            g = gcd(abs(x - ys), n);
        } while (g == 1);
    }
    return g;
}

void split(const Nat& n, const PrimalityConfig& cfg, std::vector<Nat>& out) {
    if (n == 1) return;
    if (is_probable_prime(n, cfg)) {
        out.push_back(n);
        return;
    }
    for (std::uint64_t c = 1;; ++c) {
        Nat f = pollard_brent(n, c);
        if (f != n) {
            split(f, cfg, out);
            split(n / f, cfg, out);
            return;
        }
    }
}

} // namespace

std::vector<std::pair<Nat, unsigned>> factorize(const Nat& n, const PrimalityConfig& cfg) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "factorize needs n >= 1");
    std::vector<Nat> primes;
    Nat rest = n;
    static const std::vector<std::uint32_t> tp = small_primes(1 << 16);
    for (std::uint32_t p : tp) {
        if (rest == 1) break;
        if (Nat(p) * p > rest) break;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
            primes.emplace_back(p);
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        }
    }
    split(rest, cfg, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<std::pair<Nat, unsigned>> out;
    for (const auto& p : primes) {
        if (!out.empty() && out.back().first == p)
            ++out.back().second;
        else
            out.emplace_back(p, 1u);
    }
    return out;
}

namespace {

// Confirms a candidate p <= s by checking every residue t mod p.
template <class Residues>
bool covers_all_residues(std::uint64_t p, std::size_t count, Residues residues) {
    for (std::uint64_t t = 0; t < p; ++t) {
        bool hit = false;
        for (std::size_t i = 0; i < count && !hit; ++i) {
            auto [a, b] = residues(i);
            hit = (a * t + b) % p == 0;
        }
        if (!hit) return false;
    }
    return true;
}

} // namespace

std::set<Nat> fixed_prime_divisors(std::span<const LinearPoly> polys) {
    if (polys.empty()) throw Error(ErrorCode::EmptyInput, "fixed_prime_divisors needs at least one polynomial");
    std::set<Nat> fixed;
    for (const auto& f : polys) {
        Nat g = gcd(f.lead, f.constant);
        if (g > 1)
            for (auto& [p, e] : factorize(g)) fixed.insert(p);
    }
    for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(polys.size()) + 1)) {
        if (fixed.count(Nat(p))) continue;
        auto residues = [&](std::size_t i) {
            return std::pair<std::uint64_t, std::uint64_t>{
                mpz_fdiv_ui(polys[i].lead.get_mpz_t(), p), mpz_fdiv_ui(polys[i].constant.get_mpz_t(), p)};
        };
        if (covers_all_residues(p, polys.size(), residues)) fixed.insert(Nat(p));
    }
    return fixed;
}

std::vector<std::uint64_t> fixed_prime_divisors(std::span<const SmallLinearPoly> polys) {
    if (polys.empty()) throw Error(ErrorCode::EmptyInput, "fixed_prime_divisors needs at least one polynomial");
    // Allocation-light: results are few, so a sorted vector with linear lookups.
    std::vector<std::uint64_t> fixed;
    auto add = [&](std::uint64_t p) {
        if (std::find(fixed.begin(), fixed.end(), p) == fixed.end()) fixed.push_back(p);
    };
    for (const auto& f : polys) {
        if (f.lead == 0) throw Error(ErrorCode::InvalidArgument, "linear polynomial needs a positive leading coefficient");
        std::uint64_t g = std::gcd(f.lead, f.constant);
        if (g <= 1) continue;
        for (std::uint64_t p = 2; p * p <= g; ++p) {
            if (g % p) continue;
            add(p);
            while (g % p == 0) g /= p;
        }
        if (g > 1) add(g);
    }
    for (std::uint64_t p = 2; p <= polys.size(); ++p) {
        bool prime = true;
        for (std::uint64_t d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
        if (!prime || std::find(fixed.begin(), fixed.end(), p) != fixed.end()) continue;
        auto residues = [&](std::size_t i) {
            return std::pair<std::uint64_t, std::uint64_t>{polys[i].lead % p, polys[i].constant % p};
        };
        if (covers_all_residues(p, polys.size(), residues)) fixed.push_back(p);
    }
    std::sort(fixed.begin(), fixed.end());
    return fixed;
}

} // namespace arith
} // namespace phiv
