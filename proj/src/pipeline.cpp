#include "phiv/construct.hpp"

#include <algorithm>
#include <thread>

namespace phiv::construct {

ConstructionState assemble(const GermainFamily& family) {
    if (static_cast<int>(family.primes.size()) != family.H || family.n.size() != family.primes.size())
        throw Error(ErrorCode::InvalidArgument, "family is incomplete");
    ConstructionState st;
    st.family = family;

    st.U = 12 * family.pi_H;
    for (const auto& n : family.n) {
        Nat p5;
        mpz_pow_ui(p5.get_mpz_t(), n.get_mpz_t(), 5);
        st.U *= p5;
    }

    std::vector<Congruence> eqs{{Nat(1), 12 * family.pi_H}};
    for (int h = 1; h <= family.H; ++h) {
        const Nat half = family.n[h - 1] / 2;
        eqs.push_back({Nat(1 - 4 * h), half * half});
    }
    st.r = arith::crt_solve(CongruenceSystem(std::move(eqs)));

    for (int h = 1; h <= family.H; ++h) {
        const Nat& n = family.n[h - 1];
        const Nat shifted = st.r - 1 + 4 * h;
        if (!mpz_divisible_p(st.U.get_mpz_t(), n.get_mpz_t()) ||
            !mpz_divisible_p(shifted.get_mpz_t(), n.get_mpz_t()))
            throw Error(ErrorCode::ArithmeticMismatch, "n_" + std::to_string(h) + " does not divide U and r-1+4h");
        st.polys.emplace_back(st.U / n, shifted / n + 1);
    }
    return st;
}

std::string classify_fixed_prime(const ConstructionState& state, const Nat& p) {
    if (!mpz_divisible_p(state.U.get_mpz_t(), p.get_mpz_t())) return "p does not divide U";
    if (p <= state.family.H) return "p divides U, p in [2, H]";
    for (int h = 1; h <= state.family.H; ++h) {
        const Nat& ph = state.family.primes[h - 1];
        if (p == ph) return "p = p_" + std::to_string(h);
        if (p == 2 * ph + 1) return "p = 2p_" + std::to_string(h) + "+1";
    }
    return "p divides U";
}

void gate_no_fixed_divisor(const ConstructionState& state) {
    const auto fixed = arith::fixed_prime_divisors(state.polys);
    if (!fixed.empty()) {
        const Nat& p = *fixed.begin();
        throw FixedDivisorError(p, classify_fixed_prime(state, p));
    }
}

namespace {

constexpr std::uint32_t kSieveLimit = 1 << 16;

struct SieveRoot {
    std::uint32_t prime;
    std::uint32_t root;  // F_h(t) = 0 mod prime  <=>  t = root
};

class Searcher {
public:
    Searcher(const ConstructionState& st, const PrimalityConfig& cfg) : st_(st), cfg_(cfg) {
        const auto primes = arith::small_primes(kSieveLimit);
        for (int h = 1; h <= st.family.H; ++h) {
            const auto& f = st.polys[h - 1];
            std::vector<SieveRoot> roots;
            for (std::uint32_t p : primes) {
                const unsigned long a = mpz_fdiv_ui(f.lead.get_mpz_t(), p);
                if (a == 0) continue;  // constant mod p; never zero after the gate
                const unsigned long b = mpz_fdiv_ui(f.constant.get_mpz_t(), p);
                Nat inv;
                mpz_invert(inv.get_mpz_t(), Nat(a).get_mpz_t(), Nat(p).get_mpz_t());
                const std::uint64_t root = (p - b) % p * inv.get_ui() % p;
                roots.push_back({p, static_cast<std::uint32_t>(root)});
            }
            roots_.push_back(std::move(roots));
            guard_.push_back(2 * st.family.primes[h - 1] + 1);
        }
    }

    // Smallest accepted offset in [start, start + len).
    std::optional<std::uint64_t> block(const Nat& start, std::uint64_t len) const {
        std::vector<bool> alive(len, true);
        bool sieved = true;
        for (const auto& f : st_.polys) sieved = sieved && f(start) > kSieveLimit;
        if (sieved) {
            for (const auto& roots : roots_)
                for (const auto& [p, root] : roots) {
                    const unsigned long s = mpz_fdiv_ui(start.get_mpz_t(), p);
                    for (std::uint64_t i = (root + p - s) % p; i < len; i += p) alive[i] = false;
                }
        }
        Nat t, v;
        for (std::uint64_t i = 0; i < len; ++i) {
            if (!alive[i]) continue;
            t = start + i;
            if (accept(t, v)) return i;
        }
        return std::nullopt;
    }

    bool accept(const Nat& t, Nat& v) const {
        const int H = st_.family.H;
        for (int h = 0; h < H; ++h) {
            v = st_.polys[h](t);
            if (mpz_divisible_p(v.get_mpz_t(), guard_[h].get_mpz_t())) return false;
            if (!arith::passes_base2(v)) return false;
        }
        for (int h = 0; h < H; ++h)
            if (!arith::is_probable_prime(st_.polys[h](t), cfg_)) return false;
        return true;
    }

private:
    const ConstructionState& st_;
    PrimalityConfig cfg_;
    std::vector<std::vector<SieveRoot>> roots_;
    std::vector<Nat> guard_;
};

} // namespace

SearchResult search_t0(const ConstructionState& state, const SearchOptions& opts, const PrimalityConfig& cfg) {
    if (state.polys.empty()) throw Error(ErrorCode::InvalidArgument, "state has no polynomials");
    if (opts.t_start < 0) throw Error(ErrorCode::InvalidArgument, "t_start must be nonnegative");
    const Searcher searcher(state, cfg);
    const unsigned workers = std::max(1u, opts.workers);
    const std::uint64_t block = std::max<std::uint64_t>(opts.block, 1);

    SearchResult res;
    std::uint64_t done = 0;
    while (done < opts.budget) {
        // One round: `workers` consecutive blocks, reduced in order.
        std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
        for (unsigned w = 0; w < workers && done < opts.budget; ++w) {
            const std::uint64_t len = std::min(block, opts.budget - done);
            spans.emplace_back(done, len);
            done += len;
        }
        std::vector<std::optional<std::uint64_t>> hits(spans.size());
        auto run = [&](std::size_t i) { hits[i] = searcher.block(opts.t_start + spans[i].first, spans[i].second); };
        if (spans.size() == 1) {
            run(0);
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t i = 1; i < spans.size(); ++i) pool.emplace_back(run, i);
            run(0);
        }
        for (std::size_t i = 0; i < spans.size(); ++i)
            if (hits[i]) {
                const std::uint64_t off = spans[i].first + *hits[i];
                res.t0 = opts.t_start + off;
                res.examined = off + 1;
                res.next_t = *res.t0 + 1;
                return res;
            }
    }
    res.examined = opts.budget;
    res.next_t = opts.t_start + opts.budget;
    return res;
}

SolutionCertificate realize(const ConstructionState& state, const Nat& t0, const PrimalityConfig& cfg) {
    const auto& fam = state.family;
    SolutionCertificate cert;
    cert.H = fam.H;
    cert.mode = fam.mode;
    cert.primes = fam.primes;
    cert.n = fam.n;
    cert.U = state.U;
    cert.r = state.r;
    cert.t0 = t0;
    cert.M = state.U * t0 + state.r - 1;
    cert.error_exponent = cfg.error_exponent;
    for (int h = 1; h <= fam.H; ++h) {
        const Nat q = state.polys[h - 1](t0);
        const Nat nu = compute_nu(h, fam.primes[h - 1]);
        if (!arith::is_probable_prime(q, cfg) || arith::gcd(q, nu) != 1)
            throw Error(ErrorCode::PreconditionViolated,
                        "F_" + std::to_string(h) + "(t0) is not a prime coprime to nu_" + std::to_string(h));
        if (q * fam.n[h - 1] != cert.M + 4 * h + fam.n[h - 1])
            throw Error(ErrorCode::ArithmeticMismatch, "q_" + std::to_string(h) + " * n_h != M + 4h + n_h");
        cert.q.push_back(q);
        cert.nu.push_back(nu);
        cert.m.push_back(q * nu);
    }
    return cert;
}

} // namespace phiv::construct
