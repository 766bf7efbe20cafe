#pragma once

// Exact integer arithmetic used by every other module: gcd, CRT, primality,
// and the fixed-prime-divisor analysis of products of linear polynomials.

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "phiv/error.hpp"

namespace phiv {

// Arbitrary-precision nonnegative integer. GMP keeps the representation
// canonical; nonnegativity is a convention enforced at API boundaries.
using Nat = mpz_class;

Nat nat_from_string(const std::string& decimal);   // throws InvalidArgument
std::string to_string(const Nat& n);

// A*t + B with A >= 1.
struct LinearPoly {
    Nat lead;
    Nat constant;

    LinearPoly(Nat a, Nat b);
    Nat operator()(const Nat& t) const { return lead * t + constant; }
    bool operator==(const LinearPoly&) const = default;
};

// Same shape with machine-word coefficients; used by exhaustive sweeps.
struct SmallLinearPoly {
    std::uint64_t lead;
    std::uint64_t constant;
};

struct Congruence {
    Nat residue;
    Nat modulus;
};

// Pairwise-coprime list of congruences. The constructor checks coprimality
// and reduces residues into [0, modulus).
class CongruenceSystem {
public:
    CongruenceSystem() = default;
    explicit CongruenceSystem(std::vector<Congruence> eqs);

    const std::vector<Congruence>& equations() const { return eqs_; }
    Nat modulus_product() const;

private:
    std::vector<Congruence> eqs_;
};

struct PrimalityConfig {
    // Miller-Rabin rounds above the deterministic threshold; false-accept
    // probability <= 4^-error_exponent.
    int error_exponent = 40;
    // Below this the fixed-base test (bases 2..37) is exact. Values above
    // kDeterministicCeiling are clamped to it.
    Nat deterministic_below = Nat(1) << 64;
    std::uint64_t seed = 0;
};

// Largest bound for which the first twelve prime bases are a proven
// deterministic Miller-Rabin witness set.
extern const Nat kDeterministicCeiling;

namespace arith {

Nat gcd(const Nat& a, const Nat& b);

// Least nonnegative solution; if that is 0, the modulus product is returned
// instead so that the result is positive.
Nat crt_solve(const CongruenceSystem& sys);

bool is_probable_prime(const Nat& n, const PrimalityConfig& cfg = {});

// Strong-pseudoprime test to the single base 2. Never rejects a prime;
// cheap pre-filter for searches.
bool passes_base2(const Nat& n);

bool is_germain(const Nat& p, const PrimalityConfig& cfg = {});

Nat eval_poly(const LinearPoly& f, const Nat& t);

// Primes dividing prod_i (A_i t + B_i) for every integer t.
//
// For p > s = polys.size() the product mod p is a nonzero polynomial of degree
// <= s < p unless one factor vanishes identically mod p, i.e. p | gcd(A_i, B_i).
// So the only candidates are primes p <= s (confirmed on t = 0..p-1) and the
// prime factors of each gcd(A_i, B_i) (fixed unconditionally).
std::set<Nat> fixed_prime_divisors(std::span<const LinearPoly> polys);
// Same for machine-word coefficients; ascending.
std::vector<std::uint64_t> fixed_prime_divisors(std::span<const SmallLinearPoly> polys);

// Prime factorisation with multiplicities, ascending. Trial division then
// Pollard-Brent; n >= 1.
std::vector<std::pair<Nat, unsigned>> factorize(const Nat& n, const PrimalityConfig& cfg = {});

// Primes below limit, ascending.
std::vector<std::uint32_t> small_primes(std::uint32_t limit);

} // namespace arith
} // namespace phiv
