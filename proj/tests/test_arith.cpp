#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "phiv/arith.hpp"

using namespace phiv;
using phiv::arith::fixed_prime_divisors;

namespace {

std::set<Nat> fixed(std::initializer_list<std::pair<int, int>> polys) {
    std::vector<LinearPoly> v;
    for (auto [a, b] : polys) v.emplace_back(Nat(a), Nat(b));
    return fixed_prime_divisors(v);
}

} // namespace

TEST_CASE("gcd") {
    CHECK(arith::gcd(12, 18) == 6);
    CHECK(arith::gcd(0, 5) == 5);
    CHECK(arith::gcd(9, 23 * 47) == 1);

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> dist(0, 1000000);
    for (int i = 0; i < 300; ++i) {
        const std::uint64_t a = dist(rng), b = dist(rng);
        const Nat g = arith::gcd(Nat(a), Nat(b));
        CHECK(g == oracle::gcd_by_search(a, b));
        if (g != 0) {
            CHECK(Nat(a) % g == 0);
            CHECK(Nat(b) % g == 0);
        }
    }
}

TEST_CASE("crt_solve examples") {
    CHECK(arith::crt_solve(CongruenceSystem({{1, 12}})) == 1);
    CHECK(arith::crt_solve(CongruenceSystem({{2, 3}, {3, 5}})) == 8);
    CHECK(arith::crt_solve(CongruenceSystem({{1, 12}, {118, 121}})) == 481);
    // Negative residues are reduced first: 1 - 4 = -3 = 118 (mod 121).
    CHECK(arith::crt_solve(CongruenceSystem({{1, 12}, {-3, 121}})) == 481);
    // Least representative 0 becomes the modulus product.
    CHECK(arith::crt_solve(CongruenceSystem({{0, 4}, {0, 9}})) == 36);
}

TEST_CASE("crt_solve rejects shared factors") {
    CHECK_THROWS_AS(CongruenceSystem({{1, 6}, {1, 4}}), Error);
    try {
        CongruenceSystem({{1, 6}, {1, 9}});
        FAIL("expected NonCoprimeModuli");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonCoprimeModuli);
    }
    CHECK_THROWS_AS(CongruenceSystem({{1, 0}}), Error);
}

TEST_CASE("crt_solve matches exhaustive search on random coprime systems") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> mod_dist(2, 60);
    int tested = 0;
    while (tested < 300) {
        std::vector<Congruence> eqs;
        std::uint64_t prod = 1;
        const int k = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < k; ++i) {
            const std::uint64_t m = mod_dist(rng);
            bool coprime = true;
            for (auto& e : eqs) coprime = coprime && std::gcd<std::uint64_t>(e.modulus.get_ui(), m) == 1;
            if (!coprime || prod * m >= 1000000) continue;
            prod *= m;
            eqs.push_back({Nat(rng() % m), Nat(m)});
        }
        const CongruenceSystem sys(eqs);
        const Nat x = arith::crt_solve(sys);
        std::uint64_t brute = prod;  // least positive solution
        for (std::uint64_t y = 1; y <= prod; ++y) {
            bool ok = true;
            for (auto& e : eqs) ok = ok && y % e.modulus.get_ui() == e.residue.get_ui();
            if (ok) {
                brute = y;
                break;
            }
        }
        // crt_solve returns the least nonnegative unless that is 0.
        CHECK(x == brute);
        CHECK(x >= 1);
        CHECK(x <= Nat(prod));
        for (auto& e : eqs) CHECK(x % e.modulus == e.residue);
        ++tested;
    }
}

TEST_CASE("is_probable_prime agrees with trial division below 10^6") {
    const PrimalityConfig cfg;
    std::size_t mismatches = 0;
    for (std::uint64_t n = 0; n < 1000000; ++n)
        mismatches += arith::is_probable_prime(Nat(n), cfg) != oracle::is_prime(n);
    CHECK(mismatches == 0);
}

TEST_CASE("is_probable_prime examples and hard cases") {
    CHECK(arith::is_probable_prime(2));
    CHECK_FALSE(arith::is_probable_prime(1));
    CHECK_FALSE(arith::is_probable_prime(0));
    CHECK(arith::is_probable_prime(5622167) == oracle::is_prime(5622167));
    CHECK(oracle::is_prime(5622167));

    // Strong pseudoprimes to base 2 and Carmichael numbers.
    CHECK_FALSE(arith::is_probable_prime(2047));
    CHECK_FALSE(arith::is_probable_prime(Nat("3215031751")));
    CHECK_FALSE(arith::is_probable_prime(Nat("3825123056546413051")));
    CHECK_FALSE(arith::is_probable_prime(561));
    // Above the deterministic threshold.
    const Nat m89 = (Nat(1) << 89) - 1, m127 = (Nat(1) << 127) - 1;
    CHECK(arith::is_probable_prime(m89));
    CHECK(arith::is_probable_prime(m127));
    CHECK_FALSE(arith::is_probable_prime(m89 * m127));
    CHECK_FALSE(arith::is_probable_prime((Nat(1) << 128) + 1));  // F7 is composite
    // Strong pseudoprime to bases 2..37 (Arnault-style numbers are beyond
    // the ceiling); this one is the first SPRP to the first 12 prime bases.
    const Nat psp("318665857834031151167461");
    PrimalityConfig random_rounds;
    random_rounds.deterministic_below = 2;
    CHECK_FALSE(arith::is_probable_prime(psp, random_rounds));
}

TEST_CASE("seeded bases give reproducible answers") {
    PrimalityConfig a, b;
    a.seed = 1;
    b.seed = 99;
    a.deterministic_below = b.deterministic_below = 2;
    for (std::uint64_t n = 3; n < 2000; n += 2)
        CHECK(arith::is_probable_prime(Nat(n), a) == arith::is_probable_prime(Nat(n), b));
}

TEST_CASE("is_germain") {
    CHECK(arith::is_germain(23));
    CHECK_FALSE(arith::is_germain(13));
    CHECK_FALSE(arith::is_germain(4));
    for (std::uint64_t p = 0; p < 5000; ++p) CHECK(arith::is_germain(Nat(p)) == oracle::is_germain(p));
}

TEST_CASE("eval_poly") {
    CHECK(arith::eval_poly(LinearPoly(2811072, 23), 0) == 23);
    CHECK(arith::eval_poly(LinearPoly(1, 0), 7) == 7);
    CHECK(arith::eval_poly(LinearPoly(2811072, 23), 1) == 2811095);
    CHECK_THROWS_AS(LinearPoly(0, 5), Error);
    CHECK_THROWS_AS(LinearPoly(1, -1), Error);
}

TEST_CASE("fixed_prime_divisors examples") {
    CHECK(fixed({{1, 0}, {1, 1}}) == std::set<Nat>{2});
    CHECK(fixed({{4, 3}, {8, 7}}).empty());
    CHECK(fixed({{2811072, 23}}).empty());
    CHECK(fixed({{2, 2}}) == std::set<Nat>{2});
    CHECK(fixed({{6, 12}}) == std::set<Nat>{2, 3});
    // Three consecutive integers: 2 and 3.
    CHECK(fixed({{1, 0}, {1, 1}, {1, 2}}) == std::set<Nat>{2, 3});
    // gcd(A, B) with a large prime factor.
    const Nat big = (Nat(1) << 89) - 1;
    std::vector<LinearPoly> v{LinearPoly(big * 3, big * 5)};
    CHECK(fixed_prime_divisors(v) == std::set<Nat>{big});

    std::vector<LinearPoly> none;
    CHECK_THROWS_AS(fixed_prime_divisors(none), Error);
}

TEST_CASE("fixed_prime_divisors matches the all-residues oracle (exhaustive, s <= 2, coefficients <= 20)") {
    auto oracle_fixed = [](const std::vector<std::pair<int, int>>& polys) {
        std::set<Nat> out;
        for (int p = 2; p <= 50; ++p) {
            if (!oracle::is_prime(p)) continue;
            bool all = true;
            for (int t = 0; t < p && all; ++t) {
                long long prod = 1;
                for (auto [a, b] : polys) prod = prod * ((a * t + b) % p) % p;
                all = prod == 0;
            }
            if (all) out.insert(Nat(p));
        }
        return out;
    };
    std::vector<std::pair<int, int>> polys;
    for (int a = 1; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b) polys.emplace_back(a, b);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < polys.size(); ++i) {
        for (std::size_t j = i; j < polys.size(); ++j) {
            std::vector<std::pair<int, int>> sys{polys[i], polys[j]};
            std::vector<LinearPoly> lp{LinearPoly(sys[0].first, sys[0].second),
                                       LinearPoly(sys[1].first, sys[1].second)};
            mismatches += fixed_prime_divisors(lp) != oracle_fixed(sys);
        }
        std::vector<LinearPoly> one{LinearPoly(polys[i].first, polys[i].second)};
        mismatches += fixed_prime_divisors(one) != oracle_fixed({polys[i]});
    }
    CHECK(mismatches == 0);
}

TEST_CASE("machine-word overload agrees with the big-integer one") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t s = 1 + rng() % 3;
        std::vector<SmallLinearPoly> small;
        std::vector<LinearPoly> big;
        for (std::size_t k = 0; k < s; ++k) {
            const std::uint64_t a = 1 + rng() % 60, b = rng() % 61;
            small.push_back({a, b});
            big.emplace_back(Nat(a), Nat(b));
        }
        std::set<Nat> converted;
        for (auto p : fixed_prime_divisors(std::span<const SmallLinearPoly>(small))) converted.insert(Nat(p));
        CHECK(converted == fixed_prime_divisors(big));
    }
}

TEST_CASE("Germain progression polynomial has no fixed prime divisor") {
    std::mt19937_64 rng(11);
    int tested = 0;
    while (tested < 200) {
        const Nat a = Nat(1 + rng() % 100000), b = Nat(rng() % 100000);
        if (arith::gcd(b, a) != 1 || arith::gcd(2 * b + 1, a) != 1) continue;
        std::vector<LinearPoly> g{LinearPoly(a, b), LinearPoly(2 * a, 2 * b + 1)};
        CHECK(fixed_prime_divisors(g).empty());
        ++tested;
    }
}

TEST_CASE("factorize") {
    auto f = arith::factorize(Nat(360));
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::pair<Nat, unsigned>{2, 3});
    CHECK(f[1] == std::pair<Nat, unsigned>{3, 2});
    CHECK(f[2] == std::pair<Nat, unsigned>{5, 1});
    const Nat p = (Nat(1) << 61) - 1, q = (Nat(1) << 31) - 1;
    f = arith::factorize(p * q * q);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == std::pair<Nat, unsigned>{q, 2});
    CHECK(f[1] == std::pair<Nat, unsigned>{p, 1});
    CHECK(arith::factorize(Nat(1)).empty());
}
