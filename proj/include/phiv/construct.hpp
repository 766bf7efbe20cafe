#pragma once

// Conditional construction of H consecutive difference-4 totient values
// M+4, ..., M+4H from a family of Sophie Germain primes, realised by bounded
// search and recorded as an independently checkable certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phiv/arith.hpp"

namespace phiv::construct {

enum class Mode { Strict, Relaxed };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);  // "strict" | "relaxed"

// One audited condition. `value` is the gcd (or comparison operand) that was
// computed; `index`/`other` are family slots (1-based), `prime` a small prime.
struct Condition {
    std::string name;
    int index = 0;
    int other = 0;
    unsigned prime = 0;
    Nat value;
    bool ok = false;
};

struct ConditionRecord {
    std::vector<Condition> entries;

    bool all_ok() const;
    const Condition* first_failure() const;
};

// Residue choices that steer the prime search into admissible classes.
struct ResiduePlan {
    struct SmallPrimeChoice {
        int step = 0;            // family slot h
        unsigned prime = 0;      // p in [5, H]
        unsigned residue = 0;    // r_h(p)
        unsigned forbidden = 0;  // number of excluded classes (<= 7)
    };
    struct PairChoice {
        int step = 0;            // new slot h+1
        int earlier = 0;         // slot l < h+1
        Nat modulus;             // p_l (2 p_l + 1)
        Nat residue;             // smallest admissible r_{h+1}(l)
    };
    std::vector<SmallPrimeChoice> small;
    std::vector<PairChoice> pairs;
    std::vector<Nat> seeds;      // s(h): CRT of the small-prime residues, per slot
};

struct GermainFamily {
    int H = 0;
    Mode mode = Mode::Strict;
    std::vector<Nat> primes;
    Nat pi_H = 1;
    std::vector<Nat> n;
    ConditionRecord checks;
    ResiduePlan plan;
};

struct ConstructionState {
    GermainFamily family;
    Nat U;
    Nat r;
    std::vector<LinearPoly> polys;
};

struct SolutionCertificate {
    int H = 0;
    Mode mode = Mode::Strict;
    std::vector<Nat> primes;
    std::vector<Nat> n;
    std::vector<Nat> nu;
    Nat U;
    Nat r;
    Nat t0;
    Nat M;
    std::vector<Nat> q;
    std::vector<Nat> m;
    int error_exponent = 40;

    // FNV-1a over the canonical JSON; identifies the construction.
    std::string digest() const;
    bool operator==(const SolutionCertificate&) const = default;
};

struct Check {
    int index = 0;  // 0 for whole-certificate checks
    std::string name;
    bool ok = false;
    std::string detail;
};

struct VerificationReport {
    std::vector<Check> checks;
    bool decreasing = false;  // m_1 > m_2 > ... > m_H (informational)

    bool ok() const;
    std::vector<Check> failures() const;
};

// Primes below Pi_H = product of primes in [5, H].
std::vector<unsigned> small_primes_of(int H);
Nat pi_of(int H);

// --- Germain primes in a progression ---------------------------------------

// First `count` Germain primes p = b (mod a) with p < search_limit, ascending.
// Throws PreconditionViolated unless gcd(b, a) = gcd(2b+1, a) = 1 and
// BudgetExhausted (with partial results) when fewer are found.
std::vector<Nat> germain_in_ap(const Nat& a, const Nat& b, std::size_t count, const Nat& search_limit,
                               const PrimalityConfig& cfg = {});

// --- Germain family ---------------------------------------------------------

Nat compute_nh(int h, const Nat& p);
Nat compute_nu(int h, const Nat& p);

ConditionRecord check_family_conditions(const std::vector<Nat>& primes, int H, Mode mode,
                                        const PrimalityConfig& cfg = {});

GermainFamily build_family(int H, Mode mode, const Nat& search_limit, const PrimalityConfig& cfg = {});

// --- Assembly, gate, search, certificate -----------------------------------

ConstructionState assemble(const GermainFamily& family);

// Which branch of the divisibility case analysis a fixed prime falls into.
std::string classify_fixed_prime(const ConstructionState& state, const Nat& p);

void gate_no_fixed_divisor(const ConstructionState& state);

struct SearchOptions {
    Nat t_start = 0;
    std::uint64_t budget = 100000;
    unsigned workers = 1;
    std::uint64_t block = 4096;
};

struct SearchResult {
    std::optional<Nat> t0;
    Nat next_t;                  // resumption token: first t not examined
    std::uint64_t examined = 0;
};

// Smallest t in [t_start, t_start + budget) with every F_h(t) a probable
// prime coprime to nu_h. Independent of the worker count.
SearchResult search_t0(const ConstructionState& state, const SearchOptions& opts, const PrimalityConfig& cfg = {});

SolutionCertificate realize(const ConstructionState& state, const Nat& t0, const PrimalityConfig& cfg = {});

// Never throws on bad data; every problem becomes a failed check.
VerificationReport verify_certificate(const SolutionCertificate& cert, const PrimalityConfig& cfg = {});

std::string certificate_json(const SolutionCertificate& cert);
// Throws InvalidArgument describing the first schema problem.
SolutionCertificate certificate_from_json(const std::string& text);

// Error carrying the prime and its case label.
class FixedDivisorError : public Error {
public:
    FixedDivisorError(Nat p, std::string which)
        : Error(ErrorCode::FixedDivisorFound,
                "fixed prime divisor " + phiv::to_string(p) + " (" + which + ")"),
          prime(std::move(p)), case_label(std::move(which)) {}
    Nat prime;
    std::string case_label;
};

// BudgetExhausted with whatever was found before the limit.
class PartialResultError : public Error {
public:
    PartialResultError(const std::string& what, std::vector<Nat> partial)
        : Error(ErrorCode::BudgetExhausted, what), found(std::move(partial)) {}
    std::vector<Nat> found;
};

} // namespace phiv::construct
