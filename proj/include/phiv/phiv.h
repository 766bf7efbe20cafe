/*
 * C interface to libphiv: totient value sets, their local structure, and the
 * Germain-prime construction of difference-4 runs of totient values.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returning phiv_status leaves a message retrievable with
 * phiv_last_error() on failure (thread-local). Big integers cross the
 * boundary as decimal strings; strings returned through char** are owned by
 * the caller and released with phiv_string_free().
 */
#ifndef PHIV_PHIV_H
#define PHIV_PHIV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define PHIV_API __declspec(dllexport)
#else
#  define PHIV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phiv_status {
    PHIV_OK = 0,
    PHIV_ERR_INVALID_ARGUMENT = 1,
    PHIV_ERR_NON_COPRIME_MODULI = 2,
    PHIV_ERR_EMPTY_INPUT = 3,
    PHIV_ERR_RESOURCE_LIMIT = 4,
    PHIV_ERR_CORRUPT_CACHE = 5,
    PHIV_ERR_VERSION_MISMATCH = 6,
    PHIV_ERR_WINDOW_TOO_LARGE = 7,
    PHIV_ERR_MODULUS_TOO_LARGE = 8,
    PHIV_ERR_MISMATCHED_INPUTS = 9,
    PHIV_ERR_PRECONDITION = 10,
    PHIV_ERR_BUDGET_EXHAUSTED = 11,
    PHIV_ERR_INFEASIBLE_RESIDUE_PLAN = 12,
    PHIV_ERR_FIXED_DIVISOR = 13,
    PHIV_ERR_ARITHMETIC_MISMATCH = 14,
    PHIV_ERR_IO = 15,
    PHIV_ERR_VERIFICATION_FAILED = 16,
    PHIV_ERR_INTERNAL = 99
} phiv_status;

PHIV_API const char* phiv_status_name(phiv_status status);
PHIV_API const char* phiv_last_error(void);
PHIV_API void phiv_string_free(char* s);

/* ---- phi table and preimage bounds ------------------------------------- */

typedef struct phiv_phi_table phiv_phi_table;

PHIV_API phiv_status phiv_phi_table_create(uint64_t limit, uint64_t memory_budget_bytes, phiv_phi_table** out);
PHIV_API uint64_t phiv_phi_table_limit(const phiv_phi_table* table);
PHIV_API phiv_status phiv_phi_table_get(const phiv_phi_table* table, uint64_t n, uint64_t* phi);
PHIV_API void phiv_phi_table_free(phiv_phi_table* table);

/* Smallest N' such that phi(n) > n_max for all n > N'. */
PHIV_API phiv_status phiv_preimage_bound(uint64_t n_max, uint64_t* out);
/* Analytic (unscanned) bound with the same guarantee. */
PHIV_API uint64_t phiv_safe_preimage_bound(uint64_t n_max);

/* ---- value sets --------------------------------------------------------- */

typedef struct phiv_value_set phiv_value_set;

typedef struct phiv_sieve_options {
    uint32_t workers;
    int record_witnesses;
    uint64_t memory_budget_bytes;
} phiv_sieve_options;

PHIV_API void phiv_sieve_options_init(phiv_sieve_options* opts);
PHIV_API phiv_status phiv_value_set_compute(uint64_t limit, const phiv_sieve_options* opts, phiv_value_set** out);
PHIV_API phiv_status phiv_value_set_load(const char* path, phiv_value_set** out);
PHIV_API phiv_status phiv_value_set_save(const phiv_value_set* vs, const char* path);
PHIV_API uint64_t phiv_value_set_limit(const phiv_value_set* vs);
PHIV_API uint64_t phiv_value_set_sieve_bound(const phiv_value_set* vs);
PHIV_API int phiv_value_set_exact(const phiv_value_set* vs);
PHIV_API uint64_t phiv_value_set_count(const phiv_value_set* vs);
PHIV_API int phiv_value_set_contains(const phiv_value_set* vs, uint64_t v);
/* Smallest preimage of v; requires record_witnesses. */
PHIV_API phiv_status phiv_value_set_witness(const phiv_value_set* vs, uint64_t v, uint64_t* n);
PHIV_API int phiv_value_set_equal(const phiv_value_set* a, const phiv_value_set* b);
PHIV_API void phiv_value_set_free(phiv_value_set* vs);

/* ---- structure scans ---------------------------------------------------- */

typedef struct phiv_window_profile {
    uint64_t H;
    uint64_t scan_limit;
    uint64_t max_count;
    uint64_t argmax_x;
    double density;
} phiv_window_profile;

typedef struct phiv_ap_report {
    uint64_t start;
    uint64_t difference;
    uint64_t length;
} phiv_ap_report;

typedef struct phiv_free_report phiv_free_report;

PHIV_API phiv_status phiv_window_profile_compute(const phiv_value_set* vs, uint64_t H, phiv_window_profile* out);
/* CSV with header "H,max_count,argmax_x,density". */
PHIV_API phiv_status phiv_window_profiles_csv(const phiv_window_profile* profiles, size_t count, char** out);
PHIV_API phiv_status phiv_longest_ap(const phiv_value_set* vs, uint64_t difference, phiv_ap_report* out);

PHIV_API phiv_status phiv_free_classes(const phiv_value_set* vs, uint64_t m, phiv_free_report** out);
/* Scans m = 1..m_max and keeps the m with the largest empty-class fraction. */
PHIV_API phiv_status phiv_best_free_classes(const phiv_value_set* vs, uint64_t m_max, phiv_free_report** out);
PHIV_API uint64_t phiv_free_report_m(const phiv_free_report* r);
PHIV_API uint64_t phiv_free_report_occupied_count(const phiv_free_report* r);
PHIV_API size_t phiv_free_report_class_count(const phiv_free_report* r);
PHIV_API uint64_t phiv_free_report_class(const phiv_free_report* r, size_t i);
PHIV_API double phiv_free_report_epsilon_eff(const phiv_free_report* r);
PHIV_API phiv_status phiv_free_report_json(const phiv_free_report* r, char** out);
PHIV_API void phiv_free_report_free(phiv_free_report* r);

/* *holds = 1 iff every window (x, x+H] obeys the residue-class counting bound. */
PHIV_API phiv_status phiv_coverage_bound_check(const phiv_value_set* vs, uint64_t H, const phiv_free_report* r,
                                               int* holds);

/* ---- construction ------------------------------------------------------- */

typedef enum phiv_mode { PHIV_MODE_STRICT = 0, PHIV_MODE_RELAXED = 1 } phiv_mode;

typedef struct phiv_primality {
    int error_exponent; /* >= 1; false-accept probability <= 4^-error_exponent */
    uint64_t seed;
} phiv_primality;

typedef struct phiv_construction phiv_construction;
typedef struct phiv_certificate phiv_certificate;
typedef struct phiv_verification phiv_verification;

PHIV_API void phiv_primality_init(phiv_primality* cfg);

/* Builds the Germain family (searching below search_limit) and assembles the
 * polynomials. PHIV_ERR_BUDGET_EXHAUSTED if the family search runs out. */
PHIV_API phiv_status phiv_construction_build(int H, phiv_mode mode, const char* search_limit,
                                             const phiv_primality* cfg, phiv_construction** out);
/* Same from explicit primes; PHIV_ERR_PRECONDITION if the family audit fails. */
PHIV_API phiv_status phiv_construction_from_primes(int H, phiv_mode mode, const char* const* primes,
                                                   const phiv_primality* cfg, phiv_construction** out);
/* JSON summary: H, mode, primes, n, U, r, polys[{lead, constant}]. */
PHIV_API phiv_status phiv_construction_json(const phiv_construction* c, char** out);
/* PHIV_ERR_FIXED_DIVISOR if the polynomial product has a fixed prime divisor. */
PHIV_API phiv_status phiv_construction_gate(const phiv_construction* c);
/* Smallest accepted t in [t_start, t_start + budget). On success *t0 is set;
 * on PHIV_ERR_BUDGET_EXHAUSTED only *next_t (resumption token) is set. */
PHIV_API phiv_status phiv_construction_search(const phiv_construction* c, const char* t_start, uint64_t budget,
                                              uint32_t workers, char** t0, char** next_t);
PHIV_API phiv_status phiv_construction_realize(const phiv_construction* c, const char* t0,
                                               phiv_certificate** out);
PHIV_API void phiv_construction_free(phiv_construction* c);

PHIV_API phiv_status phiv_certificate_parse(const char* json, phiv_certificate** out);
PHIV_API phiv_status phiv_certificate_json(const phiv_certificate* cert, char** out);
PHIV_API int phiv_certificate_H(const phiv_certificate* cert);
PHIV_API void phiv_certificate_free(phiv_certificate* cert);

/* PHIV_OK when every check passes, PHIV_ERR_VERIFICATION_FAILED otherwise;
 * the report is produced in both cases. */
PHIV_API phiv_status phiv_certificate_verify(const phiv_certificate* cert, const phiv_primality* cfg,
                                             phiv_verification** report);
PHIV_API size_t phiv_verification_count(const phiv_verification* v);
/* Borrowed strings, valid until the report is freed. */
PHIV_API phiv_status phiv_verification_check(const phiv_verification* v, size_t i, int* index, const char** name,
                                             int* ok, const char** detail);
PHIV_API int phiv_verification_decreasing(const phiv_verification* v);
PHIV_API void phiv_verification_free(phiv_verification* v);

#ifdef __cplusplus
}
#endif

#endif /* PHIV_PHIV_H */
