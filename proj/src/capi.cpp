#include "phiv/phiv.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "phiv/construct.hpp"
#include "phiv/structure_scan.hpp"
#include "phiv/totient_sieve.hpp"

struct phiv_phi_table {
    phiv::totient::PhiTable table;
};
struct phiv_value_set {
    phiv::totient::ValueSet set;
};
struct phiv_free_report {
    phiv::scan::FreeClassReport report;
};
struct phiv_construction {
    phiv::construct::ConstructionState state;
    phiv::PrimalityConfig cfg;
};
struct phiv_certificate {
    phiv::construct::SolutionCertificate cert;
};
struct phiv_verification {
    phiv::construct::VerificationReport report;
};

namespace {

thread_local std::string g_last_error;

phiv_status map(phiv::ErrorCode code) {
    using phiv::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return PHIV_ERR_INVALID_ARGUMENT;
    case ErrorCode::NonCoprimeModuli: return PHIV_ERR_NON_COPRIME_MODULI;
    case ErrorCode::EmptyInput: return PHIV_ERR_EMPTY_INPUT;
    case ErrorCode::ResourceLimit: return PHIV_ERR_RESOURCE_LIMIT;
    case ErrorCode::CorruptCache: return PHIV_ERR_CORRUPT_CACHE;
    case ErrorCode::VersionMismatch: return PHIV_ERR_VERSION_MISMATCH;
    case ErrorCode::WindowTooLarge: return PHIV_ERR_WINDOW_TOO_LARGE;
    case ErrorCode::ModulusTooLarge: return PHIV_ERR_MODULUS_TOO_LARGE;
    case ErrorCode::MismatchedInputs: return PHIV_ERR_MISMATCHED_INPUTS;
    case ErrorCode::PreconditionViolated: return PHIV_ERR_PRECONDITION;
    case ErrorCode::BudgetExhausted: return PHIV_ERR_BUDGET_EXHAUSTED;
    case ErrorCode::InfeasibleResiduePlan: return PHIV_ERR_INFEASIBLE_RESIDUE_PLAN;
    case ErrorCode::FixedDivisorFound: return PHIV_ERR_FIXED_DIVISOR;
    case ErrorCode::ArithmeticMismatch: return PHIV_ERR_ARITHMETIC_MISMATCH;
    case ErrorCode::Io: return PHIV_ERR_IO;
    }
    return PHIV_ERR_INTERNAL;
}

phiv_status fail(phiv_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class Fn>
phiv_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const phiv::Error& e) {
        return fail(map(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(PHIV_ERR_RESOURCE_LIMIT, "out of memory");
    } catch (const std::exception& e) {
        return fail(PHIV_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PHIV_ERR_INTERNAL, "unknown exception");
    }
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class T>
void require(const T* p, const char* what) {
    if (!p) throw phiv::Error(phiv::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

phiv::PrimalityConfig to_cfg(const phiv_primality* cfg) {
    phiv::PrimalityConfig out;
    if (cfg) {
        if (cfg->error_exponent < 1)
            throw phiv::Error(phiv::ErrorCode::InvalidArgument, "error_exponent must be >= 1");
        out.error_exponent = cfg->error_exponent;
        out.seed = cfg->seed;
    }
    return out;
}

phiv::construct::Mode to_mode(phiv_mode m) {
    switch (m) {
    case PHIV_MODE_STRICT: return phiv::construct::Mode::Strict;
    case PHIV_MODE_RELAXED: return phiv::construct::Mode::Relaxed;
    }
    throw phiv::Error(phiv::ErrorCode::InvalidArgument, "unknown mode");
}

} // namespace

extern "C" {

const char* phiv_status_name(phiv_status status) {
    switch (status) {
    case PHIV_OK: return "ok";
    case PHIV_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PHIV_ERR_NON_COPRIME_MODULI: return "non-coprime moduli";
    case PHIV_ERR_EMPTY_INPUT: return "empty input";
    case PHIV_ERR_RESOURCE_LIMIT: return "resource limit";
    case PHIV_ERR_CORRUPT_CACHE: return "corrupt cache";
    case PHIV_ERR_VERSION_MISMATCH: return "cache version mismatch";
    case PHIV_ERR_WINDOW_TOO_LARGE: return "window too large";
    case PHIV_ERR_MODULUS_TOO_LARGE: return "modulus too large";
    case PHIV_ERR_MISMATCHED_INPUTS: return "mismatched inputs";
    case PHIV_ERR_PRECONDITION: return "precondition violated";
    case PHIV_ERR_BUDGET_EXHAUSTED: return "budget exhausted";
    case PHIV_ERR_INFEASIBLE_RESIDUE_PLAN: return "infeasible residue plan";
    case PHIV_ERR_FIXED_DIVISOR: return "fixed prime divisor";
    case PHIV_ERR_ARITHMETIC_MISMATCH: return "arithmetic mismatch";
    case PHIV_ERR_IO: return "i/o error";
    case PHIV_ERR_VERIFICATION_FAILED: return "verification failed";
    case PHIV_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* phiv_last_error(void) { return g_last_error.c_str(); }

void phiv_string_free(char* s) { std::free(s); }

phiv_status phiv_phi_table_create(uint64_t limit, uint64_t memory_budget_bytes, phiv_phi_table** out) {
    return guarded([&] {
        require(out, "out");
        phiv::totient::SieveOptions opts;
        if (memory_budget_bytes) opts.memory_budget_bytes = memory_budget_bytes;
        *out = new phiv_phi_table{phiv::totient::sieve_phi(limit, opts)};
        return PHIV_OK;
    });
}

uint64_t phiv_phi_table_limit(const phiv_phi_table* table) { return table ? table->table.limit() : 0; }

phiv_status phiv_phi_table_get(const phiv_phi_table* table, uint64_t n, uint64_t* phi) {
    return guarded([&] {
        require(table, "table");
        require(phi, "phi");
        if (n < 1 || n > table->table.limit())
            return fail(PHIV_ERR_INVALID_ARGUMENT, "n outside [1, limit]");
        *phi = table->table[n];
        return PHIV_OK;
    });
}

void phiv_phi_table_free(phiv_phi_table* table) { delete table; }

phiv_status phiv_preimage_bound(uint64_t n_max, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = phiv::totient::preimage_bound(n_max);
        return PHIV_OK;
    });
}

uint64_t phiv_safe_preimage_bound(uint64_t n_max) { return phiv::totient::safe_preimage_bound(n_max); }

void phiv_sieve_options_init(phiv_sieve_options* opts) {
    if (!opts) return;
    const phiv::totient::SieveOptions d;
    opts->workers = d.workers;
    opts->record_witnesses = d.record_witnesses;
    opts->memory_budget_bytes = d.memory_budget_bytes;
}

phiv_status phiv_value_set_compute(uint64_t limit, const phiv_sieve_options* opts, phiv_value_set** out) {
    return guarded([&] {
        require(out, "out");
        phiv::totient::SieveOptions o;
        if (opts) {
            o.workers = opts->workers ? opts->workers : 1;
            o.record_witnesses = opts->record_witnesses != 0;
            if (opts->memory_budget_bytes) o.memory_budget_bytes = opts->memory_budget_bytes;
        }
        *out = new phiv_value_set{phiv::totient::value_set(limit, o)};
        return PHIV_OK;
    });
}

phiv_status phiv_value_set_load(const char* path, phiv_value_set** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new phiv_value_set{phiv::totient::load_cache(path)};
        return PHIV_OK;
    });
}

phiv_status phiv_value_set_save(const phiv_value_set* vs, const char* path) {
    return guarded([&] {
        require(vs, "value set");
        require(path, "path");
        phiv::totient::save_cache(vs->set, path);
        return PHIV_OK;
    });
}

uint64_t phiv_value_set_limit(const phiv_value_set* vs) { return vs ? vs->set.limit() : 0; }
uint64_t phiv_value_set_sieve_bound(const phiv_value_set* vs) { return vs ? vs->set.sieve_bound() : 0; }
int phiv_value_set_exact(const phiv_value_set* vs) { return vs && vs->set.exact(); }
uint64_t phiv_value_set_count(const phiv_value_set* vs) { return vs ? vs->set.count() : 0; }
int phiv_value_set_contains(const phiv_value_set* vs, uint64_t v) { return vs && vs->set.contains(v); }

phiv_status phiv_value_set_witness(const phiv_value_set* vs, uint64_t v, uint64_t* n) {
    return guarded([&] {
        require(vs, "value set");
        require(n, "n");
        if (!vs->set.has_witnesses()) return fail(PHIV_ERR_PRECONDITION, "value set has no witnesses");
        const auto w = vs->set.witness(v);
        if (!w) return fail(PHIV_ERR_INVALID_ARGUMENT, std::to_string(v) + " is not a member");
        *n = *w;
        return PHIV_OK;
    });
}

int phiv_value_set_equal(const phiv_value_set* a, const phiv_value_set* b) {
    return a && b && a->set == b->set;
}

void phiv_value_set_free(phiv_value_set* vs) { delete vs; }

phiv_status phiv_window_profile_compute(const phiv_value_set* vs, uint64_t H, phiv_window_profile* out) {
    return guarded([&] {
        require(vs, "value set");
        require(out, "out");
        const auto p = phiv::scan::window_profile(vs->set, H);
        *out = {p.H, p.scan_limit, p.max_count, p.argmax_x, p.density()};
        return PHIV_OK;
    });
}

phiv_status phiv_window_profiles_csv(const phiv_window_profile* profiles, size_t count, char** out) {
    return guarded([&] {
        require(out, "out");
        if (count) require(profiles, "profiles");
        std::vector<phiv::scan::WindowProfile> v;
        for (size_t i = 0; i < count; ++i)
            v.push_back({profiles[i].H, profiles[i].scan_limit, profiles[i].max_count, profiles[i].argmax_x});
        *out = dup(phiv::scan::profile_csv(v));
        return PHIV_OK;
    });
}

phiv_status phiv_longest_ap(const phiv_value_set* vs, uint64_t difference, phiv_ap_report* out) {
    return guarded([&] {
        require(vs, "value set");
        require(out, "out");
        const auto r = phiv::scan::longest_ap(vs->set, difference);
        *out = {r.start, r.difference, r.length};
        return PHIV_OK;
    });
}

phiv_status phiv_free_classes(const phiv_value_set* vs, uint64_t m, phiv_free_report** out) {
    return guarded([&] {
        require(vs, "value set");
        require(out, "out");
        *out = new phiv_free_report{phiv::scan::free_classes(vs->set, m)};
        return PHIV_OK;
    });
}

phiv_status phiv_best_free_classes(const phiv_value_set* vs, uint64_t m_max, phiv_free_report** out) {
    return guarded([&] {
        require(vs, "value set");
        require(out, "out");
        *out = new phiv_free_report{phiv::scan::best_free_classes(vs->set, m_max)};
        return PHIV_OK;
    });
}

uint64_t phiv_free_report_m(const phiv_free_report* r) { return r ? r->report.m : 0; }
uint64_t phiv_free_report_occupied_count(const phiv_free_report* r) { return r ? r->report.occupied_count : 0; }
size_t phiv_free_report_class_count(const phiv_free_report* r) { return r ? r->report.free_classes.size() : 0; }
uint64_t phiv_free_report_class(const phiv_free_report* r, size_t i) {
    return r && i < r->report.free_classes.size() ? r->report.free_classes[i] : 0;
}
double phiv_free_report_epsilon_eff(const phiv_free_report* r) { return r ? r->report.epsilon_eff() : 0.0; }

phiv_status phiv_free_report_json(const phiv_free_report* r, char** out) {
    return guarded([&] {
        require(r, "report");
        require(out, "out");
        *out = dup(phiv::scan::free_class_json(r->report));
        return PHIV_OK;
    });
}

void phiv_free_report_free(phiv_free_report* r) { delete r; }

phiv_status phiv_coverage_bound_check(const phiv_value_set* vs, uint64_t H, const phiv_free_report* r, int* holds) {
    return guarded([&] {
        require(vs, "value set");
        require(r, "report");
        require(holds, "holds");
        *holds = phiv::scan::coverage_bound_check(vs->set, H, r->report);
        return PHIV_OK;
    });
}

void phiv_primality_init(phiv_primality* cfg) {
    if (!cfg) return;
    const phiv::PrimalityConfig d;
    cfg->error_exponent = d.error_exponent;
    cfg->seed = d.seed;
}

phiv_status phiv_construction_build(int H, phiv_mode mode, const char* search_limit, const phiv_primality* cfg,
                                    phiv_construction** out) {
    return guarded([&] {
        require(search_limit, "search_limit");
        require(out, "out");
        const auto c = to_cfg(cfg);
        auto fam = phiv::construct::build_family(H, to_mode(mode), phiv::nat_from_string(search_limit), c);
        *out = new phiv_construction{phiv::construct::assemble(fam), c};
        return PHIV_OK;
    });
}

phiv_status phiv_construction_from_primes(int H, phiv_mode mode, const char* const* primes,
                                          const phiv_primality* cfg, phiv_construction** out) {
    return guarded([&] {
        require(primes, "primes");
        require(out, "out");
        if (H < 1) return fail(PHIV_ERR_INVALID_ARGUMENT, "H must be >= 1");
        const auto c = to_cfg(cfg);
        phiv::construct::GermainFamily fam;
        fam.H = H;
        fam.mode = to_mode(mode);
        fam.pi_H = phiv::construct::pi_of(H);
        for (int h = 1; h <= H; ++h) {
            require(primes[h - 1], "prime");
            fam.primes.push_back(phiv::nat_from_string(primes[h - 1]));
            fam.n.push_back(phiv::construct::compute_nh(h, fam.primes.back()));
        }
        fam.checks = phiv::construct::check_family_conditions(fam.primes, H, fam.mode, c);
        if (const auto* bad = fam.checks.first_failure())
            return fail(PHIV_ERR_PRECONDITION, "family condition '" + bad->name + "' fails at slot " +
                                                   std::to_string(bad->index));
        *out = new phiv_construction{phiv::construct::assemble(fam), c};
        return PHIV_OK;
    });
}

phiv_status phiv_construction_json(const phiv_construction* c, char** out) {
    return guarded([&] {
        require(c, "construction");
        require(out, "out");
        const auto& st = c->state;
        auto strs = [](const std::vector<phiv::Nat>& v) {
            auto a = nlohmann::ordered_json::array();
            for (const auto& x : v) a.push_back(phiv::to_string(x));
            return a;
        };
        nlohmann::ordered_json j;
        j["H"] = st.family.H;
        j["mode"] = phiv::construct::to_string(st.family.mode);
        j["primes"] = strs(st.family.primes);
        j["n"] = strs(st.family.n);
        j["U"] = phiv::to_string(st.U);
        j["r"] = phiv::to_string(st.r);
        auto polys = nlohmann::ordered_json::array();
        for (const auto& f : st.polys)
            polys.push_back({{"lead", phiv::to_string(f.lead)}, {"constant", phiv::to_string(f.constant)}});
        j["polys"] = polys;
        *out = dup(j.dump(2) + "\n");
        return PHIV_OK;
    });
}

phiv_status phiv_construction_gate(const phiv_construction* c) {
    return guarded([&] {
        require(c, "construction");
        phiv::construct::gate_no_fixed_divisor(c->state);
        return PHIV_OK;
    });
}

phiv_status phiv_construction_search(const phiv_construction* c, const char* t_start, uint64_t budget,
                                     uint32_t workers, char** t0, char** next_t) {
    return guarded([&] {
        require(c, "construction");
        require(t_start, "t_start");
        require(t0, "t0");
        require(next_t, "next_t");
        *t0 = nullptr;
        *next_t = nullptr;
        phiv::construct::SearchOptions opts;
        opts.t_start = phiv::nat_from_string(t_start);
        opts.budget = budget;
        opts.workers = workers ? workers : 1;
        const auto res = phiv::construct::search_t0(c->state, opts, c->cfg);
        *next_t = dup(phiv::to_string(res.next_t));
        if (!res.t0)
            return fail(PHIV_ERR_BUDGET_EXHAUSTED, "no simultaneous prime below t = " + phiv::to_string(res.next_t));
        *t0 = dup(phiv::to_string(*res.t0));
        return PHIV_OK;
    });
}

phiv_status phiv_construction_realize(const phiv_construction* c, const char* t0, phiv_certificate** out) {
    return guarded([&] {
        require(c, "construction");
        require(t0, "t0");
        require(out, "out");
        *out = new phiv_certificate{phiv::construct::realize(c->state, phiv::nat_from_string(t0), c->cfg)};
        return PHIV_OK;
    });
}

void phiv_construction_free(phiv_construction* c) { delete c; }

phiv_status phiv_certificate_parse(const char* json, phiv_certificate** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        *out = new phiv_certificate{phiv::construct::certificate_from_json(json)};
        return PHIV_OK;
    });
}

phiv_status phiv_certificate_json(const phiv_certificate* cert, char** out) {
    return guarded([&] {
        require(cert, "certificate");
        require(out, "out");
        *out = dup(phiv::construct::certificate_json(cert->cert));
        return PHIV_OK;
    });
}

int phiv_certificate_H(const phiv_certificate* cert) { return cert ? cert->cert.H : 0; }

void phiv_certificate_free(phiv_certificate* cert) { delete cert; }

phiv_status phiv_certificate_verify(const phiv_certificate* cert, const phiv_primality* cfg,
                                    phiv_verification** report) {
    return guarded([&] {
        require(cert, "certificate");
        require(report, "report");
        *report = new phiv_verification{phiv::construct::verify_certificate(cert->cert, to_cfg(cfg))};
        if (!(*report)->report.ok()) return fail(PHIV_ERR_VERIFICATION_FAILED, "certificate failed verification");
        return PHIV_OK;
    });
}

size_t phiv_verification_count(const phiv_verification* v) { return v ? v->report.checks.size() : 0; }

phiv_status phiv_verification_check(const phiv_verification* v, size_t i, int* index, const char** name, int* ok,
                                    const char** detail) {
    return guarded([&] {
        require(v, "report");
        if (i >= v->report.checks.size()) return fail(PHIV_ERR_INVALID_ARGUMENT, "check index out of range");
        const auto& c = v->report.checks[i];
        if (index) *index = c.index;
        if (name) *name = c.name.c_str();
        if (ok) *ok = c.ok;
        if (detail) *detail = c.detail.c_str();
        return PHIV_OK;
    });
}

int phiv_verification_decreasing(const phiv_verification* v) { return v && v->report.decreasing; }

void phiv_verification_free(phiv_verification* v) { delete v; }

} // extern "C"
