// phi: command-line front end over the libphiv C interface.
//
// Exit codes: 0 success, 1 budget exhausted / not found (a resumption token is
// printed), 2 invalid input or other error, 3 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phiv/phiv.h"

namespace {

enum Exit { kOk = 0, kNotFound = 1, kInvalid = 2, kVerifyFailed = 3 };

struct Failure {
    int code;
};

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using ValueSetPtr = std::unique_ptr<phiv_value_set, Deleter<phiv_value_set, phiv_value_set_free>>;
using ReportPtr = std::unique_ptr<phiv_free_report, Deleter<phiv_free_report, phiv_free_report_free>>;
using ConstructionPtr = std::unique_ptr<phiv_construction, Deleter<phiv_construction, phiv_construction_free>>;
using CertificatePtr = std::unique_ptr<phiv_certificate, Deleter<phiv_certificate, phiv_certificate_free>>;
using VerificationPtr = std::unique_ptr<phiv_verification, Deleter<phiv_verification, phiv_verification_free>>;

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { phiv_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

int exit_for(phiv_status s) {
    switch (s) {
    case PHIV_OK: return kOk;
    case PHIV_ERR_BUDGET_EXHAUSTED: return kNotFound;
    case PHIV_ERR_VERIFICATION_FAILED:
    case PHIV_ERR_FIXED_DIVISOR: return kVerifyFailed;
    default: return kInvalid;
    }
}

void check(phiv_status s, const std::string& what) {
    if (s == PHIV_OK) return;
    std::cerr << "phi: " << what << ": " << phiv_status_name(s);
    if (*phiv_last_error()) std::cerr << " (" << phiv_last_error() << ")";
    std::cerr << "\n";
    throw Failure{exit_for(s)};
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) {
        std::cerr << "phi: cannot write " << path << "\n";
        throw Failure{kInvalid};
    }
}

struct Common {
    std::uint64_t limit = 0;
    unsigned workers = 1;
    std::string cache;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_cache = true) {
    cmd->add_option("--limit", c.limit, "Upper end N of the value range")->required()->check(CLI::Range(1ULL, 1ULL << 40));
    cmd->add_option("--workers", c.workers, "Parallel workers")->check(CLI::Range(1u, 1024u));
    if (with_cache) cmd->add_option("--cache", c.cache, "Value-set cache file (read if valid, written otherwise)");
    cmd->add_option("--out", c.out, "Machine-readable output file");
}

ValueSetPtr obtain_value_set(const Common& c) {
    if (!c.cache.empty() && std::filesystem::exists(c.cache)) {
        phiv_value_set* raw = nullptr;
        const phiv_status s = phiv_value_set_load(c.cache.c_str(), &raw);
        if (s == PHIV_OK) {
            ValueSetPtr vs(raw);
            if (phiv_value_set_limit(raw) == c.limit && phiv_value_set_exact(raw)) return vs;
            std::cerr << "phi: cache " << c.cache << " is for another limit; recomputing\n";
        } else {
            std::cerr << "phi: ignoring cache " << c.cache << ": " << phiv_status_name(s) << " ("
                      << phiv_last_error() << ")\n";
        }
    }
    phiv_sieve_options opts;
    phiv_sieve_options_init(&opts);
    opts.workers = c.workers;
    phiv_value_set* raw = nullptr;
    check(phiv_value_set_compute(c.limit, &opts, &raw), "value set");
    ValueSetPtr vs(raw);
    if (!c.cache.empty()) check(phiv_value_set_save(raw, c.cache.c_str()), "saving cache");
    return vs;
}

int run_sieve(const Common& c) {
    phiv_phi_table* raw = nullptr;
    check(phiv_phi_table_create(c.limit, 0, &raw), "phi table");
    std::unique_ptr<phiv_phi_table, Deleter<phiv_phi_table, phiv_phi_table_free>> table(raw);
    std::uint64_t phi_limit = 0;
    check(phiv_phi_table_get(raw, c.limit, &phi_limit), "phi");
    std::cout << "phi sieved for n <= " << c.limit << "; phi(" << c.limit << ") = " << phi_limit << "\n";
    if (!c.out.empty()) {
        std::ostringstream csv;
        csv << "n,phi\n";
        for (std::uint64_t n = 1; n <= c.limit; ++n) {
            std::uint64_t v = 0;
            check(phiv_phi_table_get(raw, n, &v), "phi");
            csv << n << ',' << v << '\n';
        }
        write_file(c.out, csv.str());
    }
    return kOk;
}

int run_values(const Common& c) {
    const auto vs = obtain_value_set(c);
    const std::uint64_t count = phiv_value_set_count(vs.get());
    std::cout << "totient values in [1, " << c.limit << "]: " << count << " (sieved to "
              << phiv_value_set_sieve_bound(vs.get()) << ", exact=" << (phiv_value_set_exact(vs.get()) ? "yes" : "no")
              << ")\n";
    if (!c.out.empty()) {
        nlohmann::ordered_json j;
        j["limit"] = c.limit;
        j["sieve_bound"] = phiv_value_set_sieve_bound(vs.get());
        j["exact"] = phiv_value_set_exact(vs.get()) != 0;
        j["count"] = count;
        write_file(c.out, j.dump(2) + "\n");
    }
    return kOk;
}

int run_windows(const Common& c, const std::vector<std::uint64_t>& Hs) {
    const auto vs = obtain_value_set(c);
    std::vector<phiv_window_profile> profiles;
    for (std::uint64_t H : Hs) {
        phiv_window_profile p{};
        check(phiv_window_profile_compute(vs.get(), H, &p), "window profile");
        std::cout << "H=" << H << " max_count=" << p.max_count << " argmax_x=" << p.argmax_x
                  << " density=" << p.density << "\n";
        profiles.push_back(p);
    }
    if (!c.out.empty()) {
        OwnedString csv;
        check(phiv_window_profiles_csv(profiles.data(), profiles.size(), &csv.p), "csv");
        write_file(c.out, csv.str());
    }
    return kOk;
}

int run_ap(const Common& c, std::uint64_t diff) {
    const auto vs = obtain_value_set(c);
    phiv_ap_report r{};
    check(phiv_longest_ap(vs.get(), diff, &r), "longest progression");
    std::cout << "start=" << r.start << " length=" << r.length << " difference=" << r.difference << "\n";
    if (!c.out.empty()) {
        nlohmann::ordered_json j;
        j["limit"] = c.limit;
        j["start"] = r.start;
        j["difference"] = r.difference;
        j["length"] = r.length;
        write_file(c.out, j.dump(2) + "\n");
    }
    return kOk;
}

int run_free_classes(const Common& c, std::uint64_t m, std::uint64_t m_max, const std::vector<std::uint64_t>& Hs) {
    const auto vs = obtain_value_set(c);
    phiv_free_report* raw = nullptr;
    if (m)
        check(phiv_free_classes(vs.get(), m, &raw), "free classes");
    else
        check(phiv_best_free_classes(vs.get(), m_max, &raw), "free classes");
    ReportPtr rep(raw);
    std::cout << "m=" << phiv_free_report_m(raw) << " modulus=" << 4 * phiv_free_report_m(raw)
              << " free classes (a = 2 mod 4)=" << phiv_free_report_class_count(raw)
              << " occupied=" << phiv_free_report_occupied_count(raw)
              << " epsilon_eff=" << phiv_free_report_epsilon_eff(raw) << "\n";
    int code = kOk;
    for (std::uint64_t H : Hs) {
        int holds = 0;
        check(phiv_coverage_bound_check(vs.get(), H, raw, &holds), "coverage bound");
        std::cout << "coverage bound H=" << H << ": " << (holds ? "holds" : "VIOLATED") << "\n";
        if (!holds) code = kVerifyFailed;
    }
    if (!c.out.empty()) {
        OwnedString json;
        check(phiv_free_report_json(raw, &json.p), "json");
        write_file(c.out, json.str());
    }
    return code;
}

struct ConstructArgs {
    int H = 1;
    std::string mode = "strict";
    std::uint64_t budget = 100000;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    int error_exponent = 40;
    std::string search_limit = "1000000000000000000000000000000";
    std::string resume_from = "0";
    std::string out;
};

int run_construct(const ConstructArgs& a) {
    phiv_primality cfg;
    phiv_primality_init(&cfg);
    cfg.error_exponent = a.error_exponent;
    cfg.seed = a.seed;
    const phiv_mode mode = a.mode == "strict" ? PHIV_MODE_STRICT : PHIV_MODE_RELAXED;

    phiv_construction* raw = nullptr;
    check(phiv_construction_build(a.H, mode, a.search_limit.c_str(), &cfg, &raw), "building family");
    ConstructionPtr c(raw);
    {
        OwnedString summary;
        check(phiv_construction_json(raw, &summary.p), "summary");
        const auto j = nlohmann::json::parse(summary.str());
        std::cout << "family (" << a.mode << ", H=" << a.H << "):";
        for (const auto& p : j["primes"]) std::cout << ' ' << p.get<std::string>();
        std::cout << "\nU = " << j["U"].get<std::string>() << "\nr = " << j["r"].get<std::string>() << "\n";
        int h = 1;
        for (const auto& f : j["polys"])
            std::cout << "F_" << h++ << "(t) = " << f["lead"].get<std::string>() << "*t + "
                      << f["constant"].get<std::string>() << "\n";
    }
    check(phiv_construction_gate(raw), "fixed-divisor gate");
    std::cout << "no fixed prime divisor\n";

    OwnedString t0, next;
    const phiv_status s =
        phiv_construction_search(raw, a.resume_from.c_str(), a.budget, a.workers, &t0.p, &next.p);
    if (s == PHIV_ERR_BUDGET_EXHAUSTED) {
        std::cout << "budget exhausted; continue with --resume-from " << next.str() << "\n";
        return kNotFound;
    }
    check(s, "search");
    std::cout << "t0 = " << t0.str() << "\n";

    phiv_certificate* cert_raw = nullptr;
    check(phiv_construction_realize(raw, t0.p, &cert_raw), "realize");
    CertificatePtr cert(cert_raw);
    phiv_verification* ver_raw = nullptr;
    const phiv_status vs = phiv_certificate_verify(cert_raw, &cfg, &ver_raw);
    VerificationPtr ver(ver_raw);
    check(vs, "self-verification");
    std::cout << "certificate verified for h = 1.." << a.H << "\n";
    if (!a.out.empty()) {
        OwnedString json;
        check(phiv_certificate_json(cert_raw, &json.p), "json");
        write_file(a.out, json.str());
    }
    return kOk;
}

int run_verify(const std::string& path, int error_exponent, std::uint64_t seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "phi: cannot read " << path << "\n";
        return kInvalid;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    phiv_certificate* raw = nullptr;
    if (phiv_certificate_parse(buf.str().c_str(), &raw) != PHIV_OK) {
        std::cout << "certificate rejected: " << phiv_last_error() << "\n";
        return kVerifyFailed;
    }
    CertificatePtr cert(raw);
    phiv_primality cfg;
    phiv_primality_init(&cfg);
    cfg.error_exponent = error_exponent;
    cfg.seed = seed;
    phiv_verification* ver_raw = nullptr;
    const phiv_status s = phiv_certificate_verify(raw, &cfg, &ver_raw);
    VerificationPtr ver(ver_raw);
    if (!ver) return exit_for(s);

    const int H = phiv_certificate_H(raw);
    std::vector<bool> index_ok(H + 1, true);
    for (std::size_t i = 0; i < phiv_verification_count(ver_raw); ++i) {
        int index = 0, ok = 0;
        const char *name = nullptr, *detail = nullptr;
        phiv_verification_check(ver_raw, i, &index, &name, &ok, &detail);
        if (!ok) {
            std::cout << "FAILED " << name << ": " << detail << "\n";
            if (index >= 0 && index <= H) index_ok[index] = false;
        }
    }
    for (int h = 1; h <= H; ++h)
        if (index_ok[0] && index_ok[h])
            std::cout << "φ(m_" << h << ") = M+" << 4 * h << " verified\n";
    std::cout << "m_h decreasing: " << (phiv_verification_decreasing(ver_raw) ? "yes" : "no") << "\n";
    return s == PHIV_OK ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Totient value sets and difference-4 runs of totient values"};
    app.require_subcommand(1);

    Common sieve_c, values_c, windows_c, ap_c, free_c;
    std::vector<std::uint64_t> window_H{16}, coverage_H;
    std::uint64_t diff = 4, m = 0, m_max = 500;
    ConstructArgs cons;
    std::string cert_path;
    int verify_exponent = 40;
    std::uint64_t verify_seed = 0;

    auto* sieve = app.add_subcommand("sieve", "Tabulate phi(n) for n <= limit");
    add_common(sieve, sieve_c, false);
    auto* values = app.add_subcommand("values", "Exact set of totient values up to limit");
    add_common(values, values_c);
    auto* windows = app.add_subcommand("windows", "Maximal window counts |V n (x, x+H]|");
    add_common(windows, windows_c);
    windows->add_option("--H", window_H, "Window length(s)")->delimiter(',')->check(CLI::PositiveNumber);
    auto* ap = app.add_subcommand("ap", "Longest arithmetic progression of totient values");
    add_common(ap, ap_c);
    ap->add_option("--diff", diff, "Common difference")->check(CLI::PositiveNumber);
    auto* fc = app.add_subcommand("free-classes", "Residue classes mod 4m free of totient values");
    add_common(fc, free_c);
    fc->add_option("--m", m, "Fixed m (otherwise the best m <= --m-max)")->check(CLI::PositiveNumber);
    fc->add_option("--m-max", m_max, "Largest m scanned")->check(CLI::PositiveNumber);
    fc->add_option("--check-H", coverage_H, "Window lengths for the coverage bound check")
        ->delimiter(',')->check(CLI::PositiveNumber);

    auto* construct = app.add_subcommand("construct", "Build a certificate for phi(m_h) = M + 4h, h = 1..H");
    construct->add_option("--H", cons.H, "Run length H")->check(CLI::Range(1, 64));
    construct->add_option("--mode", cons.mode, "Family mode")->check(CLI::IsMember({"strict", "relaxed"}));
    construct->add_option("--budget", cons.budget, "Number of t values to examine")->check(CLI::PositiveNumber);
    construct->add_option("--workers", cons.workers, "Parallel search workers")->check(CLI::Range(1u, 1024u));
    construct->add_option("--seed", cons.seed, "Seed for probabilistic primality bases");
    construct->add_option("--error-exponent", cons.error_exponent, "Miller-Rabin rounds above 2^64")
        ->check(CLI::Range(1, 1000));
    construct->add_option("--search-limit", cons.search_limit, "Upper limit for the Germain prime search");
    construct->add_option("--resume-from", cons.resume_from, "First t to examine");
    construct->add_option("--out", cons.out, "Certificate JSON output");

    auto* verify = app.add_subcommand("verify", "Re-check a certificate");
    verify->add_option("certificate", cert_path, "Certificate JSON file")->required();
    verify->add_option("--error-exponent", verify_exponent, "Miller-Rabin rounds above 2^64")
        ->check(CLI::Range(1, 1000));
    verify->add_option("--seed", verify_seed, "Seed for probabilistic primality bases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*sieve) return run_sieve(sieve_c);
        if (*values) return run_values(values_c);
        if (*windows) return run_windows(windows_c, window_H);
        if (*ap) return run_ap(ap_c, diff);
        if (*fc) return run_free_classes(free_c, m, m_max, coverage_H);
        if (*construct) return run_construct(cons);
        if (*verify) return run_verify(cert_path, verify_exponent, verify_seed);
    } catch (const Failure& f) {
        return f.code;
    }
    return kInvalid;
}
