// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phiv/phiv.h"

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    phiv_string_free(s);
    return out;
}

std::vector<unsigned char> read_bytes(const char* path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Bitwise reflected CRC-32 (polynomial 0xEDB88320).
std::uint32_t crc32_ref(const unsigned char* p, std::size_t n) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) {
        c ^= p[i];
        for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
    }
    return ~c;
}

void put_le(std::vector<unsigned char>& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

} // namespace

TEST_CASE("status names and errors") {
    CHECK(std::string(phiv_status_name(PHIV_OK)) == "ok");
    CHECK(std::string(phiv_status_name(PHIV_ERR_CORRUPT_CACHE)) != "ok");
    phiv_phi_table* t = nullptr;
    CHECK(phiv_phi_table_create(0, 0, &t) == PHIV_ERR_INVALID_ARGUMENT);
    CHECK(t == nullptr);
    CHECK(std::strlen(phiv_last_error()) > 0);
    CHECK(phiv_phi_table_create(10, 0, nullptr) == PHIV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("phi table") {
    phiv_phi_table* t = nullptr;
    REQUIRE(phiv_phi_table_create(1000, 0, &t) == PHIV_OK);
    CHECK(phiv_phi_table_limit(t) == 1000);
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        std::uint64_t v = 0;
        REQUIRE(phiv_phi_table_get(t, n, &v) == PHIV_OK);
        CHECK(v == oracle::phi_by_count(n));
    }
    std::uint64_t v;
    CHECK(phiv_phi_table_get(t, 1001, &v) == PHIV_ERR_INVALID_ARGUMENT);
    phiv_phi_table_free(t);
    CHECK(phiv_phi_table_create(1000000, 1000, &t) == PHIV_ERR_RESOURCE_LIMIT);

    std::uint64_t b = 0;
    REQUIRE(phiv_preimage_bound(4, &b) == PHIV_OK);
    CHECK(b == 12);
    CHECK(phiv_safe_preimage_bound(4) >= 12);
}

TEST_CASE("value sets and cache bytes") {
    phiv_sieve_options opts;
    phiv_sieve_options_init(&opts);
    phiv_value_set* vs = nullptr;
    REQUIRE(phiv_value_set_compute(12, &opts, &vs) == PHIV_OK);
    CHECK(phiv_value_set_count(vs) == 7);
    CHECK(phiv_value_set_exact(vs) == 1);
    CHECK(phiv_value_set_contains(vs, 10) == 1);
    CHECK(phiv_value_set_contains(vs, 3) == 0);
    std::uint64_t w;
    CHECK(phiv_value_set_witness(vs, 4, &w) == PHIV_ERR_PRECONDITION);

    const char* path = "capi_12.phiv";
    REQUIRE(phiv_value_set_save(vs, path) == PHIV_OK);
    std::vector<unsigned char> expect{'P', 'H', 'I', 'V'};
    put_le(expect, 1, 2);
    put_le(expect, 12, 8);
    put_le(expect, phiv_value_set_sieve_bound(vs), 8);
    const unsigned char payload[2] = {0xAB, 0x0A};
    expect.insert(expect.end(), payload, payload + 2);
    put_le(expect, crc32_ref(payload, 2), 4);
    CHECK(read_bytes(path) == expect);
    CHECK(phiv_value_set_sieve_bound(vs) == phiv_safe_preimage_bound(12));

    phiv_value_set* back = nullptr;
    REQUIRE(phiv_value_set_load(path, &back) == PHIV_OK);
    CHECK(phiv_value_set_equal(vs, back) == 1);
    phiv_value_set_free(back);

    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(expect.data()), 20);
    }
    CHECK(phiv_value_set_load(path, &back) == PHIV_ERR_CORRUPT_CACHE);
    expect[4] = 9;
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(expect.data()), static_cast<std::streamsize>(expect.size()));
    }
    CHECK(phiv_value_set_load(path, &back) == PHIV_ERR_VERSION_MISMATCH);
    CHECK(phiv_value_set_load("no/such/file", &back) == PHIV_ERR_IO);
    std::remove(path);
    phiv_value_set_free(vs);

    opts.record_witnesses = 1;
    opts.workers = 3;
    REQUIRE(phiv_value_set_compute(1000, &opts, &vs) == PHIV_OK);
    REQUIRE(phiv_value_set_witness(vs, 4, &w) == PHIV_OK);
    CHECK(w == 5);
    CHECK(phiv_value_set_witness(vs, 14, &w) == PHIV_ERR_INVALID_ARGUMENT);
    phiv_value_set_free(vs);

    opts.memory_budget_bytes = 16;
    CHECK(phiv_value_set_compute(100000, &opts, &vs) == PHIV_ERR_RESOURCE_LIMIT);
}

TEST_CASE("structure scans") {
    phiv_value_set* vs = nullptr;
    REQUIRE(phiv_value_set_compute(100, nullptr, &vs) == PHIV_OK);

    phiv_window_profile p[2];
    REQUIRE(phiv_window_profile_compute(vs, 16, &p[0]) == PHIV_OK);
    REQUIRE(phiv_window_profile_compute(vs, 1, &p[1]) == PHIV_OK);
    CHECK(p[0].max_count >= 8);
    CHECK(p[0].argmax_x == 0);
    CHECK(p[1].max_count == 1);
    CHECK(phiv_window_profile_compute(vs, 101, &p[0]) == PHIV_ERR_WINDOW_TOO_LARGE);
    char* csv = nullptr;
    REQUIRE(phiv_window_profiles_csv(p, 2, &csv) == PHIV_OK);
    CHECK(take(csv).rfind("H,max_count,argmax_x,density\n", 0) == 0);

    phiv_ap_report ap;
    REQUIRE(phiv_longest_ap(vs, 4, &ap) == PHIV_OK);
    CHECK(ap.start == 4);
    CHECK(ap.length == 16);

    phiv_free_report* r = nullptr;
    REQUIRE(phiv_free_classes(vs, 3, &r) == PHIV_OK);
    CHECK(phiv_free_report_m(r) == 3);
    CHECK(phiv_free_report_class_count(r) == 0);
    int holds = 0;
    REQUIRE(phiv_coverage_bound_check(vs, 20, r, &holds) == PHIV_OK);
    CHECK(holds == 1);
    char* js = nullptr;
    REQUIRE(phiv_free_report_json(r, &js) == PHIV_OK);
    CHECK(take(js).find("\"modulus\": 12") != std::string::npos);
    phiv_free_report_free(r);
    CHECK(phiv_free_classes(vs, 26, &r) == PHIV_ERR_MODULUS_TOO_LARGE);

    phiv_value_set* big = nullptr;
    REQUIRE(phiv_value_set_compute(10000, nullptr, &big) == PHIV_OK);
    REQUIRE(phiv_best_free_classes(big, 100, &r) == PHIV_OK);
    CHECK(phiv_free_report_class_count(r) > 0);
    for (std::size_t i = 0; i < phiv_free_report_class_count(r); ++i)
        CHECK(phiv_free_report_class(r, i) % 4 == 2);
    CHECK(phiv_free_report_epsilon_eff(r) < 3.0);
    REQUIRE(phiv_coverage_bound_check(big, 1000, r, &holds) == PHIV_OK);
    CHECK(holds == 1);
    // A report from a different limit.
    CHECK(phiv_coverage_bound_check(vs, 20, r, &holds) == PHIV_ERR_MISMATCHED_INPUTS);
    phiv_free_report_free(r);
    phiv_value_set_free(big);
    phiv_value_set_free(vs);
}

TEST_CASE("construction round trip") {
    phiv_primality cfg;
    phiv_primality_init(&cfg);
    CHECK(cfg.error_exponent == 40);

    phiv_construction* c = nullptr;
    REQUIRE(phiv_construction_build(1, PHIV_MODE_STRICT, "1000000000000", &cfg, &c) == PHIV_OK);
    char* js = nullptr;
    REQUIRE(phiv_construction_json(c, &js) == PHIV_OK);
    const std::string summary = take(js);
    CHECK(summary.find("\"61843584\"") != std::string::npos);
    CHECK(summary.find("\"2811072\"") != std::string::npos);
    CHECK(phiv_construction_gate(c) == PHIV_OK);

    char *t0 = nullptr, *next = nullptr;
    CHECK(phiv_construction_search(c, "0", 2, 1, &t0, &next) == PHIV_ERR_BUDGET_EXHAUSTED);
    CHECK(t0 == nullptr);
    CHECK(take(next) == "2");
    REQUIRE(phiv_construction_search(c, "2", 100000, 2, &t0, &next) == PHIV_OK);
    const std::string t = take(t0);
    phiv_string_free(next);
    CHECK(t == "2");

    phiv_certificate* cert = nullptr;
    CHECK(phiv_construction_realize(c, "1", &cert) == PHIV_ERR_PRECONDITION);
    REQUIRE(phiv_construction_realize(c, t.c_str(), &cert) == PHIV_OK);
    CHECK(phiv_certificate_H(cert) == 1);

    phiv_verification* rep = nullptr;
    CHECK(phiv_certificate_verify(cert, &cfg, &rep) == PHIV_OK);
    CHECK(phiv_verification_count(rep) > 0);
    for (std::size_t i = 0; i < phiv_verification_count(rep); ++i) {
        int index, ok;
        const char *name, *detail;
        REQUIRE(phiv_verification_check(rep, i, &index, &name, &ok, &detail) == PHIV_OK);
        CHECK(ok == 1);
    }
    phiv_verification_free(rep);

    char* text = nullptr;
    REQUIRE(phiv_certificate_json(cert, &text) == PHIV_OK);
    std::string doc = take(text);
    const auto pos = doc.find("\"5622167\"");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 9, "\"5622169\"");
    phiv_certificate* bad = nullptr;
    REQUIRE(phiv_certificate_parse(doc.c_str(), &bad) == PHIV_OK);
    CHECK(phiv_certificate_verify(bad, &cfg, &rep) == PHIV_ERR_VERIFICATION_FAILED);
    CHECK(phiv_verification_count(rep) > 0);
    phiv_verification_free(rep);
    phiv_certificate_free(bad);
    CHECK(phiv_certificate_parse("{\"H\": 1}", &bad) == PHIV_ERR_INVALID_ARGUMENT);

    phiv_certificate_free(cert);
    phiv_construction_free(c);

    const char* good[] = {"11", "23"};
    REQUIRE(phiv_construction_from_primes(2, PHIV_MODE_RELAXED, good, &cfg, &c) == PHIV_OK);
    phiv_construction_free(c);
    CHECK(phiv_construction_from_primes(2, PHIV_MODE_STRICT, good, &cfg, &c) == PHIV_ERR_PRECONDITION);
    const char* junk[] = {"11", "x"};
    CHECK(phiv_construction_from_primes(2, PHIV_MODE_RELAXED, junk, &cfg, &c) == PHIV_ERR_INVALID_ARGUMENT);
    CHECK(phiv_construction_build(0, PHIV_MODE_STRICT, "1000", &cfg, &c) == PHIV_ERR_INVALID_ARGUMENT);
    CHECK(phiv_construction_build(2, PHIV_MODE_STRICT, "1000", &cfg, &c) == PHIV_ERR_BUDGET_EXHAUSTED);
}
