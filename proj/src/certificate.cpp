#include "phiv/construct.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace phiv::construct {

bool VerificationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

std::vector<Check> VerificationReport::failures() const {
    std::vector<Check> out;
    std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const Check& c) { return !c.ok; });
    return out;
}

namespace {

// phi of prod p^e over a known factorisation.
Nat phi_of_factored(const std::vector<std::pair<Nat, unsigned>>& factors) {
    Nat out = 1;
    for (const auto& [p, e] : factors) {
        Nat pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e - 1);
        out *= (p - 1) * pe;
    }
    return out;
}

void verify_into(const SolutionCertificate& c, const PrimalityConfig& base_cfg, VerificationReport& rep) {
    auto add = [&](int idx, std::string name, bool ok, std::string detail = {}) {
        rep.checks.push_back({idx, std::move(name), ok, std::move(detail)});
        return ok;
    };
    const auto H = static_cast<std::size_t>(std::max(c.H, 0));
    const bool shaped = c.H >= 1 && c.primes.size() == H && c.n.size() == H && c.nu.size() == H &&
                        c.q.size() == H && c.m.size() == H;
    if (!add(0, "shape", shaped, "every per-index array must have H entries")) return;

    PrimalityConfig cfg = base_cfg;
    cfg.error_exponent = std::max(cfg.error_exponent, c.error_exponent);
    add(0, "error_exponent", c.error_exponent >= 1);

    add(0, "M", c.M == c.U * c.t0 + c.r - 1, "M = U t0 + r - 1");
    Nat U = 12 * pi_of(c.H);
    for (const auto& n : c.n) {
        Nat p5;
        mpz_pow_ui(p5.get_mpz_t(), n.get_mpz_t(), 5);
        U *= p5;
    }
    add(0, "U", c.U == U, "U = 12 Pi_H prod n_h^5");

    for (int h = 1; h <= c.H; ++h) {
        const std::size_t i = h - 1;
        const Nat& p = c.primes[i];
        const Nat s = 2 * p + 1;
        const std::string at = " (h=" + std::to_string(h) + ")";

        add(h, "germain", p > 1 && arith::is_germain(p, cfg), "p_h and 2p_h+1 prime" + at);
        add(h, "n", c.n[i] == compute_nh(h, p), "n_h matches its definition" + at);

        unsigned e = 0;
        if (c.nu[i] == s) e = 1;
        else if (c.nu[i] == s * s * s * s) e = 4;
        Nat phi_nu = 0;
        if (e) phi_nu = phi_of_factored({{s, e}});
        add(h, "nu", e != 0 && phi_nu == c.n[i], "nu_h in {2p_h+1, (2p_h+1)^4} with phi(nu_h) = n_h" + at);

        add(h, "q_prime", c.q[i] > 1 && arith::is_probable_prime(c.q[i], cfg), "q_h prime" + at);
        add(h, "coprime", arith::gcd(c.q[i], c.nu[i]) == 1, "gcd(q_h, nu_h) = 1" + at);

        const Nat target = c.M + 4 * h;
        const bool divides = c.n[i] > 0 && mpz_divisible_p(target.get_mpz_t(), c.n[i].get_mpz_t());
        add(h, "q_formula", divides && c.q[i] == target / c.n[i] + 1, "q_h = (M+4h)/n_h + 1" + at);

        // phi(m_h) from m_h = q_h * (2p_h+1)^e, merging factors if q_h = 2p_h+1.
        bool phi_ok = false;
        if (e && c.m[i] == c.q[i] * c.nu[i] && c.q[i] > 1) {
            std::vector<std::pair<Nat, unsigned>> f;
            if (c.q[i] == s) f = {{s, e + 1}};
            else f = {{c.q[i], 1u}, {s, e}};
            phi_ok = phi_of_factored(f) == target;
        }
        add(h, "phi", phi_ok, "phi(m_" + std::to_string(h) + ") = M+" + std::to_string(4 * h));
    }

    rep.decreasing = true;
    for (std::size_t i = 1; i < H; ++i) rep.decreasing = rep.decreasing && c.m[i - 1] > c.m[i];
}

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
    return j.at(key);
}

Nat big(const nlohmann::json& j, const char* what) {
    if (!j.is_string()) throw Error(ErrorCode::InvalidArgument, std::string("'") + what + "' must be a decimal string");
    return nat_from_string(j.get<std::string>());
}

std::vector<Nat> big_array(const nlohmann::json& j, const char* key, std::size_t H) {
    const auto& arr = field(j, key);
    if (!arr.is_array() || arr.size() != H)
        throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be an array of H strings");
    std::vector<Nat> out;
    for (const auto& v : arr) out.push_back(big(v, key));
    return out;
}

nlohmann::ordered_json strings(const std::vector<Nat>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& x : v) arr.push_back(phiv::to_string(x));
    return arr;
}

} // namespace

VerificationReport verify_certificate(const SolutionCertificate& cert, const PrimalityConfig& cfg) {
    VerificationReport rep;
    try {
        verify_into(cert, cfg, rep);
    } catch (const std::exception& e) {
        rep.checks.push_back({0, "internal", false, e.what()});
    }
    return rep;
}

std::string certificate_json(const SolutionCertificate& c) {
    nlohmann::ordered_json j;
    j["H"] = c.H;
    j["mode"] = to_string(c.mode);
    j["primes"] = strings(c.primes);
    j["n"] = strings(c.n);
    j["nu"] = strings(c.nu);
    j["U"] = phiv::to_string(c.U);
    j["r"] = phiv::to_string(c.r);
    j["t0"] = phiv::to_string(c.t0);
    j["M"] = phiv::to_string(c.M);
    j["q"] = strings(c.q);
    j["m"] = strings(c.m);
    j["primality"] = {{"error_exponent", c.error_exponent}};
    return j.dump(2) + "\n";
}

SolutionCertificate certificate_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("certificate is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "certificate must be a JSON object");
    SolutionCertificate c;
    const auto& H = field(j, "H");
    if (!H.is_number_integer() || H.get<long long>() < 1 || H.get<long long>() > 1000)
        throw Error(ErrorCode::InvalidArgument, "'H' must be an integer in [1, 1000]");
    c.H = H.get<int>();
    const auto& mode = field(j, "mode");
    if (!mode.is_string()) throw Error(ErrorCode::InvalidArgument, "'mode' must be a string");
    c.mode = mode_from_string(mode.get<std::string>());
    const auto n = static_cast<std::size_t>(c.H);
    c.primes = big_array(j, "primes", n);
    c.n = big_array(j, "n", n);
    c.nu = big_array(j, "nu", n);
    c.U = big(field(j, "U"), "U");
    c.r = big(field(j, "r"), "r");
    c.t0 = big(field(j, "t0"), "t0");
    c.M = big(field(j, "M"), "M");
    c.q = big_array(j, "q", n);
    c.m = big_array(j, "m", n);
    const auto& prim = field(j, "primality");
    if (!prim.is_object()) throw Error(ErrorCode::InvalidArgument, "'primality' must be an object");
    const auto& ee = field(prim, "error_exponent");
    if (!ee.is_number_integer()) throw Error(ErrorCode::InvalidArgument, "'error_exponent' must be an integer");
    c.error_exponent = ee.get<int>();
    return c;
}

std::string SolutionCertificate::digest() const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : certificate_json(*this)) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace phiv::construct
