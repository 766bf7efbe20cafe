#include "phiv/structure_scan.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace phiv::scan {
namespace {

void require_exact(const totient::ValueSet& vs) {
    if (!vs.exact())
        throw Error(ErrorCode::PreconditionViolated, "value set is not certified exact");
}

// Counts of members in (x, x+H] for x = 0 .. limit-H, streamed to fn.
template <class Fn>
void slide(const totient::ValueSet& vs, std::uint64_t H, Fn&& fn) {
    std::uint64_t count = 0;
    for (std::uint64_t v = 1; v <= H; ++v) count += vs.contains(v);
    fn(std::uint64_t{0}, count);
    for (std::uint64_t x = 1; x + H <= vs.limit(); ++x) {
        count += vs.contains(x + H);
        count -= vs.contains(x);
        fn(x, count);
    }
}

} // namespace

WindowProfile window_profile(const totient::ValueSet& vs, std::uint64_t H) {
    require_exact(vs);
    if (H < 1) throw Error(ErrorCode::InvalidArgument, "window length must be at least 1");
    if (H > vs.limit()) throw Error(ErrorCode::WindowTooLarge, "window length exceeds the limit");
    WindowProfile out{H, vs.limit(), 0, 0};
    bool first = true;
    slide(vs, H, [&](std::uint64_t x, std::uint64_t c) {
        if (first || c > out.max_count) {
            out.max_count = c;
            out.argmax_x = x;
            first = false;
        }
    });
    return out;
}

APReport longest_ap(const totient::ValueSet& vs, std::uint64_t difference) {
    require_exact(vs);
    if (difference < 1) throw Error(ErrorCode::InvalidArgument, "difference must be >= 1");
    APReport best{0, difference, 0};
    // One run per residue class; runs end at the first non-member.
    std::vector<std::uint64_t> run_start(std::min(difference, vs.limit()), 0), run_len(run_start.size(), 0);
    for (std::uint64_t v = 1; v <= vs.limit(); ++v) {
        const std::uint64_t cls = (v - 1) % difference;
        if (!vs.contains(v)) {
            run_len[cls] = 0;
            continue;
        }
        if (run_len[cls] == 0) run_start[cls] = v;
        ++run_len[cls];
        if (run_len[cls] > best.length ||
            (run_len[cls] == best.length && run_start[cls] < best.start)) {
            best.length = run_len[cls];
            best.start = run_start[cls];
        }
    }
    return best;
}

FreeClassReport free_classes(const totient::ValueSet& vs, std::uint64_t m) {
    require_exact(vs);
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
    if (m > vs.limit() / 4) throw Error(ErrorCode::ModulusTooLarge, "4m exceeds the value-set limit");
    const std::uint64_t mod = 4 * m;
    std::vector<bool> occupied(mod, false);
    std::uint64_t occ = 0;
    for (std::uint64_t v : vs.members()) {
        const std::uint64_t a = v % mod;
        if (!occupied[a]) {
            occupied[a] = true;
            if (++occ == mod) break;
        }
    }
    FreeClassReport r;
    r.m = m;
    r.modulus = mod;
    r.check_limit = vs.limit();
    r.occupied_count = occ;
    r.total_free = mod - occ;
    for (std::uint64_t a = 2; a < mod; a += 4)
        if (!occupied[a]) r.free_classes.push_back(a);
    return r;
}

FreeClassReport best_free_classes(const totient::ValueSet& vs, std::uint64_t m_max) {
    require_exact(vs);
    if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
    if (m_max > vs.limit() / 4) throw Error(ErrorCode::ModulusTooLarge, "4*m_max exceeds the value-set limit");
    const auto members = vs.members();
    std::uint64_t best_m = 1, best_free = 0;
    std::vector<std::uint8_t> seen;
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        const std::uint64_t mod = 4 * m;
        seen.assign(mod, 0);
        std::uint64_t occ = 0;
        for (std::uint64_t v : members) {
            auto& s = seen[v % mod];
            if (!s) {
                s = 1;
                if (++occ == mod) break;
            }
        }
        const std::uint64_t free = mod - occ;
        // free/m > best_free/best_m, compared exactly.
        if (free * best_m > best_free * m) {
            best_m = m;
            best_free = free;
        }
    }
    return free_classes(vs, best_m);
}

bool coverage_bound_check(const totient::ValueSet& vs, std::uint64_t H, const FreeClassReport& report) {
    require_exact(vs);
    if (report.check_limit != vs.limit())
        throw Error(ErrorCode::MismatchedInputs, "report was computed for a different limit");
    if (H < 1) throw Error(ErrorCode::InvalidArgument, "window length must be at least 1");
    if (H > vs.limit()) throw Error(ErrorCode::WindowTooLarge, "window length exceeds the limit");

    const FreeClassReport actual = free_classes(vs, report.m);
    if (actual.modulus != report.modulus || actual.occupied_count != report.occupied_count ||
        actual.total_free != report.total_free || actual.free_classes != report.free_classes)
        return false;

    const std::uint64_t bound = (H / report.modulus + 1) * report.occupied_count;
    bool ok = true;
    slide(vs, H, [&](std::uint64_t, std::uint64_t c) { ok = ok && c <= bound; });
    return ok;
}

std::string profile_csv(const std::vector<WindowProfile>& profiles) {
    std::ostringstream out;
    out << "H,max_count,argmax_x,density\n";
    char buf[64];
    for (const auto& p : profiles) {
        std::snprintf(buf, sizeof buf, "%.6f", p.density());
        out << p.H << ',' << p.max_count << ',' << p.argmax_x << ',' << buf << '\n';
    }
    return out.str();
}

std::string free_class_json(const FreeClassReport& report) {
    nlohmann::ordered_json j;
    j["m"] = report.m;
    j["modulus"] = report.modulus;
    j["check_limit"] = report.check_limit;
    j["free_classes"] = report.free_classes;
    j["occupied_count"] = report.occupied_count;
    j["epsilon_eff"] = report.epsilon_eff();
    return j.dump(2) + "\n";
}

} // namespace phiv::scan
