#pragma once

// Local structure of the totient value set: window counts, arithmetic
// progressions, and residue classes mod 4m that contain no totient value.

#include <cstdint>
#include <string>
#include <vector>

#include "phiv/totient_sieve.hpp"

namespace phiv::scan {

struct WindowProfile {
    std::uint64_t H = 0;
    std::uint64_t scan_limit = 0;
    std::uint64_t max_count = 0;
    std::uint64_t argmax_x = 0;  // smallest x attaining the maximum over (x, x+H]
    double density() const { return H ? static_cast<double>(max_count) / static_cast<double>(H) : 0.0; }
};

struct APReport {
    std::uint64_t start = 0;
    std::uint64_t difference = 0;
    std::uint64_t length = 0;
};

struct FreeClassReport {
    std::uint64_t m = 0;
    std::uint64_t modulus = 0;  // 4m
    std::uint64_t check_limit = 0;
    std::vector<std::uint64_t> free_classes;  // a = 2 mod 4, 0 < a < 4m, empty up to check_limit
    std::uint64_t total_free = 0;             // empty classes among all 4m residues
    std::uint64_t occupied_count = 0;         // modulus - total_free

    double epsilon_eff() const {
        return 3.0 - static_cast<double>(total_free) / static_cast<double>(m);
    }
};

WindowProfile window_profile(const totient::ValueSet& vs, std::uint64_t H);

// Longest progression with the given difference inside the set; ties go to
// the smallest start.
APReport longest_ap(const totient::ValueSet& vs, std::uint64_t difference = 4);

FreeClassReport free_classes(const totient::ValueSet& vs, std::uint64_t m);

// The m in [1, m_max] with the most empty residue classes mod 4m, relative to
// m (smallest epsilon_eff); ties go to the smaller m.
FreeClassReport best_free_classes(const totient::ValueSet& vs, std::uint64_t m_max);

// Checks |V n (x, x+H]| <= (floor(H/4m) + 1) * occupied_count for every
// window inside [1, limit]. The report is first re-derived from vs; a report
// that does not describe vs fails.
bool coverage_bound_check(const totient::ValueSet& vs, std::uint64_t H, const FreeClassReport& report);

std::string profile_csv(const std::vector<WindowProfile>& profiles);
std::string free_class_json(const FreeClassReport& report);

} // namespace phiv::scan
