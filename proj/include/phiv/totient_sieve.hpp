#pragma once

// Euler's phi over ranges, and the exact set of totient values up to a bound.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "phiv/error.hpp"

namespace phiv::totient {

struct SieveOptions {
    std::size_t memory_budget_bytes = std::size_t{2} << 30;
    bool allow_segmented = true;
    unsigned workers = 1;
    bool record_witnesses = false;
    std::uint64_t segment_size = std::uint64_t{1} << 16;
};

class PhiTable {
public:
    PhiTable() = default;
    explicit PhiTable(std::vector<std::uint32_t> values) : values_(std::move(values)) {}

    std::uint64_t limit() const { return values_.empty() ? 0 : values_.size() - 1; }
    std::uint32_t operator[](std::uint64_t k) const { return values_[k]; }
    // Index 0 is unused and holds 0.
    std::span<const std::uint32_t> values() const { return values_; }

private:
    std::vector<std::uint32_t> values_;
};

// Linear sieve when it fits the budget, segmented sieve otherwise (if allowed).
PhiTable sieve_phi(std::uint64_t limit, const SieveOptions& opts = {});

// Streams (n, phi(n)) for lo <= n < hi in ascending order using a segmented
// sieve. Single-threaded; callers split ranges for parallelism.
void for_each_phi(std::uint64_t lo, std::uint64_t hi,
                  const std::function<void(std::uint64_t n, std::uint64_t phi)>& fn,
                  std::uint64_t segment_size = std::uint64_t{1} << 16);

// Analytic N' with phi(n) > N for every n > N', from
//   n / phi(n) < e^gamma log log n + 2.51 / log log n   (n >= 3).
std::uint64_t safe_preimage_bound(std::uint64_t N);

// Smallest N' with phi(n) > N for every n > N' (scan below the analytic bound).
std::uint64_t preimage_bound(std::uint64_t N, const SieveOptions& opts = {});

// Membership of [1, limit] in the image of phi. Bit k of the word array
// stands for the value k + 1.
class ValueSet {
public:
    ValueSet() = default;
    ValueSet(std::uint64_t limit, std::uint64_t sieve_bound, std::vector<std::uint64_t> words,
             std::vector<std::uint64_t> witnesses = {});

    std::uint64_t limit() const { return limit_; }
    std::uint64_t sieve_bound() const { return sieve_bound_; }
    // True when sieve_bound covers every preimage of every value <= limit.
    bool exact() const { return exact_; }

    bool contains(std::uint64_t v) const {
        if (v < 1 || v > limit_) return false;
        std::uint64_t k = v - 1;
        return (words_[k >> 6] >> (k & 63)) & 1;
    }
    std::uint64_t count() const;
    std::vector<std::uint64_t> members() const;
    std::span<const std::uint64_t> words() const { return words_; }

    bool has_witnesses() const { return !witnesses_.empty(); }
    // Smallest n with phi(n) = v; only in witness mode.
    std::optional<std::uint64_t> witness(std::uint64_t v) const;

    // Witnesses are auxiliary and do not take part in equality.
    bool operator==(const ValueSet& o) const {
        return limit_ == o.limit_ && sieve_bound_ == o.sieve_bound_ && exact_ == o.exact_ &&
               words_ == o.words_;
    }

private:
    std::uint64_t limit_ = 0;
    std::uint64_t sieve_bound_ = 0;
    bool exact_ = false;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> witnesses_;
};

ValueSet value_set(std::uint64_t N, const SieveOptions& opts = {});

// Cache file: "PHIV", u16 version, u64 N, u64 sieve_bound, ceil(N/8) bytes of
// LSB-first bitset, u32 CRC-32 of the bitset. All little-endian.
inline constexpr std::uint16_t kCacheVersion = 1;

std::vector<std::uint8_t> encode_cache(const ValueSet& vs);
ValueSet decode_cache(std::span<const std::uint8_t> bytes);
void save_cache(const ValueSet& vs, const std::filesystem::path& path);
ValueSet load_cache(const std::filesystem::path& path);

} // namespace phiv::totient
