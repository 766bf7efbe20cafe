#include "phiv/totient_sieve.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <thread>

#include <zlib.h>

#include "phiv/arith.hpp"

namespace phiv::totient {
namespace {

std::vector<std::uint32_t> primes_through_sqrt(std::uint64_t hi) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(hi)));
    while (r * r > hi) --r;
    while ((r + 1) * (r + 1) <= hi) ++r;
    return arith::small_primes(static_cast<std::uint32_t>(r + 1));
}

// Prime-power multiples are visited explicitly, so each n costs one division
// (recovering the cofactor above sqrt) instead of one per prime factor.
template <class Word, class Fn>
void sieve_segments_as(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
                       std::uint64_t segment_size, Fn&& fn) {
    std::vector<Word> part, ph;
    for (std::uint64_t a = std::max<std::uint64_t>(lo, 1); a < hi; a += segment_size) {
        const std::uint64_t b = std::min(hi, a + segment_size);
        const std::size_t len = b - a;
        part.assign(len, 1);
        ph.assign(len, 1);
        for (std::uint32_t p : primes) {
            if (std::uint64_t{p} * p >= b) break;
            for (std::uint64_t m = (a + p - 1) / p * p; m < b; m += p) {
                part[m - a] *= static_cast<Word>(p);
                ph[m - a] *= static_cast<Word>(p - 1);
            }
            for (std::uint64_t pk = std::uint64_t{p} * p; pk < b; pk *= p) {
                for (std::uint64_t m = (a + pk - 1) / pk * pk; m < b; m += pk) {
                    part[m - a] *= static_cast<Word>(p);
                    ph[m - a] *= static_cast<Word>(p);
                }
                if (pk > (b - 1) / p) break;
            }
        }
        for (std::size_t j = 0; j < len; ++j) {
            const std::uint64_t n = a + j;
            // Exact: both operands < 2^53 and the quotient is an integer.
            const auto cof = static_cast<std::uint64_t>(static_cast<double>(n) / static_cast<double>(part[j]));
            if (cof != 1) ph[j] *= static_cast<Word>(cof - 1);
            fn(n, std::uint64_t{ph[j]});
        }
    }
}

template <class Fn>
void sieve_segments(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
                    std::uint64_t segment_size, Fn&& fn) {
    if (hi > (std::uint64_t{1} << 53))
        throw Error(ErrorCode::ResourceLimit, "segmented sieve limited to arguments below 2^53");
    if (hi <= std::numeric_limits<std::uint32_t>::max())
        sieve_segments_as<std::uint32_t>(lo, hi, primes, segment_size, fn);
    else
        sieve_segments_as<std::uint64_t>(lo, hi, primes, segment_size, fn);
}

long double lower_phi_ratio_bound(long double x) {
    // Rosser-Schoenfeld: n/phi(n) < e^gamma L + 2.50637/L, L = log log n,
    // n >= 3 except n = 223092870; 2.51 covers the exception.
    constexpr long double kExpGamma = 1.7810724179901979852L;
    const long double L = std::log(std::log(x));
    return x / (kExpGamma * L + 2.51L / L);
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths.
    std::size_t off = 0;
    while (off < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
        crc = crc32(crc, bytes.data() + off, chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t off) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[off + i]) << (8 * i);
    return v;
}

} // namespace

void for_each_phi(std::uint64_t lo, std::uint64_t hi,
                  const std::function<void(std::uint64_t, std::uint64_t)>& fn,
                  std::uint64_t segment_size) {
    if (hi <= lo) return;
    const auto primes = primes_through_sqrt(hi);
    sieve_segments(lo, hi, primes, std::max<std::uint64_t>(segment_size, 1), fn);
}

PhiTable sieve_phi(std::uint64_t limit, const SieveOptions& opts) {
    if (limit < 1) throw Error(ErrorCode::InvalidArgument, "sieve_phi needs limit >= 1");
    if (limit >= std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorCode::ResourceLimit, "phi table limited to 32-bit arguments");
    const std::size_t table_bytes = (limit + 1) * sizeof(std::uint32_t);
    const std::size_t linear_bytes = table_bytes + table_bytes / 8;  // plus the prime list
    if (table_bytes > opts.memory_budget_bytes ||
        (linear_bytes > opts.memory_budget_bytes && !opts.allow_segmented))
        throw Error(ErrorCode::ResourceLimit,
                    "phi table up to " + std::to_string(limit) + " exceeds the memory budget");

    std::vector<std::uint32_t> phi(limit + 1, 0);
    if (linear_bytes <= opts.memory_budget_bytes) {
        std::vector<std::uint32_t> primes;
        phi[1] = 1;
        for (std::uint64_t i = 2; i <= limit; ++i) {
            if (phi[i] == 0) {
                phi[i] = static_cast<std::uint32_t>(i - 1);
                primes.push_back(static_cast<std::uint32_t>(i));
            }
            for (std::uint32_t p : primes) {
                const std::uint64_t ip = i * p;
                if (ip > limit) break;
                if (i % p == 0) {
                    phi[ip] = phi[i] * p;
                    break;
                }
                phi[ip] = phi[i] * (p - 1);
            }
        }
    } else {
        for_each_phi(1, limit + 1, [&](std::uint64_t n, std::uint64_t v) {
            phi[n] = static_cast<std::uint32_t>(v);
        }, opts.segment_size);
    }
    return PhiTable(std::move(phi));
}

std::uint64_t safe_preimage_bound(std::uint64_t N) {
    // The bound x / (e^gamma L + 2.51/L) is increasing for x >= 16.
    const long double target = static_cast<long double>(N) * (1.0L + 1e-12L) + 1e-6L;
    std::uint64_t lo = 16, hi = 32;
    while (lower_phi_ratio_bound(static_cast<long double>(hi)) <= target) {
        lo = hi;
        hi *= 2;
    }
    // Invariant: bound(lo) <= target or lo == 16; bound(hi) > target.
    if (lower_phi_ratio_bound(16.0L) > target) return 16;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (lower_phi_ratio_bound(static_cast<long double>(mid)) > target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::uint64_t preimage_bound(std::uint64_t N, const SieveOptions& opts) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "preimage_bound needs N >= 1");
    const std::uint64_t safe = safe_preimage_bound(N);
    std::uint64_t last = 1;
    for_each_phi(1, safe + 1, [&](std::uint64_t n, std::uint64_t v) {
        if (v <= N) last = n;
    }, opts.segment_size);
    return last;
}

ValueSet::ValueSet(std::uint64_t limit, std::uint64_t sieve_bound, std::vector<std::uint64_t> words,
                   std::vector<std::uint64_t> witnesses)
    : limit_(limit), sieve_bound_(sieve_bound), words_(std::move(words)),
      witnesses_(std::move(witnesses)) {
    if (words_.size() != (limit_ + 63) / 64)
        throw Error(ErrorCode::InvalidArgument, "bitset size does not match the limit");
    if (!witnesses_.empty() && witnesses_.size() != limit_ + 1)
        throw Error(ErrorCode::InvalidArgument, "witness table size does not match the limit");
    exact_ = limit_ >= 1 && sieve_bound_ >= safe_preimage_bound(limit_);
}

std::uint64_t ValueSet::count() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
}

std::vector<std::uint64_t> ValueSet::members() const {
    std::vector<std::uint64_t> out;
    out.reserve(count());
    for (std::size_t i = 0; i < words_.size(); ++i)
        for (std::uint64_t w = words_[i]; w; w &= w - 1)
            out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)) + 1);
    return out;
}

std::optional<std::uint64_t> ValueSet::witness(std::uint64_t v) const {
    if (witnesses_.empty() || !contains(v)) return std::nullopt;
    return witnesses_[v];
}

ValueSet value_set(std::uint64_t N, const SieveOptions& opts) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "value_set needs N >= 1");
    const std::size_t nwords = (N + 63) / 64;
    std::size_t need = nwords * 8;
    if (opts.record_witnesses) need += (N + 1) * 8;
    if (need > opts.memory_budget_bytes)
        throw Error(ErrorCode::ResourceLimit, "value set up to " + std::to_string(N) + " exceeds the memory budget");

    const std::uint64_t bound = safe_preimage_bound(N);
    std::vector<std::uint64_t> words(nwords, 0);
    std::vector<std::uint64_t> wit;
    if (opts.record_witnesses) wit.assign(N + 1, std::numeric_limits<std::uint64_t>::max());

    auto mark = [&](std::uint64_t n, std::uint64_t v) {
        if (v > N) return;
        const std::uint64_t k = v - 1;
        std::atomic_ref<std::uint64_t>(words[k >> 6]).fetch_or(std::uint64_t{1} << (k & 63),
                                                               std::memory_order_relaxed);
        if (!wit.empty()) {
            std::atomic_ref<std::uint64_t> slot(wit[v]);
            std::uint64_t cur = slot.load(std::memory_order_relaxed);
            while (n < cur && !slot.compare_exchange_weak(cur, n, std::memory_order_relaxed)) {}
        }
    };

    if (!opts.allow_segmented) {
        const PhiTable table = sieve_phi(bound, opts);
        for (std::uint64_t n = 1; n <= bound; ++n) mark(n, table[n]);
    } else {
        const auto primes = primes_through_sqrt(bound + 1);
        const std::uint64_t seg = std::max<std::uint64_t>(opts.segment_size, 1);
        const std::uint64_t chunks = (bound + seg) / seg;  // covers [1, bound]
        std::atomic<std::uint64_t> next{0};
        auto work = [&] {
            for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
                const std::uint64_t lo = std::max<std::uint64_t>(c * seg, 1);
                const std::uint64_t hi = std::min(bound + 1, (c + 1) * seg);
                sieve_segments(lo, hi, primes, seg, mark);
            }
        };
        const unsigned w = std::max(1u, opts.workers);
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < w; ++i) pool.emplace_back(work);
        work();
    }
    if (!wit.empty())
        for (auto& x : wit)
            if (x == std::numeric_limits<std::uint64_t>::max()) x = 0;
    return ValueSet(N, bound, std::move(words), std::move(wit));
}

std::vector<std::uint8_t> encode_cache(const ValueSet& vs) {
    std::vector<std::uint8_t> out;
    const std::size_t payload = (vs.limit() + 7) / 8;
    out.reserve(4 + 2 + 8 + 8 + payload + 4);
    for (char c : {'P', 'H', 'I', 'V'}) out.push_back(static_cast<std::uint8_t>(c));
    put_le<std::uint16_t>(out, kCacheVersion);
    put_le<std::uint64_t>(out, vs.limit());
    put_le<std::uint64_t>(out, vs.sieve_bound());
    const std::size_t start = out.size();
    const auto words = vs.words();
    for (std::size_t i = 0; i < payload; ++i)
        out.push_back(static_cast<std::uint8_t>(words[i / 8] >> (8 * (i % 8))));
    const std::uint32_t crc = crc32_of(std::span(out).subspan(start, payload));
    put_le<std::uint32_t>(out, crc);
    return out;
}

ValueSet decode_cache(std::span<const std::uint8_t> bytes) {
    constexpr std::size_t kHeader = 4 + 2 + 8 + 8;
    if (bytes.size() < 6 || !std::equal(bytes.begin(), bytes.begin() + 4, "PHIV"))
        throw Error(ErrorCode::CorruptCache, "bad magic");
    if (const auto version = get_le<std::uint16_t>(bytes, 4); version != kCacheVersion)
        throw Error(ErrorCode::VersionMismatch, "cache version " + std::to_string(version) +
                                                    ", expected " + std::to_string(kCacheVersion));
    if (bytes.size() < kHeader + 4) throw Error(ErrorCode::CorruptCache, "truncated header");
    const auto limit = get_le<std::uint64_t>(bytes, 6);
    const auto bound = get_le<std::uint64_t>(bytes, 14);
    if (limit < 1 || limit > (std::uint64_t{1} << 60)) throw Error(ErrorCode::CorruptCache, "bad limit");
    const std::size_t payload = (limit + 7) / 8;
    if (bytes.size() != kHeader + payload + 4) throw Error(ErrorCode::CorruptCache, "payload length mismatch");
    const auto body = bytes.subspan(kHeader, payload);
    if (crc32_of(body) != get_le<std::uint32_t>(bytes, kHeader + payload))
        throw Error(ErrorCode::CorruptCache, "checksum mismatch");
    if (limit % 8 && (body.back() >> (limit % 8)) != 0)
        throw Error(ErrorCode::CorruptCache, "stray bits past the limit");

    std::vector<std::uint64_t> words((limit + 63) / 64, 0);
    for (std::size_t i = 0; i < payload; ++i) words[i / 8] |= std::uint64_t{body[i]} << (8 * (i % 8));
    return ValueSet(limit, bound, std::move(words));
}

void save_cache(const ValueSet& vs, const std::filesystem::path& path) {
    const auto bytes = encode_cache(vs);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

ValueSet load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_cache(bytes);
}

} // namespace phiv::totient
