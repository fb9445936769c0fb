#pragma once

#include <cstdint>

// Counter-based randomness: every draw is a pure hash of (seed, stream ids, counter).
// Per-user streams are therefore independent of population size and iteration order,
// and two environments built from the same seed see identical draws — the property the
// matched-arm experiment design relies on. std::uniform_* is avoided on purpose: its
// output is not pinned down by the standard, and bit-reproducibility is a contract here.

namespace ltv::rng {

// splitmix64 finalizer
constexpr uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr uint64_t combine(uint64_t a, uint64_t b) { return mix(a ^ mix(b)); }

constexpr uint64_t key(uint64_t seed, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0,
                       uint64_t d = 0) {
    uint64_t k = mix(seed);
    k = combine(k, a);
    k = combine(k, b);
    k = combine(k, c);
    k = combine(k, d);
    return k;
}

// uniform in [0,1) with full 53-bit mantissa
constexpr double to_u01(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

constexpr double u01(uint64_t seed, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0,
                     uint64_t d = 0) {
    return to_u01(key(seed, a, b, c, d));
}

// unbiased-enough bounded draw (128-bit multiply; bias < 2^-64 per draw)
constexpr uint64_t bounded(uint64_t x, uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(x) * n) >> 64);
}

// purpose tags keeping per-(user, period) streams disjoint
enum Purpose : uint64_t {
    kArrival = 1,
    kInitState = 2,
    kActivity = 3,
    kAvail = 4,  // + item id
    kConvert = 5,
    kTransit = 6,
    kFeature = 7,
    kDrift = 8,
};

// sequential engine over the same hash, for consumers that just need a stream
// (replay sampling, parameter init, random instance generation)
class Stream {
public:
    explicit Stream(uint64_t seed, uint64_t salt = 0) : key_(key(seed, salt)) {}

    uint64_t next() { return mix(key_ + (++n_) * 0x9e3779b97f4a7c15ull); }
    double next_u01() { return to_u01(next()); }
    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) { return bounded(next(), n); }
    // uniform in [lo, hi)
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

private:
    uint64_t key_;
    uint64_t n_ = 0;
};

}  // namespace ltv::rng
