#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace dupescan {

// All hashing here is fixed-seed and platform-independent; signature and
// band-key values must be bit-identical across runs and machines.

inline constexpr uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr uint64_t kFnvPrime = 1099511628211ull;

/// 2^61 - 1, the modulus of the affine MinHash family.
inline constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
    return fnv1a64(s.data(), s.size(), h);
}

/// Finalizer from splitmix64; used to spread FNV output over all 64 bits.
inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

/// Deterministic 64-bit stream; also usable as a cheap seed-derivation chain.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

private:
    uint64_t state_;
};

/// (a * b) mod (2^61 - 1) for a, b < 2^61.
inline uint64_t mulmod61(uint64_t a, uint64_t b) {
    __uint128_t z = static_cast<__uint128_t>(a) * b;
    uint64_t lo = static_cast<uint64_t>(z & kMersenne61);
    uint64_t hi = static_cast<uint64_t>(z >> 61);
    uint64_t r = lo + hi;
    r = (r & kMersenne61) + (r >> 61);
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

/// Folds an arbitrary 64-bit value into [0, 2^61 - 2].
inline uint64_t reduce61(uint64_t x) {
    uint64_t r = (x & kMersenne61) + (x >> 61);
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

inline uint64_t addmod61(uint64_t a, uint64_t b) {
    uint64_t r = a + b;
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

} // namespace dupescan
