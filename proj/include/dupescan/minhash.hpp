#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dupescan/errors.hpp"
#include "dupescan/hashing.hpp"
#include "dupescan/shingle.hpp"

namespace dupescan {

/// Family of n affine hashes h_i(x) = (a_i * x + b_i) mod (2^61 - 1) with a_i
/// odd and nonzero, drawn from a seeded deterministic generator. Signatures
/// are only comparable within one family; `tag` fingerprints it.
struct HashFamily {
    uint32_t n = 0;
    uint64_t seed = 0;
    std::vector<uint64_t> a;
    std::vector<uint64_t> b;
    uint64_t tag = 0;
};

namespace detail {

/// Unbiased draw from [0, bound) via rejection sampling; portable, unlike
/// std::uniform_int_distribution.
inline uint64_t uniform_below(SplitMix64& rng, uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
    for (;;) {
        uint64_t x = rng.next();
        if (x >= threshold) return x % bound;
    }
}

} // namespace detail

inline HashFamily make_hash_family(uint32_t n, uint64_t seed) {
    if (n == 0) throw ConfigError("hash family size must be positive");
    HashFamily family;
    family.n = n;
    family.seed = seed;
    family.a.reserve(n);
    family.b.reserve(n);
    SplitMix64 rng(seed);
    for (uint32_t i = 0; i < n; ++i) {
        // Draw in [0, p-2] and force the low bit; stays below p and never 0.
        family.a.push_back(detail::uniform_below(rng, kMersenne61 - 1) | 1);
        family.b.push_back(detail::uniform_below(rng, kMersenne61));
    }
    family.tag = mix64(seed ^ (uint64_t{n} * kFnvPrime));
    return family;
}

/// Fixed-length vector of per-hash minima; component agreement between two
/// signatures estimates the Jaccard similarity of the underlying sets.
struct MinHashSignature {
    std::string manuscript_id;
    std::vector<uint64_t> values;
    uint64_t family_tag = 0;
};

inline MinHashSignature sign(const ShingleSet& shingles, const HashFamily& family) {
    if (shingles.shingles.empty()) {
        throw ValidationError("cannot sign empty shingle set: " + shingles.manuscript_id);
    }
    MinHashSignature sig;
    sig.manuscript_id = shingles.manuscript_id;
    sig.family_tag = family.tag;
    sig.values.assign(family.n, ~uint64_t{0});
    for (uint64_t s : shingles.shingles) {
        uint64_t x = reduce61(s);
        for (uint32_t i = 0; i < family.n; ++i) {
            uint64_t v = addmod61(mulmod61(family.a[i], x), family.b[i]);
            if (v < sig.values[i]) sig.values[i] = v;
        }
    }
    return sig;
}

/// Fraction of agreeing components.
inline double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.values.size() != b.values.size()) {
        throw ConfigError("signature length mismatch: " + std::to_string(a.values.size()) +
                          " vs " + std::to_string(b.values.size()));
    }
    if (a.family_tag != b.family_tag) {
        throw ConfigError("signatures come from different hash families");
    }
    if (a.values.empty()) return 0.0;
    size_t agree = 0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i] == b.values[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(a.values.size());
}

} // namespace dupescan
