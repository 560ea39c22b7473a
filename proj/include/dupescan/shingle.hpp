#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dupescan/hashing.hpp"
#include "dupescan/record.hpp"
#include "dupescan/text.hpp"

namespace dupescan {

/// Set of 64-bit hashed word k-shingles of a record's normalized title and
/// abstract. Shingles are kept sorted ascending (canonical form).
struct ShingleSet {
    std::string manuscript_id;
    std::vector<uint64_t> shingles;
    uint32_t token_count = 0;
    /// Set when the record yields no k-gram at all; such records are excluded
    /// from indexing and reported.
    bool too_short = false;
};

namespace detail {

inline uint64_t hash_gram(std::span<const std::string> tokens, size_t begin, size_t k,
                          uint64_t seed) {
    uint64_t h = kFnvOffset;
    for (int byte = 0; byte < 8; ++byte) { // seed bytes, fixed little-endian order
        h ^= (seed >> (8 * byte)) & 0xFF;
        h *= kFnvPrime;
    }
    for (size_t i = 0; i < k; ++i) {
        h = fnv1a64(tokens[begin + i], h);
        h ^= 0x1F; // token boundary, so ("ab","c") != ("a","bc")
        h *= kFnvPrime;
    }
    return mix64(h);
}

inline void append_gram_hashes(std::span<const std::string> tokens, size_t k, uint64_t seed,
                               std::vector<uint64_t>& out) {
    if (tokens.size() < k) return;
    for (size_t i = 0; i + k <= tokens.size(); ++i) {
        out.push_back(hash_gram(tokens, i, k, seed));
    }
}

} // namespace detail

/// Shingles title and abstract jointly: title tokens, a field separator, then
/// abstract tokens. Grams never span the separator, so a gram drawn from one
/// field can only match a gram drawn from within one field of the other record.
inline ShingleSet shingle(const ManuscriptRecord& record, int k, uint64_t seed) {
    ShingleSet set;
    set.manuscript_id = record.id;
    if (k < 1) k = 1;

    std::vector<std::string> title_tokens = normalize(record.title);
    std::vector<std::string> abstract_tokens = normalize(record.abstract);
    set.token_count = static_cast<uint32_t>(title_tokens.size() + abstract_tokens.size());

    detail::append_gram_hashes(title_tokens, static_cast<size_t>(k), seed, set.shingles);
    detail::append_gram_hashes(abstract_tokens, static_cast<size_t>(k), seed, set.shingles);

    std::sort(set.shingles.begin(), set.shingles.end());
    set.shingles.erase(std::unique(set.shingles.begin(), set.shingles.end()),
                       set.shingles.end());
    set.too_short = set.shingles.empty();
    return set;
}

/// |a ∩ b| / |a ∪ b| over the 64-bit shingle values; 0 when both sets are
/// empty (such records are excluded upstream anyway).
inline double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
    if (a.shingles.empty() && b.shingles.empty()) return 0.0;
    size_t i = 0, j = 0, both = 0;
    while (i < a.shingles.size() && j < b.shingles.size()) {
        if (a.shingles[i] == b.shingles[j]) {
            ++both;
            ++i;
            ++j;
        } else if (a.shingles[i] < b.shingles[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    size_t uni = a.shingles.size() + b.shingles.size() - both;
    return static_cast<double>(both) / static_cast<double>(uni);
}

} // namespace dupescan
