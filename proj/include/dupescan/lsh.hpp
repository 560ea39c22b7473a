#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dupescan/errors.hpp"
#include "dupescan/hashing.hpp"
#include "dupescan/minhash.hpp"
#include "dupescan/shingle.hpp"

namespace dupescan {

/// Candidate pair confirmed against the exact Jaccard threshold.
/// Ids are canonically ordered (id_a < id_b).
struct VerifiedPair {
    std::string id_a;
    std::string id_b;
    double jaccard = 0.0;
    double estimated = 0.0;
};

inline bool operator==(const VerifiedPair& x, const VerifiedPair& y) {
    return x.id_a == y.id_a && x.id_b == y.id_b && x.jaccard == y.jaccard &&
           x.estimated == y.estimated;
}

/// Banded LSH index: b tables mapping a salted hash of r consecutive
/// signature values to buckets of signature positions. Build single-threaded,
/// freeze, then query concurrently.
class LshIndex {
public:
    using Bucket = std::vector<uint32_t>;
    using BandTable = std::unordered_map<uint64_t, Bucket>;

    LshIndex() = default;

    LshIndex(uint32_t bands, uint32_t rows) : bands_(bands), rows_(rows), tables_(bands) {
        if (bands == 0 || rows == 0) {
            throw ConfigError("band count and rows per band must be positive");
        }
    }

    static LshIndex build(std::vector<MinHashSignature> signatures, uint32_t bands,
                          uint32_t rows) {
        LshIndex index(bands, rows);
        for (auto& sig : signatures) index.add(std::move(sig));
        index.freeze();
        return index;
    }

    void add(MinHashSignature sig) {
        if (frozen_) throw ConfigError("cannot add to a frozen index");
        if (sig.values.size() != static_cast<size_t>(bands_) * rows_) {
            throw ConfigError("signature length " + std::to_string(sig.values.size()) +
                              " does not match bands*rows = " +
                              std::to_string(static_cast<size_t>(bands_) * rows_));
        }
        if (signatures_.empty()) {
            family_tag_ = sig.family_tag;
        } else if (sig.family_tag != family_tag_) {
            throw ConfigError("signature from a different hash family: " + sig.manuscript_id);
        }
        auto pos = static_cast<uint32_t>(signatures_.size());
        for (uint32_t band = 0; band < bands_; ++band) {
            tables_[band][band_key(sig, band)].push_back(pos);
        }
        signatures_.push_back(std::move(sig));
    }

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    uint32_t bands() const { return bands_; }
    uint32_t rows() const { return rows_; }
    uint64_t family_tag() const { return family_tag_; }
    size_t size() const { return signatures_.size(); }
    const std::vector<MinHashSignature>& signatures() const { return signatures_; }
    const std::vector<BandTable>& tables() const { return tables_; }

    /// All distinct pairs co-bucketed in at least one band, self-pairs
    /// excluded, sorted ascending. Invariant under signature input order.
    std::vector<std::pair<uint32_t, uint32_t>> candidates() const {
        require_frozen();
        std::vector<std::pair<uint32_t, uint32_t>> pairs;
        for (const auto& table : tables_) {
            for (const auto& [key, bucket] : table) {
                for (size_t i = 0; i < bucket.size(); ++i) {
                    for (size_t j = i + 1; j < bucket.size(); ++j) {
                        pairs.emplace_back(std::min(bucket[i], bucket[j]),
                                           std::max(bucket[i], bucket[j]));
                    }
                }
            }
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        return pairs;
    }

    /// Positions co-bucketed with the probe in at least one band.
    std::vector<uint32_t> probe(const MinHashSignature& sig) const {
        require_frozen();
        if (sig.values.size() != static_cast<size_t>(bands_) * rows_) {
            throw ConfigError("probe signature length does not match index");
        }
        if (!signatures_.empty() && sig.family_tag != family_tag_) {
            throw ConfigError("probe signature from a different hash family");
        }
        std::vector<uint32_t> hits;
        for (uint32_t band = 0; band < bands_; ++band) {
            auto it = tables_[band].find(band_key(sig, band));
            if (it == tables_[band].end()) continue;
            hits.insert(hits.end(), it->second.begin(), it->second.end());
        }
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        return hits;
    }

    /// Used by the snapshot loader; tables must correspond to the signatures.
    static LshIndex from_parts(uint32_t bands, uint32_t rows,
                               std::vector<MinHashSignature> signatures,
                               std::vector<BandTable> tables) {
        LshIndex index(bands, rows);
        index.signatures_ = std::move(signatures);
        index.tables_ = std::move(tables);
        if (!index.signatures_.empty()) index.family_tag_ = index.signatures_[0].family_tag;
        index.freeze();
        return index;
    }

private:
    void require_frozen() const {
        if (!frozen_) throw ConfigError("index must be frozen before querying");
    }

    uint64_t band_key(const MinHashSignature& sig, uint32_t band) const {
        uint64_t h = kFnvOffset;
        auto feed = [&h](uint64_t v) {
            for (int byte = 0; byte < 8; ++byte) {
                h ^= (v >> (8 * byte)) & 0xFF;
                h *= kFnvPrime;
            }
        };
        feed(uint64_t{band} + 1); // salt: same rows in different bands never alias
        const size_t begin = static_cast<size_t>(band) * rows_;
        for (size_t i = 0; i < rows_; ++i) feed(sig.values[begin + i]);
        return mix64(h);
    }

    uint32_t bands_ = 0;
    uint32_t rows_ = 0;
    uint64_t family_tag_ = 0;
    std::vector<MinHashSignature> signatures_;
    std::vector<BandTable> tables_;
    bool frozen_ = false;
};

namespace detail {

inline const ShingleSet& shingles_for(std::span<const ShingleSet> shingle_sets,
                                      const MinHashSignature& sig, uint32_t pos) {
    if (pos >= shingle_sets.size() || shingle_sets[pos].manuscript_id != sig.manuscript_id ||
        shingle_sets[pos].shingles.empty()) {
        throw ValidationError("missing shingle set for manuscript: " + sig.manuscript_id);
    }
    return shingle_sets[pos];
}

inline VerifiedPair make_pair(const std::string& id_x, const std::string& id_y,
                              double jaccard, double estimated) {
    VerifiedPair pair;
    if (id_x <= id_y) {
        pair.id_a = id_x;
        pair.id_b = id_y;
    } else {
        pair.id_a = id_y;
        pair.id_b = id_x;
    }
    pair.jaccard = jaccard;
    pair.estimated = estimated;
    return pair;
}

} // namespace detail

/// Keeps exactly the candidates whose exact Jaccard reaches the threshold
/// (inclusive). shingle_sets must be aligned with the index's signature
/// positions. Result sorted by (id_a, id_b).
inline std::vector<VerifiedPair> verify(
    const std::vector<std::pair<uint32_t, uint32_t>>& candidates, const LshIndex& index,
    std::span<const ShingleSet> shingle_sets, double threshold) {
    const auto& sigs = index.signatures();
    std::vector<VerifiedPair> out;
    for (const auto& [x, y] : candidates) {
        if (x == y) continue;
        const auto& sx = detail::shingles_for(shingle_sets, sigs.at(x), x);
        const auto& sy = detail::shingles_for(shingle_sets, sigs.at(y), y);
        double jac = exact_jaccard(sx, sy);
        if (jac < threshold) continue;
        out.push_back(detail::make_pair(sigs[x].manuscript_id, sigs[y].manuscript_id, jac,
                                        estimate_jaccard(sigs[x], sigs[y])));
    }
    std::sort(out.begin(), out.end(), [](const VerifiedPair& a, const VerifiedPair& b) {
        return std::tie(a.id_a, a.id_b) < std::tie(b.id_a, b.id_b);
    });
    return out;
}

/// Online screening: candidates∘verify restricted to one probe. Result sorted
/// by descending similarity, ties by id.
inline std::vector<VerifiedPair> query(const LshIndex& index, const MinHashSignature& probe_sig,
                                       const ShingleSet& probe_shingles,
                                       std::span<const ShingleSet> shingle_sets,
                                       double threshold) {
    if (probe_shingles.shingles.empty()) {
        throw ValidationError("probe yields no shingles: " + probe_shingles.manuscript_id);
    }
    std::vector<VerifiedPair> out;
    for (uint32_t pos : index.probe(probe_sig)) {
        const auto& sig = index.signatures()[pos];
        if (sig.manuscript_id == probe_sig.manuscript_id) continue;
        const auto& indexed = detail::shingles_for(shingle_sets, sig, pos);
        double jac = exact_jaccard(probe_shingles, indexed);
        if (jac < threshold) continue;
        out.push_back(detail::make_pair(probe_sig.manuscript_id, sig.manuscript_id, jac,
                                        estimate_jaccard(probe_sig, sig)));
    }
    std::sort(out.begin(), out.end(), [](const VerifiedPair& a, const VerifiedPair& b) {
        if (a.jaccard != b.jaccard) return a.jaccard > b.jaccard;
        return std::tie(a.id_a, a.id_b) < std::tie(b.id_a, b.id_b);
    });
    return out;
}

} // namespace dupescan
