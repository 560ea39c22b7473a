#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dupescan/corpus.hpp"
#include "dupescan/lsh.hpp"

namespace dupescan {

/// Connected component of verified pairs.
struct DuplicateCluster {
    uint32_t cluster_id = 0;
    std::vector<std::string> member_ids; // sorted
    std::vector<VerifiedPair> pairs;     // the pairs inducing the component
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n), rank_(n, 0) {
        for (size_t i = 0; i < n; ++i) parent_[i] = i;
    }

    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(size_t x, size_t y) {
        size_t rx = find(x), ry = find(y);
        if (rx == ry) return;
        if (rank_[rx] < rank_[ry]) std::swap(rx, ry);
        parent_[ry] = rx;
        if (rank_[rx] == rank_[ry]) ++rank_[rx];
    }

private:
    std::vector<size_t> parent_;
    std::vector<uint8_t> rank_;
};

} // namespace detail

/// Connected components via union-find. Cluster ids are assigned in order of
/// each cluster's smallest member id, so the result does not depend on the
/// input order of the pairs.
inline std::vector<DuplicateCluster> cluster(const std::vector<VerifiedPair>& pairs) {
    std::map<std::string, size_t> id_to_slot;
    for (const auto& p : pairs) {
        id_to_slot.emplace(p.id_a, 0);
        id_to_slot.emplace(p.id_b, 0);
    }
    size_t next = 0;
    for (auto& [id, slot] : id_to_slot) slot = next++;

    detail::UnionFind uf(id_to_slot.size());
    for (const auto& p : pairs) {
        uf.unite(id_to_slot[p.id_a], id_to_slot[p.id_b]);
    }

    // id_to_slot iterates in id order, so each component is discovered at its
    // smallest member and clusters come out ordered by that member.
    std::map<size_t, uint32_t> root_to_cluster;
    std::vector<DuplicateCluster> clusters;
    for (const auto& [id, slot] : id_to_slot) {
        size_t root = uf.find(slot);
        auto [it, inserted] = root_to_cluster.try_emplace(root, static_cast<uint32_t>(clusters.size()));
        if (inserted) {
            clusters.push_back(DuplicateCluster{it->second, {}, {}});
        }
        clusters[it->second].member_ids.push_back(id);
    }
    for (const auto& p : pairs) {
        size_t root = uf.find(id_to_slot[p.id_a]);
        clusters[root_to_cluster[root]].pairs.push_back(p);
    }
    for (auto& c : clusters) {
        std::sort(c.pairs.begin(), c.pairs.end(), [](const VerifiedPair& a, const VerifiedPair& b) {
            return std::tie(a.id_a, a.id_b) < std::tie(b.id_a, b.id_b);
        });
    }
    return clusters;
}

enum class PairKind : uint8_t {
    other = 0,
    resubmission = 1,
    simultaneous = 2,
    published_duplicate = 3, // severity order matches enum order
};

inline const char* to_string(PairKind k) {
    switch (k) {
        case PairKind::other: return "other";
        case PairKind::resubmission: return "resubmission";
        case PairKind::simultaneous: return "simultaneous";
        case PairKind::published_duplicate: return "published_duplicate";
    }
    return "other";
}

struct ClassificationPolicy {
    /// Pending manuscripts are considered active until this date.
    Date analysis_date;
    /// When set, a withdrawal counts as a rejection for resubmission purposes.
    bool withdrawn_as_rejection = false;
};

/// Default analysis date: the maximum date appearing in the corpus.
inline Date default_analysis_date(const Corpus& corpus) {
    Date max_date{0};
    for (const auto& rec : corpus.records()) {
        max_date = std::max(max_date, rec.submitted_at);
        if (rec.decided_at) max_date = std::max(max_date, *rec.decided_at);
    }
    return max_date;
}

/// Label for one near-duplicate pair, with the dates and journals that
/// support it. Members are referenced chronologically (earlier/later by
/// submission date, ties broken by id), never by argument position. All
/// satisfied labels are retained; `kind` is the highest-severity one.
struct PairClassification {
    std::string earlier_id;
    std::string later_id;
    PairKind kind = PairKind::other;

    bool is_resubmission = false;
    bool is_simultaneous = false;
    bool is_published_duplicate = false;

    std::string earlier_journal;
    std::string later_journal;
    Date earlier_submitted;
    Date later_submitted;
    std::optional<Date> earlier_decided;
    std::optional<Date> later_decided;
    Decision earlier_decision = Decision::pending;
    Decision later_decision = Decision::pending;
    int32_t overlap_days = 0;

    /// Present when the pair was directly verified (not only transitively
    /// connected within a cluster).
    std::optional<double> jaccard;
    std::optional<double> estimated;
};

inline PairClassification classify_pair(const std::string& id_x, const std::string& id_y,
                                        const Corpus& corpus,
                                        const ClassificationPolicy& policy) {
    const ManuscriptRecord* first = &corpus.by_id(id_x);
    const ManuscriptRecord* second = &corpus.by_id(id_y);
    if (std::tie(second->submitted_at, second->id) < std::tie(first->submitted_at, first->id)) {
        std::swap(first, second);
    }
    const ManuscriptRecord& earlier = *first;
    const ManuscriptRecord& later = *second;

    PairClassification c;
    c.earlier_id = earlier.id;
    c.later_id = later.id;
    c.earlier_journal = earlier.journal_id;
    c.later_journal = later.journal_id;
    c.earlier_submitted = earlier.submitted_at;
    c.later_submitted = later.submitted_at;
    c.earlier_decided = earlier.decided_at;
    c.later_decided = later.decided_at;
    c.earlier_decision = earlier.decision;
    c.later_decision = later.decision;

    // Active interval: [submitted_at, decided_at], or [submitted_at,
    // analysis_date] while pending. Overlap counted in whole days, inclusive.
    Date earlier_end = earlier.decided_at.value_or(policy.analysis_date);
    Date later_end = later.decided_at.value_or(policy.analysis_date);
    Date overlap_start = std::max(earlier.submitted_at, later.submitted_at);
    Date overlap_end = std::min(earlier_end, later_end);
    c.overlap_days = std::max(0, overlap_end - overlap_start + 1);

    c.is_simultaneous = c.overlap_days >= 1 && earlier.journal_id != later.journal_id;

    bool earlier_rejected = earlier.decision == Decision::rejected ||
                            (policy.withdrawn_as_rejection &&
                             earlier.decision == Decision::withdrawn);
    c.is_resubmission = earlier_rejected && earlier.decided_at &&
                        later.submitted_at > *earlier.decided_at;

    c.is_published_duplicate = is_successful(earlier.decision) && is_successful(later.decision);

    if (c.is_published_duplicate) {
        c.kind = PairKind::published_duplicate;
    } else if (c.is_simultaneous) {
        c.kind = PairKind::simultaneous;
    } else if (c.is_resubmission) {
        c.kind = PairKind::resubmission;
    } else {
        c.kind = PairKind::other;
    }
    return c;
}

inline PairClassification classify_pair(const VerifiedPair& pair, const Corpus& corpus,
                                        const ClassificationPolicy& policy) {
    PairClassification c = classify_pair(pair.id_a, pair.id_b, corpus, policy);
    c.jaccard = pair.jaccard;
    c.estimated = pair.estimated;
    return c;
}

/// Classifies every intra-cluster pair (the transitive closure, not only the
/// directly verified edges). Exact similarities are attached where a verified
/// pair exists.
inline std::vector<PairClassification> classify_clusters(
    const Corpus& corpus, const std::vector<DuplicateCluster>& clusters,
    const ClassificationPolicy& policy) {
    std::vector<PairClassification> out;
    for (const auto& cl : clusters) {
        std::map<std::pair<std::string, std::string>, const VerifiedPair*> verified;
        for (const auto& p : cl.pairs) verified[{p.id_a, p.id_b}] = &p;
        for (size_t i = 0; i < cl.member_ids.size(); ++i) {
            for (size_t j = i + 1; j < cl.member_ids.size(); ++j) {
                auto c = classify_pair(cl.member_ids[i], cl.member_ids[j], corpus, policy);
                auto it = verified.find({cl.member_ids[i], cl.member_ids[j]});
                if (it != verified.end()) {
                    c.jaccard = it->second->jaccard;
                    c.estimated = it->second->estimated;
                }
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

/// Simultaneous-submission flags, sorted by overlap length descending
/// (ties by ids) for editor triage.
inline std::vector<PairClassification> find_simultaneous(
    const Corpus& corpus, const std::vector<DuplicateCluster>& clusters,
    const ClassificationPolicy& policy) {
    std::vector<PairClassification> flags;
    for (auto& c : classify_clusters(corpus, clusters, policy)) {
        if (c.is_simultaneous) flags.push_back(std::move(c));
    }
    std::sort(flags.begin(), flags.end(),
              [](const PairClassification& a, const PairClassification& b) {
                  if (a.overlap_days != b.overlap_days) return a.overlap_days > b.overlap_days;
                  return std::tie(a.earlier_id, a.later_id) < std::tie(b.earlier_id, b.later_id);
              });
    return flags;
}

/// Pairs where both members were accepted or published.
inline std::vector<PairClassification> find_published_duplicates(
    const Corpus& corpus, const std::vector<DuplicateCluster>& clusters) {
    ClassificationPolicy policy{default_analysis_date(corpus)};
    std::vector<PairClassification> flags;
    for (auto& c : classify_clusters(corpus, clusters, policy)) {
        if (c.is_published_duplicate) flags.push_back(std::move(c));
    }
    std::sort(flags.begin(), flags.end(),
              [](const PairClassification& a, const PairClassification& b) {
                  return std::tie(a.earlier_id, a.later_id) < std::tie(b.earlier_id, b.later_id);
              });
    return flags;
}

struct StatsReport {
    uint64_t total_manuscripts = 0;

    uint64_t manuscripts_with_earlier_duplicate = 0;
    double earlier_duplicate_fraction = 0.0;

    uint64_t verified_pair_count = 0;
    uint64_t intra_cluster_pair_count = 0;
    uint64_t cluster_count = 0;

    /// Resubmission share reported over both denominators: directly verified
    /// pairs and all intra-cluster pairs.
    double resubmission_pair_fraction = 0.0;
    double resubmission_cluster_pair_fraction = 0.0;

    uint64_t simultaneous_manuscript_count = 0;
    double simultaneous_manuscript_fraction = 0.0;

    uint64_t published_duplicate_pair_count = 0;

    /// Journey transitions revisiting an already-seen journal.
    uint64_t journey_transition_count = 0;
    uint64_t bad_transfer_step_count = 0;
    double bad_transfer_fraction = 0.0;
};

/// Aggregates the pipeline's headline fractions. `classifications` must be
/// the full intra-cluster classification list (see classify_clusters).
/// Journey counts are filled by the caller when journeys were built.
inline StatsReport stats(const Corpus& corpus, const std::vector<DuplicateCluster>& clusters,
                         const std::vector<PairClassification>& classifications) {
    StatsReport report;
    report.total_manuscripts = corpus.size();
    report.cluster_count = clusters.size();

    for (const auto& cl : clusters) {
        report.verified_pair_count += cl.pairs.size();
        Date min_date = corpus.by_id(cl.member_ids.front()).submitted_at;
        for (const auto& id : cl.member_ids) {
            min_date = std::min(min_date, corpus.by_id(id).submitted_at);
        }
        for (const auto& id : cl.member_ids) {
            if (corpus.by_id(id).submitted_at > min_date) {
                ++report.manuscripts_with_earlier_duplicate;
            }
        }
    }

    uint64_t resub_verified = 0, verified_total = 0, resub_all = 0;
    std::set<std::string> simultaneous_ids;
    for (const auto& c : classifications) {
        ++report.intra_cluster_pair_count;
        if (c.is_resubmission) ++resub_all;
        if (c.jaccard) {
            ++verified_total;
            if (c.is_resubmission) ++resub_verified;
        }
        if (c.is_simultaneous) {
            simultaneous_ids.insert(c.earlier_id);
            simultaneous_ids.insert(c.later_id);
        }
        if (c.is_published_duplicate) ++report.published_duplicate_pair_count;
    }
    report.simultaneous_manuscript_count = simultaneous_ids.size();

    if (report.total_manuscripts > 0) {
        report.earlier_duplicate_fraction =
            static_cast<double>(report.manuscripts_with_earlier_duplicate) /
            static_cast<double>(report.total_manuscripts);
        report.simultaneous_manuscript_fraction =
            static_cast<double>(report.simultaneous_manuscript_count) /
            static_cast<double>(report.total_manuscripts);
    }
    if (verified_total > 0) {
        report.resubmission_pair_fraction =
            static_cast<double>(resub_verified) / static_cast<double>(verified_total);
    }
    if (report.intra_cluster_pair_count > 0) {
        report.resubmission_cluster_pair_fraction =
            static_cast<double>(resub_all) / static_cast<double>(report.intra_cluster_pair_count);
    }
    return report;
}

} // namespace dupescan
