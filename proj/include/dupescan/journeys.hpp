#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dupescan/corpus.hpp"
#include "dupescan/dedup.hpp"

namespace dupescan {

struct JourneyStep {
    std::string manuscript_id;
    std::string journal_id;
    Date submitted_at;
    Decision decision = Decision::pending;
    std::optional<Date> decided_at;
    std::optional<std::string> transferred_from;
};

/// Chronological journal path of one duplicate cluster. A step is a bad
/// transfer when its journal already processed an earlier step of the same
/// journey.
struct Journey {
    uint32_t cluster_id = 0;
    std::vector<JourneyStep> steps;
    std::vector<uint32_t> bad_transfer_steps;
};

/// One journey per cluster; steps sorted by submission date, ties by id.
inline std::vector<Journey> build_journeys(const Corpus& corpus,
                                           const std::vector<DuplicateCluster>& clusters) {
    std::vector<Journey> journeys;
    journeys.reserve(clusters.size());
    for (const auto& cl : clusters) {
        Journey journey;
        journey.cluster_id = cl.cluster_id;
        for (const auto& id : cl.member_ids) {
            const auto& rec = corpus.by_id(id);
            journey.steps.push_back({rec.id, rec.journal_id, rec.submitted_at, rec.decision,
                                     rec.decided_at, rec.transferred_from});
        }
        std::sort(journey.steps.begin(), journey.steps.end(),
                  [](const JourneyStep& a, const JourneyStep& b) {
                      return std::tie(a.submitted_at, a.manuscript_id) <
                             std::tie(b.submitted_at, b.manuscript_id);
                  });
        std::set<std::string> seen;
        for (size_t i = 0; i < journey.steps.size(); ++i) {
            if (!seen.insert(journey.steps[i].journal_id).second) {
                journey.bad_transfer_steps.push_back(static_cast<uint32_t>(i));
            }
        }
        journeys.push_back(std::move(journey));
    }
    return journeys;
}

struct DestinationStat {
    std::string journal_id;
    double smoothed_rate = 0.0; // (accepted + 1) / (total + 2)
    uint32_t support = 0;       // observed transfers into this journal
    uint32_t accepted = 0;
};

struct TransferRecommendation {
    std::string from_journal;
    std::vector<DestinationStat> ranked_destinations;
    /// False when from_journal appears in no journey; callers should warn.
    bool journal_seen = false;
};

/// Ranks destination journals by historic post-rejection outcome. Only the
/// immediately-next journey step after a rejection at from_journal counts as
/// a transfer; explicit transferred_from links attribute the transfer to the
/// named manuscript's step instead. Add-one smoothing; destinations with
/// support below min_support are dropped.
inline TransferRecommendation recommend_transfers(const std::vector<Journey>& journeys,
                                                  const std::string& from_journal,
                                                  uint32_t min_support) {
    TransferRecommendation rec;
    rec.from_journal = from_journal;

    std::map<std::string, DestinationStat> by_destination;
    for (const auto& journey : journeys) {
        std::map<std::string, size_t> step_of_manuscript;
        for (size_t i = 0; i < journey.steps.size(); ++i) {
            step_of_manuscript[journey.steps[i].manuscript_id] = i;
            if (journey.steps[i].journal_id == from_journal) rec.journal_seen = true;
        }
        for (size_t i = 1; i < journey.steps.size(); ++i) {
            const JourneyStep& step = journey.steps[i];
            const JourneyStep* source = &journey.steps[i - 1];
            if (step.transferred_from) {
                auto it = step_of_manuscript.find(*step.transferred_from);
                if (it != step_of_manuscript.end() && it->second < i) {
                    source = &journey.steps[it->second];
                }
            }
            if (source->journal_id != from_journal) continue;
            if (source->decision != Decision::rejected) continue;
            if (step.journal_id == from_journal) continue;
            auto& stat = by_destination[step.journal_id];
            stat.journal_id = step.journal_id;
            ++stat.support;
            if (is_successful(step.decision)) ++stat.accepted;
        }
    }

    for (auto& [journal, stat] : by_destination) {
        if (stat.support < min_support) continue;
        stat.smoothed_rate =
            (static_cast<double>(stat.accepted) + 1.0) / (static_cast<double>(stat.support) + 2.0);
        rec.ranked_destinations.push_back(stat);
    }
    std::sort(rec.ranked_destinations.begin(), rec.ranked_destinations.end(),
              [](const DestinationStat& a, const DestinationStat& b) {
                  if (a.smoothed_rate != b.smoothed_rate) return a.smoothed_rate > b.smoothed_rate;
                  if (a.support != b.support) return a.support > b.support;
                  return a.journal_id < b.journal_id;
              });
    return rec;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

/// Emits one journey's nodes and edges. The template is fixed (see README):
/// one node per step labeled "journal\ndate", one edge per consecutive step
/// pair, bad-transfer edges attributed color=red.
inline void append_journey_dot(const Journey& journey, const std::string& node_prefix,
                               const std::string& indent, std::string& out) {
    std::set<uint32_t> bad(journey.bad_transfer_steps.begin(), journey.bad_transfer_steps.end());
    for (size_t i = 0; i < journey.steps.size(); ++i) {
        const auto& step = journey.steps[i];
        out += indent + node_prefix + "s" + std::to_string(i) + " [label=\"" +
               dot_escape(step.journal_id) + "\\n" + format_date(step.submitted_at) +
               "\", shape=box];\n";
    }
    for (size_t i = 1; i < journey.steps.size(); ++i) {
        out += indent + node_prefix + "s" + std::to_string(i - 1) + " -> " + node_prefix + "s" +
               std::to_string(i);
        if (bad.count(static_cast<uint32_t>(i))) out += " [color=red]";
        out += ";\n";
    }
}

} // namespace detail

inline std::string export_journey(const Journey& journey) {
    std::string out = "digraph journey_" + std::to_string(journey.cluster_id) + " {\n";
    out += "  rankdir=LR;\n";
    detail::append_journey_dot(journey, "", "  ", out);
    out += "}\n";
    return out;
}

/// All journeys in one DOT document, one subgraph cluster each. An empty
/// journey list produces an empty graph document.
inline std::string export_journeys(const std::vector<Journey>& journeys) {
    std::string out = "digraph journeys {\n";
    if (!journeys.empty()) out += "  rankdir=LR;\n";
    for (const auto& journey : journeys) {
        std::string cluster = std::to_string(journey.cluster_id);
        out += "  subgraph cluster_" + cluster + " {\n";
        out += "    label=\"cluster " + cluster + "\";\n";
        detail::append_journey_dot(journey, "c" + cluster + "_", "    ", out);
        out += "  }\n";
    }
    out += "}\n";
    return out;
}

} // namespace dupescan
