#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dupescan/dates.hpp"

namespace dupescan {

enum class Decision : uint8_t {
    pending = 0,
    rejected = 1,
    accepted = 2,
    published = 3,
    withdrawn = 4,
};

inline const char* to_string(Decision d) {
    switch (d) {
        case Decision::pending: return "pending";
        case Decision::rejected: return "rejected";
        case Decision::accepted: return "accepted";
        case Decision::published: return "published";
        case Decision::withdrawn: return "withdrawn";
    }
    return "pending";
}

inline std::optional<Decision> parse_decision(std::string_view s) {
    if (s == "pending") return Decision::pending;
    if (s == "rejected") return Decision::rejected;
    if (s == "accepted") return Decision::accepted;
    if (s == "published") return Decision::published;
    if (s == "withdrawn") return Decision::withdrawn;
    return std::nullopt;
}

/// Records that reached acceptance or publication count as successful outcomes
/// for transfer-destination statistics.
inline bool is_successful(Decision d) {
    return d == Decision::accepted || d == Decision::published;
}

/// One submission event.
struct ManuscriptRecord {
    std::string id;
    std::string journal_id;
    std::string title;
    std::string abstract;
    Date submitted_at;
    std::optional<Date> decided_at;
    Decision decision = Decision::pending;
    std::optional<std::string> transferred_from;

    /// Returns a human-readable reason if a record invariant is violated.
    std::optional<std::string> invariant_violation() const {
        if (id.empty()) return "id must be non-empty";
        if (decided_at && *decided_at < submitted_at) {
            return "decided_at precedes submitted_at";
        }
        bool pending = decision == Decision::pending;
        if (pending && decided_at) return "pending record must not carry decided_at";
        if (!pending && !decided_at) return "decided record must carry decided_at";
        return std::nullopt;
    }
};

} // namespace dupescan
