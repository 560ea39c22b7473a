#pragma once

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "dupescan/errors.hpp"
#include "dupescan/record.hpp"

namespace dupescan {

/// Immutable once loaded; safe for concurrent readers.
class Corpus {
public:
    void add(ManuscriptRecord rec) {
        if (id_index_.count(rec.id)) {
            throw ValidationError("duplicate manuscript id: " + rec.id);
        }
        id_index_.emplace(rec.id, records_.size());
        records_.push_back(std::move(rec));
    }

    const std::vector<ManuscriptRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const ManuscriptRecord& at(size_t pos) const { return records_.at(pos); }

    bool contains(const std::string& id) const { return id_index_.count(id) != 0; }

    size_t position_of(const std::string& id) const {
        auto it = id_index_.find(id);
        if (it == id_index_.end()) throw ValidationError("unknown manuscript id: " + id);
        return it->second;
    }

    const ManuscriptRecord& by_id(const std::string& id) const {
        return records_[position_of(id)];
    }

private:
    std::vector<ManuscriptRecord> records_;
    std::unordered_map<std::string, size_t> id_index_;
};

struct IngestOptions {
    /// Duplicate ids abort the ingest unless set, in which case the later
    /// line is skipped and reported.
    bool skip_duplicate_ids = false;
};

struct LineError {
    size_t line_number; // 1-based
    std::string reason;
};

struct IngestReport {
    size_t lines_read = 0;
    size_t records_loaded = 0;
    std::vector<LineError> skipped;
};

namespace detail {

inline ManuscriptRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("record is not a JSON object");
    auto str_field = [&](const char* name) -> std::string {
        auto it = j.find(name);
        if (it == j.end() || !it->is_string()) {
            throw ValidationError(std::string("missing or non-string field: ") + name);
        }
        return it->get<std::string>();
    };
    ManuscriptRecord rec;
    rec.id = str_field("id");
    rec.journal_id = str_field("journal_id");
    rec.title = str_field("title");
    rec.abstract = str_field("abstract");

    auto date_field = [&](const char* name) -> Date {
        auto parsed = parse_date(str_field(name));
        if (!parsed) throw ValidationError(std::string("invalid date in field: ") + name);
        return *parsed;
    };
    rec.submitted_at = date_field("submitted_at");

    auto dit = j.find("decided_at");
    if (dit == j.end()) throw ValidationError("missing field: decided_at");
    if (!dit->is_null()) rec.decided_at = date_field("decided_at");

    auto decision = parse_decision(str_field("decision"));
    if (!decision) throw ValidationError("invalid decision value");
    rec.decision = *decision;

    auto tit = j.find("transferred_from");
    if (tit == j.end()) throw ValidationError("missing field: transferred_from");
    if (!tit->is_null()) {
        if (!tit->is_string()) throw ValidationError("transferred_from must be string or null");
        rec.transferred_from = tit->get<std::string>();
    }

    if (auto violation = rec.invariant_violation()) throw ValidationError(*violation);
    return rec;
}

inline nlohmann::json record_to_json(const ManuscriptRecord& rec) {
    nlohmann::json j;
    j["id"] = rec.id;
    j["journal_id"] = rec.journal_id;
    j["title"] = rec.title;
    j["abstract"] = rec.abstract;
    j["submitted_at"] = format_date(rec.submitted_at);
    j["decided_at"] = rec.decided_at ? nlohmann::json(format_date(*rec.decided_at))
                                     : nlohmann::json(nullptr);
    j["decision"] = to_string(rec.decision);
    j["transferred_from"] = rec.transferred_from ? nlohmann::json(*rec.transferred_from)
                                                 : nlohmann::json(nullptr);
    return j;
}

} // namespace detail

/// Loads a JSONL record stream. Malformed or invariant-violating lines are
/// skipped and reported with their line numbers; duplicate ids are fatal
/// unless options.skip_duplicate_ids is set. Order-preserving.
inline Corpus ingest(std::istream& in, IngestReport& report,
                     const IngestOptions& options = {}) {
    Corpus corpus;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        ++report.lines_read;
        ManuscriptRecord rec;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            rec = detail::record_from_json(j);
        } catch (const nlohmann::json::exception& e) {
            report.skipped.push_back({line_number, std::string("malformed JSON: ") + e.what()});
            continue;
        } catch (const ValidationError& e) {
            report.skipped.push_back({line_number, e.what()});
            continue;
        }
        if (corpus.contains(rec.id)) {
            if (options.skip_duplicate_ids) {
                report.skipped.push_back({line_number, "duplicate id: " + rec.id});
                continue;
            }
            throw ValidationError("line " + std::to_string(line_number) +
                                  ": duplicate manuscript id: " + rec.id);
        }
        corpus.add(std::move(rec));
        ++report.records_loaded;
    }
    return corpus;
}

} // namespace dupescan
