#pragma once

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dupescan/config.hpp"
#include "dupescan/corpus.hpp"
#include "dupescan/dedup.hpp"
#include "dupescan/journeys.hpp"
#include "dupescan/lsh.hpp"
#include "dupescan/minhash.hpp"
#include "dupescan/parallel.hpp"
#include "dupescan/shingle.hpp"
#include "dupescan/snapshot.hpp"

namespace dupescan {

struct StageTiming {
    std::string stage;
    double milliseconds = 0.0;
};

struct PipelineResult {
    Snapshot snapshot;
    IngestReport ingest_report;
    std::vector<std::string> too_short_ids;
    std::vector<VerifiedPair> pairs;
    std::vector<DuplicateCluster> clusters;
    std::vector<PairClassification> classifications; // all intra-cluster pairs
    std::vector<Journey> journeys;
    StatsReport stats_report;
    /// Wall-clock stage timings. Informational only: they are reported on
    /// stderr by the CLI and never written into the output directory, which
    /// must stay byte-identical across runs.
    std::vector<StageTiming> timings;
};

namespace detail {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

    void done(const std::string& stage) {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        out_.push_back({stage, ms});
        last_ = now;
    }

private:
    std::vector<StageTiming>& out_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Reattaches the failing stage's name to propagated errors.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(stage) + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(stage) + ": " + e.what());
    } catch (const SnapshotError& e) {
        throw SnapshotError(std::string(stage) + ": " + e.what());
    }
}

} // namespace detail

inline void analyze(PipelineResult& result);

/// shingle -> sign -> build -> candidates -> verify -> cluster -> classify ->
/// journeys -> stats over an already-loaded corpus.
inline PipelineResult run_pipeline_on_corpus(const PipelineConfig& config, Corpus corpus) {
    config.validate();
    PipelineResult result;
    detail::StageClock clock(result.timings);

    result.snapshot.config = config;
    result.snapshot.corpus = std::move(corpus);
    const Corpus& c = result.snapshot.corpus;

    auto& shingles = result.snapshot.shingles;
    shingles.resize(c.size());
    const uint64_t sh_seed = shingle_seed(config);
    detail::run_stage("shingle", [&] {
        parallel_for(c.size(), config.threads, [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i) {
                shingles[i] = shingle(c.at(i), config.shingle_k, sh_seed);
            }
        });
    });
    std::vector<uint32_t> indexable;
    for (size_t i = 0; i < shingles.size(); ++i) {
        if (shingles[i].too_short) {
            result.too_short_ids.push_back(shingles[i].manuscript_id);
        } else {
            indexable.push_back(static_cast<uint32_t>(i));
        }
    }
    clock.done("shingle");

    result.snapshot.family = make_hash_family(config.num_hashes, family_seed(config));
    std::vector<MinHashSignature> signatures(indexable.size());
    detail::run_stage("sign", [&] {
        parallel_for(indexable.size(), config.threads, [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i) {
                signatures[i] = sign(shingles[indexable[i]], result.snapshot.family);
            }
        });
    });
    clock.done("sign");

    result.snapshot.index = detail::run_stage("build", [&] {
        return LshIndex::build(std::move(signatures), config.bands, config.rows);
    });
    clock.done("build");

    analyze(result);
    return result;
}

/// The analytics half of the pipeline; also used to re-derive reports from a
/// loaded snapshot. Expects snapshot.{config,corpus,shingles,index} set.
inline void analyze(PipelineResult& result) {
    const Snapshot& snap = result.snapshot;
    detail::StageClock clock(result.timings);

    // Shingle sets aligned with the index's signature positions.
    std::vector<ShingleSet> indexed_sets;
    indexed_sets.reserve(snap.index.size());
    for (const auto& sig : snap.index.signatures()) {
        indexed_sets.push_back(snap.shingles[snap.corpus.position_of(sig.manuscript_id)]);
    }

    auto candidates = snap.index.candidates();
    clock.done("candidates");

    result.pairs = detail::run_stage("verify", [&] {
        return verify(candidates, snap.index, indexed_sets, snap.config.threshold);
    });
    clock.done("verify");

    result.clusters = cluster(result.pairs);
    clock.done("cluster");

    ClassificationPolicy policy{
        snap.config.analysis_date.value_or(default_analysis_date(snap.corpus))};
    result.classifications = detail::run_stage(
        "classify", [&] { return classify_clusters(snap.corpus, result.clusters, policy); });
    clock.done("classify");

    result.journeys = build_journeys(snap.corpus, result.clusters);
    clock.done("journeys");

    result.stats_report = stats(snap.corpus, result.clusters, result.classifications);
    for (const auto& journey : result.journeys) {
        if (!journey.steps.empty()) {
            result.stats_report.journey_transition_count += journey.steps.size() - 1;
        }
        result.stats_report.bad_transfer_step_count += journey.bad_transfer_steps.size();
    }
    if (result.stats_report.journey_transition_count > 0) {
        result.stats_report.bad_transfer_fraction =
            static_cast<double>(result.stats_report.bad_transfer_step_count) /
            static_cast<double>(result.stats_report.journey_transition_count);
    }
    clock.done("stats");
}

inline PipelineResult run_pipeline(const PipelineConfig& config, std::istream& input,
                                   const IngestOptions& options = {}) {
    PipelineResult result;
    {
        detail::StageClock clock(result.timings);
        IngestReport report;
        Corpus corpus =
            detail::run_stage("ingest", [&] { return ingest(input, report, options); });
        clock.done("ingest");
        auto timings = std::move(result.timings);
        result = run_pipeline_on_corpus(config, std::move(corpus));
        result.ingest_report = std::move(report);
        timings.insert(timings.end(), result.timings.begin(), result.timings.end());
        result.timings = std::move(timings);
    }
    return result;
}

inline PipelineResult analyze_snapshot(Snapshot snapshot) {
    snapshot.config.validate();
    PipelineResult result;
    result.snapshot = std::move(snapshot);
    analyze(result);
    return result;
}

// ---------------------------------------------------------------------------
// Report writers. All output is canonical: fixed key order (nlohmann sorts
// object keys), shortest round-trip float formatting, sorted rows.

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += "\"\"";
        else quoted.push_back(ch);
    }
    quoted += "\"";
    return quoted;
}

} // namespace detail

inline std::string pairs_to_csv(const std::vector<VerifiedPair>& pairs) {
    std::string out = "id_a,id_b,jaccard,estimated\n";
    for (const auto& p : pairs) {
        out += detail::csv_field(p.id_a) + "," + detail::csv_field(p.id_b) + "," +
               detail::fmt_double(p.jaccard) + "," + detail::fmt_double(p.estimated) + "\n";
    }
    return out;
}

inline std::string pairs_to_jsonl(const std::vector<VerifiedPair>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        nlohmann::json j{{"id_a", p.id_a},
                         {"id_b", p.id_b},
                         {"jaccard", p.jaccard},
                         {"estimated", p.estimated}};
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

inline std::string clusters_to_jsonl(const std::vector<DuplicateCluster>& clusters) {
    std::string out;
    for (const auto& c : clusters) {
        nlohmann::json j{{"cluster_id", c.cluster_id},
                         {"member_ids", c.member_ids},
                         {"pair_count", c.pairs.size()}};
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

inline nlohmann::json classification_to_json(const PairClassification& c) {
    nlohmann::json j;
    j["earlier_id"] = c.earlier_id;
    j["later_id"] = c.later_id;
    j["kind"] = to_string(c.kind);
    j["labels"] = {{"resubmission", c.is_resubmission},
                   {"simultaneous", c.is_simultaneous},
                   {"published_duplicate", c.is_published_duplicate}};
    j["evidence"] = {
        {"earlier_journal", c.earlier_journal},
        {"later_journal", c.later_journal},
        {"earlier_submitted", format_date(c.earlier_submitted)},
        {"later_submitted", format_date(c.later_submitted)},
        {"earlier_decided",
         c.earlier_decided ? nlohmann::json(format_date(*c.earlier_decided)) : nlohmann::json(nullptr)},
        {"later_decided",
         c.later_decided ? nlohmann::json(format_date(*c.later_decided)) : nlohmann::json(nullptr)},
        {"earlier_decision", to_string(c.earlier_decision)},
        {"later_decision", to_string(c.later_decision)},
        {"overlap_days", c.overlap_days},
    };
    j["jaccard"] = c.jaccard ? nlohmann::json(*c.jaccard) : nlohmann::json(nullptr);
    j["estimated"] = c.estimated ? nlohmann::json(*c.estimated) : nlohmann::json(nullptr);
    return j;
}

inline std::string classifications_to_jsonl(const std::vector<PairClassification>& list) {
    std::string out;
    for (const auto& c : list) {
        out += classification_to_json(c).dump();
        out.push_back('\n');
    }
    return out;
}

inline std::string journeys_to_jsonl(const std::vector<Journey>& journeys) {
    std::string out;
    for (const auto& journey : journeys) {
        nlohmann::json steps = nlohmann::json::array();
        for (const auto& s : journey.steps) {
            steps.push_back({
                {"manuscript_id", s.manuscript_id},
                {"journal_id", s.journal_id},
                {"submitted_at", format_date(s.submitted_at)},
                {"decision", to_string(s.decision)},
                {"decided_at",
                 s.decided_at ? nlohmann::json(format_date(*s.decided_at)) : nlohmann::json(nullptr)},
            });
        }
        nlohmann::json j{{"cluster_id", journey.cluster_id},
                         {"steps", std::move(steps)},
                         {"bad_transfer_steps", journey.bad_transfer_steps}};
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

inline nlohmann::json stats_to_json(const StatsReport& s) {
    nlohmann::json j;
    j["total_manuscripts"] = s.total_manuscripts;
    j["manuscripts_with_earlier_duplicate"] = {
        {"count", s.manuscripts_with_earlier_duplicate},
        {"fraction", s.earlier_duplicate_fraction}};
    j["verified_pair_count"] = s.verified_pair_count;
    j["intra_cluster_pair_count"] = s.intra_cluster_pair_count;
    j["cluster_count"] = s.cluster_count;
    j["resubmission_pair_fraction"] = s.resubmission_pair_fraction;
    j["resubmission_cluster_pair_fraction"] = s.resubmission_cluster_pair_fraction;
    j["simultaneous_manuscripts"] = {{"count", s.simultaneous_manuscript_count},
                                     {"fraction", s.simultaneous_manuscript_fraction}};
    j["published_duplicate_pair_count"] = s.published_duplicate_pair_count;
    j["journeys"] = {{"transitions", s.journey_transition_count},
                     {"bad_transfer_steps", s.bad_transfer_step_count},
                     {"bad_transfer_fraction", s.bad_transfer_fraction}};
    return j;
}

inline std::string stats_to_table(const StatsReport& s) {
    std::ostringstream out;
    auto row = [&](const std::string& label, const std::string& value) {
        out << "  " << label;
        for (size_t i = label.size(); i < 44; ++i) out << ' ';
        out << value << "\n";
    };
    out << "corpus statistics\n";
    row("total manuscripts", std::to_string(s.total_manuscripts));
    row("with earlier near-duplicate",
        std::to_string(s.manuscripts_with_earlier_duplicate) + " (" +
            detail::fmt_double(s.earlier_duplicate_fraction) + ")");
    row("verified pairs", std::to_string(s.verified_pair_count));
    row("clusters", std::to_string(s.cluster_count));
    row("intra-cluster pairs", std::to_string(s.intra_cluster_pair_count));
    row("resubmission fraction (verified pairs)",
        detail::fmt_double(s.resubmission_pair_fraction));
    row("resubmission fraction (cluster pairs)",
        detail::fmt_double(s.resubmission_cluster_pair_fraction));
    row("simultaneous manuscripts",
        std::to_string(s.simultaneous_manuscript_count) + " (" +
            detail::fmt_double(s.simultaneous_manuscript_fraction) + ")");
    row("published duplicate pairs", std::to_string(s.published_duplicate_pair_count));
    row("journey transitions", std::to_string(s.journey_transition_count));
    row("bad transfers",
        std::to_string(s.bad_transfer_step_count) + " (" +
            detail::fmt_double(s.bad_transfer_fraction) + ")");
    return out.str();
}

inline uint64_t digest_bytes(const std::string& bytes) {
    return fnv1a64(bytes.data(), bytes.size());
}

inline std::string digest_hex(uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

/// Writes every report plus the snapshot and a manifest sufficient to
/// reproduce the run (config, seed, input digest). Identical
/// config/seed/input produce a byte-identical directory.
inline void write_outputs(const PipelineResult& result, const std::filesystem::path& out_dir,
                          const std::string& input_label, uint64_t input_digest,
                          uint64_t input_bytes) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write output file: " + (out_dir / name).string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    };

    const ClassificationPolicy policy{result.snapshot.config.analysis_date.value_or(
        default_analysis_date(result.snapshot.corpus))};
    auto simultaneous =
        find_simultaneous(result.snapshot.corpus, result.clusters, policy);
    auto published = find_published_duplicates(result.snapshot.corpus, result.clusters);

    write_file("pairs.csv", pairs_to_csv(result.pairs));
    write_file("pairs.jsonl", pairs_to_jsonl(result.pairs));
    write_file("clusters.jsonl", clusters_to_jsonl(result.clusters));
    write_file("classifications.jsonl", classifications_to_jsonl(result.classifications));
    write_file("simultaneous.jsonl", classifications_to_jsonl(simultaneous));
    write_file("published_duplicates.jsonl", classifications_to_jsonl(published));
    write_file("journeys.jsonl", journeys_to_jsonl(result.journeys));
    write_file("journeys.dot", export_journeys(result.journeys));
    write_file("stats.json", stats_to_json(result.stats_report).dump(2) + "\n");
    write_file("stats.txt", stats_to_table(result.stats_report));
    save_snapshot(result.snapshot, (out_dir / "snapshot.bin").string());

    nlohmann::json manifest;
    manifest["format"] = "dupescan-run-manifest";
    manifest["format_version"] = 1;
    manifest["config"] = config_to_json(result.snapshot.config);
    manifest["input"] = {{"label", input_label},
                         {"fnv1a64", digest_hex(input_digest)},
                         {"bytes", input_bytes}};
    manifest["ingest"] = {{"lines_read", result.ingest_report.lines_read},
                          {"records_loaded", result.ingest_report.records_loaded},
                          {"skipped_lines", result.ingest_report.skipped.size()}};
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& e : result.ingest_report.skipped) {
        skipped.push_back({{"line", e.line_number}, {"reason", e.reason}});
    }
    manifest["ingest"]["skipped"] = std::move(skipped);
    manifest["counts"] = {{"records", result.snapshot.corpus.size()},
                          {"too_short", result.too_short_ids.size()},
                          {"indexed", result.snapshot.index.size()},
                          {"verified_pairs", result.pairs.size()},
                          {"clusters", result.clusters.size()},
                          {"journeys", result.journeys.size()}};
    manifest["too_short_ids"] = result.too_short_ids;
    manifest["artifacts"] = {"pairs.csv",        "pairs.jsonl",
                             "clusters.jsonl",   "classifications.jsonl",
                             "simultaneous.jsonl", "published_duplicates.jsonl",
                             "journeys.jsonl",   "journeys.dot",
                             "stats.json",       "stats.txt",
                             "snapshot.bin"};
    write_file("manifest.json", manifest.dump(2) + "\n");
}

} // namespace dupescan
