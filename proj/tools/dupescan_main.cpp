// dupescan: near-duplicate manuscript detection and editorial analytics.
//
// Subcommands: ingest, run, query, pairs, simultaneous, published-dups,
// journeys, recommend, stats, synth. Exit codes: 0 success, 1 validation
// error (bad input data / snapshot), 2 configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dupescan/config.hpp"
#include "dupescan/corpus.hpp"
#include "dupescan/pipeline.hpp"
#include "dupescan/snapshot.hpp"
#include "dupescan/synth.hpp"

namespace {

using namespace dupescan;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open output file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("failed writing file: " + path);
}

struct ConfigFlags {
    PipelineConfig config;
    std::string analysis_date;

    void finalize() {
        if (!analysis_date.empty()) {
            auto d = parse_date(analysis_date);
            if (!d) throw ConfigError("invalid --analysis-date (expected YYYY-MM-DD)");
            config.analysis_date = *d;
        }
        config.validate();
    }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--shingle-k", flags.config.shingle_k, "Words per shingle");
    cmd->add_option("--num-hashes", flags.config.num_hashes, "MinHash signature length");
    cmd->add_option("--bands", flags.config.bands, "LSH band count");
    cmd->add_option("--rows", flags.config.rows, "Rows per band (bands*rows = num-hashes)");
    cmd->add_option("--threshold", flags.config.threshold, "Exact Jaccard threshold");
    cmd->add_option("--seed", flags.config.seed, "Seed for shingle and MinHash hashing");
    cmd->add_option("--analysis-date", flags.analysis_date,
                    "Active-interval end for pending records (YYYY-MM-DD)");
    cmd->add_option("--min-support", flags.config.min_support,
                    "Minimum transfer observations per recommended destination");
    cmd->add_option("--threads", flags.config.threads,
                    "Worker thread cap (0 = hardware); never changes output");
}

void print_timings(const std::vector<StageTiming>& timings) {
    for (const auto& t : timings) {
        std::cerr << "  " << t.stage;
        for (size_t i = t.stage.size(); i < 12; ++i) std::cerr << ' ';
        std::cerr << t.milliseconds << " ms\n";
    }
}

nlohmann::json ingest_report_json(const IngestReport& report) {
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& e : report.skipped) {
        skipped.push_back({{"line", e.line_number}, {"reason", e.reason}});
    }
    return {{"lines_read", report.lines_read},
            {"records_loaded", report.records_loaded},
            {"skipped", std::move(skipped)}};
}

ManuscriptRecord probe_record(const std::string& id, const std::string& title,
                              const std::string& abstract) {
    ManuscriptRecord rec;
    rec.id = id;
    rec.journal_id = "";
    rec.title = title;
    rec.abstract = abstract;
    rec.submitted_at = Date{0};
    rec.decision = Decision::pending;
    return rec;
}

void emit_query_matches(const std::string& probe_id, const std::vector<VerifiedPair>& matches) {
    for (const auto& m : matches) {
        std::string match_id = m.id_a == probe_id ? m.id_b : m.id_a;
        nlohmann::json j{{"probe_id", probe_id},
                         {"match_id", match_id},
                         {"jaccard", m.jaccard},
                         {"estimated", m.estimated}};
        std::cout << j.dump() << "\n";
    }
}

int run_app(int argc, char** argv) {
    CLI::App app{"near-duplicate manuscript detection (MinHash LSH) and editorial analytics"};
    app.require_subcommand(1);

    ConfigFlags flags;
    if (const char* env = std::getenv("DUPESCAN_CONFIG"); env && *env) {
        config_apply_file(flags.config, env);
    }

    // ---- ingest ----
    auto* cmd_ingest = app.add_subcommand("ingest", "Validate a JSONL corpus and report errors");
    std::string ingest_input;
    bool skip_duplicate_ids = false;
    cmd_ingest->add_option("input", ingest_input, "JSONL corpus file")->required();
    cmd_ingest->add_flag("--skip-duplicate-ids", skip_duplicate_ids,
                         "Skip lines with duplicate ids instead of failing");
    cmd_ingest->callback([&] {
        std::istringstream in(read_file(ingest_input));
        IngestReport report;
        ingest(in, report, IngestOptions{skip_duplicate_ids});
        std::cout << ingest_report_json(report).dump(2) << "\n";
    });

    // ---- run ----
    auto* cmd_run = app.add_subcommand("run", "Run the full pipeline and write all reports");
    std::string run_input, out_dir;
    cmd_run->add_option("input", run_input, "JSONL corpus file")->required();
    cmd_run->add_option("--out-dir", out_dir, "Output directory")->required();
    cmd_run->add_flag("--skip-duplicate-ids", skip_duplicate_ids,
                      "Skip lines with duplicate ids instead of failing");
    add_config_flags(cmd_run, flags);
    cmd_run->callback([&] {
        flags.finalize();
        std::string payload = read_file(run_input);
        std::istringstream in(payload);
        auto result = run_pipeline(flags.config, in, IngestOptions{skip_duplicate_ids});
        write_outputs(result, out_dir, run_input, digest_bytes(payload), payload.size());
        std::cerr << "wrote " << out_dir << " (" << result.pairs.size() << " verified pairs, "
                  << result.clusters.size() << " clusters)\n";
        print_timings(result.timings);
    });

    // ---- query ----
    auto* cmd_query = app.add_subcommand("query", "Screen probe manuscripts against a snapshot");
    std::string snapshot_path, probe_title, probe_abstract, probe_id = "probe", probe_input;
    double query_threshold = -1.0;
    cmd_query->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_query->add_option("--title", probe_title, "Probe title");
    cmd_query->add_option("--abstract", probe_abstract, "Probe abstract");
    cmd_query->add_option("--id", probe_id, "Probe id used in the output");
    cmd_query->add_option("--input", probe_input, "JSONL file of probe records");
    cmd_query->add_option("--threshold", query_threshold,
                          "Override the snapshot's Jaccard threshold");
    cmd_query->callback([&] {
        if (probe_title.empty() && probe_input.empty()) {
            throw ConfigError("query needs --title or --input");
        }
        Snapshot snap = load_snapshot(snapshot_path);
        double threshold = query_threshold > 0 ? query_threshold : snap.config.threshold;
        std::vector<ShingleSet> indexed_sets;
        indexed_sets.reserve(snap.index.size());
        for (const auto& sig : snap.index.signatures()) {
            indexed_sets.push_back(snap.shingles[snap.corpus.position_of(sig.manuscript_id)]);
        }
        const uint64_t sh_seed = shingle_seed(snap.config);
        auto screen = [&](const ManuscriptRecord& rec) {
            auto probe_set = shingle(rec, snap.config.shingle_k, sh_seed);
            if (probe_set.too_short) {
                std::cerr << "probe " << rec.id << " yields no shingles; skipped\n";
                return;
            }
            auto sig = sign(probe_set, snap.family);
            emit_query_matches(rec.id, query(snap.index, sig, probe_set, indexed_sets, threshold));
        };
        if (!probe_title.empty()) {
            screen(probe_record(probe_id, probe_title, probe_abstract));
        }
        if (!probe_input.empty()) {
            std::istringstream in(read_file(probe_input));
            IngestReport report;
            Corpus probes = ingest(in, report);
            for (const auto& e : report.skipped) {
                std::cerr << "probe line " << e.line_number << " skipped: " << e.reason << "\n";
            }
            for (const auto& rec : probes.records()) screen(rec);
        }
    });

    // ---- snapshot-based report commands ----
    std::string format = "csv";
    auto* cmd_pairs = app.add_subcommand("pairs", "Emit verified pairs from a snapshot");
    cmd_pairs->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_pairs->add_option("--format", format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd_pairs->callback([&] {
        auto result = analyze_snapshot(load_snapshot(snapshot_path));
        std::cout << (format == "csv" ? pairs_to_csv(result.pairs)
                                      : pairs_to_jsonl(result.pairs));
    });

    auto* cmd_sim = app.add_subcommand("simultaneous",
                                       "Flag overlapping submissions at distinct journals");
    cmd_sim->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_sim->add_option("--analysis-date", flags.analysis_date,
                        "Active-interval end for pending records (YYYY-MM-DD)");
    cmd_sim->callback([&] {
        Snapshot snap = load_snapshot(snapshot_path);
        if (!flags.analysis_date.empty()) {
            auto d = parse_date(flags.analysis_date);
            if (!d) throw ConfigError("invalid --analysis-date (expected YYYY-MM-DD)");
            snap.config.analysis_date = *d;
        }
        auto result = analyze_snapshot(std::move(snap));
        ClassificationPolicy policy{result.snapshot.config.analysis_date.value_or(
            default_analysis_date(result.snapshot.corpus))};
        std::cout << classifications_to_jsonl(
            find_simultaneous(result.snapshot.corpus, result.clusters, policy));
    });

    auto* cmd_pub = app.add_subcommand("published-dups",
                                       "Flag near-duplicate pairs that were both published");
    cmd_pub->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_pub->callback([&] {
        auto result = analyze_snapshot(load_snapshot(snapshot_path));
        std::cout << classifications_to_jsonl(
            find_published_duplicates(result.snapshot.corpus, result.clusters));
    });

    std::string dot_path;
    auto* cmd_journeys = app.add_subcommand("journeys", "Emit manuscript journeys");
    cmd_journeys->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_journeys->add_option("--dot", dot_path, "Also write a DOT graph to this file");
    cmd_journeys->callback([&] {
        auto result = analyze_snapshot(load_snapshot(snapshot_path));
        std::cout << journeys_to_jsonl(result.journeys);
        if (!dot_path.empty()) write_file(dot_path, export_journeys(result.journeys));
    });

    std::string from_journal;
    auto* cmd_rec = app.add_subcommand("recommend", "Rank transfer destinations for a journal");
    cmd_rec->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_rec->add_option("--from-journal", from_journal, "Source journal id")->required();
    cmd_rec->add_option("--min-support", flags.config.min_support,
                        "Minimum observations per destination");
    cmd_rec->callback([&] {
        auto result = analyze_snapshot(load_snapshot(snapshot_path));
        auto rec = recommend_transfers(result.journeys, from_journal, flags.config.min_support);
        if (!rec.journal_seen) {
            std::cerr << "warning: journal " << from_journal << " appears in no journey\n";
        }
        nlohmann::json dests = nlohmann::json::array();
        for (const auto& d : rec.ranked_destinations) {
            dests.push_back({{"journal_id", d.journal_id},
                             {"smoothed_rate", d.smoothed_rate},
                             {"support", d.support},
                             {"accepted", d.accepted}});
        }
        nlohmann::json j{{"from_journal", rec.from_journal},
                         {"journal_seen", rec.journal_seen},
                         {"destinations", std::move(dests)}};
        std::cout << j.dump(2) << "\n";
    });

    bool as_table = false;
    auto* cmd_stats = app.add_subcommand("stats", "Emit the corpus statistics report");
    cmd_stats->add_option("--snapshot", snapshot_path, "Snapshot file")->required();
    cmd_stats->add_flag("--table", as_table, "Human-readable table instead of JSON");
    cmd_stats->callback([&] {
        auto result = analyze_snapshot(load_snapshot(snapshot_path));
        if (as_table) {
            std::cout << stats_to_table(result.stats_report);
        } else {
            std::cout << stats_to_json(result.stats_report).dump(2) << "\n";
        }
    });

    // ---- synth ----
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    SynthSpec spec;
    std::string synth_out, truth_out, date_start, date_end;
    cmd_synth->add_option("--size", spec.size, "Record count")->required();
    cmd_synth->add_option("--near-duplicate-rate", spec.near_duplicate_rate,
                          "Fraction of records with an earlier near-duplicate");
    cmd_synth->add_option("--simultaneous-rate", spec.simultaneous_rate,
                          "Fraction of records in overlapping submissions");
    cmd_synth->add_option("--bad-transfer-rate", spec.bad_transfer_rate,
                          "Fraction of journey transitions revisiting a journal");
    cmd_synth->add_option("--published-duplicate-pairs", spec.published_duplicate_pairs,
                          "Planted pairs with both members published");
    cmd_synth->add_option("--replace-frac", spec.replace_frac,
                          "Max fraction of words replaced per duplicate");
    cmd_synth->add_option("--delete-frac", spec.delete_frac,
                          "Max fraction of words deleted per duplicate");
    cmd_synth->add_option("--journals", spec.journal_count, "Journal count");
    cmd_synth->add_option("--date-start", date_start, "First submission date (YYYY-MM-DD)");
    cmd_synth->add_option("--date-end", date_end, "Last date (YYYY-MM-DD)");
    cmd_synth->add_option("--seed", spec.seed, "Generator seed");
    cmd_synth->add_option("--shingle-k", spec.shingle_k, "Shingle size for the planted-J check");
    cmd_synth->add_option("--threshold", spec.threshold, "Planted pairs keep exact J >= this");
    cmd_synth->add_option("--out", synth_out, "Corpus JSONL output file")->required();
    cmd_synth->add_option("--truth", truth_out, "Ground-truth JSON output file");
    cmd_synth->callback([&] {
        if (!date_start.empty()) {
            auto d = parse_date(date_start);
            if (!d) throw ConfigError("invalid --date-start");
            spec.date_start = *d;
        }
        if (!date_end.empty()) {
            auto d = parse_date(date_end);
            if (!d) throw ConfigError("invalid --date-end");
            spec.date_end = *d;
        }
        auto result = generate_synthetic(spec);
        write_file(synth_out, records_to_jsonl(result.records));
        std::string truth_path = truth_out.empty() ? synth_out + ".truth.json" : truth_out;
        write_file(truth_path, ground_truth_to_json(spec, result.truth).dump(2) + "\n");
        std::cerr << "wrote " << result.records.size() << " records to " << synth_out << " ("
                  << result.truth.duplicate_pairs.size() << " planted pairs), truth in "
                  << truth_path << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const dupescan::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const dupescan::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const dupescan::SnapshotError& e) {
        std::cerr << "snapshot error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
