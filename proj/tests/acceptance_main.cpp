// Acceptance suite: exercises the pipeline's end-to-end guarantees at fixed
// tolerances and prints one [PASS]/[FAIL] line per criterion. Takes the
// dupescan CLI path as argv[1] (used by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dupescan/pipeline.hpp"
#include "dupescan/snapshot.hpp"
#include "dupescan/synth.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace dupescan;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << " (" << name
              << "): " << detail << "\n";
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// --- criterion 1: oracle equivalence on >= 20 seeded 500-record corpora ----

void criterion_oracle_equivalence() {
    const int corpora = 20;
    bool precision_exact = true;
    double recall_sum = 0.0;
    double worst_runtime = 0.0;
    for (int i = 0; i < corpora; ++i) {
        SynthSpec spec;
        spec.size = 500;
        spec.near_duplicate_rate = 0.3;
        spec.simultaneous_rate = 0.04;
        spec.bad_transfer_rate = 0.02;
        spec.replace_frac = 0.02;
        spec.delete_frac = 0.01;
        spec.seed = 1000 + static_cast<uint64_t>(i);
        auto synth = generate_synthetic(spec);

        auto start = std::chrono::steady_clock::now();
        Corpus corpus;
        for (auto& rec : synth.records) corpus.add(std::move(rec));
        PipelineConfig config; // defaults: n=128, b=16, r=8, t=0.8
        auto result = run_pipeline_on_corpus(config, std::move(corpus));
        worst_runtime = std::max(worst_runtime, seconds_since(start));

        auto brute = oracle::all_pairs(result.snapshot.shingles, config.threshold);
        std::set<std::pair<std::string, std::string>> brute_set;
        std::map<std::pair<std::string, std::string>, double> brute_jaccard;
        for (const auto& p : brute) {
            brute_set.insert({p.id_a, p.id_b});
            brute_jaccard[{p.id_a, p.id_b}] = p.jaccard;
        }
        std::set<std::pair<std::string, std::string>> verified;
        for (const auto& p : result.pairs) {
            verified.insert({p.id_a, p.id_b});
            auto it = brute_jaccard.find({p.id_a, p.id_b});
            if (it == brute_jaccard.end() || std::abs(it->second - p.jaccard) > 1e-12) {
                precision_exact = false;
            }
        }
        size_t high = 0, high_found = 0;
        for (const auto& p : brute) {
            if (p.jaccard < 0.85) continue;
            ++high;
            high_found += verified.count({p.id_a, p.id_b});
        }
        recall_sum += high == 0 ? 1.0 : static_cast<double>(high_found) / high;
    }
    double recall = recall_sum / corpora;
    bool pass = precision_exact && recall >= 0.95 && worst_runtime < 30.0;
    report(1, "oracle equivalence", pass,
           "precision=" + std::string(precision_exact ? "1.0" : "<1.0") +
               " recall(J>=0.85)=" + fmt(recall) + " over " + std::to_string(corpora) +
               " corpora, worst runtime " + fmt(worst_runtime) + "s (need: precision 1.0, "
               "recall >= 0.95, < 30s)");
}

// --- criterion 2: estimator unbiasedness and concentration ------------------

void criterion_estimator_unbiasedness() {
    const size_t m = 500;
    const int families = 200;
    // Elements are mix64 images of small integers: fixed and deterministic,
    // and distributed like real shingle hashes (mix64 is a bijection, so the
    // intersection and union sizes are exact).
    std::vector<std::pair<ShingleSet, ShingleSet>> fixed_pairs;
    std::vector<double> truths;
    for (int i = 0; i < 10; ++i) {
        double target = 0.1 + 0.8 * i / 9.0;
        auto shared = static_cast<size_t>(std::llround(2.0 * m * target / (1.0 + target)));
        ShingleSet a, b;
        a.manuscript_id = "a" + std::to_string(i);
        b.manuscript_id = "b" + std::to_string(i);
        uint64_t salt = static_cast<uint64_t>(i) << 32;
        for (size_t v = 1; v <= m; ++v) a.shingles.push_back(mix64(salt + v));
        for (size_t v = 1; v <= shared; ++v) b.shingles.push_back(mix64(salt + v));
        for (size_t v = 0; v < m - shared; ++v) b.shingles.push_back(mix64(salt + 1000000 + v));
        std::sort(a.shingles.begin(), a.shingles.end());
        std::sort(b.shingles.begin(), b.shingles.end());
        fixed_pairs.emplace_back(std::move(a), std::move(b));
        truths.push_back(oracle::jaccard(fixed_pairs.back().first.shingles,
                                         fixed_pairs.back().second.shingles));
    }

    double worst_bias = 0.0;
    int big_deviations = 0, trials = 0;
    for (size_t p = 0; p < fixed_pairs.size(); ++p) {
        double sum = 0.0;
        for (int f = 0; f < families; ++f) {
            auto family = make_hash_family(128, 70000 + static_cast<uint64_t>(f));
            double est = estimate_jaccard(sign(fixed_pairs[p].first, family),
                                          sign(fixed_pairs[p].second, family));
            sum += est;
            ++trials;
            if (std::abs(est - truths[p]) > 0.15) ++big_deviations;
        }
        worst_bias = std::max(worst_bias, std::abs(sum / families - truths[p]));
    }
    double deviation_rate = static_cast<double>(big_deviations) / trials;
    bool pass = worst_bias <= 0.02 && deviation_rate < 0.01;
    report(2, "estimator unbiasedness", pass,
           "worst |mean-J|=" + fmt(worst_bias) + " over " + std::to_string(families) +
               " families x 10 pairs; deviation>0.15 rate=" + fmt(deviation_rate) +
               " (need: <= 0.02 and < 0.01)");
}

// --- criterion 3: S-curve conformance ---------------------------------------

void criterion_s_curve() {
    const uint32_t b = 16, r = 8;
    const int trials = 4000;
    bool pass = true;
    std::string detail;
    SplitMix64 rng(424242);
    for (double s : {0.5, 0.7, 0.8, 0.9}) {
        int hits = 0;
        for (int t = 0; t < trials; ++t) {
            MinHashSignature sa, sb;
            sa.manuscript_id = "a";
            sb.manuscript_id = "b";
            sa.family_tag = sb.family_tag = 1;
            sa.values.resize(static_cast<size_t>(b) * r);
            sb.values.resize(sa.values.size());
            for (size_t i = 0; i < sa.values.size(); ++i) {
                sa.values[i] = rng.next();
                double u = static_cast<double>(rng.next() >> 11) * 0x1p-53;
                sb.values[i] = (u < s) ? sa.values[i] : rng.next();
            }
            auto index = LshIndex::build({sa, sb}, b, r);
            hits += index.candidates().empty() ? 0 : 1;
        }
        double rate = static_cast<double>(hits) / trials;
        double expect = 1.0 - std::pow(1.0 - std::pow(s, static_cast<int>(r)),
                                       static_cast<int>(b));
        if (std::abs(rate - expect) > 0.05) pass = false;
        detail += "s=" + fmt(s) + ": " + fmt(rate) + " vs " + fmt(expect) + "  ";
    }
    report(3, "S-curve conformance", pass, detail + "(need |diff| <= 0.05)");
}

// --- criterion 4: planted-rate reproduction on 10k records ------------------

void criterion_planted_rates() {
    auto start = std::chrono::steady_clock::now();
    SynthSpec spec;
    spec.size = 10000;
    spec.near_duplicate_rate = 0.25;
    spec.simultaneous_rate = 0.025;
    spec.bad_transfer_rate = 0.01;
    spec.seed = 20180114;
    auto synth = generate_synthetic(spec);

    Corpus corpus;
    for (auto& rec : synth.records) corpus.add(std::move(rec));
    PipelineConfig config;
    auto result = run_pipeline_on_corpus(config, std::move(corpus));
    double runtime = seconds_since(start);

    const auto& s = result.stats_report;
    double d_dup = std::abs(s.earlier_duplicate_fraction - 0.25);
    double d_sim = std::abs(s.simultaneous_manuscript_fraction - 0.025);
    double d_bad = std::abs(s.bad_transfer_fraction - 0.01);
    bool pass = d_dup <= 0.01 && d_sim <= 0.005 && d_bad <= 0.003 && runtime < 120.0;
    report(4, "planted-rate reproduction", pass,
           "earlier-dup=" + fmt(s.earlier_duplicate_fraction) + " (|d|=" + fmt(d_dup) +
               "<=0.01), simultaneous=" + fmt(s.simultaneous_manuscript_fraction) +
               " (|d|=" + fmt(d_sim) + "<=0.005), bad-transfer=" + fmt(s.bad_transfer_fraction) +
               " (|d|=" + fmt(d_bad) + "<=0.003), runtime " + fmt(runtime) + "s < 120s");
}

// --- criterion 5: byte-identical run output via the CLI ---------------------

int run_cli(const std::string& command) {
    int rc = std::system(command.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& why) {
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a)) names_a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names_b.insert(e.path().filename().string());
    if (names_a != names_b) {
        why = "file lists differ";
        return false;
    }
    for (const auto& name : names_a) {
        if (slurp(a / name) != slurp(b / name)) {
            why = "file " + name + " differs";
            return false;
        }
    }
    return true;
}

void criterion_determinism(const std::string& cli) {
    auto base = fs::temp_directory_path() / "dupescan_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    SynthSpec spec;
    spec.size = 1000;
    spec.near_duplicate_rate = 0.25;
    spec.simultaneous_rate = 0.02;
    spec.bad_transfer_rate = 0.02;
    spec.seed = 5150;
    auto synth = generate_synthetic(spec);
    auto input = (base / "corpus.jsonl").string();
    std::ofstream(input, std::ios::binary) << records_to_jsonl(synth.records);

    auto out1 = (base / "run1").string();
    auto out2 = (base / "run2").string();
    auto out3 = (base / "run3").string();
    std::string common = "\"" + cli + "\" run \"" + input + "\" --seed 77 ";
    int rc1 = run_cli(common + "--threads 1 --out-dir \"" + out1 + "\" 2>/dev/null");
    int rc2 = run_cli(common + "--threads 4 --out-dir \"" + out2 + "\" 2>/dev/null");
    int rc3 = run_cli(common + "--threads 2 --out-dir \"" + out3 + "\" 2>/dev/null");

    std::string why;
    bool pass = rc1 == 0 && rc2 == 0 && rc3 == 0 && dirs_identical(out1, out2, why) &&
                dirs_identical(out1, out3, why);
    report(5, "determinism", pass,
           pass ? "three runs (--threads 1/2/4) produced byte-identical output directories"
                : "runs differ: rc=(" + std::to_string(rc1) + "," + std::to_string(rc2) + "," +
                      std::to_string(rc3) + ") " + why);
    fs::remove_all(base);
}

// --- criterion 6: snapshot round trip on 1000 records -----------------------

void criterion_snapshot_round_trip() {
    SynthSpec spec;
    spec.size = 1000;
    spec.near_duplicate_rate = 0.25;
    spec.seed = 616;
    auto synth = generate_synthetic(spec);
    Corpus corpus;
    for (auto& rec : synth.records) corpus.add(std::move(rec));
    auto result = run_pipeline_on_corpus(PipelineConfig{}, std::move(corpus));

    auto base = fs::temp_directory_path() / "dupescan_acceptance_snap";
    fs::remove_all(base);
    fs::create_directories(base);
    auto path = (base / "snapshot.bin").string();
    save_snapshot(result.snapshot, path);
    auto reloaded = analyze_snapshot(load_snapshot(path));

    bool pairs_equal = result.pairs.size() == reloaded.pairs.size();
    for (size_t i = 0; pairs_equal && i < result.pairs.size(); ++i) {
        pairs_equal = result.pairs[i] == reloaded.pairs[i];
    }
    std::string bytes1 = serialize_snapshot(result.snapshot);
    std::string bytes2 = serialize_snapshot(reloaded.snapshot);
    bool pass = pairs_equal && !result.pairs.empty() && bytes1 == bytes2;
    report(6, "snapshot round trip", pass,
           std::to_string(result.pairs.size()) + " verified pairs identical after save/load; "
           "re-serialization byte-identical: " + (bytes1 == bytes2 ? "yes" : "no"));
    fs::remove_all(base);
}

// --- criterion 7: journey correctness on handcrafted fixtures ---------------

void criterion_journeys() {
    auto record = [](const std::string& id, const std::string& journal,
                     const std::string& submitted, const std::string& decided,
                     Decision decision, const std::string& text) {
        nlohmann::json j{{"id", id},
                         {"journal_id", journal},
                         {"title", text},
                         {"abstract", "shared abstract body words for clustering " + text},
                         {"submitted_at", submitted},
                         {"decided_at", decided.empty() ? nlohmann::json(nullptr)
                                                        : nlohmann::json(decided)},
                         {"decision", decided.empty() ? "pending" : to_string(decision)},
                         {"transferred_from", nullptr}};
        return j.dump() + "\n";
    };
    // cluster 1: J1 -> J2 -> J1 revisit (the Fig.-1 shape, one bad transfer)
    std::string text1 = "journey fixture one with enough words to shingle";
    // cluster 2: J1 -> J2 -> J3, all distinct (no bad transfer)
    std::string text2 = "journey fixture two with enough words to shingle";
    // cluster 3: J4 -> J5 -> J5 -> J4 (two bad transfers)
    std::string text3 = "journey fixture three with enough words to shingle";
    std::string payload =
        record("A1", "J1", "2020-01-01", "2020-02-01", Decision::rejected, text1) +
        record("A2", "J2", "2020-02-10", "2020-03-10", Decision::rejected, text1) +
        record("A3", "J1", "2020-03-20", "", Decision::pending, text1) +
        record("B1", "J1", "2020-01-01", "2020-02-01", Decision::rejected, text2) +
        record("B2", "J2", "2020-02-10", "2020-03-10", Decision::rejected, text2) +
        record("B3", "J3", "2020-03-20", "", Decision::pending, text2) +
        record("C1", "J4", "2020-01-01", "2020-02-01", Decision::rejected, text3) +
        record("C2", "J5", "2020-02-10", "2020-03-10", Decision::rejected, text3) +
        record("C3", "J5", "2020-03-20", "2020-04-20", Decision::rejected, text3) +
        record("C4", "J4", "2020-05-01", "", Decision::pending, text3);

    std::istringstream in(payload);
    auto result = run_pipeline(PipelineConfig{}, in);

    bool pass = result.journeys.size() == 3;
    std::string detail;
    size_t total_bad = 0;
    for (const auto& journey : result.journeys) {
        // independent oracle: a step is bad iff its journal appeared earlier
        std::vector<uint32_t> expected;
        std::set<std::string> seen;
        for (size_t i = 0; i < journey.steps.size(); ++i) {
            if (!seen.insert(journey.steps[i].journal_id).second) {
                expected.push_back(static_cast<uint32_t>(i));
            }
        }
        if (journey.bad_transfer_steps != expected) pass = false;
        total_bad += expected.size();

        auto dot = export_journey(journey);
        size_t red = 0;
        for (size_t pos = dot.find("[color=red]"); pos != std::string::npos;
             pos = dot.find("[color=red]", pos + 1)) {
            ++red;
        }
        if (red != expected.size()) pass = false;
        detail += "cluster " + std::to_string(journey.cluster_id) + ": " +
                  std::to_string(expected.size()) + " bad  ";
    }
    if (total_bad != 3) pass = false; // 1 in cluster A, 0 in B, 2 in C
    report(7, "journey correctness", pass,
           detail + "(multiplicity oracle matched, one red DOT edge per bad transfer)");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-dupescan-cli>\n";
        return 2;
    }
    std::string cli = argv[1];
    auto run = [](int id, const std::string& name, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, name, false, std::string("exception: ") + e.what());
        }
    };
    run(1, "oracle equivalence", [] { criterion_oracle_equivalence(); });
    run(2, "estimator unbiasedness", [] { criterion_estimator_unbiasedness(); });
    run(3, "S-curve conformance", [] { criterion_s_curve(); });
    run(4, "planted-rate reproduction", [] { criterion_planted_rates(); });
    run(5, "determinism", [&] { criterion_determinism(cli); });
    run(6, "snapshot round trip", [] { criterion_snapshot_round_trip(); });
    run(7, "journey correctness", [] { criterion_journeys(); });

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
