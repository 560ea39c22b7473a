#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "dupescan/synth.hpp"
#include "oracle.hpp"

using namespace dupescan;

namespace {

std::map<std::string, ManuscriptRecord> by_id(const std::vector<ManuscriptRecord>& records) {
    std::map<std::string, ManuscriptRecord> m;
    for (const auto& r : records) m[r.id] = r;
    return m;
}

} // namespace

TEST_CASE("all-zero rates produce a clean corpus with empty ground truth") {
    SynthSpec spec;
    spec.size = 100;
    auto result = generate_synthetic(spec);
    CHECK(result.records.size() == 100);
    CHECK(result.truth.duplicate_pairs.empty());
    CHECK(result.truth.transitions == 0);
    std::set<std::string> ids;
    for (const auto& rec : result.records) {
        CHECK_FALSE(rec.invariant_violation().has_value());
        ids.insert(rec.id);
    }
    CHECK(ids.size() == 100); // unique ids
}

TEST_CASE("generation is deterministic given the seed") {
    SynthSpec spec;
    spec.size = 200;
    spec.near_duplicate_rate = 0.3;
    spec.simultaneous_rate = 0.05;
    spec.bad_transfer_rate = 0.02;
    spec.seed = 99;
    auto a = generate_synthetic(spec);
    auto b = generate_synthetic(spec);
    CHECK(records_to_jsonl(a.records) == records_to_jsonl(b.records));
    CHECK(ground_truth_to_json(spec, a.truth).dump() == ground_truth_to_json(spec, b.truth).dump());
    spec.seed = 100;
    auto c = generate_synthetic(spec);
    CHECK(records_to_jsonl(a.records) != records_to_jsonl(c.records));
}

TEST_CASE("near_duplicate_rate 0.25 on 1000 records plants 250 pairs") {
    SynthSpec spec;
    spec.size = 1000;
    spec.near_duplicate_rate = 0.25;
    auto result = generate_synthetic(spec);
    CHECK(result.records.size() == 1000);
    CHECK(result.truth.duplicate_pairs.size() == 250);
    CHECK(result.truth.transitions == 250);
    CHECK(result.truth.planted_near_duplicate_fraction == 0.25);
}

TEST_CASE("planted pairs keep exact Jaccard above the threshold") {
    SynthSpec spec;
    spec.size = 400;
    spec.near_duplicate_rate = 0.25;
    spec.replace_frac = 0.02;
    spec.delete_frac = 0.01;
    spec.seed = 5;
    auto result = generate_synthetic(spec);
    auto records = by_id(result.records);
    REQUIRE(result.truth.duplicate_pairs.size() == 100);
    for (const auto& pair : result.truth.duplicate_pairs) {
        // independent check: shingle the emitted text with a different seed;
        // the Jaccard of the shingle sets does not depend on the hash seed
        auto sa = shingle(records.at(pair.id_a), spec.shingle_k, 12345);
        auto sb = shingle(records.at(pair.id_b), spec.shingle_k, 12345);
        double jac = oracle::jaccard(sa.shingles, sb.shingles);
        CHECK(jac >= spec.threshold);
        CHECK(jac == Catch::Approx(pair.exact_jaccard).margin(1e-9));
        // the duplicate is always submitted strictly later
        CHECK(records.at(pair.id_a).submitted_at < records.at(pair.id_b).submitted_at);
    }
}

TEST_CASE("planted kinds satisfy their defining conditions") {
    SynthSpec spec;
    spec.size = 600;
    spec.near_duplicate_rate = 0.3;
    spec.simultaneous_rate = 0.06;   // 18 pairs
    spec.bad_transfer_rate = 0.05;   // 9 of 180 transitions
    spec.published_duplicate_pairs = 7;
    spec.seed = 11;
    auto result = generate_synthetic(spec);
    auto records = by_id(result.records);

    size_t sim = 0, bad = 0, pub = 0;
    for (const auto& pair : result.truth.duplicate_pairs) {
        const auto& a = records.at(pair.id_a);
        const auto& b = records.at(pair.id_b);
        switch (pair.kind) {
            case PlantedKind::simultaneous: {
                ++sim;
                CHECK(a.journal_id != b.journal_id);
                REQUIRE(a.decided_at.has_value());
                CHECK(b.submitted_at <= *a.decided_at); // overlapping intervals
                CHECK(b.submitted_at > a.submitted_at);
                break;
            }
            case PlantedKind::bad_transfer: {
                ++bad;
                CHECK(a.journal_id == b.journal_id);
                REQUIRE(a.decided_at.has_value());
                CHECK(b.submitted_at > *a.decided_at);
                break;
            }
            case PlantedKind::published: {
                ++pub;
                CHECK(is_successful(a.decision));
                CHECK(is_successful(b.decision));
                break;
            }
            case PlantedKind::plain: {
                REQUIRE(a.decided_at.has_value());
                CHECK(b.submitted_at > *a.decided_at); // no overlap
                CHECK(a.decision == Decision::rejected);
                break;
            }
        }
    }
    CHECK(sim == 18);
    CHECK(bad == 9);
    CHECK(pub == 7);
}

TEST_CASE("infeasible perturbation is rejected before emission") {
    SynthSpec spec;
    spec.size = 100;
    spec.near_duplicate_rate = 0.2;
    spec.replace_frac = 0.2; // would push Jaccard far below 0.8
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
}

TEST_CASE("invalid specs are rejected") {
    SynthSpec spec;
    spec.size = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec.size = 100;
    spec.near_duplicate_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec.near_duplicate_rate = 0.6; // more duplicates than originals
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec.near_duplicate_rate = 0.1;
    spec.simultaneous_rate = 0.5; // 25 sim pairs > 10 duplicate pairs
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec.simultaneous_rate = 0.0;
    spec.journal_count = 1;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec.journal_count = 10;
    spec.date_end = spec.date_start.plus_days(100); // too short for planted timelines
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
}

TEST_CASE("emitted records survive ingest round trip") {
    SynthSpec spec;
    spec.size = 50;
    spec.near_duplicate_rate = 0.2;
    auto result = generate_synthetic(spec);
    std::istringstream in(records_to_jsonl(result.records));
    IngestReport report;
    Corpus corpus = ingest(in, report);
    CHECK(corpus.size() == 50);
    CHECK(report.skipped.empty());
}
