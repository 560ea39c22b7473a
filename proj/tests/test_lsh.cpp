#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "dupescan/lsh.hpp"
#include "oracle.hpp"

using namespace dupescan;

namespace {

ShingleSet make_set(const std::string& id, std::vector<uint64_t> values) {
    ShingleSet s;
    s.manuscript_id = id;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    s.shingles = std::move(values);
    return s;
}

std::vector<uint64_t> range_set(uint64_t lo, uint64_t hi) {
    std::vector<uint64_t> v(hi - lo + 1);
    std::iota(v.begin(), v.end(), lo);
    return v;
}

MinHashSignature fixed_signature(const std::string& id, std::vector<uint64_t> values,
                                 uint64_t tag = 1) {
    MinHashSignature sig;
    sig.manuscript_id = id;
    sig.values = std::move(values);
    sig.family_tag = tag;
    return sig;
}

} // namespace

TEST_CASE("single signature fills one bucket per band") {
    auto index = LshIndex::build({fixed_signature("M1", std::vector<uint64_t>(32, 9))}, 4, 8);
    REQUIRE(index.tables().size() == 4);
    for (const auto& table : index.tables()) {
        REQUIRE(table.size() == 1);
        CHECK(table.begin()->second.size() == 1);
    }
    CHECK(index.candidates().empty());
}

TEST_CASE("identical signatures co-bucket in every band") {
    auto index = LshIndex::build({fixed_signature("M1", std::vector<uint64_t>(32, 9)),
                                  fixed_signature("M2", std::vector<uint64_t>(32, 9))},
                                 4, 8);
    for (const auto& table : index.tables()) {
        REQUIRE(table.size() == 1);
        CHECK(table.begin()->second.size() == 2);
    }
    auto pairs = index.candidates();
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<uint32_t, uint32_t>{0, 1});
}

TEST_CASE("fully distinct signatures never co-bucket") {
    std::vector<uint64_t> a(32), b(32);
    std::iota(a.begin(), a.end(), 1);
    std::iota(b.begin(), b.end(), 1000);
    auto index = LshIndex::build(
        {fixed_signature("M1", a), fixed_signature("M2", b)}, 4, 8);
    CHECK(index.candidates().empty());
    for (const auto& table : index.tables()) CHECK(table.size() == 2);
}

TEST_CASE("signature length must equal bands*rows") {
    CHECK_THROWS_AS(
        LshIndex::build({fixed_signature("M1", std::vector<uint64_t>(33, 1))}, 4, 8),
        ConfigError);
}

TEST_CASE("candidates require a frozen index and adds reject a frozen one") {
    LshIndex index(2, 2);
    index.add(fixed_signature("M1", {1, 2, 3, 4}));
    CHECK_THROWS_AS(index.candidates(), ConfigError);
    index.freeze();
    CHECK(index.candidates().empty());
    CHECK_THROWS_AS(index.add(fixed_signature("M2", {1, 2, 3, 4})), ConfigError);
}

TEST_CASE("candidate set is invariant under signature permutation") {
    SplitMix64 rng(5);
    std::vector<MinHashSignature> sigs;
    for (int i = 0; i < 30; ++i) {
        std::vector<uint64_t> values(16);
        for (auto& v : values) v = rng.next() % 4; // many collisions on purpose
        sigs.push_back(fixed_signature("M" + std::to_string(i), values));
    }
    auto id_pairs = [](const LshIndex& index) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto [x, y] : index.candidates()) {
            auto a = index.signatures()[x].manuscript_id;
            auto b = index.signatures()[y].manuscript_id;
            out.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    auto forward = id_pairs(LshIndex::build(sigs, 4, 4));
    std::reverse(sigs.begin(), sigs.end());
    auto backward = id_pairs(LshIndex::build(sigs, 4, 4));
    CHECK(forward == backward);
    CHECK_FALSE(forward.empty());
}

TEST_CASE("verify keeps exactly the pairs at or above the threshold") {
    // J(A90, B79) = 79/100 = 0.79 and J(A90, B80) = 80/100 = 0.80
    auto a = make_set("A", range_set(1, 90));
    auto b79 = [] {
        auto v = range_set(1, 79);
        auto tail = range_set(91, 100);
        v.insert(v.end(), tail.begin(), tail.end());
        return make_set("B79", v);
    }();
    auto b80 = [] {
        auto v = range_set(1, 80);
        auto tail = range_set(91, 100);
        v.insert(v.end(), tail.begin(), tail.end());
        return make_set("B80", v);
    }();
    REQUIRE(oracle::jaccard(a.shingles, b79.shingles) == Catch::Approx(0.79));
    REQUIRE(oracle::jaccard(a.shingles, b80.shingles) == Catch::Approx(0.80));

    auto family = make_hash_family(32, 13);
    std::vector<ShingleSet> sets{a, b79, b80, a};
    sets[3].manuscript_id = "A2";
    std::vector<MinHashSignature> sigs;
    for (const auto& s : sets) sigs.push_back(sign(s, family));
    auto index = LshIndex::build(sigs, 4, 8);

    std::vector<std::pair<uint32_t, uint32_t>> cands{{0, 1}, {0, 2}, {0, 3}};
    auto verified = verify(cands, index, sets, 0.8);
    REQUIRE(verified.size() == 2);
    CHECK(verified[0].id_a == "A");
    CHECK(verified[0].id_b == "A2");
    CHECK(verified[0].jaccard == 1.0);
    CHECK(verified[1].id_b == "B80");
    CHECK(verified[1].jaccard == Catch::Approx(0.8));
    CHECK(verified[1].estimated >= 0.0);
    for (const auto& p : verified) CHECK(p.jaccard >= 0.8);
}

TEST_CASE("verify reports a missing shingle set by id") {
    auto family = make_hash_family(32, 13);
    auto a = make_set("A", range_set(1, 50));
    auto b = make_set("B", range_set(1, 50));
    auto index = LshIndex::build({sign(a, family), sign(b, family)}, 4, 8);
    std::vector<ShingleSet> incomplete{a}; // B's set not supplied
    try {
        verify({{0, 1}}, index, incomplete, 0.8);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("B") != std::string::npos);
    }
}

TEST_CASE("query returns indexed near-duplicates of a probe") {
    auto family = make_hash_family(128, 3);
    std::vector<ShingleSet> sets;
    sets.push_back(make_set("M0", range_set(1, 100)));
    sets.push_back(make_set("M1", range_set(500, 600)));
    std::vector<MinHashSignature> sigs;
    for (const auto& s : sets) sigs.push_back(sign(s, family));
    auto index = LshIndex::build(sigs, 16, 8);

    SECTION("identical probe matches with J=1") {
        auto probe = make_set("P", range_set(1, 100));
        auto hits = query(index, sign(probe, family), probe, sets, 0.8);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].jaccard == 1.0);
        CHECK(hits[0].id_a == "M0");
        CHECK(hits[0].id_b == "P");
    }

    SECTION("disjoint probe matches nothing") {
        auto probe = make_set("P", range_set(9000, 9100));
        CHECK(query(index, sign(probe, family), probe, sets, 0.8).empty());
    }

    SECTION("perturbed probe is returned iff its exact J clears the threshold") {
        // 10 of 100 values replaced: J = 90/110 ≈ 0.818 >= 0.8
        auto close = range_set(1, 90);
        auto extra = range_set(2000, 2009);
        close.insert(close.end(), extra.begin(), extra.end());
        auto probe = make_set("P", close);
        double truth = oracle::jaccard(probe.shingles, sets[0].shingles);
        REQUIRE(truth == Catch::Approx(90.0 / 110.0));
        auto hits = query(index, sign(probe, family), probe, sets, 0.8);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].jaccard == Catch::Approx(truth));

        // 25 replaced: J = 75/125 = 0.6 < 0.8
        auto far = range_set(1, 75);
        auto extra2 = range_set(2000, 2024);
        far.insert(far.end(), extra2.begin(), extra2.end());
        auto probe2 = make_set("P2", far);
        REQUIRE(oracle::jaccard(probe2.shingles, sets[0].shingles) < 0.8);
        CHECK(query(index, sign(probe2, family), probe2, sets, 0.8).empty());
    }

    SECTION("probe from another family is rejected") {
        auto other = make_hash_family(128, 4);
        auto probe = make_set("P", range_set(1, 100));
        CHECK_THROWS_AS(query(index, sign(probe, other), probe, sets, 0.8), ConfigError);
    }
}

TEST_CASE("empirical candidate rate follows the banding S-curve") {
    // P(candidate | agreement s) = 1 - (1 - s^r)^b for iid component agreement
    const uint32_t b = 16, r = 8;
    const int trials = 1500;
    for (double s : {0.5, 0.9}) {
        int hits = 0;
        SplitMix64 rng(static_cast<uint64_t>(s * 1000) + 17);
        for (int trial = 0; trial < trials; ++trial) {
            std::vector<uint64_t> va(b * r), vb(b * r);
            for (size_t i = 0; i < va.size(); ++i) {
                va[i] = rng.next();
                double u = static_cast<double>(rng.next() >> 11) * 0x1p-53;
                vb[i] = (u < s) ? va[i] : rng.next();
            }
            auto index = LshIndex::build(
                {fixed_signature("A", va), fixed_signature("B", vb)}, b, r);
            hits += index.candidates().empty() ? 0 : 1;
        }
        double expect = 1.0 - std::pow(1.0 - std::pow(s, r), b);
        double rate = static_cast<double>(hits) / trials;
        INFO("s=" << s << " rate=" << rate << " expect=" << expect);
        CHECK(std::abs(rate - expect) <= 0.05);
    }
}
