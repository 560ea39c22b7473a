#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dupescan/config.hpp"
#include "dupescan/corpus.hpp"
#include "dupescan/errors.hpp"
#include "dupescan/hashing.hpp"
#include "dupescan/shingle.hpp"

namespace dupescan {

enum class PlantedKind : uint8_t { plain = 0, simultaneous = 1, bad_transfer = 2, published = 3 };

inline const char* to_string(PlantedKind k) {
    switch (k) {
        case PlantedKind::plain: return "plain";
        case PlantedKind::simultaneous: return "simultaneous";
        case PlantedKind::bad_transfer: return "bad_transfer";
        case PlantedKind::published: return "published";
    }
    return "plain";
}

/// Parameters of the planted-ground-truth corpus generator. Rates are
/// fractions of the corpus: near_duplicate_rate of records get an earlier
/// near-duplicate, simultaneous_rate of records sit in overlapping
/// submissions, bad_transfer_rate of journey transitions revisit a journal.
struct SynthSpec {
    uint32_t size = 0;
    double near_duplicate_rate = 0.0;
    double simultaneous_rate = 0.0;
    double bad_transfer_rate = 0.0;
    uint32_t published_duplicate_pairs = 0;

    /// Perturbation model: per duplicate, up to these fractions of its words
    /// are replaced / deleted (the draw is uniform in [0, fraction]).
    double replace_frac = 0.01;
    double delete_frac = 0.005;

    uint32_t journal_count = 50;
    Date date_start = Date{17532};  // 2018-01-01
    Date date_end = Date{18566};    // 2020-10-31
    uint64_t seed = 42;

    /// Shingling parameters the planted pairs are checked against at
    /// generation time: every planted pair keeps exact Jaccard >= threshold.
    int shingle_k = 3;
    double threshold = 0.8;
};

struct PlantedPair {
    std::string id_a; // the original (submitted earlier)
    std::string id_b; // the duplicate
    double exact_jaccard = 0.0;
    PlantedKind kind = PlantedKind::plain;
};

struct GroundTruth {
    std::vector<PlantedPair> duplicate_pairs;
    uint64_t transitions = 0; // journey transitions implied by the planted clusters
    double planted_near_duplicate_fraction = 0.0;
    double planted_simultaneous_fraction = 0.0;
    double planted_bad_transfer_fraction = 0.0;
};

struct SynthResult {
    std::vector<ManuscriptRecord> records;
    GroundTruth truth;
};

namespace detail {

class Rng {
public:
    explicit Rng(uint64_t seed) : stream_(seed) {}

    uint64_t next() { return stream_.next(); }

    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t x = stream_.next();
            if (x >= threshold) return x % bound;
        }
    }

    double unit() { return static_cast<double>(stream_.next() >> 11) * 0x1p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    SplitMix64 stream_;
};

/// Deterministic pseudo-word vocabulary: three syllables addressed by the
/// base-100 digits of the word index, so all words are distinct.
inline std::vector<std::string> make_vocabulary(size_t size) {
    static const char* kConsonants = "bcdfghjklmnpqrstvwxz";
    static const char* kVowels = "aeiou";
    std::vector<std::string> syllables;
    syllables.reserve(100);
    for (int c = 0; c < 20; ++c) {
        for (int v = 0; v < 5; ++v) {
            syllables.push_back(std::string(1, kConsonants[c]) + kVowels[v]);
        }
    }
    std::vector<std::string> vocab;
    vocab.reserve(size);
    for (size_t i = 0; i < size; ++i) {
        vocab.push_back(syllables[(i / 10000) % 100] + syllables[(i / 100) % 100] +
                        syllables[i % 100]);
    }
    return vocab;
}

struct SynthDoc {
    std::vector<std::string> title;
    std::vector<std::string> abstract;

    std::string title_text() const { return join(title); }
    std::string abstract_text() const { return join(abstract); }

    static std::string join(const std::vector<std::string>& words) {
        std::string out;
        for (size_t i = 0; i < words.size(); ++i) {
            if (i) out.push_back(' ');
            out += words[i];
        }
        return out;
    }
};

inline double doc_jaccard(const SynthDoc& a, const SynthDoc& b, int k, uint64_t seed) {
    ManuscriptRecord ra, rb;
    ra.id = "a";
    ra.title = a.title_text();
    ra.abstract = a.abstract_text();
    rb.id = "b";
    rb.title = b.title_text();
    rb.abstract = b.abstract_text();
    return exact_jaccard(shingle(ra, k, seed), shingle(rb, k, seed));
}

} // namespace detail

/// Deterministic synthetic corpus with planted ground truth. Every planted
/// duplicate pair is self-checked to keep exact Jaccard >= spec.threshold.
inline SynthResult generate_synthetic(const SynthSpec& spec) {
    if (spec.size == 0) throw ConfigError("synth corpus size must be positive");
    for (double rate : {spec.near_duplicate_rate, spec.simultaneous_rate,
                        spec.bad_transfer_rate}) {
        if (rate < 0.0 || rate > 1.0) throw ConfigError("synth rates must be in [0,1]");
    }
    if (spec.journal_count < 2) throw ConfigError("synth needs at least 2 journals");
    if (spec.date_end < spec.date_start) throw ConfigError("synth date range is inverted");
    if (spec.shingle_k < 1) throw ConfigError("shingle_k must be >= 1");
    if (spec.replace_frac < 0 || spec.delete_frac < 0) {
        throw ConfigError("perturbation fractions must be nonnegative");
    }

    const auto n_dup = static_cast<uint32_t>(std::llround(spec.near_duplicate_rate * spec.size));
    const auto n_sim =
        static_cast<uint32_t>(std::llround(spec.simultaneous_rate * spec.size / 2.0));
    const auto n_bad = static_cast<uint32_t>(std::llround(spec.bad_transfer_rate * n_dup));
    const uint32_t n_pub = spec.published_duplicate_pairs;
    if (n_dup > spec.size / 2) {
        throw ConfigError("near_duplicate_rate too high: every duplicate needs its own original");
    }
    if (n_sim + n_bad + n_pub > n_dup) {
        throw ConfigError("planted simultaneous/bad-transfer/published pairs exceed the "
                          "planted duplicate count");
    }
    const uint32_t n_base = spec.size - n_dup;

    // Document length model. Feasibility gate: the expected perturbation on
    // an average document must keep Jaccard above the threshold. Each changed
    // word destroys up to k shingles; a replacement adds up to k new ones, a
    // deletion up to k-1. (Per-pair draws are uniform in [0, fraction] and an
    // incremental guard enforces the invariant for every planted pair.)
    const uint32_t title_min = 8, title_spread = 7;
    const uint32_t abstract_min = 60, abstract_spread = 81;
    {
        double k = spec.shingle_k;
        double avg_words = (title_min + (title_spread - 1) / 2.0) +
                           (abstract_min + (abstract_spread - 1) / 2.0);
        double min_shingles = (title_min - k + 1) + (abstract_min - k + 1);
        if (min_shingles < 1) throw ConfigError("shingle_k too large for synth documents");
        double avg_shingles = avg_words - 2 * (k - 1);
        double replaces = 0.5 * spec.replace_frac * avg_words;
        double deletes = 0.5 * spec.delete_frac * avg_words;
        double killed = (replaces + deletes) * k;
        double added = replaces * k + deletes * (k - 1);
        double expected = (avg_shingles - killed) / (avg_shingles + added);
        if (expected < spec.threshold) {
            throw ConfigError("perturbation model infeasible: expected Jaccard " +
                              std::to_string(expected) + " falls below threshold " +
                              std::to_string(spec.threshold));
        }
    }
    if (n_dup > 0 && spec.date_end - spec.date_start < 450) {
        throw ConfigError("date range too short to plant duplicate timelines (need >= 450 days)");
    }

    detail::Rng rng(spec.seed);
    const auto vocab = detail::make_vocabulary(6000);
    auto random_word = [&] { return vocab[rng.below(vocab.size())]; };

    auto manuscript_id = [&](uint32_t i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "S%06u", i);
        return std::string(buf);
    };
    auto journal_id = [&](uint32_t i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "J%03u", i);
        return std::string(buf);
    };

    // Base decision mix; planted originals get theirs overridden below.
    auto draw_decision = [&]() {
        double u = rng.unit();
        if (u < 0.45) return Decision::rejected;
        if (u < 0.70) return Decision::accepted;
        if (u < 0.85) return Decision::published;
        if (u < 0.90) return Decision::withdrawn;
        return Decision::pending;
    };

    const int32_t submit_window = (spec.date_end - spec.date_start) >= 450
                                      ? (spec.date_end - spec.date_start) - 420
                                      : (spec.date_end - spec.date_start) + 1;

    std::vector<detail::SynthDoc> docs(n_base);
    std::vector<ManuscriptRecord> base(n_base);
    for (uint32_t i = 0; i < n_base; ++i) {
        auto& doc = docs[i];
        doc.title.resize(title_min + rng.below(title_spread));
        for (auto& w : doc.title) w = random_word();
        doc.abstract.resize(abstract_min + rng.below(abstract_spread));
        for (auto& w : doc.abstract) w = random_word();

        auto& rec = base[i];
        rec.id = manuscript_id(i);
        rec.journal_id = journal_id(static_cast<uint32_t>(rng.below(spec.journal_count)));
        rec.title = doc.title_text();
        rec.abstract = doc.abstract_text();
        rec.submitted_at = spec.date_start.plus_days(static_cast<int32_t>(rng.below(submit_window)));
        rec.decision = draw_decision();
        if (rec.decision != Decision::pending) {
            rec.decided_at = rec.submitted_at.plus_days(30 + static_cast<int32_t>(rng.below(151)));
        }
    }

    // Pick distinct originals and assign planted-pair kinds.
    std::vector<uint32_t> pool(n_base);
    for (uint32_t i = 0; i < n_base; ++i) pool[i] = i;
    rng.shuffle(pool);
    struct Plan {
        uint32_t original;
        PlantedKind kind;
    };
    std::vector<Plan> plans;
    plans.reserve(n_dup);
    for (uint32_t i = 0; i < n_dup; ++i) {
        PlantedKind kind = PlantedKind::plain;
        if (i < n_sim) {
            kind = PlantedKind::simultaneous;
        } else if (i < n_sim + n_bad) {
            kind = PlantedKind::bad_transfer;
        } else if (i < n_sim + n_bad + n_pub) {
            kind = PlantedKind::published;
        }
        plans.push_back({pool[i], kind});
    }

    // Force original decisions compatible with the planted kind.
    for (const auto& plan : plans) {
        auto& orig = base[plan.original];
        if (plan.kind == PlantedKind::published) {
            orig.decision = rng.unit() < 0.5 ? Decision::accepted : Decision::published;
        } else {
            orig.decision = Decision::rejected;
        }
        if (!orig.decided_at) {
            orig.decided_at = orig.submitted_at.plus_days(30 + static_cast<int32_t>(rng.below(151)));
        }
    }

    GroundTruth truth;
    std::vector<ManuscriptRecord> dups;
    dups.reserve(n_dup);
    for (uint32_t i = 0; i < n_dup; ++i) {
        const auto& plan = plans[i];
        const auto& orig = base[plan.original];
        const auto& orig_doc = docs[plan.original];

        detail::SynthDoc doc = orig_doc;
        size_t words = doc.title.size() + doc.abstract.size();

        // Perturb one word at a time, never crossing the threshold.
        auto replaces = static_cast<size_t>(rng.unit() * spec.replace_frac * words + 0.5);
        auto deletes = static_cast<size_t>(rng.unit() * spec.delete_frac * words + 0.5);
        for (size_t op = 0; op < replaces + deletes; ++op) {
            detail::SynthDoc candidate = doc;
            size_t pos = rng.below(candidate.title.size() + candidate.abstract.size());
            auto& field = pos < candidate.title.size() ? candidate.title : candidate.abstract;
            size_t idx = pos < candidate.title.size() ? pos : pos - candidate.title.size();
            if (op < replaces) {
                std::string replacement = random_word();
                while (replacement == field[idx]) replacement = random_word();
                field[idx] = replacement;
            } else {
                if (field.size() <= 1) continue;
                field.erase(field.begin() + static_cast<ptrdiff_t>(idx));
            }
            if (detail::doc_jaccard(orig_doc, candidate, spec.shingle_k, spec.seed) <
                spec.threshold) {
                break;
            }
            doc = std::move(candidate);
        }

        ManuscriptRecord rec;
        rec.id = manuscript_id(n_base + i);
        rec.title = doc.title_text();
        rec.abstract = doc.abstract_text();

        if (plan.kind == PlantedKind::bad_transfer) {
            rec.journal_id = orig.journal_id;
        } else {
            std::string journal = orig.journal_id;
            while (journal == orig.journal_id) {
                journal = journal_id(static_cast<uint32_t>(rng.below(spec.journal_count)));
            }
            rec.journal_id = journal;
        }

        if (plan.kind == PlantedKind::simultaneous) {
            // submitted strictly after the original but inside its review window
            int32_t window = *orig.decided_at - orig.submitted_at;
            rec.submitted_at =
                orig.submitted_at.plus_days(1 + static_cast<int32_t>(rng.below(window)));
        } else {
            rec.submitted_at =
                orig.decided_at->plus_days(1 + static_cast<int32_t>(rng.below(60)));
        }

        if (plan.kind == PlantedKind::published) {
            rec.decision = rng.unit() < 0.5 ? Decision::accepted : Decision::published;
        } else {
            double u = rng.unit();
            if (u < 0.50) {
                rec.decision = Decision::rejected;
            } else if (u < 0.70) {
                rec.decision = Decision::accepted;
            } else if (u < 0.80) {
                rec.decision = Decision::withdrawn;
            } else {
                rec.decision = Decision::pending;
            }
        }
        if (rec.decision != Decision::pending) {
            rec.decided_at = rec.submitted_at.plus_days(30 + static_cast<int32_t>(rng.below(151)));
        }
        if (plan.kind == PlantedKind::bad_transfer ||
            (plan.kind == PlantedKind::plain && rng.unit() < 0.5)) {
            rec.transferred_from = orig.id;
        }

        double jac = detail::doc_jaccard(orig_doc, doc, spec.shingle_k, spec.seed);
        if (jac < spec.threshold) {
            throw ConfigError("planted pair fell below threshold; perturbation infeasible");
        }
        truth.duplicate_pairs.push_back({orig.id, rec.id, jac, plan.kind});
        dups.push_back(std::move(rec));
    }

    SynthResult result;
    result.records = std::move(base);
    result.records.insert(result.records.end(), std::make_move_iterator(dups.begin()),
                          std::make_move_iterator(dups.end()));
    rng.shuffle(result.records);

    truth.transitions = n_dup;
    if (spec.size > 0) {
        truth.planted_near_duplicate_fraction = static_cast<double>(n_dup) / spec.size;
        truth.planted_simultaneous_fraction = static_cast<double>(2 * n_sim) / spec.size;
    }
    if (n_dup > 0) {
        truth.planted_bad_transfer_fraction = static_cast<double>(n_bad) / n_dup;
    }
    result.truth = std::move(truth);
    return result;
}

inline std::string records_to_jsonl(const std::vector<ManuscriptRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += detail::record_to_json(rec).dump();
        out.push_back('\n');
    }
    return out;
}

inline nlohmann::json ground_truth_to_json(const SynthSpec& spec, const GroundTruth& truth) {
    nlohmann::json j;
    j["spec"] = {
        {"size", spec.size},
        {"near_duplicate_rate", spec.near_duplicate_rate},
        {"simultaneous_rate", spec.simultaneous_rate},
        {"bad_transfer_rate", spec.bad_transfer_rate},
        {"published_duplicate_pairs", spec.published_duplicate_pairs},
        {"replace_frac", spec.replace_frac},
        {"delete_frac", spec.delete_frac},
        {"journal_count", spec.journal_count},
        {"date_start", format_date(spec.date_start)},
        {"date_end", format_date(spec.date_end)},
        {"seed", spec.seed},
        {"shingle_k", spec.shingle_k},
        {"threshold", spec.threshold},
    };
    j["planted_rates"] = {
        {"near_duplicate", truth.planted_near_duplicate_fraction},
        {"simultaneous_manuscripts", truth.planted_simultaneous_fraction},
        {"bad_transfer", truth.planted_bad_transfer_fraction},
    };
    j["transitions"] = truth.transitions;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : truth.duplicate_pairs) {
        pairs.push_back({{"a", p.id_a},
                         {"b", p.id_b},
                         {"jaccard", p.exact_jaccard},
                         {"kind", to_string(p.kind)}});
    }
    j["duplicate_pairs"] = std::move(pairs);
    return j;
}

} // namespace dupescan
