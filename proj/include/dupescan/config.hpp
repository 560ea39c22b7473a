#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "dupescan/dates.hpp"
#include "dupescan/errors.hpp"
#include "dupescan/hashing.hpp"

namespace dupescan {

/// Pipeline parameters. The single seed drives shingle hashing, the MinHash
/// family, and synthetic generation; it is stored in snapshots because
/// signatures are only comparable within one family.
struct PipelineConfig {
    int shingle_k = 3;
    uint32_t num_hashes = 128;
    uint32_t bands = 16;
    uint32_t rows = 8;
    double threshold = 0.8;
    uint64_t seed = 42;
    std::optional<Date> analysis_date;
    uint32_t min_support = 3;
    uint32_t threads = 0; // 0 = hardware concurrency

    void validate() const {
        if (shingle_k < 1) throw ConfigError("shingle_k must be >= 1");
        if (num_hashes == 0) throw ConfigError("num_hashes must be positive");
        if (static_cast<uint64_t>(bands) * rows != num_hashes) {
            throw ConfigError("bands*rows must equal num_hashes (" + std::to_string(bands) +
                              "*" + std::to_string(rows) +
                              " != " + std::to_string(num_hashes) + ")");
        }
        if (!(threshold > 0.0 && threshold <= 1.0)) {
            throw ConfigError("threshold must be in (0, 1]");
        }
    }
};

// Salts deriving per-purpose seed streams from the one config seed.
inline constexpr uint64_t kShingleSeedSalt = 0x7368696e676c6573ull;  // "shingles"
inline constexpr uint64_t kFamilySeedSalt = 0x6d696e68617368ull;    // "minhash"

inline uint64_t shingle_seed(const PipelineConfig& config) {
    return mix64(config.seed ^ kShingleSeedSalt);
}

inline uint64_t family_seed(const PipelineConfig& config) {
    return mix64(config.seed ^ kFamilySeedSalt);
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["shingle_k"] = c.shingle_k;
    j["num_hashes"] = c.num_hashes;
    j["bands"] = c.bands;
    j["rows"] = c.rows;
    j["threshold"] = c.threshold;
    j["seed"] = c.seed;
    j["analysis_date"] =
        c.analysis_date ? nlohmann::json(format_date(*c.analysis_date)) : nlohmann::json(nullptr);
    j["min_support"] = c.min_support;
    return j;
}

/// Applies fields found in a JSON config object; unknown keys are rejected.
/// `threads` is accepted but never serialized: it must not affect output.
inline void config_apply_json(PipelineConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "shingle_k") {
                c.shingle_k = value.get<int>();
            } else if (key == "num_hashes") {
                c.num_hashes = value.get<uint32_t>();
            } else if (key == "bands") {
                c.bands = value.get<uint32_t>();
            } else if (key == "rows") {
                c.rows = value.get<uint32_t>();
            } else if (key == "threshold") {
                c.threshold = value.get<double>();
            } else if (key == "seed") {
                c.seed = value.get<uint64_t>();
            } else if (key == "analysis_date") {
                if (value.is_null()) {
                    c.analysis_date.reset();
                } else {
                    auto d = parse_date(value.get<std::string>());
                    if (!d) throw ConfigError("invalid analysis_date in config");
                    c.analysis_date = *d;
                }
            } else if (key == "min_support") {
                c.min_support = value.get<uint32_t>();
            } else if (key == "threads") {
                c.threads = value.get<uint32_t>();
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad config value for " + key + ": " + e.what());
        }
    }
}

inline void config_apply_file(PipelineConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config file " + path + ": " + e.what());
    }
    config_apply_json(c, j);
}

} // namespace dupescan
