#pragma once

#include <stdexcept>
#include <string>

namespace dupescan {

/// Input data violated the record schema or a record invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pipeline or synthesis parameters are inconsistent (e.g. bands*rows != num_hashes).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Snapshot file is corrupt, truncated, or has an unsupported format version.
class SnapshotError : public std::runtime_error {
public:
    explicit SnapshotError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dupescan
