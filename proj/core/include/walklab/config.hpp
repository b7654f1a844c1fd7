#pragma once

#include <cstdint>
#include <string>

#include "walklab/replication.hpp"

namespace walklab {

/// A parsed experiment file: the runnable configuration, the growth-condition
/// parameters (Theorem-3-style schedules), and the canonical serialization
/// the config hash is computed from.
struct LabConfig {
    ExperimentConfig experiment;
    double growth_a = 0.0;     // 0 disables the growth validation
    double growth_alpha = 0.0;
    std::string canonical;
    std::uint64_t hash = 0;
};

/// Sectioned key = value text. Vectors are space-separated, matrix rows and
/// list entries are ';'-separated, atom entries are "x.. : prob".
/// Errors carry the offending line number.
LabConfig parse_config_text(const std::string& text);

LabConfig load_config(const std::string& path);

/// Fixed key order, 17 significant digits; parse(canonical) == canonical.
std::string canonical_config_text(const LabConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

/// "0x" + 16 hex digits.
std::string hash_string(std::uint64_t h);

} // namespace walklab
