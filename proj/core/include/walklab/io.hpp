#pragma once

#include <string>

#include "json.hpp"

#include "walklab/config.hpp"
#include "walklab/replication.hpp"

namespace walklab {

/// Formats a double with 17 significant digits, '.' decimal point.
std::string csv_double(double d);

nlohmann::json aggregate_to_json(const ReplicaAggregate& agg, const LabConfig& config);

/// Inverse of aggregate_to_json for resume and plot-data extraction.
/// Validates the schema field.
ReplicaAggregate aggregate_from_json(const nlohmann::json& j);

nlohmann::json probe_to_json(const ProbEstimate& p);

nlohmann::json manifest_json(const LabConfig& config, const std::string& started_utc,
                             const std::string& finished_utc,
                             const std::vector<std::string>& outputs);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

std::string rate_report_csv(const RateCheckReport& report);

/// Per-replica estimator rows; every numeric column carries a provenance
/// sibling. Also reports the n_last-based normalizer variant next to the
/// count-based one (the two differ at desk scale).
std::string per_replica_csv(const ExperimentConfig& config, std::int64_t replicas_limit);

std::string utc_timestamp();

} // namespace walklab
