#pragma once

#include <stdexcept>
#include <string>

namespace walklab {

enum class errc {
    invalid_spec,
    non_monotone_schedule,
    invalid_count,
    unsupported_family,
    not_positive_definite,
    off_lattice,
    wrong_dimension,
    out_of_range,
    parity_violation,
    domain_violation,
    length_mismatch,
    incompatible_target,
    insufficient_replicas,
    insufficient_data,
    config_parse,
    schema_mismatch,
    io_failure,
};

/// All library errors carry a machine-readable code plus a human message.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::invalid_spec: return "InvalidSpec";
    case errc::non_monotone_schedule: return "NonMonotoneSchedule";
    case errc::invalid_count: return "InvalidCount";
    case errc::unsupported_family: return "UnsupportedFamily";
    case errc::not_positive_definite: return "NotPositiveDefinite";
    case errc::off_lattice: return "OffLattice";
    case errc::wrong_dimension: return "WrongDimension";
    case errc::out_of_range: return "OutOfRange";
    case errc::parity_violation: return "ParityViolation";
    case errc::domain_violation: return "DomainViolation";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::incompatible_target: return "IncompatibleTarget";
    case errc::insufficient_replicas: return "InsufficientReplicas";
    case errc::insufficient_data: return "InsufficientData";
    case errc::config_parse: return "ConfigParse";
    case errc::schema_mismatch: return "SchemaMismatch";
    case errc::io_failure: return "IoFailure";
    }
    return "Unknown";
}

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace walklab
