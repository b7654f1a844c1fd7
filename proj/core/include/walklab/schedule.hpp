#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walklab/error.hpp"

namespace walklab {

enum class ScheduleKind { IterLogIter, PowerLaw, PowerLogPower, Geometric, Explicit };
enum class Parity { None, Even };
enum class NormalizerKind { LogCount, LogLogCount, Count, HarmonicLog };

const char* to_string(ScheduleKind k);
const char* to_string(Parity p);
const char* to_string(NormalizerKind k);

/// Checkpoint subsequence recipe. Terms use natural logarithms throughout.
struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::IterLogIter;
    double beta = 0.0;                     // PowerLaw / PowerLogPower exponent
    double ratio = 0.0;                    // Geometric base, > 1
    std::vector<std::int64_t> explicit_terms;
    std::int64_t start_index = 2;
    Parity parity = Parity::None;
    std::int64_t count = 0;                // number of checkpoints in the estimator sum
};

struct Schedule {
    std::vector<std::int64_t> terms;       // strictly increasing positive integers
    ScheduleSpec spec;
    NormalizerKind normalizer_kind = NormalizerKind::LogCount;

    std::int64_t count() const { return static_cast<std::int64_t>(terms.size()); }
    std::int64_t last() const { return terms.back(); }
};

/// Builds the checkpoint terms n_i for the spec, enforcing strict monotonicity.
/// Parity::Even maps the raw value t of each term to 2*ceil(t/2), the smallest
/// even integer >= t; Parity::None takes floor(t).
Schedule build_schedule(const ScheduleSpec& spec,
                        NormalizerKind normalizer = NormalizerKind::LogCount);

/// True iff terms[i+1]/terms[i] >= 1 + A * i^(-alpha) at every consecutive
/// pair, with i the 1-based position of the earlier term.
bool validate_growth(const Schedule& schedule, double growth_a, double alpha);

/// ln(count), ln(ln(count)), count, or ln(count) for HarmonicLog.
double normalizer_value(NormalizerKind kind, std::int64_t count);

} // namespace walklab
