#pragma once

#include <cstdint>
#include <vector>

#include "walklab/rng.hpp"
#include "walklab/schedule.hpp"
#include "walklab/stepdist.hpp"

namespace walklab {

/// Positions of one replica at the schedule checkpoints. Lattice families
/// also carry exact integer basis coordinates, so hit tests never see
/// floating-point drift.
struct WalkCheckpoints {
    std::vector<std::int64_t> terms;
    std::vector<Vec> positions;
    std::vector<std::vector<std::int64_t>> lattice_positions; // empty for continuous families
    std::uint64_t replica_index = 0;
};

struct MinTracker {
    Vec target;
    double gamma = 0.5;
    double running_min = 0.0;
    std::int64_t argmin_n = 0;
    std::vector<std::pair<std::int64_t, double>> snapshots;
};

/// One pass over n_last steps recording S_{n_i}; peak extra storage is
/// O(schedule length + d). Bit-identical output for identical inputs.
WalkCheckpoints run_checkpoints(const StepDistribution& dist, const Schedule& schedule,
                                RngStream& stream);

/// Streams n = 1..n_max tracking min over n of n^gamma |S_n / sqrt(n) - a|
/// (Euclidean norm); records the argmin and optional running-min snapshots
/// at the given n values (ascending, each <= n_max).
MinTracker run_min_tracker(const StepDistribution& dist, const Vec& a, double gamma,
                           std::int64_t n_max, RngStream& stream,
                           const std::vector<std::int64_t>& snapshot_ns = {});

/// Per-step scaled-box hit indicators for k = 1..n_max, reusing the caller's
/// buffer. Feeds the weighted estimator that sums every step.
void run_scaled_box_hits(const StepDistribution& dist, const Vec& a, double eps,
                         std::int64_t n_max, RngStream& stream, std::vector<std::uint8_t>& hits);

} // namespace walklab
