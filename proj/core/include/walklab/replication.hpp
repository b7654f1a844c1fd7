#pragma once

#include <cstdint>
#include <vector>

#include "walklab/estimators.hpp"
#include "walklab/oracle.hpp"

namespace walklab {

/// Wilson-interval z used in the rate reports. With the default grids a
/// report performs 18 bound comparisons; z = 4 keeps the per-report false
/// failure probability below 1e-3.
inline constexpr double kWilsonZ = 4.0;

inline constexpr double kDeltaHistBinWidth = 0.01;
inline constexpr double kDeltaHistMax = 5.0;
inline constexpr std::size_t kDeltaHistBins = 501; // last bin collects overflow

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ);

struct ExperimentConfig {
    StepDistribution dist;
    ScheduleSpec schedule_spec;
    TargetSpec target;
    TheoremForm form = TheoremForm::T3Box;
    std::int64_t replicas = 1;
    std::uint64_t master_seed = 0;
    std::vector<double> epsilon_grid;
    std::vector<std::int64_t> counts; // prefix counts; empty means {schedule count}
    int workers = 0;                  // 0 = hardware concurrency

    void validate() const;
    std::vector<Vec> target_points() const; // grid expansion (or the single a)
};

/// Everything folded per (target, prefix count). Scheduled forms keep the
/// statistics as integer sums, so merging is exactly associative and the
/// aggregate is byte-stable under any worker count.
struct CellAggregate {
    std::int64_t count = 0;
    double normalizer = 0.0;
    double limit = 0.0;
    std::uint64_t sum_hits = 0;
    std::uint64_t sum_hits_sq = 0;
    std::vector<std::uint64_t> hit_hist;    // indexed by hit count, size count+1
    std::vector<std::uint64_t> delta_hist;  // kDeltaHistBins bins of width 0.01
    std::vector<std::uint64_t> exceed;      // per epsilon_grid entry
    double sum_weighted = 0.0;              // weighted form only
    double sum_weighted_sq = 0.0;
};

struct ReplicaAggregate {
    TheoremForm form = TheoremForm::T3Box;
    std::uint64_t master_seed = 0;
    std::uint64_t replicas_completed = 0;
    std::vector<double> epsilon_grid;
    std::vector<Vec> targets;
    std::vector<std::int64_t> counts;
    std::vector<std::vector<CellAggregate>> cells; // [target][count]

    const CellAggregate& cell(std::size_t target, std::size_t count_idx) const {
        return cells.at(target).at(count_idx);
    }
};

/// Field-wise sum of two aggregates with identical shape.
ReplicaAggregate merge(const ReplicaAggregate& a, const ReplicaAggregate& b);

ReplicaAggregate make_empty_aggregate(const ExperimentConfig& config);

/// Runs replicas [first, last) and folds them into agg in index order,
/// adding last - first to replicas_completed. Workers only produce
/// per-replica results; the fold itself is sequential, so the aggregate
/// never depends on the worker count. Callers sequence disjoint ranges.
void run_replica_range(const ExperimentConfig& config, std::int64_t first, std::int64_t last,
                       ReplicaAggregate& agg);

ReplicaAggregate run_experiment(const ExperimentConfig& config);

/// The per-(target, count) estimator results of one replica, exactly as the
/// aggregate folds them; the per-replica CSV and the replicas = 1 contract
/// are both served by this.
std::vector<EstimatorResult> evaluate_single_replica(const ExperimentConfig& config,
                                                     std::uint64_t replica);

struct DeltaSummary {
    std::uint64_t replicas = 0;
    double mean = 0.0;
    double variance = 0.0;
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;
    std::vector<std::pair<double, double>> exceedance; // (epsilon, frequency)
};

DeltaSummary delta_distribution(const ReplicaAggregate& agg, std::size_t target_idx,
                                std::size_t count_idx = 0);

struct RateCheckRow {
    TheoremForm form;
    std::int64_t n = 0;
    Vec a;
    double epsilon = 0.0;
    double freq = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double bound = 0.0; // C eps^-2 r(n); 0 at the fitting count (no check there)
    bool pass = true;
};

struct RateCheckReport {
    double fitted_c = 0.0;
    std::int64_t fit_count = 0;
    double z = kWilsonZ;
    bool all_pass = true;
    std::vector<RateCheckRow> rows;
};

/// Fits C at the smallest count as max over (eps, a) of freq eps^2 / r(n),
/// then requires freq <= C eps^-2 r(n) + (wilson_hi - freq) at every larger
/// count. alpha is the window/growth exponent entering r(n).
RateCheckReport chebyshev_rate_check(const ReplicaAggregate& agg, double alpha);

} // namespace walklab
