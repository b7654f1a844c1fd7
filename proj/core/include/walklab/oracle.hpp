#pragma once

#include <cstdint>
#include <vector>

#include "walklab/hits.hpp"
#include "walklab/linalg.hpp"
#include "walklab/schedule.hpp"
#include "walklab/stepdist.hpp"

namespace walklab {

enum class EstimateKind { Exact, AsymptoticWithRate, BerryEsseenInterval };

const char* to_string(EstimateKind k);

/// A probability with a bracket. For Exact and BerryEsseenInterval the true
/// probability lies in [value - half_width, value + half_width]; for
/// AsymptoticWithRate the half-width is the modeled rate term with its
/// calibrated constant (see oracle_constants).
struct ProbEstimate {
    double value = 0.0;
    double half_width = 0.0;
    EstimateKind kind = EstimateKind::Exact;
};

namespace oracle_constants {

/// Berry-Esseen bracket constants. The 1-d value is twice the published
/// universal CDF constant 0.4748 (a box probability is a difference of two
/// CDF evaluations). Dimensions >= 2 use the conservative convex-set bound
/// 42 d^(1/4) + 16; both are bracket widths, not ground truth.
inline constexpr double kBerryEsseenBox1d = 2.0 * 0.4748;

double berry_esseen_box_constant(std::size_t dimension);

/// Rate constants for the local CLT estimates, calibrated once against the
/// exact binomial oracle on the grids in calibrate_lclt_rate_{1,2}d and then
/// frozen here. Recorded in run metadata; never tuned per test.
inline constexpr double kLcltRateK1d = 5.4935;
inline constexpr double kLcltRateK2d = 11.1365;
inline constexpr double kLcltLatticeRateDefault = 1.0;

} // namespace oracle_constants

/// C(n, k) 2^-n. Exact 64-bit integer arithmetic for n <= 64; log-space
/// saddle-point evaluation (relative error ~1e-14, documented bound 1e-12)
/// for n up to 1e7. Values below the double underflow threshold return 0.
ProbEstimate exact_binomial_prob(std::int64_t n, std::int64_t k);

/// Exact numerator C(n, k) for n <= 64, for rational-equality tests.
std::uint64_t exact_binomial_numerator(std::int64_t n, std::int64_t k);

/// P(T_n = 2 floor(a sqrt(n) / 2)) for the 1-d simple walk, even n.
ProbEstimate exact_simple1d_point(std::int64_t n, double a);

/// Planar simple walk point probability at the lattice representative,
/// as a product of two 1-d probabilities through the 45-degree rotation.
ProbEstimate exact_simple2d_point(std::int64_t n, const Vec& a);

/// sqrt(2/pi) n^(-1/2) exp(-a^2/2), valid for even n > 64 max(1,|a|)^6.
ProbEstimate lclt_simple1d_asym(std::int64_t n, double a);

/// (2/pi) n^(-1) exp(-|a|^2), valid for even n > 512 max(1,|a|)^6.
ProbEstimate lclt_simple2d_asym(std::int64_t n, const Vec& a);

/// Leading lattice local-CLT term n^(-d/2) (2 pi)^(-d/2) |Sigma|^(-1/2)
/// exp(-a' Sigma^-1 a / 2); rate constant is a caller-supplied knob.
ProbEstimate lclt_lattice_asym(std::int64_t n, const Vec& a, const Mat& sigma,
                               double rate_constant = oracle_constants::kLcltLatticeRateDefault);

/// Gaussian box measure with a Berry-Esseen half-width C rho / sqrt(n).
/// rho must be the third absolute moment of the whitened step when sigma is
/// not the identity. c_be <= 0 selects the dimension default.
ProbEstimate be_box_prob(std::int64_t n, const Vec& a, double eps, const Mat& sigma, double rho,
                         double c_be = 0.0);

/// Window factor: normalized box average of exp(-|x|^2/2) over
/// a +- n^(alpha - 1/2).
double phi_n(const Vec& a, std::int64_t n, double alpha, std::size_t d);

/// Exact simple-walk event probabilities that reuse the hit predicates, so
/// the predicted event is identical to the simulated one.
double simple1d_window_prob(std::int64_t n, double a, double alpha);
double simple1d_scaled_box_prob(std::int64_t n, double a, double eps);
double simple2d_window_prob(std::int64_t n, const Vec& a, double alpha, double whiten_scale);
double simple2d_scaled_box_prob(std::int64_t n, const Vec& a, double eps);

struct ExpectedHits {
    std::vector<ProbEstimate> per_checkpoint;
    ProbEstimate total;
};

/// Per-checkpoint P(hit) with the sharpest applicable oracle (exact sums for
/// simple walks, Berry-Esseen intervals otherwise) plus the summed interval.
ExpectedHits expected_hits(const Schedule& schedule, const TargetSpec& target,
                           const StepDistribution& dist);

struct RateCalibrationCell {
    double a_norm = 0.0;
    std::int64_t n = 0;
    double deviation = 0.0; // |exact / asymptotic - 1|
    double unit = 0.0;      // |a|^3 / sqrt(n) + 1/n
    double k = 0.0;         // deviation / unit
};

struct RateCalibration {
    std::vector<RateCalibrationCell> cells;
    double k_max = 0.0;
};

/// Measured rate constants over the calibration grids
/// (a in {0, 0.5, 1} x n in {1e2, 1e3, 1e4, 1e5} for 1-d).
RateCalibration calibrate_lclt_rate_1d();
RateCalibration calibrate_lclt_rate_2d();

} // namespace walklab
