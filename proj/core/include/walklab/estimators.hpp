#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "walklab/hits.hpp"
#include "walklab/schedule.hpp"
#include "walklab/walker.hpp"

namespace walklab {

enum class TheoremForm { T1Lattice, T2aWindow, T2bWindow, T3Box, C3Weighted };

const char* to_string(TheoremForm f);
TheoremForm theorem_form_from_string(const std::string& s);

/// Normalizer that the form's statement divides by (count-based; see the
/// delta_nlast alternative emitted alongside CSV output).
NormalizerKind form_normalizer(TheoremForm f);

/// Target mode each form expects.
TargetMode form_target_mode(TheoremForm f);

/// Convergence-rate function r(n) of the form's probability bound
/// P(|Delta - 1| > eps) <= C eps^-2 r(n). T3 needs the growth alpha and d.
double rate_function(TheoremForm f, std::int64_t n, double alpha, std::size_t d);

/// One replica's normalized hit statistic: delta = empirical / limit with
/// empirical = hit_count / normalizer. Zero hits give delta = 0, never NaN.
struct EstimatorResult {
    TheoremForm theorem_form = TheoremForm::T3Box;
    std::int64_t hit_count = 0;
    std::int64_t count = 0;
    double normalizer = 0.0;
    double empirical = 0.0;
    double limit = 0.0;
    double delta = 0.0;
};

/// Closed-form limit of the normalized hit average. T1Lattice takes the
/// step covariance; the window forms assume the whitened walk (Sigma = I).
double limit_value(const Vec& a, const Mat* sigma, TheoremForm form);

/// Gaussian measure of the closed box a +- eps under N(0, sigma),
/// deterministic quadrature with absolute error <= 1e-10.
double box_limit_value(const Vec& a, double eps, const Mat& sigma);

EstimatorResult delta_statistic(const std::vector<std::uint8_t>& hits, const Schedule& schedule,
                                double limit, TheoremForm form);

/// Weighted estimator over every step k = 1..n:
/// empirical = (sum hit_k / k) / ln n.
EstimatorResult corollary3_weighted(const std::vector<std::uint8_t>& hits, double limit);

enum class LiminfFlag { Pass, Info };

struct LiminfReport {
    double running_min = 0.0;
    std::int64_t argmin_n = 0;
    double gamma = 0.0;
    std::optional<double> bound;
    LiminfFlag flag = LiminfFlag::Info;
};

/// Pass when a finite bound applies and the tracked min is within it;
/// otherwise an info record (the liminf statements are asymptotic and only
/// monitored at desk scale).
LiminfReport liminf_report(const MinTracker& tracker, std::optional<double> bound);

} // namespace walklab
