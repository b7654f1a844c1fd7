#include "walklab/oracle.hpp"

#include <cmath>
#include <numbers>

#include "walklab/gaussian.hpp"

namespace walklab {

namespace {

constexpr double kLogSpaceRelErr = 1e-12;

// stirlerr(n) = ln n! - (n ln n - n + ln(2 pi n)/2).
double stirlerr(double n) {
    if (n < 16.0) {
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
               0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double n2 = n * n;
    // 1/12n - 1/360n^3 + 1/1260n^5 - 1/1680n^7 + 1/1188n^9
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * n2)) / n2) / n2) / n2) / n;
}

// Deviance term x ln(x/np) + np - x without cancellation (Loader).
double bd0(double x, double np) {
    if (std::abs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        for (int j = 1;; ++j) {
            ej *= v * v;
            double s1 = s + ej / double(2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * std::log(x / np) + np - x;
}

// C(n, k) 2^-n in log space; exact saddle-point form, relative error ~1e-14.
double dbinom_half(std::int64_t n, std::int64_t k) {
    if (k == 0 || k == n) return std::exp(-double(n) * std::numbers::ln2);
    const double nd = double(n), kd = double(k), md = double(n - k);
    double lc = stirlerr(nd) - stirlerr(kd) - stirlerr(md) - bd0(kd, 0.5 * nd) - bd0(md, 0.5 * nd);
    double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / nd);
    return std::exp(lc - 0.5 * lf);
}

std::uint64_t binomial_u64(std::int64_t n, std::int64_t k) {
    // n <= 64 keeps every value below 2^63 (max C(64,32) ~ 1.83e18)
    if (k > n - k) k = n - k;
    unsigned __int128 c = 1;
    for (std::int64_t j = 1; j <= k; ++j) {
        c = c * static_cast<unsigned __int128>(n - k + j);
        c /= static_cast<unsigned __int128>(j);
    }
    return static_cast<std::uint64_t>(c);
}

double point_prob_1d(std::int64_t n, std::int64_t t) {
    if (t < -n || t > n) return 0.0;
    if (((n + t) & 1) != 0) return 0.0;
    std::int64_t k = (n + t) / 2;
    if (n <= 64) return std::ldexp(double(binomial_u64(n, k)), -int(n));
    return dbinom_half(n, k);
}

void require_even(std::int64_t n) {
    if (n < 2 || (n & 1)) fail(errc::parity_violation, "n must be even and >= 2");
}

// Kahan-compensated sum of point masses over an integer range filtered by a
// predicate on the (possibly scaled) ambient position.
template <class Pred>
double sum_masses_1d(std::int64_t n, std::int64_t lo, std::int64_t hi, const Pred& pred) {
    double sum = 0.0, carry = 0.0;
    for (std::int64_t t = lo; t <= hi; ++t) {
        if (((n + t) & 1) != 0) continue;
        if (!pred(t)) continue;
        double y = point_prob_1d(n, t) - carry;
        double s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
    return std::min(sum, 1.0);
}

} // namespace

const char* to_string(EstimateKind k) {
    switch (k) {
    case EstimateKind::Exact: return "exact";
    case EstimateKind::AsymptoticWithRate: return "asymptotic_with_rate";
    case EstimateKind::BerryEsseenInterval: return "berry_esseen_interval";
    }
    return "?";
}

namespace oracle_constants {

double berry_esseen_box_constant(std::size_t dimension) {
    if (dimension <= 1) return kBerryEsseenBox1d;
    return 42.0 * std::pow(double(dimension), 0.25) + 16.0;
}

} // namespace oracle_constants

ProbEstimate exact_binomial_prob(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) fail(errc::out_of_range, "need 0 <= k <= n");
    if (n > 10'000'000) fail(errc::out_of_range, "n exceeds the supported range 1e7");
    if (n == 0) return ProbEstimate{1.0, 0.0, EstimateKind::Exact};
    if (n <= 64)
        return ProbEstimate{std::ldexp(double(binomial_u64(n, k)), -int(n)), 0.0, EstimateKind::Exact};
    double v = dbinom_half(n, k);
    return ProbEstimate{v, v * kLogSpaceRelErr, EstimateKind::Exact};
}

std::uint64_t exact_binomial_numerator(std::int64_t n, std::int64_t k) {
    if (n < 0 || n > 64 || k < 0 || k > n) fail(errc::out_of_range, "need 0 <= k <= n <= 64");
    return binomial_u64(n, k);
}

ProbEstimate exact_simple1d_point(std::int64_t n, double a) {
    require_even(n);
    std::int64_t rep = 2 * static_cast<std::int64_t>(std::floor(a * std::sqrt(double(n)) / 2.0));
    double v = point_prob_1d(n, rep);
    return ProbEstimate{v, n <= 64 ? 0.0 : v * kLogSpaceRelErr, EstimateKind::Exact};
}

ProbEstimate exact_simple2d_point(std::int64_t n, const Vec& a) {
    require_even(n);
    if (a.size() != 2) fail(errc::wrong_dimension, "a must be 2-dimensional");
    const double sqn = std::sqrt(double(n));
    std::int64_t x1 = 2 * static_cast<std::int64_t>(std::floor(a[0] * sqn / 2.0));
    std::int64_t x2 = 2 * static_cast<std::int64_t>(std::floor(a[1] * sqn / 2.0));
    // rotate: the diagonal components are independent 1-d walks
    double p1 = point_prob_1d(n, x1 + x2);
    double p2 = point_prob_1d(n, x2 - x1);
    double v = p1 * p2;
    return ProbEstimate{v, n <= 64 ? 0.0 : v * 2.0 * kLogSpaceRelErr, EstimateKind::Exact};
}

ProbEstimate lclt_simple1d_asym(std::int64_t n, double a) {
    double aplus = std::max(1.0, std::abs(a));
    double bound = 64.0 * std::pow(aplus, 6.0);
    if (n < 2 || (n & 1)) fail(errc::parity_violation, "n must be even");
    if (!(double(n) > bound))
        fail(errc::domain_violation,
             "needs even n > 64 max(1,|a|)^6 = " + std::to_string(bound));
    double v = std::sqrt(2.0 / std::numbers::pi) / std::sqrt(double(n)) * std::exp(-0.5 * a * a);
    double unit = std::pow(std::abs(a), 3.0) / std::sqrt(double(n)) + 1.0 / double(n);
    return ProbEstimate{v, v * oracle_constants::kLcltRateK1d * unit,
                        EstimateKind::AsymptoticWithRate};
}

ProbEstimate lclt_simple2d_asym(std::int64_t n, const Vec& a) {
    if (a.size() != 2) fail(errc::wrong_dimension, "a must be 2-dimensional");
    double norm = euclidean_norm(a);
    double bound = 512.0 * std::pow(std::max(1.0, norm), 6.0);
    if (n < 2 || (n & 1)) fail(errc::parity_violation, "n must be even");
    if (!(double(n) > bound))
        fail(errc::domain_violation,
             "needs even n > 512 max(1,|a|)^6 = " + std::to_string(bound));
    double v = 2.0 / std::numbers::pi / double(n) * std::exp(-norm * norm);
    double unit = norm * norm * norm / std::sqrt(double(n)) + 1.0 / double(n);
    return ProbEstimate{v, v * oracle_constants::kLcltRateK2d * unit,
                        EstimateKind::AsymptoticWithRate};
}

ProbEstimate lclt_lattice_asym(std::int64_t n, const Vec& a, const Mat& sigma,
                               double rate_constant) {
    const std::size_t d = sigma.dim();
    if (a.size() != d) fail(errc::wrong_dimension, "a/sigma dimension mismatch");
    if (n < 1) fail(errc::out_of_range, "n must be >= 1");
    double v = gaussian_density(a, sigma) * std::pow(double(n), -0.5 * double(d));
    return ProbEstimate{v, v * rate_constant / std::sqrt(double(n)),
                        EstimateKind::AsymptoticWithRate};
}

ProbEstimate be_box_prob(std::int64_t n, const Vec& a, double eps, const Mat& sigma, double rho,
                         double c_be) {
    if (n < 1) fail(errc::out_of_range, "n must be >= 1");
    if (!(rho > 0.0) || !std::isfinite(rho)) fail(errc::invalid_spec, "rho must be positive finite");
    double v = gaussian_box_probability(a, eps, sigma);
    double c = c_be > 0.0 ? c_be : oracle_constants::berry_esseen_box_constant(sigma.dim());
    return ProbEstimate{v, c * rho / std::sqrt(double(n)), EstimateKind::BerryEsseenInterval};
}

double phi_n(const Vec& a, std::int64_t n, double alpha, std::size_t d) {
    if (!(alpha > 0.0 && alpha < 0.5)) fail(errc::invalid_spec, "need 0 < alpha < 1/2");
    if (n < 1) fail(errc::out_of_range, "n must be >= 1");
    if (a.size() != d) fail(errc::wrong_dimension, "a dimension mismatch");
    return gaussian_kernel_box_average(a, std::pow(double(n), alpha - 0.5));
}

double simple1d_window_prob(std::int64_t n, double a, double alpha) {
    const double sqn = std::sqrt(double(n));
    const double w = alpha_window_halfwidth(n, alpha);
    const double c = a * sqn;
    std::int64_t lo = static_cast<std::int64_t>(std::floor(c - w)) - 2;
    std::int64_t hi = static_cast<std::int64_t>(std::ceil(c + w)) + 2;
    Vec x(1), av{a};
    return sum_masses_1d(n, std::max(lo, -n), std::min(hi, n), [&](std::int64_t t) {
        x[0] = double(t);
        return alpha_window_hit(x, av, n, alpha);
    });
}

double simple1d_scaled_box_prob(std::int64_t n, double a, double eps) {
    const double sqn = std::sqrt(double(n));
    std::int64_t lo = static_cast<std::int64_t>(std::floor((a - eps) * sqn)) - 2;
    std::int64_t hi = static_cast<std::int64_t>(std::ceil((a + eps) * sqn)) + 2;
    Vec x(1), av{a};
    return sum_masses_1d(n, std::max(lo, -n), std::min(hi, n), [&](std::int64_t t) {
        x[0] = double(t);
        return scaled_box_hit(x, av, eps, n);
    });
}

namespace {

// Exact planar simple-walk event probability: enumerate lattice points near
// the target, weight by the rotation product, test the shared predicate on
// the (optionally scaled) ambient position.
template <class Pred>
double simple2d_event_prob(std::int64_t n, std::int64_t lo1, std::int64_t hi1, std::int64_t lo2,
                           std::int64_t hi2, const Pred& pred) {
    double sum = 0.0, carry = 0.0;
    for (std::int64_t x1 = lo1; x1 <= hi1; ++x1) {
        for (std::int64_t x2 = lo2; x2 <= hi2; ++x2) {
            if (((n + x1 + x2) & 1) != 0) continue;
            if (!pred(x1, x2)) continue;
            double m = point_prob_1d(n, x1 + x2) * point_prob_1d(n, x2 - x1);
            double y = m - carry;
            double s = sum + y;
            carry = (s - sum) - y;
            sum = s;
        }
    }
    return std::min(sum, 1.0);
}

} // namespace

double simple2d_window_prob(std::int64_t n, const Vec& a, double alpha, double whiten_scale) {
    const double sqn = std::sqrt(double(n));
    const double w = alpha_window_halfwidth(n, alpha);
    Vec x(2);
    std::int64_t lo1 = static_cast<std::int64_t>(std::floor((a[0] * sqn - w) / whiten_scale)) - 2;
    std::int64_t hi1 = static_cast<std::int64_t>(std::ceil((a[0] * sqn + w) / whiten_scale)) + 2;
    std::int64_t lo2 = static_cast<std::int64_t>(std::floor((a[1] * sqn - w) / whiten_scale)) - 2;
    std::int64_t hi2 = static_cast<std::int64_t>(std::ceil((a[1] * sqn + w) / whiten_scale)) + 2;
    return simple2d_event_prob(n, lo1, hi1, lo2, hi2, [&](std::int64_t x1, std::int64_t x2) {
        x[0] = whiten_scale * double(x1);
        x[1] = whiten_scale * double(x2);
        return alpha_window_hit(x, a, n, alpha);
    });
}

double simple2d_scaled_box_prob(std::int64_t n, const Vec& a, double eps) {
    const double sqn = std::sqrt(double(n));
    Vec x(2);
    std::int64_t lo1 = static_cast<std::int64_t>(std::floor((a[0] - eps) * sqn)) - 2;
    std::int64_t hi1 = static_cast<std::int64_t>(std::ceil((a[0] + eps) * sqn)) + 2;
    std::int64_t lo2 = static_cast<std::int64_t>(std::floor((a[1] - eps) * sqn)) - 2;
    std::int64_t hi2 = static_cast<std::int64_t>(std::ceil((a[1] + eps) * sqn)) + 2;
    return simple2d_event_prob(n, lo1, hi1, lo2, hi2, [&](std::int64_t x1, std::int64_t x2) {
        x[0] = double(x1);
        x[1] = double(x2);
        return scaled_box_hit(x, a, eps, n);
    });
}

ExpectedHits expected_hits(const Schedule& schedule, const TargetSpec& target,
                           const StepDistribution& dist) {
    target.validate(dist.dimension());
    if (target.mode == TargetMode::LatticePoint && !dist.is_lattice())
        fail(errc::incompatible_target, "lattice_point targets need a lattice family");

    const std::size_t d = dist.dimension();
    ExpectedHits out;
    out.per_checkpoint.reserve(schedule.terms.size());
    bool simple = dist.family() == Family::SimpleWalk;
    // T2 windows are evaluated on the whitened walk; for the simple walk the
    // whitener is sqrt(d) I.
    double whiten_scale = std::sqrt(double(d));

    for (std::int64_t n : schedule.terms) {
        ProbEstimate p;
        switch (target.mode) {
        case TargetMode::LatticePoint: {
            if (simple && (n & 1)) {
                // representative has even coordinates, unreachable at odd times
                p = ProbEstimate{0.0, 0.0, EstimateKind::Exact};
            } else if (simple && d == 1) {
                p = exact_simple1d_point(n, target.a[0]);
            } else if (simple && d == 2) {
                p = exact_simple2d_point(n, target.a);
            } else {
                p = lclt_lattice_asym(n, target.a, dist.sigma());
            }
            break;
        }
        case TargetMode::AlphaWindow: {
            if (simple && d == 1) {
                double v = simple1d_window_prob(n, target.a[0], target.alpha);
                p = ProbEstimate{v, v * kLogSpaceRelErr, EstimateKind::Exact};
            } else if (simple && d == 2) {
                double v = simple2d_window_prob(n, target.a, target.alpha, whiten_scale);
                p = ProbEstimate{v, v * 2.0 * kLogSpaceRelErr, EstimateKind::Exact};
            } else {
                double eps = alpha_window_halfwidth(n, target.alpha) / std::sqrt(double(n));
                p = be_box_prob(n, target.a, eps, Mat::identity(d), dist.rho_whitened());
            }
            break;
        }
        case TargetMode::ScaledBox: {
            if (simple && d == 1) {
                double v = simple1d_scaled_box_prob(n, target.a[0], target.epsilon);
                p = ProbEstimate{v, v * kLogSpaceRelErr, EstimateKind::Exact};
            } else if (simple && d == 2) {
                double v = simple2d_scaled_box_prob(n, target.a, target.epsilon);
                p = ProbEstimate{v, v * 2.0 * kLogSpaceRelErr, EstimateKind::Exact};
            } else {
                p = be_box_prob(n, target.a, target.epsilon, dist.sigma(), dist.rho_whitened());
            }
            break;
        }
        }
        out.per_checkpoint.push_back(p);
    }

    out.total = ProbEstimate{0.0, 0.0, EstimateKind::Exact};
    for (const auto& p : out.per_checkpoint) {
        out.total.value += p.value;
        out.total.half_width += p.half_width;
        if (p.kind != EstimateKind::Exact) out.total.kind = p.kind;
    }
    return out;
}

namespace {

RateCalibrationCell rate_cell_1d(double a, std::int64_t n) {
    double ex = exact_simple1d_point(n, a).value;
    double asym = std::sqrt(2.0 / std::numbers::pi) / std::sqrt(double(n)) * std::exp(-0.5 * a * a);
    RateCalibrationCell c;
    c.a_norm = std::abs(a);
    c.n = n;
    c.deviation = std::abs(ex / asym - 1.0);
    c.unit = std::pow(std::abs(a), 3.0) / std::sqrt(double(n)) + 1.0 / double(n);
    c.k = c.deviation / c.unit;
    return c;
}

RateCalibrationCell rate_cell_2d(const Vec& a, std::int64_t n) {
    double ex = exact_simple2d_point(n, a).value;
    double norm = euclidean_norm(a);
    double asym = 2.0 / std::numbers::pi / double(n) * std::exp(-norm * norm);
    RateCalibrationCell c;
    c.a_norm = norm;
    c.n = n;
    c.deviation = std::abs(ex / asym - 1.0);
    c.unit = norm * norm * norm / std::sqrt(double(n)) + 1.0 / double(n);
    c.k = c.deviation / c.unit;
    return c;
}

} // namespace

RateCalibration calibrate_lclt_rate_1d() {
    RateCalibration cal;
    for (double a : {0.0, 0.5, 1.0})
        for (std::int64_t n : {100, 1000, 10000, 100000}) {
            cal.cells.push_back(rate_cell_1d(a, n));
            cal.k_max = std::max(cal.k_max, cal.cells.back().k);
        }
    return cal;
}

RateCalibration calibrate_lclt_rate_2d() {
    RateCalibration cal;
    const std::vector<Vec> as = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {0.5, 0.5}};
    for (const auto& a : as)
        for (std::int64_t n : {1000, 10000, 100000}) {
            if (double(n) <= 512.0 * std::pow(std::max(1.0, euclidean_norm(a)), 6.0)) continue;
            cal.cells.push_back(rate_cell_2d(a, n));
            cal.k_max = std::max(cal.k_max, cal.cells.back().k);
        }
    return cal;
}

} // namespace walklab
