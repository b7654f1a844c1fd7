#include "walklab/gaussian.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace walklab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.50662827463100050242;

template <class F>
double adaptive_simpson(const F& f, double a, double m, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate_impl(const F& f, double lo, double hi, double tol) {
    if (!(hi > lo)) return 0.0;
    double m = 0.5 * (lo + hi);
    double fa = f(lo), fm = f(m), fb = f(hi);
    double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, lo, m, hi, fa, fm, fb, whole, tol, 48);
}

// Gaussian box measure by conditioning out one coordinate at a time.
// center/half index from `from`; sigma is the conditional covariance of the
// remaining block. Error budget halves per level.
double box_prob_recursive(const Vec& center, const Vec& half, const Mat& sigma, double tol);

double box_prob_conditional(const Vec& center, const Vec& half, const Mat& sigma, double tol) {
    const std::size_t d = sigma.dim();
    const double s11 = sigma(0, 0);
    if (!(s11 > 0.0)) fail(errc::not_positive_definite, "conditioning pivot <= 0");
    const double sd1 = std::sqrt(s11);

    // Conditional covariance of the trailing block given coordinate 0.
    Mat cond(d - 1);
    Vec beta(d - 1);
    for (std::size_t i = 0; i < d - 1; ++i) beta[i] = sigma(i + 1, 0) / s11;
    for (std::size_t i = 0; i < d - 1; ++i)
        for (std::size_t j = 0; j < d - 1; ++j)
            cond(i, j) = sigma(i + 1, j + 1) - beta[i] * sigma(0, j + 1);

    Vec sub_center(d - 1), sub_half(half.begin() + 1, half.end());
    auto integrand = [&](double x1) {
        for (std::size_t i = 0; i < d - 1; ++i) sub_center[i] = center[i + 1] - beta[i] * x1;
        double inner = box_prob_recursive(sub_center, sub_half, cond, 0.5 * tol);
        return normal_pdf(x1 / sd1) / sd1 * inner;
    };
    double lo = center[0] - half[0], hi = center[0] + half[0];
    // The integrand is supported where the gaussian weight is non-negligible.
    lo = std::max(lo, -9.0 * sd1);
    hi = std::min(hi, 9.0 * sd1);
    if (!(hi > lo)) return 0.0;
    return integrate_impl(integrand, lo, hi, 0.5 * tol);
}

double box_prob_recursive(const Vec& center, const Vec& half, const Mat& sigma, double tol) {
    const std::size_t d = sigma.dim();
    if (d == 1) {
        double s = std::sqrt(sigma(0, 0));
        return normal_box((center[0] - half[0]) / s, (center[0] + half[0]) / s);
    }
    bool diagonal = true;
    for (std::size_t i = 0; i < d && diagonal; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (sigma(i, j) != 0.0 || sigma(j, i) != 0.0) { diagonal = false; break; }
    if (diagonal) {
        double p = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            double s = std::sqrt(sigma(k, k));
            p *= normal_box((center[k] - half[k]) / s, (center[k] + half[k]) / s);
        }
        return p;
    }
    return box_prob_conditional(center, half, sigma, tol);
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_box(double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    if (lo >= 0.0) return 0.5 * (std::erfc(lo * kInvSqrt2) - std::erfc(hi * kInvSqrt2));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi * kInvSqrt2) - std::erfc(-lo * kInvSqrt2));
    // straddles the origin, where erf itself is the accurate route
    return 0.5 * (std::erf(hi * kInvSqrt2) + std::erf(-lo * kInvSqrt2));
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
    return integrate_impl(f, lo, hi, tol);
}

double gaussian_box_probability(const Vec& center, const Vec& half, const Mat& sigma) {
    const std::size_t d = sigma.dim();
    if (center.size() != d || half.size() != d)
        fail(errc::wrong_dimension, "box center/half dimension mismatch");
    for (double h : half)
        if (!(h > 0.0)) fail(errc::invalid_spec, "box half-widths must be positive");
    cholesky_lower(sigma); // positive definiteness gate
    return box_prob_recursive(center, half, sigma, kQuadratureAbsTol);
}

double gaussian_box_probability(const Vec& center, double eps, const Mat& sigma) {
    return gaussian_box_probability(center, Vec(center.size(), eps), sigma);
}

double gaussian_density(const Vec& x, const Mat& sigma) {
    const std::size_t d = sigma.dim();
    if (x.size() != d) fail(errc::wrong_dimension, "density point dimension mismatch");
    Mat l = cholesky_lower(sigma);
    Vec solved = cholesky_solve(l, x);
    double quad = dot(x, solved);
    double det = det_from_cholesky(l);
    return std::exp(-0.5 * quad) / (std::pow(2.0 * std::numbers::pi, 0.5 * double(d)) * std::sqrt(det));
}

double gaussian_kernel_box_average(const Vec& a, double width) {
    if (!(width > 0.0)) fail(errc::invalid_spec, "kernel box width must be positive");
    double p = 1.0;
    for (double ak : a) p *= kSqrt2Pi * normal_box(ak - width, ak + width) / (2.0 * width);
    return p;
}

double gaussian_quadratic_form_pow32(const std::vector<double>& lambda) {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double l : lambda) {
        if (!(l > 0.0)) fail(errc::not_positive_definite, "quadratic form needs positive eigenvalues");
        s1 += l;
        s2 += l * l;
        s3 += l * l * l;
        s4 += l * l * l * l;
    }
    // f(t) = E e^{-Qt} - 1 + (tr) t, with a Taylor branch where the direct
    // evaluation would cancel below double precision.
    auto f = [&](double t) {
        if (s1 * t < 1e-3) {
            double c2 = s2 + 0.5 * s1 * s1;
            double c3 = -(4.0 / 3.0) * s3 - s1 * s2 - s1 * s1 * s1 / 6.0;
            double c4 = 2.0 * s4 + 0.5 * s2 * s2 + (4.0 / 3.0) * s1 * s3 + 0.5 * s1 * s1 * s2 +
                        s1 * s1 * s1 * s1 / 24.0;
            return ((c4 * t + c3) * t + c2) * t * t;
        }
        double g = 0.0;
        for (double l : lambda) g -= 0.5 * std::log1p(2.0 * l * t);
        return std::expm1(g) + s1 * t;
    };
    // t in (0,1] with t = u^2, then t in [1,inf) with t = 1/v^2.
    auto near = [&](double u) {
        double t = u * u;
        double u4 = u * u * u * u;
        return u4 > 0.0 ? f(t) / u4 : s2 + 0.5 * s1 * s1;
    };
    auto far = [&](double v) {
        if (v == 0.0) return s1;
        double t = 1.0 / (v * v);
        double m = 1.0;
        for (double l : lambda) m *= 1.0 / std::sqrt(1.0 + 2.0 * l * t);
        return v * v * (m - 1.0) + s1;
    };
    double tol = 1e-12 * std::max(1.0, std::pow(s1, 1.5));
    double integral = 2.0 * integrate_impl(near, 0.0, 1.0, tol) + 2.0 * integrate_impl(far, 0.0, 1.0, tol);
    return 0.75 / std::sqrt(std::numbers::pi) * integral;
}

} // namespace walklab
