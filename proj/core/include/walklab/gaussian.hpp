#pragma once

#include <functional>
#include <vector>

#include "walklab/linalg.hpp"

namespace walklab {

/// Absolute error tolerance used by every deterministic quadrature below.
/// Part of the output metadata; see manifest writing in io.hpp.
inline constexpr double kQuadratureAbsTol = 1e-10;

/// P(lo <= Z <= hi) for standard normal Z, evaluated through erfc on the
/// tail side so far-out boxes keep absolute accuracy near 1e-16.
double normal_box(double lo, double hi);

double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Adaptive Simpson integration to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Gaussian measure of the closed axis-aligned box given by center +- half
/// per coordinate, for N(0, sigma). Diagonal sigma reduces to a product of
/// 1-d boxes; general sigma is integrated by conditioning one coordinate at
/// a time (the conditional law stays gaussian and the box stays a box).
/// Absolute error <= kQuadratureAbsTol.
double gaussian_box_probability(const Vec& center, const Vec& half, const Mat& sigma);

/// Same box measure for half-width eps in every coordinate.
double gaussian_box_probability(const Vec& center, double eps, const Mat& sigma);

/// Multivariate normal density at x for N(0, sigma).
double gaussian_density(const Vec& x, const Mat& sigma);

/// Normalized box average of exp(-|x|^2/2) over a +- width:
///   (2 width)^-d * Integral_{a +- width} exp(-|x|^2/2) dx.
/// Tends to exp(-|a|^2/2) as width -> 0, and is <= 1 at a = 0.
double gaussian_kernel_box_average(const Vec& a, double width);

/// E (sum lambda_k Z_k^2)^(3/2) for independent standard normals, through
///   q^(3/2) = 3/(4 sqrt(pi)) * Integral_0^inf t^(-5/2) (e^(-qt) - 1 + qt) dt
/// with E e^(-Qt) = prod (1 + 2 lambda_k t)^(-1/2). Deterministic quadrature,
/// used for gaussian absolute third moments.
double gaussian_quadratic_form_pow32(const std::vector<double>& lambda);

} // namespace walklab
