#include "walklab/hits.hpp"

#include <cmath>

namespace walklab {

const char* to_string(TargetMode m) {
    switch (m) {
    case TargetMode::LatticePoint: return "lattice_point";
    case TargetMode::AlphaWindow: return "alpha_window";
    case TargetMode::ScaledBox: return "scaled_box";
    }
    return "?";
}

void TargetSpec::validate(std::size_t dimension) const {
    if (a.size() != dimension) fail(errc::wrong_dimension, "target dimension mismatch");
    switch (mode) {
    case TargetMode::LatticePoint:
        break;
    case TargetMode::AlphaWindow: {
        double lo = dimension == 1 ? 1.0 / 6.0 : 2.0 / 5.0;
        if (dimension > 2) fail(errc::incompatible_target, "alpha_window needs d = 1 or d = 2");
        if (!(alpha >= lo && alpha < 0.5))
            fail(errc::invalid_spec, "alpha = " + std::to_string(alpha) +
                                         " outside the valid range [" +
                                         (dimension == 1 ? std::string("1/6") : std::string("2/5")) +
                                         ", 1/2) for d = " + std::to_string(dimension));
        break;
    }
    case TargetMode::ScaledBox:
        if (!(epsilon > 0.0)) fail(errc::invalid_spec, "epsilon must be positive");
        break;
    }
    if (grid_n != 0.0) {
        if (!(grid_n > 0.0)) fail(errc::invalid_spec, "grid bound N must be positive");
        if (!(grid_step > 0.0)) fail(errc::invalid_spec, "grid step must be positive");
    }
}

std::vector<std::int64_t> lattice_representative(const Vec& a, std::int64_t n,
                                                 const StepDistribution& dist) {
    if (n < 1) fail(errc::out_of_range, "n must be >= 1");
    const std::size_t d = dist.dimension();
    if (a.size() != d) fail(errc::wrong_dimension, "target dimension mismatch");
    const double sqn = std::sqrt(double(n));
    std::vector<std::int64_t> rep(d);
    if (dist.family() == Family::SimpleWalk) {
        for (std::size_t k = 0; k < d; ++k)
            rep[k] = 2 * static_cast<std::int64_t>(std::floor(a[k] * sqn / 2.0));
        return rep;
    }
    const LatticeSpec& lat = dist.lattice();
    Mat basis_inv = inverse(lat.basis);
    Vec rel(d);
    for (std::size_t k = 0; k < d; ++k) rel[k] = a[k] * sqn - double(n) * lat.offset[k];
    Vec coords = basis_inv.mul(rel);
    for (std::size_t k = 0; k < d; ++k) rep[k] = static_cast<std::int64_t>(std::floor(coords[k]));
    return rep;
}

bool lattice_hit(const std::vector<std::int64_t>& coords, const Vec& a, std::int64_t n,
                 const StepDistribution& dist) {
    return coords == lattice_representative(a, n, dist);
}

bool lattice_hit_ambient(const Vec& x, const Vec& a, std::int64_t n, const StepDistribution& dist) {
    const std::size_t d = dist.dimension();
    if (x.size() != d) fail(errc::wrong_dimension, "position dimension mismatch");
    const LatticeSpec& lat = dist.lattice();
    Mat basis_inv = inverse(lat.basis);
    Vec rel(d);
    for (std::size_t k = 0; k < d; ++k) rel[k] = x[k] - double(n) * lat.offset[k];
    Vec coords = basis_inv.mul(rel);
    std::vector<std::int64_t> rounded(d);
    for (std::size_t k = 0; k < d; ++k) {
        double r = std::round(coords[k]);
        if (std::abs(coords[k] - r) > 1e-9)
            fail(errc::off_lattice, "position is not on Lambda + n b");
        rounded[k] = static_cast<std::int64_t>(r);
    }
    return lattice_hit(rounded, a, n, dist);
}

double alpha_window_halfwidth(std::int64_t n, double alpha) {
    return std::pow(double(n), alpha);
}

bool alpha_window_hit(const Vec& x, const Vec& a, std::int64_t n, double alpha) {
    const double sqn = std::sqrt(double(n));
    const double w = alpha_window_halfwidth(n, alpha);
    for (std::size_t k = 0; k < x.size(); ++k)
        if (std::abs(x[k] - a[k] * sqn) > w) return false;
    return true;
}

bool scaled_box_hit(const Vec& x, const Vec& a, double eps, std::int64_t n) {
    const double sqn = std::sqrt(double(n));
    for (std::size_t k = 0; k < x.size(); ++k)
        if (std::abs(x[k] / sqn - a[k]) > eps) return false;
    return true;
}

} // namespace walklab
