#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walklab/linalg.hpp"
#include "walklab/rng.hpp"

namespace walklab {

enum class Family { SimpleWalk, LatticeAtoms, UniformBox, Gaussian, UniformMixture };

const char* to_string(Family f);

/// Lattice Lambda + b spanned by the basis columns h_1..h_d.
struct LatticeSpec {
    std::size_t dimension = 0;
    Mat basis;      // columns are h_1..h_d
    Vec offset;     // b, with P(X in Lambda + b) = 1

    double max_basis_norm() const;
};

struct LatticeAtom {
    std::vector<std::int64_t> coords; // integer coordinates of (point - b) in the basis
    double probability = 0.0;
};

struct MixtureComponent {
    double weight = 0.0;
    Vec shift;
    Vec halfwidth;
};

/// W Sigma W^T = I with W the inverse lower Cholesky factor; `inverse` maps
/// whitened coordinates back.
struct WhiteningMap {
    Mat w;
    Mat inverse;
};

WhiteningMap whitening(const Mat& sigma);

/// An i.i.d. step law with exact moments. Construction validates mean zero,
/// positive definite covariance, probability normalization, and (for atom
/// lists) that the support generates the full lattice.
class StepDistribution {
public:
    /// Empty (dimension 0) until replaced by a factory-built law.
    StepDistribution() = default;

    static StepDistribution simple_walk(std::size_t dimension);
    static StepDistribution lattice_atoms(LatticeSpec lattice, std::vector<std::pair<Vec, double>> atoms);
    static StepDistribution uniform_box(Vec halfwidth);
    static StepDistribution gaussian(Mat sigma);
    static StepDistribution uniform_mixture(std::vector<MixtureComponent> components);

    Family family() const { return family_; }
    std::size_t dimension() const { return dimension_; }
    const Vec& mean() const { return mean_; }
    const Mat& sigma() const { return sigma_; }
    double sigma_det() const { return sigma_det_; }
    double rho() const { return rho_; }                    // E|X|^3
    double rho_whitened() const { return rho_whitened_; } // E|W X|^3
    bool is_lattice() const { return family_ == Family::SimpleWalk || family_ == Family::LatticeAtoms; }
    const LatticeSpec& lattice() const;
    const std::vector<LatticeAtom>& atoms() const { return atoms_; }
    const std::vector<MixtureComponent>& components() const { return components_; }
    const Vec& box_halfwidth() const { return box_halfwidth_; }
    const WhiteningMap& whitener() const { return whitener_; }

    /// One draw in ambient coordinates. Consumes a fixed number of stream
    /// words per call for a given family and dimension.
    Vec sample_step(RngStream& stream) const;

    /// Allocation-free variant for hot loops; out must have size dimension().
    void sample_step_into(RngStream& stream, Vec& out) const;

    /// Lattice families only: one draw as integer basis coordinates.
    std::vector<std::int64_t> sample_lattice_step(RngStream& stream) const;

    /// Ambient point of a lattice position after n steps: basis * k + n * b.
    Vec lattice_to_ambient(const std::vector<std::int64_t>& coords, std::int64_t n) const;

private:
    void finalize_moments();

    Family family_ = Family::SimpleWalk;
    std::size_t dimension_ = 0;
    Vec mean_;
    Mat sigma_;
    double sigma_det_ = 0.0;
    double rho_ = 0.0;
    double rho_whitened_ = 0.0;
    WhiteningMap whitener_;

    std::optional<LatticeSpec> lattice_;
    std::vector<LatticeAtom> atoms_;       // LatticeAtoms (also SimpleWalk support)
    std::vector<double> atom_cdf_;
    Vec box_halfwidth_;                    // UniformBox
    Mat gaussian_chol_;                    // Gaussian
    std::vector<MixtureComponent> components_;
    std::vector<double> component_cdf_;
};

/// (mean, Sigma, rho) of a built-in family; all closed-form or exact
/// deterministic reductions, never estimated.
struct Moments {
    Vec mean;
    Mat sigma;
    double rho = 0.0;
};

inline Moments moments(const StepDistribution& dist) {
    return Moments{dist.mean(), dist.sigma(), dist.rho()};
}

} // namespace walklab
