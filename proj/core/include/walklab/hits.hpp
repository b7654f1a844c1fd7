#pragma once

#include <cstdint>
#include <vector>

#include "walklab/stepdist.hpp"

namespace walklab {

enum class TargetMode { LatticePoint, AlphaWindow, ScaledBox };

const char* to_string(TargetMode m);

/// Target point plus hit convention. For AlphaWindow, alpha must respect the
/// admissible range for the ambient dimension (d = 1: [1/6, 1/2); d = 2:
/// [2/5, 1/2)). All boxes are closed: boundary points count as hits.
struct TargetSpec {
    Vec a;
    TargetMode mode = TargetMode::ScaledBox;
    double alpha = 0.0;    // AlphaWindow
    double epsilon = 0.0;  // ScaledBox
    double grid_n = 0.0;   // sweep bound N, targets in [-N, N]^d (0 = single target)
    double grid_step = 0.0;

    void validate(std::size_t dimension) const;
};

/// The single lattice point designated as "a sqrt(n)".
/// SimpleWalk keeps the explicit convention (2 floor(a_k sqrt(n) / 2) per
/// coordinate); general lattices take floors in basis coordinates of
/// a sqrt(n) - n b. Exactly one lattice point is the representative for a
/// given (a, n), so the hit indicator sums to one over the lattice.
std::vector<std::int64_t> lattice_representative(const Vec& a, std::int64_t n,
                                                 const StepDistribution& dist);

/// True iff the integer lattice coordinates equal the representative's.
bool lattice_hit(const std::vector<std::int64_t>& coords, const Vec& a, std::int64_t n,
                 const StepDistribution& dist);

/// Ambient-position variant; verifies lattice membership first (OffLattice).
bool lattice_hit_ambient(const Vec& x, const Vec& a, std::int64_t n, const StepDistribution& dist);

/// True iff every coordinate of x - a sqrt(n) lies in [-n^alpha, n^alpha].
bool alpha_window_hit(const Vec& x, const Vec& a, std::int64_t n, double alpha);

/// True iff every coordinate of x / sqrt(n) - a lies in [-eps, eps].
bool scaled_box_hit(const Vec& x, const Vec& a, double eps, std::int64_t n);

/// Shared boundary arithmetic for window tests; oracles reuse these so the
/// simulated event and the predicted event are the same set.
double alpha_window_halfwidth(std::int64_t n, double alpha);

} // namespace walklab
