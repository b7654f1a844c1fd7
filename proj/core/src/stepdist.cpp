#include "walklab/stepdist.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "walklab/gaussian.hpp"

namespace walklab {

namespace {

constexpr double kMeanTol = 1e-12;
constexpr double kProbTol = 1e-12;
constexpr double kLatticeCoordTol = 1e-9;
constexpr double kDetTol = 1e-12;

// Exact 1-d pieces.
double abs3_uniform_1d(double halfwidth, double shift) {
    // mean of |t|^3 over [shift - h, shift + h]; antiderivative of |t|^3 is t^4 sgn(t)/4
    auto f = [](double t) { return 0.25 * t * t * t * std::abs(t); };
    return (f(shift + halfwidth) - f(shift - halfwidth)) / (2.0 * halfwidth);
}

// Mean of |map (x + shift)|^3 over x uniform in the box [-h, h]^d, by nested
// adaptive quadrature. |x|^3 is C^2 so Simpson refinement behaves.
double abs3_box(const Vec& halfwidth, const Vec& shift, const Mat* map) {
    const std::size_t d = halfwidth.size();
    if (d == 1 && map == nullptr) return abs3_uniform_1d(halfwidth[0], shift[0]);
    double scale = 1.0;
    for (std::size_t k = 0; k < d; ++k) scale = std::max(scale, std::abs(shift[k]) + halfwidth[k]);
    if (map)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) scale = std::max(scale, std::abs((*map)(i, j)));
    const double tol = 1e-12 * scale * scale * scale;

    Vec x(d);
    std::function<double(std::size_t)> level = [&](std::size_t k) -> double {
        if (k == d) {
            Vec y(d);
            for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + shift[i];
            if (map) y = map->mul(y);
            double n = euclidean_norm(y);
            return n * n * n;
        }
        auto f = [&](double t) {
            x[k] = t;
            return level(k + 1);
        };
        return integrate(f, -halfwidth[k], halfwidth[k], tol) / (2.0 * halfwidth[k]);
    };
    return level(0);
}

double isotropic_abs3(std::size_t d) {
    // E|Z|^3 for a standard gaussian in dimension d
    return std::pow(2.0, 1.5) * std::tgamma(0.5 * (double(d) + 3.0)) / std::tgamma(0.5 * double(d));
}

std::int64_t det_int(const std::vector<std::vector<std::int64_t>>& cols) {
    const std::size_t d = cols.size();
    if (d == 1) return cols[0][0];
    if (d == 2) return cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0];
    // Laplace expansion; d stays tiny here.
    std::int64_t det = 0;
    for (std::size_t c = 0; c < d; ++c) {
        std::vector<std::vector<std::int64_t>> minor;
        for (std::size_t cc = 0; cc < d; ++cc) {
            if (cc == c) continue;
            std::vector<std::int64_t> col(cols[cc].begin() + 1, cols[cc].end());
            minor.push_back(std::move(col));
        }
        std::int64_t term = cols[c][0] * det_int(minor);
        det += (c % 2 == 0) ? term : -term;
    }
    return det;
}

// The differences of the support coordinates must generate all of Z^d,
// otherwise the walk lives on a proper sub-lattice. Checked through the gcd
// of all d x d minors of the difference matrix.
void check_minimal_lattice(const std::vector<LatticeAtom>& atoms, std::size_t d) {
    std::vector<std::vector<std::int64_t>> diffs;
    for (std::size_t j = 1; j < atoms.size(); ++j) {
        std::vector<std::int64_t> v(d);
        bool zero = true;
        for (std::size_t k = 0; k < d; ++k) {
            v[k] = atoms[j].coords[k] - atoms[0].coords[k];
            zero = zero && v[k] == 0;
        }
        if (!zero) diffs.push_back(std::move(v));
    }
    if (diffs.size() < d)
        fail(errc::invalid_spec, "atom support does not span the lattice");
    std::int64_t g = 0;
    std::vector<std::size_t> idx(d);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t pos, std::size_t from) {
        if (g == 1) return;
        if (pos == d) {
            std::vector<std::vector<std::int64_t>> cols;
            for (std::size_t i = 0; i < d; ++i) cols.push_back(diffs[idx[i]]);
            g = std::gcd(g, std::abs(det_int(cols)));
            return;
        }
        for (std::size_t i = from; i < diffs.size(); ++i) {
            idx[pos] = i;
            choose(pos + 1, i + 1);
        }
    };
    choose(0, 0);
    if (g != 1)
        fail(errc::invalid_spec,
             "atom support generates a proper sub-lattice (minor gcd " + std::to_string(g) + ")");
}

} // namespace

const char* to_string(Family f) {
    switch (f) {
    case Family::SimpleWalk: return "simple_walk";
    case Family::LatticeAtoms: return "lattice_atoms";
    case Family::UniformBox: return "uniform_box";
    case Family::Gaussian: return "gaussian";
    case Family::UniformMixture: return "uniform_mixture";
    }
    return "?";
}

double LatticeSpec::max_basis_norm() const {
    double m = 0.0;
    for (std::size_t j = 0; j < dimension; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < dimension; ++i) s += basis(i, j) * basis(i, j);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

WhiteningMap whitening(const Mat& sigma) {
    Mat l = cholesky_lower(sigma);
    return WhiteningMap{lower_triangular_inverse(l), l};
}

const LatticeSpec& StepDistribution::lattice() const {
    if (!lattice_) fail(errc::unsupported_family, "not a lattice family");
    return *lattice_;
}

void StepDistribution::finalize_moments() {
    for (double m : mean_)
        if (std::abs(m) > kMeanTol)
            fail(errc::invalid_spec, "step law must be centered (mean component " +
                                         std::to_string(m) + "); auto-centering is not applied");
    Mat l = cholesky_lower(sigma_);
    sigma_det_ = det_from_cholesky(l);
    if (!(sigma_det_ > kDetTol))
        fail(errc::not_positive_definite, "covariance determinant below tolerance");
    whitener_ = WhiteningMap{lower_triangular_inverse(l), l};
    if (!(rho_ > 0.0)) fail(errc::invalid_spec, "E|X|^3 must be positive");
}

StepDistribution StepDistribution::simple_walk(std::size_t dimension) {
    if (dimension < 1 || dimension > 8) fail(errc::invalid_spec, "simple walk dimension out of range");
    StepDistribution d;
    d.family_ = Family::SimpleWalk;
    d.dimension_ = dimension;
    d.mean_ = Vec(dimension, 0.0);
    d.sigma_ = Mat(dimension);
    for (std::size_t k = 0; k < dimension; ++k) d.sigma_(k, k) = 1.0 / double(dimension);
    d.rho_ = 1.0; // every step has unit norm
    d.lattice_ = LatticeSpec{dimension, Mat::identity(dimension), Vec(dimension, 0.0)};
    d.atoms_.reserve(2 * dimension);
    for (std::size_t k = 0; k < dimension; ++k)
        for (int s : {+1, -1}) {
            LatticeAtom a;
            a.coords.assign(dimension, 0);
            a.coords[k] = s;
            a.probability = 1.0 / double(2 * dimension);
            d.atoms_.push_back(std::move(a));
        }
    d.finalize_moments();
    // |W X| = sqrt(d) |X| = sqrt(d) exactly, so E|WX|^3 = d^(3/2)
    d.rho_whitened_ = std::pow(double(dimension), 1.5);
    return d;
}

StepDistribution StepDistribution::lattice_atoms(LatticeSpec lattice,
                                                 std::vector<std::pair<Vec, double>> atoms) {
    const std::size_t dim = lattice.dimension;
    if (dim < 1 || dim > 8) fail(errc::invalid_spec, "dimension out of range");
    if (lattice.basis.dim() != dim || lattice.offset.size() != dim)
        fail(errc::wrong_dimension, "lattice basis/offset dimension mismatch");
    if (atoms.size() < 2) fail(errc::invalid_spec, "need at least two atoms");

    StepDistribution d;
    d.family_ = Family::LatticeAtoms;
    d.dimension_ = dim;

    Mat basis_inv = inverse(lattice.basis);
    double psum = 0.0;
    d.mean_ = Vec(dim, 0.0);
    d.sigma_ = Mat(dim);
    d.rho_ = 0.0;
    d.rho_whitened_ = 0.0;
    for (auto& [point, p] : atoms) {
        if (point.size() != dim) fail(errc::wrong_dimension, "atom dimension mismatch");
        if (!(p > 0.0)) fail(errc::invalid_spec, "atom probabilities must be positive");
        psum += p;
        Vec rel(dim);
        for (std::size_t k = 0; k < dim; ++k) rel[k] = point[k] - lattice.offset[k];
        Vec coords = basis_inv.mul(rel);
        LatticeAtom a;
        a.probability = p;
        a.coords.resize(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            double r = std::round(coords[k]);
            if (std::abs(coords[k] - r) > kLatticeCoordTol)
                fail(errc::off_lattice, "atom is not on the lattice (coordinate " +
                                            std::to_string(coords[k]) + ")");
            a.coords[k] = static_cast<std::int64_t>(r);
        }
        for (std::size_t i = 0; i < dim; ++i) {
            d.mean_[i] += p * point[i];
            for (std::size_t j = 0; j < dim; ++j) d.sigma_(i, j) += p * point[i] * point[j];
        }
        double n = euclidean_norm(point);
        d.rho_ += p * n * n * n;
        d.atoms_.push_back(std::move(a));
    }
    if (std::abs(psum - 1.0) > kProbTol)
        fail(errc::invalid_spec, "atom probabilities must sum to 1 within 1e-12");
    check_minimal_lattice(d.atoms_, dim);
    d.lattice_ = std::move(lattice);
    d.finalize_moments();
    for (std::size_t j = 0; j < d.atoms_.size(); ++j) {
        Vec ambient = d.lattice_to_ambient(d.atoms_[j].coords, 0);
        // offset applies per step: ambient point = basis*k + b
        for (std::size_t k = 0; k < dim; ++k) ambient[k] += d.lattice_->offset[k];
        Vec w = d.whitener_.w.mul(ambient);
        double n = euclidean_norm(w);
        d.rho_whitened_ += d.atoms_[j].probability * n * n * n;
    }
    return d;
}

StepDistribution StepDistribution::uniform_box(Vec halfwidth) {
    const std::size_t dim = halfwidth.size();
    if (dim < 1 || dim > 3) fail(errc::unsupported_family, "uniform box supports d <= 3");
    StepDistribution d;
    d.family_ = Family::UniformBox;
    d.dimension_ = dim;
    d.mean_ = Vec(dim, 0.0);
    d.sigma_ = Mat(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        if (!(halfwidth[k] > 0.0)) fail(errc::invalid_spec, "box halfwidth must be positive");
        d.sigma_(k, k) = halfwidth[k] * halfwidth[k] / 3.0;
    }
    d.box_halfwidth_ = std::move(halfwidth);
    d.rho_ = abs3_box(d.box_halfwidth_, Vec(dim, 0.0), nullptr);
    d.finalize_moments();
    // whitened coordinates are uniform on [-sqrt(3), sqrt(3)]^d
    d.rho_whitened_ = abs3_box(Vec(dim, std::sqrt(3.0)), Vec(dim, 0.0), nullptr);
    return d;
}

StepDistribution StepDistribution::gaussian(Mat sigma) {
    const std::size_t dim = sigma.dim();
    if (dim < 1 || dim > 8) fail(errc::invalid_spec, "dimension out of range");
    StepDistribution d;
    d.family_ = Family::Gaussian;
    d.dimension_ = dim;
    d.mean_ = Vec(dim, 0.0);
    d.sigma_ = sigma;
    d.gaussian_chol_ = cholesky_lower(sigma);
    d.rho_ = gaussian_quadratic_form_pow32(symmetric_eigenvalues(sigma));
    d.finalize_moments();
    d.rho_whitened_ = isotropic_abs3(dim);
    return d;
}

StepDistribution StepDistribution::uniform_mixture(std::vector<MixtureComponent> components) {
    if (components.empty()) fail(errc::invalid_spec, "mixture needs components");
    const std::size_t dim = components.front().shift.size();
    if (dim < 1 || dim > 3) fail(errc::unsupported_family, "uniform mixture supports d <= 3");
    StepDistribution d;
    d.family_ = Family::UniformMixture;
    d.dimension_ = dim;
    d.mean_ = Vec(dim, 0.0);
    d.sigma_ = Mat(dim);
    double wsum = 0.0;
    for (auto& c : components) {
        if (c.shift.size() != dim || c.halfwidth.size() != dim)
            fail(errc::wrong_dimension, "mixture component dimension mismatch");
        if (!(c.weight > 0.0)) fail(errc::invalid_spec, "mixture weights must be positive");
        for (double h : c.halfwidth)
            if (!(h > 0.0)) fail(errc::invalid_spec, "mixture halfwidths must be positive");
        wsum += c.weight;
        for (std::size_t i = 0; i < dim; ++i) {
            d.mean_[i] += c.weight * c.shift[i];
            d.sigma_(i, i) += c.weight * c.halfwidth[i] * c.halfwidth[i] / 3.0;
            for (std::size_t j = 0; j < dim; ++j)
                d.sigma_(i, j) += c.weight * c.shift[i] * c.shift[j];
        }
    }
    if (std::abs(wsum - 1.0) > kProbTol)
        fail(errc::invalid_spec, "mixture weights must sum to 1 within 1e-12");
    for (auto& c : components) d.rho_ += c.weight * abs3_box(c.halfwidth, c.shift, nullptr);
    d.components_ = std::move(components);
    d.finalize_moments();
    for (auto& c : d.components_)
        d.rho_whitened_ += c.weight * abs3_box(c.halfwidth, c.shift, &d.whitener_.w);
    return d;
}

Vec StepDistribution::sample_step(RngStream& stream) const {
    Vec x(dimension_, 0.0);
    sample_step_into(stream, x);
    return x;
}

void StepDistribution::sample_step_into(RngStream& stream, Vec& x) const {
    switch (family_) {
    case Family::SimpleWalk: {
        std::fill(x.begin(), x.end(), 0.0);
        std::uint64_t idx = stream.next_below(2 * dimension_);
        x[idx >> 1] = (idx & 1) ? -1.0 : 1.0;
        return;
    }
    case Family::LatticeAtoms: {
        auto coords = sample_lattice_step(stream);
        for (std::size_t i = 0; i < dimension_; ++i) {
            double s = lattice_->offset[i];
            for (std::size_t j = 0; j < dimension_; ++j)
                s += lattice_->basis(i, j) * double(coords[j]);
            x[i] = s;
        }
        return;
    }
    case Family::UniformBox: {
        for (std::size_t k = 0; k < dimension_; ++k)
            x[k] = (2.0 * stream.next_unit() - 1.0) * box_halfwidth_[k];
        return;
    }
    case Family::Gaussian: {
        double z[8];
        for (std::size_t k = 0; k < dimension_; k += 2) {
            double u1 = stream.next_unit_pos();
            double u2 = stream.next_unit();
            double r = std::sqrt(-2.0 * std::log(u1));
            double t = 2.0 * std::numbers::pi * u2;
            z[k] = r * std::cos(t);
            if (k + 1 < dimension_) z[k + 1] = r * std::sin(t);
        }
        for (std::size_t i = 0; i < dimension_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += gaussian_chol_(i, j) * z[j];
            x[i] = s;
        }
        return;
    }
    case Family::UniformMixture: {
        double u = stream.next_unit();
        std::size_t pick = components_.size() - 1;
        double acc = 0.0;
        for (std::size_t j = 0; j < components_.size(); ++j) {
            acc += components_[j].weight;
            if (u < acc) { pick = j; break; }
        }
        const auto& c = components_[pick];
        for (std::size_t k = 0; k < dimension_; ++k)
            x[k] = c.shift[k] + (2.0 * stream.next_unit() - 1.0) * c.halfwidth[k];
        return;
    }
    }
}

std::vector<std::int64_t> StepDistribution::sample_lattice_step(RngStream& stream) const {
    if (family_ == Family::SimpleWalk) {
        std::vector<std::int64_t> c(dimension_, 0);
        std::uint64_t idx = stream.next_below(2 * dimension_);
        c[idx >> 1] = (idx & 1) ? -1 : 1;
        return c;
    }
    if (family_ != Family::LatticeAtoms) fail(errc::unsupported_family, "not a lattice family");
    double u = stream.next_unit();
    double acc = 0.0;
    std::size_t pick = atoms_.size() - 1;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        acc += atoms_[j].probability;
        if (u < acc) { pick = j; break; }
    }
    return atoms_[pick].coords;
}

Vec StepDistribution::lattice_to_ambient(const std::vector<std::int64_t>& coords,
                                         std::int64_t n) const {
    const LatticeSpec& lat = lattice();
    Vec k(coords.begin(), coords.end());
    Vec amb = lat.basis.mul(k);
    for (std::size_t i = 0; i < dimension_; ++i) amb[i] += double(n) * lat.offset[i];
    return amb;
}

} // namespace walklab
