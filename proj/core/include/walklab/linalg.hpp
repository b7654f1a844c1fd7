#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "walklab/error.hpp"

namespace walklab {

using Vec = std::vector<double>;

/// Dense square matrix, row-major. Dimensions here are tiny (d <= 8).
class Mat {
public:
    Mat() = default;
    explicit Mat(std::size_t d, double fill = 0.0) : d_(d), a_(d * d, fill) {}

    static Mat identity(std::size_t d) {
        Mat m(d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return d_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * d_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }

    bool is_symmetric(double tol = 1e-12) const {
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = i + 1; j < d_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    Vec mul(const Vec& x) const {
        Vec y(d_, 0.0);
        for (std::size_t i = 0; i < d_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    Mat mul(const Mat& b) const {
        Mat c(d_);
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t k = 0; k < d_; ++k) {
                double aik = (*this)(i, k);
                for (std::size_t j = 0; j < d_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    Mat transposed() const {
        Mat t(d_);
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = 0; j < d_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    std::size_t d_ = 0;
    std::vector<double> a_;
};

/// Cholesky factor L with A = L L^T. Throws NotPositiveDefinite on failure.
inline Mat cholesky_lower(const Mat& a) {
    const std::size_t d = a.dim();
    if (!a.is_symmetric(1e-9)) fail(errc::not_positive_definite, "matrix is not symmetric");
    Mat l(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s))
                    fail(errc::not_positive_definite, "Cholesky pivot <= 0");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

/// Inverse of a lower-triangular matrix by forward substitution.
inline Mat lower_triangular_inverse(const Mat& l) {
    const std::size_t d = l.dim();
    Mat inv(d);
    for (std::size_t j = 0; j < d; ++j) {
        inv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < d; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s += l(i, k) * inv(k, j);
            inv(i, j) = -s / l(i, i);
        }
    }
    return inv;
}

inline double det_from_cholesky(const Mat& l) {
    double d2 = 1.0;
    for (std::size_t i = 0; i < l.dim(); ++i) d2 *= l(i, i);
    return d2 * d2;
}

/// Solve A x = b given the Cholesky factor of A.
inline Vec cholesky_solve(const Mat& l, const Vec& b) {
    const std::size_t d = l.dim();
    Vec y(d), x(d);
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < d; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

/// General small-matrix inverse via Gauss-Jordan with partial pivoting.
inline Mat inverse(const Mat& a) {
    const std::size_t d = a.dim();
    Mat m = a, inv = Mat::identity(d);
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < d; ++r)
            if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
        if (std::abs(m(p, c)) < 1e-14) fail(errc::invalid_spec, "singular matrix");
        if (p != c)
            for (std::size_t j = 0; j < d; ++j) {
                std::swap(m(c, j), m(p, j));
                std::swap(inv(c, j), inv(p, j));
            }
        double piv = m(c, c);
        for (std::size_t j = 0; j < d; ++j) { m(c, j) /= piv; inv(c, j) /= piv; }
        for (std::size_t r = 0; r < d; ++r) {
            if (r == c) continue;
            double f = m(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) { m(r, j) -= f * m(c, j); inv(r, j) -= f * inv(c, j); }
        }
    }
    return inv;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double euclidean_norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
inline std::vector<double> symmetric_eigenvalues(Mat a) {
    const std::size_t d = a.dim();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(d);
    for (std::size_t i = 0; i < d; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace walklab
