#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nmgauss/errors.hpp"

namespace nmgauss {

using Vec = std::vector<double>;

// Small dense row-major square matrix. Dimensions here are the model
// dimension d (tested up to 5), so no blocking or pivoting heroics.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static Mat identity(int n_) {
        Mat m(n_);
        for (int i = 0; i < n_; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Mat mat_mul(const Mat& x, const Mat& y) {
    Mat z(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            double xik = x(i, k);
            for (int j = 0; j < x.n; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline double max_asymmetry(const Mat& m) {
    double worst = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j)
            worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
}

// Cholesky factor (lower triangular) of a symmetric positive definite matrix.
struct Chol {
    int n = 0;
    std::vector<double> l; // row-major lower triangle, full storage

    double at(int i, int j) const { return l[static_cast<std::size_t>(i) * n + j]; }

    double log_det() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::log(at(i, i));
        return 2.0 * s;
    }

    // Solves A x = b with A = L L^T.
    Vec solve(const Vec& b) const {
        Vec y(b);
        for (int i = 0; i < n; ++i) {
            double s = y[i];
            for (int j = 0; j < i; ++j) s -= at(i, j) * y[j];
            y[i] = s / at(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (int j = i + 1; j < n; ++j) s -= at(j, i) * y[j];
            y[i] = s / at(i, i);
        }
        return y;
    }

    // v^T A^{-1} v through one forward substitution.
    double quad_inv(const Vec& v) const {
        double q = 0.0;
        Vec y(v);
        for (int i = 0; i < n; ++i) {
            double s = y[i];
            for (int j = 0; j < i; ++j) s -= at(i, j) * y[j];
            y[i] = s / at(i, i);
            q += y[i] * y[i];
        }
        return q;
    }

    // y = L z, used to map iid standard normals to the target covariance.
    Vec apply_l(const Vec& z) const {
        Vec y(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j <= i; ++j) s += at(i, j) * z[j];
            y[i] = s;
        }
        return y;
    }
};

inline Chol cholesky(const Mat& m) {
    Chol c;
    c.n = m.n;
    c.l.assign(static_cast<std::size_t>(m.n) * m.n, 0.0);
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= c.at(i, k) * c.at(j, k);
            if (i == j) {
                if (!(s > 0.0))
                    throw NumericFailure("cholesky: matrix is not positive definite");
                c.l[static_cast<std::size_t>(i) * m.n + j] = std::sqrt(s);
            } else {
                c.l[static_cast<std::size_t>(i) * m.n + j] = s / c.at(j, j);
            }
        }
    }
    return c;
}

} // namespace nmgauss
