#pragma once

// Small dense linear algebra that works in any scalar type: a row-major
// matrix, one-sided Jacobi SVD and cyclic Jacobi for symmetric eigenproblems.
// Both iterations only use +, *, / and sqrt, so they keep full accuracy in
// MPFR types where LAPACK-style routines would cap at double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/precision.hpp"

namespace ffstam {

template <class Real>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Real(0)) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Real& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<Real> column(std::size_t j) const {
        std::vector<Real> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw InvalidArgument("Matrix: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Real aik = a(i, k);
                if (aik == Real(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<Real> operator*(const Matrix& a, const std::vector<Real>& x) {
        if (a.cols_ != x.size()) throw InvalidArgument("Matrix: vector length mismatch");
        std::vector<Real> y(a.rows_, Real(0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
        return y;
    }

    Real frobenius_norm() const {
        using std::sqrt;
        Real s(0);
        for (const auto& v : data_) s += v * v;
        return sqrt(s);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Real> data_;
};

template <class Real>
Real norm2(const std::vector<Real>& v) {
    using std::sqrt;
    Real s(0);
    for (const auto& x : v) s += x * x;
    return sqrt(s);
}

template <class Real>
struct SvdResult {
    std::vector<Real> sigma;  // descending
    Matrix<Real> U;           // m x k, left vectors for the nonzero values
    Matrix<Real> V;           // k x k, right singular vectors as columns
};

/// One-sided (Hestenes) Jacobi SVD of an m x k matrix. Returns all k singular
/// values in descending order.
template <class Real>
SvdResult<Real> jacobi_svd(const Matrix<Real>& A, int max_sweeps = 80) {
    using std::abs;
    using std::sqrt;
    const std::size_t m = A.rows();
    const std::size_t k = A.cols();
    Matrix<Real> U = A;
    Matrix<Real> V = Matrix<Real>::identity(k);
    const Real tol = pow10<Real>(-(digits_of<Real>() - 1));
    const Real scale = std::max(A.frobenius_norm(), Real(1e-300));
    const Real tiny = scale * scale * pow10<Real>(-2 * digits_of<Real>());

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                Real alpha(0), beta(0), gamma(0);
                for (std::size_t r = 0; r < m; ++r) {
                    alpha += U(r, i) * U(r, i);
                    beta += U(r, j) * U(r, j);
                    gamma += U(r, i) * U(r, j);
                }
                if (alpha <= tiny || beta <= tiny) continue;
                if (abs(gamma) <= tol * sqrt(alpha * beta)) continue;
                rotated = true;
                const Real zeta = (beta - alpha) / (Real(2) * gamma);
                const Real t = (zeta >= Real(0) ? Real(1) : Real(-1)) / (abs(zeta) + sqrt(Real(1) + zeta * zeta));
                const Real c = Real(1) / sqrt(Real(1) + t * t);
                const Real s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const Real ui = U(r, i), uj = U(r, j);
                    U(r, i) = c * ui - s * uj;
                    U(r, j) = s * ui + c * uj;
                }
                for (std::size_t r = 0; r < k; ++r) {
                    const Real vi = V(r, i), vj = V(r, j);
                    V(r, i) = c * vi - s * vj;
                    V(r, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<Real> norms(k);
    for (std::size_t j = 0; j < k; ++j) norms[j] = norm2(U.column(j));
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    SvdResult<Real> out{std::vector<Real>(k), Matrix<Real>(m, k), Matrix<Real>(k, k)};
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t j = order[c];
        out.sigma[c] = norms[j];
        for (std::size_t r = 0; r < k; ++r) out.V(r, c) = V(r, j);
        if (norms[j] > Real(0))
            for (std::size_t r = 0; r < m; ++r) out.U(r, c) = U(r, j) / norms[j];
    }
    return out;
}

template <class Real>
struct SymmetricEigen {
    std::vector<Real> values;  // ascending
    Matrix<Real> vectors;      // columns
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
template <class Real>
SymmetricEigen<Real> jacobi_eigen_symmetric(Matrix<Real> A, int max_sweeps = 80) {
    using std::abs;
    using std::sqrt;
    const std::size_t n = A.rows();
    if (A.cols() != n) throw InvalidArgument("jacobi_eigen_symmetric: matrix is not square");
    Matrix<Real> V = Matrix<Real>::identity(n);
    const Real tol = pow10<Real>(-(digits_of<Real>() + 2)) * std::max(A.frobenius_norm(), Real(1e-300));

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Real off(0);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (sqrt(off) <= tol) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (A(p, q) == Real(0)) continue;
                const Real theta = (A(q, q) - A(p, p)) / (Real(2) * A(p, q));
                const Real t =
                    (theta >= Real(0) ? Real(1) : Real(-1)) / (abs(theta) + sqrt(Real(1) + theta * theta));
                const Real c = Real(1) / sqrt(Real(1) + t * t);
                const Real s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const Real arp = A(r, p), arq = A(r, q);
                    A(r, p) = c * arp - s * arq;
                    A(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const Real apr = A(p, r), aqr = A(q, r);
                    A(p, r) = c * apr - s * aqr;
                    A(q, r) = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const Real vrp = V(r, p), vrq = V(r, q);
                    V(r, p) = c * vrp - s * vrq;
                    V(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A(a, a) < A(b, b); });
    SymmetricEigen<Real> out{std::vector<Real>(n), Matrix<Real>(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = A(order[c], order[c]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = V(r, order[c]);
    }
    return out;
}

}  // namespace ffstam
