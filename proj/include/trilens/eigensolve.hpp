/// @file  eigensolve.hpp
/// @brief Dense symmetric eigensolver: Householder tridiagonalization
///        followed by the implicit-shift QL iteration, in the classic
///        EISPACK tred2/tql2 form.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "trilens/errors.hpp"

namespace trilens {

/// Dense square matrix, row-major.
struct SquareMatrix {
    std::uint32_t n = 0;
    std::vector<double> values;

    SquareMatrix() = default;
    explicit SquareMatrix(std::uint32_t size)
        : n(size), values(static_cast<std::size_t>(size) * size, 0.0) {}

    double& at(std::uint32_t i, std::uint32_t j) {
        return values[static_cast<std::size_t>(i) * n + j];
    }
    double at(std::uint32_t i, std::uint32_t j) const {
        return values[static_cast<std::size_t>(i) * n + j];
    }
};

struct EigenPairs {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[k] is the k-th eigenvector
};

namespace detail {

inline double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Householder reduction to tridiagonal form; d receives the diagonal,
// e the subdiagonal (in e[1..n-1]), V the accumulated transformation.
// Derived from the Algol procedure tred2 (Bowdler, Martin, Reinsch,
// Wilkinson) and the corresponding EISPACK routine.
inline void tred2(std::vector<std::vector<double>>& V, std::vector<double>& d,
                  std::vector<double>& e) {
    const std::size_t n = d.size();
    for (std::size_t j = 0; j < n; ++j) d[j] = V[n - 1][j];

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = V[i - 1][j];
                V[i][j] = 0.0;
                V[j][i] = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                V[j][i] = f;
                g = e[j] + V[j][j] * f;
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += V[k][j] * d[k];
                    e[k] += V[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k <= i - 1; ++k) V[k][j] -= f * e[k] + g * d[k];
                d[j] = V[i - 1][j];
                V[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for (std::size_t i = 0; i < n - 1; ++i) {
        V[n - 1][i] = V[i][i];
        V[i][i] = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = V[k][i + 1] / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += V[k][i + 1] * V[k][j];
                for (std::size_t k = 0; k <= i; ++k) V[k][j] -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) V[k][i + 1] = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = V[n - 1][j];
        V[n - 1][j] = 0.0;
    }
    V[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL iteration on the tridiagonal (d, e), rotating the
// columns of V along. Derived from the Algol procedure tql2 and the
// corresponding EISPACK routine. Throws NoConvergence past the
// per-eigenvalue iteration cap.
inline void tql2(std::vector<std::vector<double>>& V, std::vector<double>& d,
                 std::vector<double>& e) {
    const std::size_t n = d.size();
    constexpr int kMaxIter = 50;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxIter) {
                    throw NoConvergence("QL iteration failed to converge after " +
                                        std::to_string(kMaxIter) + " sweeps");
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = hypot2(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot2(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = V[k][i + 1];
                        V[k][i + 1] = s * V[k][i] + c * h;
                        V[k][i] = c * V[k][i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace detail

/// Maximum absolute row sum.
inline double matrix_inf_norm(const SquareMatrix& S) {
    double norm = 0.0;
    for (std::uint32_t i = 0; i < S.n; ++i) {
        double row = 0.0;
        for (std::uint32_t j = 0; j < S.n; ++j) row += std::abs(S.at(i, j));
        norm = std::max(norm, row);
    }
    return norm;
}

/// The `count` smallest eigenvalues of a symmetric matrix, ascending, with
/// orthonormal eigenvectors. Each pair satisfies |S v - lambda v| <=
/// tol * |S|; violations raise NoConvergence. S must be symmetric within
/// 1e-10 and count <= n.
inline EigenPairs smallest_eigenpairs(const SquareMatrix& S, std::uint32_t count,
                                      double tol = 1e-8) {
    const std::uint32_t n = S.n;
    if (count > n) throw std::invalid_argument("cannot request more eigenpairs than the order");
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (std::abs(S.at(i, j) - S.at(j, i)) > 1e-10) {
                throw std::invalid_argument("matrix is not symmetric within 1e-10");
            }
        }
    }
    EigenPairs out;
    if (count == 0 || n == 0) return out;

    std::vector<std::vector<double>> V(n, std::vector<double>(n));
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) V[i][j] = 0.5 * (S.at(i, j) + S.at(j, i));
    }
    std::vector<double> d(n), e(n, 0.0);
    if (n == 1) {
        d[0] = V[0][0];
        V[0][0] = 1.0;
    } else {
        detail::tred2(V, d, e);
        detail::tql2(V, d, e);
    }

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return d[a] < d[b]; });

    const double norm = matrix_inf_norm(S);
    out.values.reserve(count);
    out.vectors.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint32_t col = order[k];
        out.values.push_back(d[col]);
        std::vector<double> v(n);
        for (std::uint32_t r = 0; r < n; ++r) v[r] = V[r][col];
        out.vectors.push_back(std::move(v));
    }
    for (std::uint32_t k = 0; k < count; ++k) {
        double residual = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            double si = 0.0;
            for (std::uint32_t j = 0; j < n; ++j) si += S.at(i, j) * out.vectors[k][j];
            const double r = si - out.values[k] * out.vectors[k][i];
            residual += r * r;
        }
        if (std::sqrt(residual) > tol * norm) {
            throw NoConvergence("eigenpair residual exceeds tolerance");
        }
    }
    return out;
}

}  // namespace trilens
