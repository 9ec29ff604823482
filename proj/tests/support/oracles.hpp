#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mermin/algebra.hpp"
#include "mermin/random.hpp"

// Test-only reference implementations, deliberately independent of the
// library paths they check.

namespace oracles {

// Seed manifest for every randomized test in the suite.
inline constexpr std::uint64_t kAlgebraSeed = 11001;
inline constexpr std::uint64_t kBuilderSeed = 11002;
inline constexpr std::uint64_t kIdentitySeed = 11003;
inline constexpr std::uint64_t kLhvSeed = 11004;
inline constexpr std::uint64_t kCharacterizationSeed = 11005;
inline constexpr std::uint64_t kOptimizeSeed = 11006;
inline constexpr std::uint64_t kSamplerSeed = 11007;
inline constexpr std::uint64_t kAcceptanceSeed = 11008;

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for real symmetric matrices (textbook rotations).

inline std::vector<double> jacobi_symmetric_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a[r][c]));
    }
    if (scale == 0.0) return std::vector<double>(n, 0.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-30 * scale * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-18 * scale) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t =
                    (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1.0 / std::sqrt(t * t + 1);
                const double s = t * c;
                const double apq = a[p][q];
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[p][k] = a[k][p];
                    a[k][q] = s * akp + c * akq;
                    a[q][k] = a[k][q];
                }
            }
        }
    }
    std::vector<double> eigenvalues(n);
    for (std::size_t k = 0; k < n; ++k) eigenvalues[k] = a[k][k];
    std::sort(eigenvalues.begin(), eigenvalues.end());
    return eigenvalues;
}

// Eigenvalues of a complex Hermitian matrix via the real embedding
// [[B, -C], [C, B]] of A = B + iC, whose spectrum is that of A doubled.
inline std::vector<double> hermitian_eigenvalues_by_jacobi(const mermin::MatrixX& m) {
    const std::size_t dim = static_cast<std::size_t>(m.rows());
    std::vector<std::vector<double>> doubled(2 * dim, std::vector<double>(2 * dim, 0.0));
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            const double re = m(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)).real();
            const double im = m(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)).imag();
            doubled[r][c] = re;
            doubled[r + dim][c + dim] = re;
            doubled[r][c + dim] = -im;
            doubled[r + dim][c] = im;
        }
    }
    const std::vector<double> paired = jacobi_symmetric_eigenvalues(std::move(doubled));
    std::vector<double> eigenvalues(dim);
    for (std::size_t k = 0; k < dim; ++k) eigenvalues[k] = 0.5 * (paired[2 * k] + paired[2 * k + 1]);
    return eigenvalues; // ascending
}

// ---------------------------------------------------------------------------
// Direct Kronecker product by index arithmetic.

inline mermin::MatrixX naive_kron(const mermin::MatrixX& a, const mermin::MatrixX& b) {
    mermin::MatrixX out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::int64_t i = 0; i < a.rows(); ++i) {
        for (std::int64_t j = 0; j < a.cols(); ++j) {
            for (std::int64_t k = 0; k < b.rows(); ++k) {
                for (std::int64_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

inline mermin::MatrixX naive_chain(const std::vector<mermin::Matrix2>& ops) {
    mermin::MatrixX acc = ops.front();
    for (std::size_t k = 1; k < ops.size(); ++k) acc = naive_kron(acc, ops[k]);
    return acc;
}

// Operator norm of a traceless Hermitian 2x2 matrix from its determinant.
inline double norm_2x2_traceless(const mermin::Matrix2& m) {
    return std::sqrt(std::max(0.0, -m.determinant().real()));
}

// Haar-ish random pure state.
inline mermin::StateVector random_state(int n, mermin::Rng& rng) {
    mermin::VectorX amps(mermin::dim_of(n));
    for (std::int64_t i = 0; i < amps.size(); ++i) {
        amps[i] = mermin::cx(mermin::gaussian(rng), mermin::gaussian(rng));
    }
    amps.normalize();
    return mermin::StateVector(n, std::move(amps));
}

// Random Hermitian matrix with entries of order one.
inline mermin::MatrixX random_hermitian(std::int64_t dim, mermin::Rng& rng) {
    mermin::MatrixX m(dim, dim);
    for (std::int64_t r = 0; r < dim; ++r) {
        for (std::int64_t c = 0; c < dim; ++c) {
            m(r, c) = mermin::cx(mermin::gaussian(rng), mermin::gaussian(rng));
        }
    }
    mermin::MatrixX h = 0.5 * (m + m.adjoint());
    return h;
}

} // namespace oracles
