#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mermin/errors.hpp"

// Pauli / Bloch-vector primitives, tensor-product construction and a dense
// Hermitian eigensolver facade. Everything else in the library builds on this.
//
// Index convention, used everywhere: qubit 1 is the MOST significant bit of
// an amplitude index. tensor_chain({P, Q}) is P (x) Q with P acting on qubit 1.

namespace mermin {

using cx = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using MatrixX = Eigen::MatrixXcd;
using VectorX = Eigen::VectorXcd;

inline constexpr double kUnitNormTol = 1e-9;   // input validation for Bloch vectors
inline constexpr double kStateNormTol = 1e-10; // input validation for state vectors
inline constexpr int kDenseQubitCap = 12;      // 2^12 x 2^12 complex ~ 268 MB

inline std::int64_t dim_of(int n) { return std::int64_t{1} << n; }

// ---------------------------------------------------------------------------
// Bloch vectors and local spin observables

// Unit direction in R^3 defining the spin observable a.sigma.
// Construction refuses non-unit input instead of silently renormalizing.
struct BlochVector {
    double x = 0.0, y = 0.0, z = 1.0;

    BlochVector() = default;
    BlochVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (std::abs(norm - 1.0) > kUnitNormTol) {
            throw validation_error("Bloch vector must be unit-norm (|norm - 1| = " +
                                   std::to_string(std::abs(norm - 1.0)) + " exceeds 1e-9)");
        }
    }

    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }

    // Cross product as raw components; not necessarily unit-norm.
    std::array<double, 3> cross(const BlochVector& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

inline const Matrix2& pauli_x() {
    static const Matrix2 m = (Matrix2() << 0, 1, 1, 0).finished();
    return m;
}
inline const Matrix2& pauli_y() {
    static const Matrix2 m = (Matrix2() << 0, cx(0, -1), cx(0, 1), 0).finished();
    return m;
}
inline const Matrix2& pauli_z() {
    static const Matrix2 m = (Matrix2() << 1, 0, 0, -1).finished();
    return m;
}
inline const Matrix2& pauli(int k) {
    static const Matrix2 ms[3] = {pauli_x(), pauli_y(), pauli_z()};
    return ms[k];
}

// a.sigma for raw components (no unit-norm requirement); used for cross
// products, which carry their length.
inline Matrix2 direction_matrix(double x, double y, double z) {
    Matrix2 m;
    m << cx(z, 0), cx(x, -y), cx(x, y), cx(-z, 0);
    return m;
}

// 2x2 Hermitian spin observable a.sigma together with its defining direction.
struct LocalObservable {
    Matrix2 matrix;
    BlochVector source;
};

// a.sigma; eigenvalues are exactly {+1, -1} for unit a.
inline LocalObservable pauli_observable(const BlochVector& a) {
    return {direction_matrix(a.x, a.y, a.z), a};
}

// Recover Bloch components from a traceless Hermitian 2x2 matrix.
// Rejects matrices that are not of the form a.sigma within `tol`.
inline BlochVector bloch_of(const Matrix2& m, double tol = 1e-9) {
    const double x = m(1, 0).real();
    const double y = m(1, 0).imag();
    const double z = m(0, 0).real();
    const Matrix2 rebuilt = direction_matrix(x, y, z);
    if ((m - rebuilt).cwiseAbs().maxCoeff() > tol) {
        throw validation_error("matrix is not a real direction contracted with the Pauli basis");
    }
    return BlochVector(x, y, z);
}

// The product structure of a pair of spin observables:
//   A A'  = (a.a') I + i A''       A' A = (a.a') I - i A''
// with A'' built from the cross product; |A''| = sqrt(1 - (a.a')^2).
struct PauliTriple {
    LocalObservable a;
    LocalObservable a_prime;
    double dot = 0.0;
    Matrix2 a_double_prime; // possibly non-unit norm
};

inline PauliTriple pauli_triple(const BlochVector& a, const BlochVector& a_prime) {
    const auto c = a.cross(a_prime);
    return {pauli_observable(a), pauli_observable(a_prime), a.dot(a_prime),
            direction_matrix(c[0], c[1], c[2])};
}

// ---------------------------------------------------------------------------
// Measurement settings

// Ordered list of n pairs (a_j, a'_j) of Bloch vectors, qubit j = 1..n.
struct MeasurementSettings {
    int n = 0;
    std::vector<std::pair<BlochVector, BlochVector>> pairs;

    MeasurementSettings(int n_, std::vector<std::pair<BlochVector, BlochVector>> pairs_)
        : n(n_), pairs(std::move(pairs_)) {
        if (n < 2) throw validation_error("settings require at least 2 qubits");
        if (static_cast<int>(pairs.size()) != n) {
            throw validation_error("settings must provide exactly n Bloch-vector pairs");
        }
    }

    const BlochVector& a(int j) const { return pairs[j - 1].first; }
    const BlochVector& a_prime(int j) const { return pairs[j - 1].second; }

    Matrix2 observable(int j, bool primed) const {
        const BlochVector& v = primed ? a_prime(j) : a(j);
        return direction_matrix(v.x, v.y, v.z);
    }

    // The original settings: A_j = sigma_x, A'_j = sigma_y on every qubit.
    static MeasurementSettings xy(int n) {
        std::vector<std::pair<BlochVector, BlochVector>> p(
            static_cast<std::size_t>(n),
            {BlochVector(1, 0, 0), BlochVector(0, 1, 0)});
        return MeasurementSettings(n, std::move(p));
    }
};

// ---------------------------------------------------------------------------
// States and dense operators

// 2^n normalized complex amplitudes; index i read as an n-bit string with
// qubit 1 as the most significant bit.
struct StateVector {
    int n = 0;
    VectorX amplitudes;

    StateVector(int n_, VectorX amps) : n(n_), amplitudes(std::move(amps)) {
        if (n < 1) throw validation_error("state requires at least 1 qubit");
        if (amplitudes.size() != dim_of(n)) {
            throw validation_error("state must have exactly 2^n amplitudes");
        }
        if (std::abs(amplitudes.squaredNorm() - 1.0) > kStateNormTol) {
            throw validation_error("state norm deviates from 1 by more than 1e-10");
        }
    }
};

// 2^n x 2^n complex matrix; Hermitian whenever produced by this library.
struct DenseOperator {
    int n = 0;
    MatrixX entries;
};

inline void require_dense_cap(int n, const std::string& who) {
    if (n > kDenseQubitCap) {
        throw cap_exceeded_error(who + ": dense operators are capped at n <= " +
                                 std::to_string(kDenseQubitCap) + " qubits (got n = " +
                                 std::to_string(n) + "); use the matrix-free path");
    }
}

// Identity on all qubits except j (1-based), `op` on qubit j.
inline DenseOperator embed_local(const Matrix2& op, int j, int n) {
    if (j < 1 || j > n) throw validation_error("embed_local: qubit index out of range");
    require_dense_cap(n, "embed_local");
    const std::int64_t dim = dim_of(n);
    const std::int64_t stride = std::int64_t{1} << (n - j);
    MatrixX out = MatrixX::Zero(dim, dim);
    for (std::int64_t base = 0; base < dim; base += 2 * stride) {
        for (std::int64_t k = 0; k < stride; ++k) {
            const std::int64_t i0 = base + k;
            const std::int64_t i1 = i0 + stride;
            out(i0, i0) = op(0, 0);
            out(i0, i1) = op(0, 1);
            out(i1, i0) = op(1, 0);
            out(i1, i1) = op(1, 1);
        }
    }
    return {n, std::move(out)};
}

// Kronecker product of n 2x2 factors in qubit order 1..n.
inline DenseOperator tensor_chain(std::span<const Matrix2> ops) {
    if (ops.empty()) throw validation_error("tensor_chain: need at least one factor");
    const int n = static_cast<int>(ops.size());
    require_dense_cap(n, "tensor_chain");
    MatrixX acc = ops[0];
    for (int j = 1; j < n; ++j) {
        const std::int64_t d = acc.rows();
        MatrixX next(2 * d, 2 * d);
        for (std::int64_t r = 0; r < d; ++r) {
            for (std::int64_t c = 0; c < d; ++c) {
                next.block<2, 2>(2 * r, 2 * c) = acc(r, c) * ops[j];
            }
        }
        acc.swap(next);
    }
    return {n, std::move(acc)};
}

inline DenseOperator tensor_chain(const std::vector<Matrix2>& ops) {
    return tensor_chain(std::span<const Matrix2>(ops.data(), ops.size()));
}

// ---------------------------------------------------------------------------
// Matrix-free local operator application

// Apply a 2x2 operator to qubit j (1-based) of the amplitude array, in place.
// One strided pass, O(2^n).
inline void apply_local_inplace(VectorX& amps, const Matrix2& op, int j, int n) {
    const std::int64_t dim = dim_of(n);
    const std::int64_t stride = std::int64_t{1} << (n - j);
    const cx u00 = op(0, 0), u01 = op(0, 1), u10 = op(1, 0), u11 = op(1, 1);
    for (std::int64_t base = 0; base < dim; base += 2 * stride) {
        for (std::int64_t k = 0; k < stride; ++k) {
            const std::int64_t i0 = base + k;
            const std::int64_t i1 = i0 + stride;
            const cx v0 = amps[i0];
            const cx v1 = amps[i1];
            amps[i0] = u00 * v0 + u01 * v1;
            amps[i1] = u10 * v0 + u11 * v1;
        }
    }
}

// (U_1 (x) ... (x) U_n) |psi>, matrix-free.
inline StateVector apply_local_unitaries(const StateVector& state,
                                         std::span<const Matrix2> ops) {
    if (static_cast<int>(ops.size()) != state.n) {
        throw validation_error("apply_local_unitaries: need one 2x2 factor per qubit");
    }
    VectorX amps = state.amplitudes;
    for (int j = 1; j <= state.n; ++j) {
        apply_local_inplace(amps, ops[static_cast<std::size_t>(j - 1)], j, state.n);
    }
    return StateVector(state.n, std::move(amps));
}

inline StateVector apply_local_unitaries(const StateVector& state,
                                         const std::vector<Matrix2>& ops) {
    return apply_local_unitaries(state, std::span<const Matrix2>(ops.data(), ops.size()));
}

// Settings realized by conjugating the original sigma_x/sigma_y pair with one
// unitary per qubit: a_j <- U_j sigma_x U_j^dag, a'_j <- U_j sigma_y U_j^dag.
inline MeasurementSettings settings_from_unitaries(const std::vector<Matrix2>& us) {
    std::vector<std::pair<BlochVector, BlochVector>> pairs;
    pairs.reserve(us.size());
    for (const Matrix2& u : us) {
        const Matrix2 ax = u * pauli_x() * u.adjoint();
        const Matrix2 ay = u * pauli_y() * u.adjoint();
        pairs.emplace_back(bloch_of(ax, 1e-7), bloch_of(ay, 1e-7));
    }
    return MeasurementSettings(static_cast<int>(us.size()), std::move(pairs));
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver facade

struct Eigensystem {
    int n = 0;
    std::vector<double> eigenvalues; // descending
    MatrixX eigenvectors;            // orthonormal columns, matching order

    StateVector eigenstate(std::size_t k) const {
        return StateVector(n, eigenvectors.col(static_cast<std::int64_t>(k)));
    }
};

inline void require_hermitian(const MatrixX& m, double tol, const std::string& who) {
    const double scale = m.cwiseAbs().maxCoeff();
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol * std::max(scale, 1.0)) {
        throw validation_error(who + ": operator is not Hermitian (relative deviation " +
                               std::to_string(dev / std::max(scale, 1.0)) + ")");
    }
}

inline Eigensystem hermitian_eigensystem(const DenseOperator& op) {
    require_hermitian(op.entries, 1e-10, "hermitian_eigensystem");
    Eigen::SelfAdjointEigenSolver<MatrixX> solver(op.entries);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigensystem: eigensolver failed to converge");
    }
    const std::int64_t dim = op.entries.rows();
    Eigensystem sys;
    sys.n = op.n;
    sys.eigenvalues.resize(static_cast<std::size_t>(dim));
    sys.eigenvectors.resize(dim, dim);
    // Eigen returns ascending order; flip to descending.
    for (std::int64_t k = 0; k < dim; ++k) {
        sys.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()[dim - 1 - k];
        sys.eigenvectors.col(k) = solver.eigenvectors().col(dim - 1 - k);
    }
    return sys;
}

// max_k |lambda_k|; eigenvalues-only solve.
inline double operator_norm(const DenseOperator& op) {
    require_hermitian(op.entries, 1e-10, "operator_norm");
    Eigen::SelfAdjointEigenSolver<MatrixX> solver(op.entries, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("operator_norm: eigensolver failed to converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// Phase gauge used for eigenvectors throughout: the largest-magnitude
// component is made real and positive; ties (within 1e-12) break toward the
// lower component index.
template <typename Vec>
inline void fix_phase_gauge(Vec& v) {
    std::int64_t pivot = 0;
    double best = -1.0;
    for (std::int64_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        if (mag > best + 1e-12) {
            best = mag;
            pivot = i;
        }
    }
    if (best <= 0.0) return;
    const cx phase = v[pivot] / std::abs(v[pivot]);
    v /= phase;
}

} // namespace mermin
