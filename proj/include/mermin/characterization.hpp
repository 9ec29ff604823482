#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "mermin/mermin_operator.hpp"

// Executable form of the characterization theorem: a state reaches
// <M_n> = 2^{n-1} exactly when it is a local-unitary image of the GHZ state.
// The three steps of the necessity argument become checkable procedures:
//
//   (i)   maximal operator norm forces a_j . a'_j = 0 on every qubit
//         (orthogonality_defects, norm_bound_scalar);
//   (ii)  the top eigenspace of M_n^2 is two-dimensional and, in the product
//         eigenbasis of the A''_j, spanned by |0...0> and |1...1>
//         (double_prime_basis, max_eigenspace_structure);
//   (iii) the two surviving coefficients have equal weight and a fixed
//         relative phase, which assembles the local unitaries explicitly
//         (extract_ghz_lu).

namespace mermin {

inline constexpr double kOrthTol = 1e-8;     // max tolerated |a_j . a'_j|
inline constexpr double kViolationTol = 1e-6; // slack below 2^{n-1} for extraction
inline constexpr double kCoeffTol = 1e-6;     // coefficient magnitude checks
inline constexpr double kPhaseTol = 1e-6;     // phase-relation check, radians

struct OrthogonalityReport {
    std::vector<double> defects; // x_j = a_j . a'_j
    double max_abs_defect = 0.0;
};

inline OrthogonalityReport orthogonality_defects(const MeasurementSettings& settings) {
    OrthogonalityReport report;
    report.defects.reserve(static_cast<std::size_t>(settings.n));
    for (int j = 1; j <= settings.n; ++j) {
        const double x = settings.a(j).dot(settings.a_prime(j));
        report.defects.push_back(x);
        report.max_abs_defect = std::max(report.max_abs_defect, std::abs(x));
    }
    return report;
}

// Scalar upper bound on |M_n^2| as a function of the defects x_j alone,
// obtained by bounding each A''_j factor of the squared-operator expansion by
// u_j = sqrt(1 - x_j^2). The even-subset sum of products of the u_j equals
// (prod(1+u) + prod(1-u))/2; for even n the expansion's scalar term adds the
// correction -(-1)^{n/2} x_1...x_n. The bound attains 2^{2(n-1)} only at x = 0.
inline double norm_bound_scalar(std::span<const double> xs) {
    const int n = static_cast<int>(xs.size());
    if (n < 2) throw validation_error("norm_bound_scalar: need at least 2 defects");
    double prod_plus = 1.0, prod_minus = 1.0, prod_x = 1.0;
    for (double x : xs) {
        if (std::abs(x) > 1.0 + 1e-12) {
            throw validation_error("norm_bound_scalar: defects must lie in [-1, 1]");
        }
        const double u = std::sqrt(std::max(0.0, 1.0 - x * x));
        prod_plus *= 1.0 + u;
        prod_minus *= 1.0 - u;
        prod_x *= x;
    }
    double sum = 0.5 * (prod_plus + prod_minus);
    if (n % 2 == 0) {
        const double parity_sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
        sum -= parity_sign * prod_x;
    }
    return std::exp2(n - 1) * sum;
}

inline double norm_bound_scalar(const std::vector<double>& xs) {
    return norm_bound_scalar(std::span<const double>(xs.data(), xs.size()));
}

// ---------------------------------------------------------------------------
// The A''-representation

// Per-qubit eigenbasis of the normalized A''_j with the phase relations
//   A''_j ket0 = +ket0          A''_j ket1 = -ket1
//   A_j  ket0 = e^{-i alpha} ket1     A_j  ket1 = e^{+i alpha} ket0
//   A'_j ket0 = i e^{-i alpha} ket1   A'_j ket1 = -i e^{+i alpha} ket0
struct QubitBasis {
    Eigen::Vector2cd ket0;
    Eigen::Vector2cd ket1;
    double alpha = 0.0; // in [0, 2pi)

    // Basis-change unitary: |0> -> ket0, |1> -> ket1.
    Matrix2 v() const {
        Matrix2 m;
        m.col(0) = ket0;
        m.col(1) = ket1;
        return m;
    }
};

struct DoublePrimeBasis {
    int n = 0;
    std::vector<QubitBasis> qubits; // index j-1 for qubit j
    double alpha_sum = 0.0;
};

namespace detail {

inline double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    return a < 0 ? a + two_pi : a;
}

inline void require_orthogonal(const MeasurementSettings& settings, const std::string& who) {
    const auto report = orthogonality_defects(settings);
    if (report.max_abs_defect > kOrthTol) {
        throw precondition_error(who + ": settings not orthogonal (max |a_j . a'_j| = " +
                                 std::to_string(report.max_abs_defect) + " exceeds 1e-8)");
    }
}

} // namespace detail

// An optional per-qubit gauge rotation (mu_j, nu_j) multiplies ket0 by
// e^{i mu_j} and ket1 by e^{i nu_j} after the canonical gauge fix; alpha_j
// co-varies, so downstream extraction results are gauge-independent.
inline DoublePrimeBasis double_prime_basis(
    const MeasurementSettings& settings,
    std::span<const std::pair<double, double>> gauge = {}) {
    detail::require_orthogonal(settings, "double_prime_basis");
    if (!gauge.empty() && static_cast<int>(gauge.size()) != settings.n) {
        throw validation_error("double_prime_basis: gauge list must have one entry per qubit");
    }

    DoublePrimeBasis basis;
    basis.n = settings.n;
    basis.qubits.reserve(static_cast<std::size_t>(settings.n));
    for (int j = 1; j <= settings.n; ++j) {
        const auto cross = settings.a(j).cross(settings.a_prime(j));
        const double cross_norm =
            std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]);
        if (cross_norm < 1e-7) {
            throw precondition_error(
                "double_prime_basis: settings not orthogonal (degenerate cross product on "
                "qubit " + std::to_string(j) + ")");
        }
        const Matrix2 dprime_unit =
            direction_matrix(cross[0] / cross_norm, cross[1] / cross_norm,
                             cross[2] / cross_norm);

        Eigen::SelfAdjointEigenSolver<Matrix2> solver(dprime_unit);
        QubitBasis qb;
        qb.ket0 = solver.eigenvectors().col(1); // eigenvalue +1
        qb.ket1 = solver.eigenvectors().col(0); // eigenvalue -1
        fix_phase_gauge(qb.ket0);
        fix_phase_gauge(qb.ket1);
        if (!gauge.empty()) {
            const auto& [mu, nu] = gauge[static_cast<std::size_t>(j - 1)];
            qb.ket0 *= std::exp(cx(0, mu));
            qb.ket1 *= std::exp(cx(0, nu));
        }

        const Matrix2 a = settings.observable(j, false);
        const Matrix2 ap = settings.observable(j, true);
        const cx phase = qb.ket1.dot(a * qb.ket0); // e^{-i alpha}
        if (std::abs(std::abs(phase) - 1.0) > 1e-9) {
            throw precondition_error(
                "double_prime_basis: unprimed observable does not swap the eigenbasis "
                "(qubit " + std::to_string(j) + ")");
        }
        qb.alpha = detail::wrap_angle(-std::arg(phase));

        // Consistency of the four phase relations above.
        const double residual = std::max(
            {(a * qb.ket0 - phase * qb.ket1).norm(),
             (a * qb.ket1 - std::conj(phase) * qb.ket0).norm(),
             (ap * qb.ket0 - cx(0, 1) * phase * qb.ket1).norm(),
             (ap * qb.ket1 + cx(0, 1) * std::conj(phase) * qb.ket0).norm()});
        if (residual > 1e-9) {
            throw precondition_error(
                "double_prime_basis: primed observable action inconsistent with the "
                "recovered phase (qubit " + std::to_string(j) + ", residual " +
                std::to_string(residual) + ")");
        }

        basis.alpha_sum += qb.alpha;
        basis.qubits.push_back(std::move(qb));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Step (ii): top eigenspace of M_n^2

struct EigenspaceStructure {
    int dimension = 0;
    std::vector<StateVector> basis;
};

inline EigenspaceStructure max_eigenspace_structure(const MeasurementSettings& settings) {
    detail::require_orthogonal(settings, "max_eigenspace_structure");
    require_dense_cap(settings.n, "max_eigenspace_structure");

    const MatrixX m = build_mermin_product_form(settings).entries;
    const DenseOperator m_squared{settings.n, m * m};
    const Eigensystem sys = hermitian_eigensystem(m_squared);

    const double target = std::exp2(2 * (settings.n - 1));
    EigenspaceStructure out;
    for (std::size_t k = 0; k < sys.eigenvalues.size(); ++k) {
        if (std::abs(sys.eigenvalues[k] - target) <= 1e-8 * target) {
            VectorX v = sys.eigenvectors.col(static_cast<std::int64_t>(k));
            fix_phase_gauge(v);
            out.basis.emplace_back(settings.n, std::move(v));
        }
    }
    out.dimension = static_cast<int>(out.basis.size());
    return out;
}

// ---------------------------------------------------------------------------
// Step (iii): constructive extraction of the local unitaries

struct ExtractionWitness {
    std::vector<Matrix2> U; // |phi> = U_1 (x) ... (x) U_n |GHZ>
    std::vector<Matrix2> V; // per-qubit basis changes into the A'' eigenbasis
    std::vector<double> alphas;
    double phi = 0.0;
    double theta = 0.0;
    cx a_coeff;              // coefficient of |0...0> in the A'' basis
    cx b_coeff;              // coefficient of |1...1> in the A'' basis
    cx overlap;              // <phi | U_1 (x) ... (x) U_n | GHZ>
    double fidelity_residual = 0.0; // 1 - |overlap|
};

// Recovers the local unitaries carrying |GHZ> onto `state`. Preconditions:
// orthogonal settings and <state|M_n|state> >= 2^{n-1} - 1e-6. Every checked
// relation failing beyond tolerance raises a diagnostic naming the check.
inline ExtractionWitness extract_ghz_lu(
    const StateVector& state, const MeasurementSettings& settings,
    std::span<const std::pair<double, double>> gauge = {}) {
    if (state.n != settings.n) {
        throw validation_error("extract_ghz_lu: state and settings qubit counts differ");
    }
    const int n = settings.n;
    detail::require_orthogonal(settings, "extract_ghz_lu");

    const double expectation = mermin_expectation_matrix_free(state, settings);
    const double maximum = std::exp2(n - 1);
    if (expectation < maximum - kViolationTol) {
        throw precondition_error(
            "extract_ghz_lu: state is not a maximal violator for these settings "
            "(expectation " + std::to_string(expectation) + " < 2^{n-1} - 1e-6)");
    }

    const DoublePrimeBasis basis = double_prime_basis(settings, gauge);

    // Coefficients of the state in the A'' product basis.
    VectorX coeffs = state.amplitudes;
    for (int j = 1; j <= n; ++j) {
        apply_local_inplace(coeffs, basis.qubits[static_cast<std::size_t>(j - 1)].v().adjoint(),
                            j, n);
    }
    const std::int64_t dim = dim_of(n);
    const cx a = coeffs[0];
    const cx b = coeffs[dim - 1];
    for (std::int64_t i = 1; i < dim - 1; ++i) {
        if (std::abs(coeffs[i]) > kCoeffTol) {
            throw precondition_error(
                "extract_ghz_lu: state has support outside the two extreme product-basis "
                "states (coefficient " + std::to_string(std::abs(coeffs[i])) +
                " at index " + std::to_string(i) + ")");
        }
    }
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    if (std::abs(std::abs(a) - inv_sqrt2) > kCoeffTol ||
        std::abs(std::abs(b) - inv_sqrt2) > kCoeffTol) {
        throw precondition_error(
            "extract_ghz_lu: extreme coefficients do not both have magnitude 1/sqrt(2)");
    }

    // b must equal i a e^{-i sum(alpha)}; this is what separates the +2^{n-1}
    // eigenvectors from the -2^{n-1} ones.
    const cx predicted_b = cx(0, 1) * a * std::exp(cx(0, -basis.alpha_sum));
    const double phase_gap = std::abs(std::arg(predicted_b / b));
    if (phase_gap > kPhaseTol) {
        throw precondition_error(
            "extract_ghz_lu: phase relation between the extreme coefficients violated "
            "(gap " + std::to_string(phase_gap) + " rad)");
    }

    ExtractionWitness witness;
    witness.a_coeff = a;
    witness.b_coeff = b;
    witness.phi = detail::wrap_angle(std::arg(a));
    witness.theta = detail::wrap_angle(std::arg(b) - std::numbers::pi / 2.0);
    witness.V.reserve(static_cast<std::size_t>(n));
    witness.alphas.reserve(static_cast<std::size_t>(n));
    for (const QubitBasis& qb : basis.qubits) {
        witness.V.push_back(qb.v());
        witness.alphas.push_back(qb.alpha);
    }
    witness.U = witness.V;
    Matrix2 phase0 = Matrix2::Identity();
    phase0(0, 0) = std::exp(cx(0, witness.phi));
    Matrix2 phase1 = Matrix2::Identity();
    phase1(1, 1) = std::exp(cx(0, witness.theta));
    witness.U[0] = witness.V[0] * phase0;
    witness.U[1] = witness.V[1] * phase1;

    const StateVector image = apply_local_unitaries(ghz_state(n), witness.U);
    witness.overlap = state.amplitudes.dot(image.amplitudes);
    witness.fidelity_residual = 1.0 - std::abs(witness.overlap);
    return witness;
}

} // namespace mermin
