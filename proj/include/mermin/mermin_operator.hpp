#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mermin/algebra.hpp"

// The Bell-Mermin operator
//
//   M_n = (1/2i) ( (x)_j (A_j + i A'_j)  -  (x)_j (A_j - i A'_j) )
//
// and its expansion as a signed sum over the odd-size primed subsets:
//
//   M_n = sum_{S odd} (-1)^{(|S|-1)/2}  A^(')_1 ... A^(')_n,   A' on S.
//
// Both constructions are provided and tested against each other. Expectation
// values are available matrix-free: since the two tensor factors above are
// adjoints of each other, <psi|M_n|psi> = Im <psi| (x)_j (A_j + i A'_j) |psi>,
// one strided pass per qubit, O(n 2^n), no dense matrix.

namespace mermin {

// One expansion term: the set of primed qubits (odd cardinality) and its sign
// (-1)^{(|S|-1)/2}.
struct MerminTerm {
    std::vector<int> primed; // sorted, 1-based
    int sign = 1;
};

// All odd-cardinality subsets of {1..n} in lexicographic order of their
// sorted index lists; the summation order everywhere downstream. The list
// has exactly 2^{n-1} entries.
inline std::vector<MerminTerm> mermin_terms(int n) {
    if (n < 2) throw validation_error("mermin_terms: need n >= 2");
    std::vector<MerminTerm> terms;
    terms.reserve(std::size_t{1} << (n - 1));
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        const int k = std::popcount(mask);
        if (k % 2 == 0) continue;
        MerminTerm t;
        t.primed.reserve(static_cast<std::size_t>(k));
        for (int j = 1; j <= n; ++j) {
            if (mask & (std::uint64_t{1} << (j - 1))) t.primed.push_back(j);
        }
        t.sign = ((k - 1) / 2) % 2 == 0 ? 1 : -1;
        terms.push_back(std::move(t));
    }
    std::sort(terms.begin(), terms.end(),
              [](const MerminTerm& a, const MerminTerm& b) { return a.primed < b.primed; });
    return terms;
}

// ---------------------------------------------------------------------------
// Dense builders

inline DenseOperator build_mermin_product_form(const MeasurementSettings& settings) {
    const int n = settings.n;
    require_dense_cap(n, "build_mermin_product_form");
    std::vector<Matrix2> plus, minus;
    plus.reserve(static_cast<std::size_t>(n));
    minus.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const Matrix2 a = settings.observable(j, false);
        const Matrix2 ap = settings.observable(j, true);
        plus.push_back(a + cx(0, 1) * ap);
        minus.push_back(a - cx(0, 1) * ap);
    }
    MatrixX m = (tensor_chain(plus).entries - tensor_chain(minus).entries) / cx(0, 2);
    return {n, std::move(m)};
}

inline DenseOperator build_mermin_expansion(const MeasurementSettings& settings) {
    const int n = settings.n;
    require_dense_cap(n, "build_mermin_expansion");
    const std::int64_t dim = dim_of(n);
    MatrixX acc = MatrixX::Zero(dim, dim);
    std::vector<Matrix2> factors(static_cast<std::size_t>(n));
    for (const MerminTerm& term : mermin_terms(n)) {
        auto primed_it = term.primed.begin();
        for (int j = 1; j <= n; ++j) {
            const bool primed = primed_it != term.primed.end() && *primed_it == j;
            if (primed) ++primed_it;
            factors[static_cast<std::size_t>(j - 1)] = settings.observable(j, primed);
        }
        acc += static_cast<double>(term.sign) * tensor_chain(factors).entries;
    }
    return {n, std::move(acc)};
}

// ---------------------------------------------------------------------------
// Matrix-free expectation

namespace detail {

// <psi| O_1 (x) ... (x) O_n |psi> for arbitrary 2x2 factors, matrix-free.
inline cx product_overlap(const StateVector& state, std::span<const Matrix2> factors) {
    VectorX amps = state.amplitudes;
    for (int j = 1; j <= state.n; ++j) {
        apply_local_inplace(amps, factors[static_cast<std::size_t>(j - 1)], j, state.n);
    }
    return state.amplitudes.dot(amps);
}

inline std::vector<Matrix2> plus_factors(const MeasurementSettings& settings) {
    std::vector<Matrix2> f;
    f.reserve(static_cast<std::size_t>(settings.n));
    for (int j = 1; j <= settings.n; ++j) {
        f.push_back(settings.observable(j, false) + cx(0, 1) * settings.observable(j, true));
    }
    return f;
}

} // namespace detail

// <psi|M_n|psi> via the product form, O(n 2^n). Usable well past the dense
// cap (n ~ 20).
inline double mermin_expectation_matrix_free(const StateVector& state,
                                             const MeasurementSettings& settings) {
    if (state.n != settings.n) {
        throw validation_error("mermin expectation: state and settings qubit counts differ");
    }
    return detail::product_overlap(state, detail::plus_factors(settings)).imag();
}

// Expectation of a single expansion term, matrix-free.
inline double term_expectation(const StateVector& state, const MeasurementSettings& settings,
                               const MerminTerm& term) {
    if (state.n != settings.n) {
        throw validation_error("term expectation: state and settings qubit counts differ");
    }
    std::vector<Matrix2> factors;
    factors.reserve(static_cast<std::size_t>(settings.n));
    auto primed_it = term.primed.begin();
    for (int j = 1; j <= settings.n; ++j) {
        const bool primed = primed_it != term.primed.end() && *primed_it == j;
        if (primed) ++primed_it;
        factors.push_back(settings.observable(j, primed));
    }
    return detail::product_overlap(state, factors).real();
}

// Reference path: the signed sum over all 2^{n-1} terms. O(2^{n-1} n 2^n);
// kept for cross-checks against the product-form evaluation.
inline double mermin_expectation_by_terms(const StateVector& state,
                                          const MeasurementSettings& settings) {
    double sum = 0.0;
    for (const MerminTerm& term : mermin_terms(settings.n)) {
        sum += term.sign * term_expectation(state, settings, term);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Squared-operator identity

// Residual of the closed form of M_n^2: with A''_j the (cross-product) third
// observable and x_j = a_j . a'_j,
//
//   n odd:   M_n^2 = 2^{n-1} sum_{T even subset} (x)_{j in T} A''_j
//   n even:  same sum up to |T| = n, minus (-1)^{n/2} 2^{n-1} x_1...x_n I.
struct IdentityReport {
    double max_abs_residual = 0.0;
    double lhs_norm = 0.0; // entrywise max magnitude of M_n^2
    double rhs_norm = 0.0; // entrywise max magnitude of the closed form
};

inline IdentityReport mermin_squared_identity_check(const MeasurementSettings& settings) {
    const int n = settings.n;
    require_dense_cap(n, "mermin_squared_identity_check");
    const std::int64_t dim = dim_of(n);

    const MatrixX m = build_mermin_product_form(settings).entries;
    const MatrixX lhs = m * m;

    std::vector<Matrix2> dprime;
    double dot_product = 1.0;
    dprime.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const PauliTriple t = pauli_triple(settings.a(j), settings.a_prime(j));
        dprime.push_back(t.a_double_prime);
        dot_product *= t.dot;
    }

    MatrixX rhs = MatrixX::Zero(dim, dim);
    std::vector<Matrix2> factors(static_cast<std::size_t>(n));
    const Matrix2 id = Matrix2::Identity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (std::popcount(mask) % 2 != 0) continue;
        for (int j = 1; j <= n; ++j) {
            factors[static_cast<std::size_t>(j - 1)] =
                (mask & (std::uint64_t{1} << (j - 1))) ? dprime[static_cast<std::size_t>(j - 1)]
                                                       : id;
        }
        rhs += tensor_chain(factors).entries;
    }
    rhs *= std::exp2(n - 1);
    if (n % 2 == 0) {
        const double parity_sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
        rhs -= parity_sign * std::exp2(n - 1) * dot_product * MatrixX::Identity(dim, dim);
    }

    IdentityReport report;
    report.lhs_norm = lhs.cwiseAbs().maxCoeff();
    report.rhs_norm = rhs.cwiseAbs().maxCoeff();
    report.max_abs_residual = (lhs - rhs).cwiseAbs().maxCoeff();
    return report;
}

// ---------------------------------------------------------------------------
// Reference states

// (|0...0> + i |1...1>) / sqrt(2); note the relative phase i.
inline StateVector ghz_state(int n) {
    if (n < 2) throw validation_error("ghz_state: need n >= 2");
    VectorX amps = VectorX::Zero(dim_of(n));
    amps[0] = cx(1.0 / std::numbers::sqrt2, 0);
    amps[dim_of(n) - 1] = cx(0, 1.0 / std::numbers::sqrt2);
    return StateVector(n, std::move(amps));
}

// Equal superposition of all weight-1 bitstrings.
inline StateVector w_state(int n) {
    if (n < 2) throw validation_error("w_state: need n >= 2");
    VectorX amps = VectorX::Zero(dim_of(n));
    const double coeff = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) {
        amps[std::int64_t{1} << j] = cx(coeff, 0);
    }
    return StateVector(n, std::move(amps));
}

} // namespace mermin
