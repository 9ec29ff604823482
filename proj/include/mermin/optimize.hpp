#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mermin/mermin_operator.hpp"
#include "mermin/random.hpp"

// See-saw coordinate ascent over measurement settings for a fixed state, and
// the optimal state for fixed settings (top eigenvector of M_n). The
// expectation is linear in each Bloch vector separately,
//
//   <M_n> = a_j . g + a'_j . g'
//
// with coefficient vectors g, g' independent of (a_j, a'_j), so each per-qubit
// update a_j <- g/|g|, a'_j <- g'/|g'| is an exact coordinate maximization and
// the sweep objective never decreases.

namespace mermin {

struct SeesawConfig {
    int max_sweeps = 200;
    double convergence_tol = 1e-10; // minimum sweep improvement to continue
    int restarts = 20;
    std::uint64_t seed = 0;
};

struct SeesawResult {
    double best_value = 0.0;
    MeasurementSettings best_settings;
    int sweeps_used = 0;
    int restart_index = 0;
    std::vector<double> history;             // per-sweep objective, best restart
    std::uint64_t zero_gradient_events = 0;  // kept-direction updates, best restart
};

namespace detail {

// z_k = <psi| B_1 (x) .. sigma_k .. (x) B_n |psi> with the j-th factor of the
// product form replaced by the k-th Pauli matrix. Then g = Im z, g' = Re z.
inline std::array<cx, 3> substituted_overlaps(const StateVector& state,
                                              std::vector<Matrix2>& factors, int j) {
    const Matrix2 saved = factors[static_cast<std::size_t>(j - 1)];
    std::array<cx, 3> z;
    for (int k = 0; k < 3; ++k) {
        factors[static_cast<std::size_t>(j - 1)] = pauli(k);
        z[static_cast<std::size_t>(k)] = product_overlap(state, factors);
    }
    factors[static_cast<std::size_t>(j - 1)] = saved;
    return z;
}

} // namespace detail

// Exact linear coefficients of <M_n> in (a_j, a'_j).
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> local_gradient_vectors(
    const StateVector& state, const MeasurementSettings& settings, int j) {
    if (state.n != settings.n) {
        throw validation_error("local_gradient_vectors: state and settings qubit counts differ");
    }
    if (j < 1 || j > settings.n) {
        throw validation_error("local_gradient_vectors: qubit index out of range");
    }
    std::vector<Matrix2> factors = detail::plus_factors(settings);
    const auto z = detail::substituted_overlaps(state, factors, j);
    Eigen::Vector3d g(z[0].imag(), z[1].imag(), z[2].imag());
    Eigen::Vector3d g_prime(z[0].real(), z[1].real(), z[2].real());
    return {g, g_prime};
}

namespace detail {

struct SweepOutcome {
    std::vector<double> history;
    double value = 0.0;
    int sweeps = 0;
    std::uint64_t zero_gradient_events = 0;
};

inline SweepOutcome run_sweeps(const StateVector& state, MeasurementSettings& settings,
                               const SeesawConfig& config) {
    const int n = settings.n;
    std::vector<Matrix2> factors = plus_factors(settings);
    SweepOutcome out;
    double previous = mermin_expectation_matrix_free(state, settings);
    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        double objective = previous;
        for (int j = 1; j <= n; ++j) {
            const auto z = substituted_overlaps(state, factors, j);
            const Eigen::Vector3d g(z[0].imag(), z[1].imag(), z[2].imag());
            const Eigen::Vector3d gp(z[0].real(), z[1].real(), z[2].real());

            BlochVector a = settings.a(j);
            BlochVector ap = settings.a_prime(j);
            if (g.norm() >= 1e-14) {
                a = BlochVector(g.x() / g.norm(), g.y() / g.norm(), g.z() / g.norm());
            } else {
                ++out.zero_gradient_events;
            }
            if (gp.norm() >= 1e-14) {
                ap = BlochVector(gp.x() / gp.norm(), gp.y() / gp.norm(), gp.z() / gp.norm());
            } else {
                ++out.zero_gradient_events;
            }
            settings.pairs[static_cast<std::size_t>(j - 1)] = {a, ap};
            factors[static_cast<std::size_t>(j - 1)] =
                settings.observable(j, false) + cx(0, 1) * settings.observable(j, true);
            objective = Eigen::Vector3d(a.x, a.y, a.z).dot(g) +
                        Eigen::Vector3d(ap.x, ap.y, ap.z).dot(gp);
        }
        out.history.push_back(objective);
        out.sweeps = sweep + 1;
        if (objective - previous < config.convergence_tol) {
            out.value = objective;
            return out;
        }
        previous = objective;
    }
    out.value = previous;
    return out;
}

} // namespace detail

// Multi-start see-saw. Restart 0 starts from `init_settings`; restart r >= 1
// draws all 2n Bloch vectors afresh with seed config.seed + r. The best
// restart is selected by (value desc, restart index asc), so the result does
// not depend on evaluation order.
inline SeesawResult seesaw_settings(const StateVector& state,
                                    const MeasurementSettings& init_settings,
                                    const SeesawConfig& config) {
    if (state.n != init_settings.n) {
        throw validation_error("seesaw_settings: state and settings qubit counts differ");
    }
    if (config.max_sweeps < 1 || config.restarts < 1 || config.convergence_tol <= 0) {
        throw validation_error("seesaw_settings: invalid config");
    }

    std::optional<SeesawResult> best;
    for (int r = 0; r < config.restarts; ++r) {
        MeasurementSettings settings = init_settings;
        if (r > 0) {
            Rng rng(config.seed + static_cast<std::uint64_t>(r));
            settings = random_settings(state.n, rng);
        }
        detail::SweepOutcome outcome = detail::run_sweeps(state, settings, config);
        if (!best || outcome.value > best->best_value) {
            SeesawResult res{outcome.value, settings,      outcome.sweeps,
                             r,             outcome.history, outcome.zero_gradient_events};
            best = std::move(res);
        }
    }
    return *best;
}

// Top eigenvalue and eigenvector of the dense M_n.
inline std::pair<double, StateVector> optimal_state(const MeasurementSettings& settings) {
    require_dense_cap(settings.n, "optimal_state");
    const Eigensystem sys = hermitian_eigensystem(build_mermin_product_form(settings));
    VectorX top = sys.eigenvectors.col(0);
    fix_phase_gauge(top);
    return {sys.eigenvalues[0], StateVector(settings.n, std::move(top))};
}

struct JointResult {
    double best_value = 0.0;
    StateVector best_state;
    MeasurementSettings best_settings;
    int rounds_used = 0;
};

// Alternation of the two exact half-steps: optimal state for the current
// settings, then see-saw on the settings for that state. Dense-capped through
// optimal_state. Convenience wrapper; each half is documented above.
inline JointResult seesaw_joint(const MeasurementSettings& init_settings,
                                const SeesawConfig& config, int max_rounds = 10) {
    MeasurementSettings settings = init_settings;
    auto [value, state] = optimal_state(settings);
    JointResult result{value, state, settings, 0};
    for (int round = 1; round <= max_rounds; ++round) {
        SeesawConfig local = config;
        local.restarts = 1; // refine the current settings only
        const SeesawResult sw = seesaw_settings(result.best_state, settings, local);
        settings = sw.best_settings;
        auto [v, s] = optimal_state(settings);
        result.rounds_used = round;
        if (v - result.best_value < config.convergence_tol) {
            result.best_value = std::max(result.best_value, v);
            result.best_state = std::move(s);
            result.best_settings = settings;
            break;
        }
        result.best_value = v;
        result.best_state = std::move(s);
        result.best_settings = settings;
    }
    return result;
}

} // namespace mermin
