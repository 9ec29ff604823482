#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mermin/mermin_operator.hpp"
#include "mermin/random.hpp"

// Finite-shot simulation of the per-term correlation measurements: for one
// expansion term, every qubit is measured in the eigenbasis of its local
// observable, and the n-bit sign pattern is drawn from the exact outcome
// distribution |<basis|psi>|^2. Statistical error is then purely multinomial;
// there is no systematic sampling error. Records are reproducible: the
// generator is mt19937_64 (see random.hpp) and term t of an estimate uses
// seed + t.

namespace mermin {

// Passing this as the shot count requests exact probabilities instead of
// sampling; estimates then carry zero statistical error.
inline constexpr std::uint64_t kExactShots = 0;

struct ShotRecord {
    MerminTerm term;
    std::vector<std::uint64_t> counts; // per sign pattern; index bit = 1 means outcome -1
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    // Sample mean of the +-1 outcome product.
    double correlator() const {
        std::int64_t signed_sum = 0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            const bool odd = std::popcount(s) & 1;
            signed_sum += odd ? -static_cast<std::int64_t>(counts[s])
                              : static_cast<std::int64_t>(counts[s]);
        }
        return static_cast<double>(signed_sum) / static_cast<double>(shots);
    }

    // Standard error of the mean for a +-1 variable.
    double std_error() const {
        if (shots < 2) return 0.0;
        const double m = correlator();
        const double var = std::max(0.0, 1.0 - m * m) / static_cast<double>(shots - 1);
        return std::sqrt(var);
    }
};

namespace detail {

// Exact outcome probabilities of one term's product measurement, indexed by
// sign pattern (qubit 1 = most significant bit).
inline std::vector<double> term_outcome_probabilities(const StateVector& state,
                                                      const MeasurementSettings& settings,
                                                      const MerminTerm& term) {
    VectorX amps = state.amplitudes;
    auto primed_it = term.primed.begin();
    for (int j = 1; j <= state.n; ++j) {
        const bool primed = primed_it != term.primed.end() && *primed_it == j;
        if (primed) ++primed_it;
        const Matrix2 obs = settings.observable(j, primed);
        Eigen::SelfAdjointEigenSolver<Matrix2> solver(obs);
        Matrix2 basis;
        basis.col(0) = solver.eigenvectors().col(1); // outcome +1
        basis.col(1) = solver.eigenvectors().col(0); // outcome -1
        apply_local_inplace(amps, basis.adjoint(), j, state.n);
    }
    std::vector<double> probs(static_cast<std::size_t>(amps.size()));
    double total = 0.0;
    for (std::int64_t i = 0; i < amps.size(); ++i) {
        probs[static_cast<std::size_t>(i)] = std::norm(amps[i]);
        total += probs[static_cast<std::size_t>(i)];
    }
    for (double& p : probs) p /= total;
    return probs;
}

inline void validate_term(const MerminTerm& term, int n) {
    if (term.primed.empty() || term.primed.size() % 2 == 0) {
        throw validation_error("sampler: term must prime an odd number of qubits");
    }
    int prev = 0;
    for (int j : term.primed) {
        if (j <= prev || j > n) {
            throw validation_error("sampler: term indices must be strictly increasing in 1..n");
        }
        prev = j;
    }
}

} // namespace detail

inline ShotRecord sample_term(const StateVector& state, const MeasurementSettings& settings,
                              const MerminTerm& term, std::uint64_t shots, std::uint64_t seed) {
    if (state.n != settings.n) {
        throw validation_error("sample_term: state and settings qubit counts differ");
    }
    detail::validate_term(term, state.n);
    if (shots < 1) throw validation_error("sample_term: need at least one shot");

    const std::vector<double> probs = detail::term_outcome_probabilities(state, settings, term);
    std::vector<double> cumulative(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cumulative[i] = acc;
    }
    cumulative.back() = 1.0;

    ShotRecord record{term, std::vector<std::uint64_t>(probs.size(), 0), shots, seed};
    Rng rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = uniform_unit(rng);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx =
            std::min(probs.size() - 1,
                     static_cast<std::size_t>(std::distance(cumulative.begin(), it)));
        ++record.counts[idx];
    }
    return record;
}

struct TermEstimate {
    MerminTerm term;
    double estimate = 0.0;
    double std_error = 0.0;
};

struct MerminEstimate {
    double value = 0.0;
    double std_error = 0.0; // per-term errors combined in quadrature
    std::vector<TermEstimate> per_term;
};

inline MerminEstimate estimate_mermin(const StateVector& state,
                                      const MeasurementSettings& settings,
                                      std::uint64_t shots_per_term, std::uint64_t seed) {
    if (state.n != settings.n) {
        throw validation_error("estimate_mermin: state and settings qubit counts differ");
    }
    if (shots_per_term != kExactShots && shots_per_term < 2) {
        throw validation_error("estimate_mermin: need at least 2 shots per term (or 0 for exact)");
    }

    MerminEstimate out;
    double variance = 0.0;
    std::uint64_t term_index = 0;
    for (const MerminTerm& term : mermin_terms(settings.n)) {
        TermEstimate te{term, 0.0, 0.0};
        if (shots_per_term == kExactShots) {
            const auto probs = detail::term_outcome_probabilities(state, settings, term);
            double corr = 0.0;
            for (std::size_t s = 0; s < probs.size(); ++s) {
                corr += (std::popcount(s) & 1) ? -probs[s] : probs[s];
            }
            te.estimate = std::clamp(corr, -1.0, 1.0);
        } else {
            const ShotRecord record =
                sample_term(state, settings, term, shots_per_term, seed + term_index);
            te.estimate = record.correlator();
            te.std_error = record.std_error();
        }
        out.value += term.sign * te.estimate;
        variance += te.std_error * te.std_error;
        out.per_term.push_back(std::move(te));
        ++term_index;
    }
    out.std_error = std::sqrt(variance);
    return out;
}

} // namespace mermin
