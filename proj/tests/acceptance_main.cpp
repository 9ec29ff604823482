// Acceptance suite: the contract this artifact must meet, one criterion per
// run line. Every tolerance is pinned here, in code. The process exit code is
// the number of failed criteria.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "mermin/mermin.hpp"

#include "support/oracles.hpp"

using namespace mermin;

namespace {

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

// 1. <GHZ|M_n|GHZ> = 2^{n-1} within 1e-9 for n = 3..10, under one second.
CriterionResult ghz_maximal_violation() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int n = 3; n <= 10; ++n) {
        const double value =
            mermin_expectation_matrix_free(ghz_state(n), MeasurementSettings::xy(n));
        worst = std::max(worst, std::abs(value - std::exp2(n - 1)));
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst <= 1e-9 && elapsed < 1.0;
    return {pass, fmt("max deviation %.2e, %.3f s", worst, elapsed)};
}

// 2. Exhaustive LHV maximum equals 2^{(n-1)/2} (odd) / 2^{n/2} (even) exactly
//    for n = 2..8; n = 8 single-threaded under 60 s.
CriterionResult lhv_bounds_by_enumeration() {
    double elapsed_n8 = 0.0;
    for (int n = 2; n <= 8; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const LhvResult result = lhv_max(n, 1);
        if (n == 8) elapsed_n8 = seconds_since(start);
        const double bound = n % 2 == 0 ? std::exp2(n / 2) : std::exp2((n - 1) / 2);
        if (result.max_value != bound || result.bound_formula != bound) {
            return {false, fmt("n=%d enumerated %.1f, formula %.1f", n, result.max_value, bound)};
        }
    }
    return {elapsed_n8 < 60.0, fmt("all equal; n=8 scan %.2f s", elapsed_n8)};
}

// 3. Quantum/classical ratio: 2 at n = 3 and 4, 16 at n = 9, exactly.
CriterionResult violation_ratio_values() {
    const bool pass = violation_ratio(3) == 2.0 && violation_ratio(4) == 2.0 &&
                      violation_ratio(9) == 16.0;
    return {pass, fmt("ratios %.0f / %.0f / %.0f", violation_ratio(3), violation_ratio(4),
                      violation_ratio(9))};
}

// 4. Product-form and expansion builders agree entrywise within 1e-12 for 100
//    random settings at each n = 2..8.
CriterionResult builder_equivalence() {
    Rng rng(oracles::kAcceptanceSeed + 4);
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const MeasurementSettings s = random_settings(n, rng);
            const double residual = (build_mermin_product_form(s).entries -
                                     build_mermin_expansion(s).entries)
                                        .cwiseAbs()
                                        .maxCoeff();
            worst = std::max(worst, residual);
        }
    }
    return {worst <= 1e-12, fmt("max entrywise residual %.2e", worst)};
}

// 5. Squared-operator closed form: residual < 1e-10 for 100 random settings
//    at each n = 3..8 (both parities).
CriterionResult squared_operator_identities() {
    Rng rng(oracles::kAcceptanceSeed + 5);
    double worst = 0.0;
    for (int n = 3; n <= 8; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const MeasurementSettings s = random_settings(n, rng);
            worst = std::max(worst, mermin_squared_identity_check(s).max_abs_residual);
        }
    }
    return {worst < 1e-10, fmt("max residual %.2e", worst)};
}

// 6. operator_norm(M_n) <= 2^{n-1} + 1e-9 on every random trial, and the
//    scalar defect bound dominates operator_norm(M_n^2) within 1e-9.
CriterionResult norm_bounds() {
    Rng rng(oracles::kAcceptanceSeed + 6);
    double worst_excess = -1e300;
    double worst_gap = -1e300;
    for (int n = 3; n <= 8; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const MeasurementSettings s = random_settings(n, rng);
            const MatrixX m = build_mermin_product_form(s).entries;
            const double norm = operator_norm({n, m});
            worst_excess = std::max(worst_excess, norm - std::exp2(n - 1));
            const double norm_m2 = operator_norm({n, MatrixX(m * m)});
            const double bound = norm_bound_scalar(orthogonality_defects(s).defects);
            worst_gap = std::max(worst_gap, norm_m2 - bound);
        }
    }
    const bool pass = worst_excess <= 1e-9 && worst_gap <= 1e-9;
    return {pass, fmt("max norm excess %.2e, max bound gap %.2e", worst_excess, worst_gap)};
}

// 7. Step (i) necessity: settings with some |a_j . a'_j| >= 0.1 stay below
//    2^{n-1} - 1e-6 in operator norm, 100 trials per n = 3..8.
CriterionResult orthogonality_necessity() {
    Rng rng(oracles::kAcceptanceSeed + 7);
    double smallest_gap = 1e300;
    for (int n = 3; n <= 8; ++n) {
        int kept = 0;
        while (kept < 100) {
            const MeasurementSettings s = random_settings(n, rng);
            if (orthogonality_defects(s).max_abs_defect < 0.1) continue;
            ++kept;
            const double gap =
                std::exp2(n - 1) - operator_norm(build_mermin_product_form(s));
            smallest_gap = std::min(smallest_gap, gap);
            if (gap <= 1e-6) {
                return {false, fmt("n=%d trial %d gap %.2e", n, kept, gap)};
            }
        }
    }
    return {true, fmt("smallest norm gap %.2e", smallest_gap)};
}

// 8. Theorem round trip: 50 random LU tuples per n = 3..8. Forward images
//    reach 2^{n-1} within 1e-9 and extract with residual <= 1e-6; the top
//    eigenvector for the rotated (orthogonal) settings extracts as well.
CriterionResult characterization_round_trip() {
    Rng rng(oracles::kAcceptanceSeed + 8);
    double worst_forward = 0.0;
    double worst_residual = 0.0;
    double worst_converse = 0.0;
    for (int n = 3; n <= 8; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Matrix2> us;
            for (int j = 0; j < n; ++j) us.push_back(random_unitary_2x2(rng));
            const MeasurementSettings rotated = settings_from_unitaries(us);
            const StateVector state = apply_local_unitaries(ghz_state(n), us);

            const double expectation = mermin_expectation_matrix_free(state, rotated);
            worst_forward = std::max(worst_forward, std::exp2(n - 1) - expectation);

            const ExtractionWitness witness = extract_ghz_lu(state, rotated);
            worst_residual = std::max(worst_residual, witness.fidelity_residual);

            // Converse direction through the spectral route.
            const auto [value, top] = optimal_state(rotated);
            const ExtractionWitness converse = extract_ghz_lu(top, rotated);
            worst_converse = std::max(worst_converse, converse.fidelity_residual);
        }
    }
    const bool pass = worst_forward <= 1e-9 && worst_residual <= 1e-6 && worst_converse <= 1e-6;
    return {pass, fmt("max forward shortfall %.2e, residuals %.2e / %.2e", worst_forward,
                      worst_residual, worst_converse)};
}

// 9. The 2^{2(n-1)} eigenspace of M_n^2 has dimension exactly 2 for
//    orthogonal settings, n = 3..8.
CriterionResult eigenspace_structure() {
    Rng rng(oracles::kAcceptanceSeed + 9);
    for (int n = 3; n <= 8; ++n) {
        if (max_eigenspace_structure(MeasurementSettings::xy(n)).dimension != 2) {
            return {false, fmt("x/y settings at n=%d", n)};
        }
        for (int trial = 0; trial < 10; ++trial) {
            const MeasurementSettings s = random_orthogonal_settings(n, rng);
            const int dim = max_eigenspace_structure(s).dimension;
            if (dim != 2) {
                return {false, fmt("n=%d trial %d dimension %d", n, trial, dim)};
            }
        }
    }
    return {true, "dimension 2 in every trial"};
}

// 10. Negative result: 1000-restart see-saw on |W>, n = 3, stays strictly
//     below 4 - 0.1. The located plateau is pinned as a regression value.
CriterionResult w_state_negative() {
    SeesawConfig config;
    config.restarts = 1000;
    config.seed = oracles::kAcceptanceSeed + 10;
    const SeesawResult result =
        seesaw_settings(w_state(3), MeasurementSettings::xy(3), config);
    const double reference = 3.045956004; // located by this suite; regression guard
    const bool pass =
        result.best_value < 4.0 - 0.1 && std::abs(result.best_value - reference) < 1e-6;
    return {pass, fmt("best value %.9f (reference %.9f)", result.best_value, reference)};
}

// 11. Sampler consistency: |estimate - 4| <= 5 sigma for |GHZ>, n = 3, 1e5
//     shots per term, in at least 99% of 200 seeded trials.
CriterionResult sampler_consistency() {
    const StateVector ghz = ghz_state(3);
    const MeasurementSettings xy = MeasurementSettings::xy(3);
    int within = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const MerminEstimate estimate =
            estimate_mermin(ghz, xy, 100000, oracles::kAcceptanceSeed + 11000 +
                                                 static_cast<std::uint64_t>(trial));
        if (std::abs(estimate.value - 4.0) <= 5.0 * estimate.std_error + 1e-12) ++within;
    }
    return {within >= 198, fmt("%d / %d trials within five standard errors", within, trials)};
}

// 12. n = 2 sanity: quantum maximum equals the LHV bound (no violation).
CriterionResult n2_sanity() {
    const double quantum = operator_norm(build_mermin_product_form(MeasurementSettings::xy(2)));
    const double classical = lhv_max(2).max_value;
    const bool pass = std::abs(quantum - 2.0) <= 1e-9 && classical == 2.0;
    return {pass, fmt("quantum %.12f, classical %.1f", quantum, classical)};
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        CriterionResult (*run)();
    };
    const std::vector<Entry> criteria = {
        {"GHZ maximal violation, n = 3..10", ghz_maximal_violation},
        {"LHV bounds by enumeration, n = 2..8", lhv_bounds_by_enumeration},
        {"violation ratio values", violation_ratio_values},
        {"builder equivalence, 100 x n = 2..8", builder_equivalence},
        {"squared-operator identities, 100 x n = 3..8", squared_operator_identities},
        {"norm bound and scalar-bound domination", norm_bounds},
        {"orthogonality necessity, defect >= 0.1", orthogonality_necessity},
        {"characterization round trip, 50 x n = 3..8", characterization_round_trip},
        {"top eigenspace dimension is 2", eigenspace_structure},
        {"W-state stays strictly sub-maximal", w_state_negative},
        {"sampler consistency, 200 trials", sampler_consistency},
        {"n = 2 sanity: no violation", n2_sanity},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const CriterionResult result = criteria[k].run();
        if (!result.pass) ++failures;
        std::printf("[%s] criterion %2zu: %s — %s\n", result.pass ? "PASS" : "FAIL", k + 1,
                    criteria[k].name, result.detail.c_str());
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
