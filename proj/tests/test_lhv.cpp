#include <catch2/catch_amalgamated.hpp>

#include "mermin/lhv.hpp"
#include "mermin/random.hpp"

#include "support/oracles.hpp"

using namespace mermin;

TEST_CASE("polynomial value on hand-evaluated assignments") {
    DeterministicAssignment all_plus{{1, 1, 1}, {1, 1, 1}};
    CHECK(mermin_polynomial_value(all_plus, 3) == 2.0); // 3 - 1

    DeterministicAssignment primes_flipped{{1, 1, 1}, {-1, -1, -1}};
    CHECK(mermin_polynomial_value(primes_flipped, 3) == -2.0); // -3 + 1

    DeterministicAssignment two{{1, 1}, {1, 1}};
    CHECK(mermin_polynomial_value(two, 2) == 2.0);

    CHECK_THROWS_AS(mermin_polynomial_value(two, 3), validation_error);
}

TEST_CASE("enumerated maximum equals the closed-form bound for n = 2..8") {
    for (int n = 2; n <= 8; ++n) {
        const LhvResult result = lhv_max(n);
        const double bound = n % 2 == 0 ? std::exp2(n / 2) : std::exp2((n - 1) / 2);
        CHECK(result.bound_formula == bound);
        CHECK(result.max_value == bound); // integer equality
        CHECK(result.strategies_scanned == (std::uint64_t{1} << (2 * n)));
        // The reported winner reproduces the maximum through the plain evaluator.
        CHECK(std::abs(mermin_polynomial_value(result.argmax, n)) == result.max_value);
    }
}

TEST_CASE("independent enumeration oracle at n = 3 and 4") {
    for (int n : {3, 4}) {
        double max_raw = -1e9, max_abs = 0.0;
        DeterministicAssignment a;
        a.eps.assign(static_cast<std::size_t>(n), 1);
        a.eps_prime.assign(static_cast<std::size_t>(n), 1);
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << (2 * n)); ++c) {
            for (int j = 0; j < n; ++j) {
                a.eps[static_cast<std::size_t>(j)] = (c >> j) & 1 ? -1 : 1;
                a.eps_prime[static_cast<std::size_t>(j)] = (c >> (n + j)) & 1 ? -1 : 1;
            }
            const double v = mermin_polynomial_value(a, n);
            max_raw = std::max(max_raw, v);
            max_abs = std::max(max_abs, std::abs(v));
        }
        CHECK(lhv_max(n).max_value == max_abs);
        // Flipping every primed value negates the polynomial, so the raw and
        // absolute maxima coincide.
        CHECK(max_raw == max_abs);
    }
}

TEST_CASE("vertices dominate sampled mixed strategies") {
    const int n = 3;
    const double enumerated = lhv_max(n).max_value;
    Rng rng(oracles::kLhvSeed);
    const auto terms = mermin_terms(n);
    for (int trial = 0; trial < 1000; ++trial) {
        std::array<double, 3> e{}, ep{};
        for (int j = 0; j < n; ++j) {
            e[static_cast<std::size_t>(j)] = 2.0 * uniform_unit(rng) - 1.0;
            ep[static_cast<std::size_t>(j)] = 2.0 * uniform_unit(rng) - 1.0;
        }
        double value = 0.0;
        for (const MerminTerm& term : terms) {
            double prod = term.sign;
            auto primed_it = term.primed.begin();
            for (int j = 1; j <= n; ++j) {
                const bool primed = primed_it != term.primed.end() && *primed_it == j;
                if (primed) ++primed_it;
                prod *= primed ? ep[static_cast<std::size_t>(j - 1)]
                               : e[static_cast<std::size_t>(j - 1)];
            }
            value += prod;
        }
        CHECK(std::abs(value) <= enumerated + 1e-12);
    }
}

TEST_CASE("threaded enumeration matches the single-threaded scan") {
    const LhvResult serial = lhv_max(5, 1);
    const LhvResult parallel = lhv_max(5, 4);
    CHECK(serial.max_value == parallel.max_value);
    CHECK(serial.argmax.eps == parallel.argmax.eps);
    CHECK(serial.argmax.eps_prime == parallel.argmax.eps_prime);
}

TEST_CASE("violation ratio formula") {
    CHECK(violation_ratio(3) == 2.0);
    CHECK(violation_ratio(4) == 2.0);
    CHECK(violation_ratio(9) == 16.0);
    CHECK_THROWS_AS(violation_ratio(2), validation_error);
}

TEST_CASE("enumeration cap is refused, not approximated") {
    CHECK_THROWS_AS(lhv_max(kLhvQubitCap + 1), cap_exceeded_error);
    CHECK_THROWS_AS(lhv_max(1), validation_error);
}
