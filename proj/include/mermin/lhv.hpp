#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "mermin/mermin_operator.hpp"

// Local-hidden-variable side of the inequalities: every observable carries a
// predetermined value in {+1,-1}, and the Mermin expression is maximized by
// exhaustive enumeration over all 4^n deterministic strategies.

namespace mermin {

inline constexpr int kLhvQubitCap = 10; // 4^10 ~ 1.05e6 strategies

// Predetermined outcomes eps_j for A_j and eps'_j for A'_j.
struct DeterministicAssignment {
    std::vector<int> eps;       // entries +1 / -1
    std::vector<int> eps_prime; // entries +1 / -1
};

struct LhvResult {
    double max_value = 0.0;
    DeterministicAssignment argmax;
    double bound_formula = 0.0; // 2^{n/2} for even n, 2^{(n-1)/2} for odd n
    std::uint64_t strategies_scanned = 0;
};

// Value of the Mermin expression under one deterministic assignment;
// integer-valued by construction.
inline double mermin_polynomial_value(const DeterministicAssignment& assignment, int n) {
    if (static_cast<int>(assignment.eps.size()) != n ||
        static_cast<int>(assignment.eps_prime.size()) != n) {
        throw validation_error("mermin_polynomial_value: assignment lists must have length n");
    }
    std::int64_t sum = 0;
    for (const MerminTerm& term : mermin_terms(n)) {
        int prod = term.sign;
        auto primed_it = term.primed.begin();
        for (int j = 1; j <= n; ++j) {
            const bool primed = primed_it != term.primed.end() && *primed_it == j;
            if (primed) ++primed_it;
            prod *= primed ? assignment.eps_prime[static_cast<std::size_t>(j - 1)]
                           : assignment.eps[static_cast<std::size_t>(j - 1)];
        }
        sum += prod;
    }
    return static_cast<double>(sum);
}

namespace detail {

// Strategy counters pack eps into bits 0..n-1 and eps' into bits n..2n-1;
// a set bit means -1.
inline DeterministicAssignment assignment_from_counter(std::uint64_t counter, int n) {
    DeterministicAssignment a;
    a.eps.resize(static_cast<std::size_t>(n));
    a.eps_prime.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        a.eps[static_cast<std::size_t>(j)] = (counter >> j) & 1 ? -1 : 1;
        a.eps_prime[static_cast<std::size_t>(j)] = (counter >> (n + j)) & 1 ? -1 : 1;
    }
    return a;
}

struct PackedTerm {
    std::uint64_t primed_mask = 0;
    std::uint64_t unprimed_mask = 0;
    int sign = 1;
};

struct ChunkBest {
    std::int64_t abs_value = -1;
    std::uint64_t counter = 0;
};

inline ChunkBest scan_lhv_range(const std::vector<PackedTerm>& terms, int n,
                                std::uint64_t begin, std::uint64_t end) {
    ChunkBest best;
    for (std::uint64_t c = begin; c < end; ++c) {
        const std::uint64_t e = c & ((std::uint64_t{1} << n) - 1);
        const std::uint64_t ep = c >> n;
        std::int64_t value = 0;
        for (const PackedTerm& t : terms) {
            const int parity =
                std::popcount((e & t.unprimed_mask) ^ (ep & t.primed_mask)) & 1;
            value += parity ? -t.sign : t.sign;
        }
        const std::int64_t abs_value = value < 0 ? -value : value;
        if (abs_value > best.abs_value) {
            best.abs_value = abs_value;
            best.counter = c;
        }
    }
    return best;
}

} // namespace detail

// Exhaustive maximum of |<M_n>| over all 4^n deterministic strategies.
// The winning strategy reported is the one with the lowest counter value,
// independent of the thread count.
inline LhvResult lhv_max(int n, unsigned threads = 1) {
    if (n < 2) throw validation_error("lhv_max: need n >= 2");
    if (n > kLhvQubitCap) {
        throw cap_exceeded_error("lhv_max: exhaustive enumeration is capped at n <= " +
                                 std::to_string(kLhvQubitCap) + " (got n = " +
                                 std::to_string(n) + ")");
    }

    std::vector<detail::PackedTerm> packed;
    const std::uint64_t full_mask = (std::uint64_t{1} << n) - 1;
    for (const MerminTerm& term : mermin_terms(n)) {
        detail::PackedTerm t;
        for (int j : term.primed) t.primed_mask |= std::uint64_t{1} << (j - 1);
        t.unprimed_mask = full_mask & ~t.primed_mask;
        t.sign = term.sign;
        packed.push_back(t);
    }

    const std::uint64_t total = std::uint64_t{1} << (2 * n);
    detail::ChunkBest best;
    if (threads <= 1) {
        best = detail::scan_lhv_range(packed, n, 0, total);
    } else {
        const unsigned workers = std::min<std::uint64_t>(threads, total);
        std::vector<detail::ChunkBest> results(workers);
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min(total, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                results[w] = detail::scan_lhv_range(packed, n, begin, end);
            });
        }
        for (auto& t : pool) t.join();
        // (value desc, counter asc) merge keeps the result thread-count independent.
        best = results[0];
        for (unsigned w = 1; w < workers; ++w) {
            if (results[w].abs_value > best.abs_value ||
                (results[w].abs_value == best.abs_value && results[w].counter < best.counter)) {
                best = results[w];
            }
        }
    }

    LhvResult result;
    result.max_value = static_cast<double>(best.abs_value);
    result.argmax = detail::assignment_from_counter(best.counter, n);
    result.bound_formula = n % 2 == 0 ? std::exp2(n / 2) : std::exp2((n - 1) / 2);
    result.strategies_scanned = total;
    return result;
}

// Quantum-over-classical ratio 2^{n-1} / LHV bound:
// 2^{(n-2)/2} for even n, 2^{(n-1)/2} for odd n. Exact in binary floating point.
inline double violation_ratio(int n) {
    if (n < 3) throw validation_error("violation_ratio: need n >= 3");
    return n % 2 == 0 ? std::exp2((n - 2) / 2) : std::exp2((n - 1) / 2);
}

} // namespace mermin
