#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mermin/algebra.hpp"

// Seeded randomness used by the see-saw restarts, the sampler and the test
// suites. The generator is std::mt19937_64 seeded directly with the given
// 64-bit seed; all derived quantities (uniforms, Gaussians) are produced from
// raw 64-bit draws below, so streams are reproducible across platforms.
// Seed-derivation rules: see-saw restart r uses seed + r, sampler term t uses
// seed + t (t = index in the canonical term order).

namespace mermin {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two uniform draws.
inline double gaussian(Rng& rng) {
    double u1 = uniform_unit(rng);
    while (u1 <= 0.0) u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform on the sphere: normalized 3-component Gaussian draw.
inline BlochVector random_bloch_vector(Rng& rng) {
    while (true) {
        const double gx = gaussian(rng), gy = gaussian(rng), gz = gaussian(rng);
        const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
        if (norm > 1e-6) return BlochVector(gx / norm, gy / norm, gz / norm);
    }
}

inline MeasurementSettings random_settings(int n, Rng& rng) {
    std::vector<std::pair<BlochVector, BlochVector>> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        BlochVector a = random_bloch_vector(rng);
        BlochVector ap = random_bloch_vector(rng);
        pairs.emplace_back(a, ap);
    }
    return MeasurementSettings(n, std::move(pairs));
}

// Random settings with a'_j exactly orthogonal to a_j on every qubit.
inline MeasurementSettings random_orthogonal_settings(int n, Rng& rng) {
    std::vector<std::pair<BlochVector, BlochVector>> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const BlochVector a = random_bloch_vector(rng);
        while (true) {
            const BlochVector g = random_bloch_vector(rng);
            const double d = g.dot(a);
            const double px = g.x - d * a.x, py = g.y - d * a.y, pz = g.z - d * a.z;
            const double norm = std::sqrt(px * px + py * py + pz * pz);
            if (norm > 1e-6) {
                pairs.emplace_back(a, BlochVector(px / norm, py / norm, pz / norm));
                break;
            }
        }
    }
    return MeasurementSettings(n, std::move(pairs));
}

// Haar-distributed SU(2) element from a normalized 4-component Gaussian draw.
inline Matrix2 random_unitary_2x2(Rng& rng) {
    while (true) {
        const double g0 = gaussian(rng), g1 = gaussian(rng);
        const double g2 = gaussian(rng), g3 = gaussian(rng);
        const double norm = std::sqrt(g0 * g0 + g1 * g1 + g2 * g2 + g3 * g3);
        if (norm <= 1e-6) continue;
        const cx alpha(g0 / norm, g1 / norm);
        const cx beta(g2 / norm, g3 / norm);
        Matrix2 u;
        u << alpha, -std::conj(beta), beta, std::conj(alpha);
        return u;
    }
}

} // namespace mermin
