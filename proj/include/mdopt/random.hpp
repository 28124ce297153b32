#pragma once

// Portable sampling helpers. std::mt19937_64's output sequence is fixed by
// the standard, the <random> distributions are not, so everything that must
// be reproducible from a recorded seed goes through these.

#include "mdopt/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mdopt {

using Rng = std::mt19937_64;

/// Uniform in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [lo, hi].
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng() % span);
}

/// Standard normal (Box-Muller).
inline double normal(Rng& rng)
{
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Point unit_direction(Rng& rng, Eigen::Index n)
{
    Point v(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = normal(rng);
    } while (v.norm() == 0.0);
    return v / v.norm();
}

/// Uniform in the ball B(center, radius).
inline Point uniform_in_ball(Rng& rng, const Point& center, double radius)
{
    const auto n = center.size();
    const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
    return center + r * unit_direction(rng, n);
}

} // namespace mdopt
