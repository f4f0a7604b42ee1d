#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace flowopt {

/// Seedable random source with a platform-independent stream: mt19937_64 is
/// fully specified by the standard and all transforms below are hand-rolled,
/// so a seed reproduces the same draws on every implementation. Value type;
/// copying captures the full state.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached partner; two uniforms per draw).
    double gaussian() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Standard Cauchy sampled as tan(pi * (u - 1/2)).
    double cauchy() {
        return std::tan(std::numbers::pi * (uniform() - 0.5));
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace flowopt
