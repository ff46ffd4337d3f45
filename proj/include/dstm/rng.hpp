// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dstm/linalg.hpp"

namespace dstm {

/// splitmix64 finalizer; used to derive independent child seeds so that
/// per-frame / per-start streams do not depend on scheduling order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

/// Deterministic RNG with explicit gaussian generation. std::mt19937_64 is
/// pinned by the standard, and Box-Muller keeps the gaussian draw sequence
/// independent of the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be a small positive count; for the
    /// power-of-two alphabets used here the modulo is exactly unbiased.
    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        const double m = std::sqrt(-2.0 * std::log(u));
        const double ang = two_pi() * uniform();
        spare_ = m * std::sin(ang);
        have_spare_ = true;
        return m * std::cos(ang);
    }

    /// Circularly-symmetric complex gaussian CN(0, var): each real dimension
    /// has variance var/2.
    cplx cgaussian(double var = 1.0) {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        const double m = std::sqrt(-var * std::log(u));
        const double ang = two_pi() * uniform();
        return {m * std::cos(ang), m * std::sin(ang)};
    }

    ComplexMat cgaussian_mat(int rows, int cols, double var = 1.0) {
        ComplexMat out(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) out(r, c) = cgaussian(var);
        return out;
    }

private:
    static constexpr double two_pi() { return 6.283185307179586476925286766559; }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dstm
