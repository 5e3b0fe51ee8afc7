// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace tokmerge {

/// Deterministic 64-bit generator (splitmix64). Used instead of the standard
/// library engines so that synthetic tensors are bit-stable across compilers.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : m_state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (m_state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (m_has_spare) {
            m_has_spare = false;
            return m_spare;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        m_spare = r * std::sin(theta);
        m_has_spare = true;
        return r * std::cos(theta);
    }

    /// Random point on the unit sphere in `dim` dimensions, stored as float32.
    std::vector<float> next_unit_feature(int dim) {
        std::vector<float> f(static_cast<std::size_t>(dim));
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (auto& v : f) {
                v = static_cast<float>(next_gaussian());
                norm_sq += double(v) * double(v);
            }
        } while (norm_sq < 1e-12);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& v : f) v = static_cast<float>(double(v) * inv);
        return f;
    }

private:
    std::uint64_t m_state;
    double m_spare = 0.0;
    bool m_has_spare = false;
};

}  // namespace tokmerge
