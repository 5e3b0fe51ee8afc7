// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tokmerge {

using FeatureVector = std::vector<float>;

/// Raw video token tensor: T frames of an H x W grid, one C-dim feature per
/// cell. Data is row-major (t, y, x, c) with float32 storage semantics.
struct TokenGrid {
    int t = 0;
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<float> data;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(t) * static_cast<std::size_t>(h) *
               static_cast<std::size_t>(w);
    }

    std::span<const float> at(int frame, int y, int x) const {
        const std::size_t idx =
            ((static_cast<std::size_t>(frame) * h + y) * w + x) * static_cast<std::size_t>(c);
        return {data.data() + idx, static_cast<std::size_t>(c)};
    }

    std::span<float> at_mut(int frame, int y, int x) {
        const std::size_t idx =
            ((static_cast<std::size_t>(frame) * h + y) * w + x) * static_cast<std::size_t>(c);
        return {data.data() + idx, static_cast<std::size_t>(c)};
    }

    /// Throws FormatError subclasses when dimensions, length, or finiteness
    /// invariants are violated.
    void validate() const;
};

/// Cosine similarity in [-1, 1], accumulated in double precision.
/// Throws ZeroNormVector when either norm is below 1e-12 and InvariantError
/// on length mismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

struct WeightedFeature {
    std::span<const float> feature;
    long area = 1;  // covered leaf-cell count
};

/// Area-weighted mean of child features: sum(area_i * f_i) / sum(area_i).
/// Accumulation is in double precision and fixed child order, so the result
/// is deterministic and the pool-of-pools identity holds to ~float rounding.
void area_weighted_pool_into(std::span<const WeightedFeature> children, std::span<float> out);
FeatureVector area_weighted_pool(std::span<const WeightedFeature> children);

}  // namespace tokmerge
