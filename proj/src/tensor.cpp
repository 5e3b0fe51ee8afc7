// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "tokmerge/errors.hpp"

namespace tokmerge {

void TokenGrid::validate() const {
    if (t < 1 || h < 1 || w < 1 || c < 1) {
        throw WrongRank("all of T, H, W, C must be >= 1");
    }
    const std::size_t expected = cell_count() * static_cast<std::size_t>(c);
    if (data.size() != expected) {
        throw WrongRank("data length does not equal T*H*W*C");
    }
    for (const float v : data) {
        if (!std::isfinite(v)) throw NonFinitePayload();
    }
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw InvariantError("cosine_similarity: length mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i];
        const double y = b[i];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    const double norm_a = std::sqrt(na);
    const double norm_b = std::sqrt(nb);
    if (norm_a < 1e-12 || norm_b < 1e-12) throw ZeroNormVector();
    return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

void area_weighted_pool_into(std::span<const WeightedFeature> children, std::span<float> out) {
    if (children.empty()) throw EmptyChildren();
    const std::size_t dim = children.front().feature.size();
    if (out.size() != dim) throw InvariantError("area_weighted_pool: output size mismatch");

    // Hot path: dim can be ~1k, child count is almost always <= 4.
    std::vector<double> acc(dim, 0.0);
    double total_area = 0.0;
    for (const auto& child : children) {
        if (child.area < 1) throw InvariantError("area_weighted_pool: area must be >= 1");
        if (child.feature.size() != dim) {
            throw InvariantError("area_weighted_pool: child length mismatch");
        }
        const double weight = static_cast<double>(child.area);
        for (std::size_t i = 0; i < dim; ++i) acc[i] += weight * child.feature[i];
        total_area += weight;
    }
    const double inv = 1.0 / total_area;
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] * inv);
}

FeatureVector area_weighted_pool(std::span<const WeightedFeature> children) {
    if (children.empty()) throw EmptyChildren();
    FeatureVector out(children.front().feature.size());
    area_weighted_pool_into(children, out);
    return out;
}

}  // namespace tokmerge
