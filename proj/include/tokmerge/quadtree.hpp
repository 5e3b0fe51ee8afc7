// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tokmerge/tensor.hpp"

namespace tokmerge {

/// Axis-aligned rectangle in leaf-cell units.
struct Rect {
    int y0 = 0;
    int x0 = 0;
    int h = 0;
    int w = 0;

    long area() const { return static_cast<long>(h) * w; }
    bool operator==(const Rect&) const = default;
};

inline bool intersects(const Rect& a, const Rect& b) {
    return a.y0 < b.y0 + b.h && b.y0 < a.y0 + a.h && a.x0 < b.x0 + b.w && b.x0 < a.x0 + a.w;
}

/// One resolution level of the pyramid. Node (y, x) at level l has its
/// children at level l+1 positions (2y+dy, 2x+dx) that exist in that grid.
struct PyramidLevel {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<float> features;  // rows * cols * channels, row-major
    std::vector<Rect> rects;      // covered leaf-cell rectangle per node

    std::span<const float> feature_at(int y, int x) const {
        const std::size_t idx =
            (static_cast<std::size_t>(y) * cols + x) * static_cast<std::size_t>(channels);
        return {features.data() + idx, static_cast<std::size_t>(channels)};
    }
    std::span<float> feature_at_mut(int y, int x) {
        const std::size_t idx =
            (static_cast<std::size_t>(y) * cols + x) * static_cast<std::size_t>(channels);
        return {features.data() + idx, static_cast<std::size_t>(channels)};
    }
    const Rect& rect_at(int y, int x) const { return rects[static_cast<std::size_t>(y) * cols + x]; }
};

/// Per-frame multi-level feature pyramid. levels[0] is the coarsest (root)
/// grid, levels.back() the H x W leaf map. Level dimensions follow
/// ceil-halving: rows(l) = ceil(rows(l+1) / 2), and halving stops once
/// min(rows, cols) <= root_scale, so square power-of-two-reachable frames
/// end at exactly root_scale x root_scale.
struct QuadtreePyramid {
    int frame = 0;
    int leaf_h = 0;
    int leaf_w = 0;
    int channels = 0;
    std::vector<PyramidLevel> levels;
};

/// Chain of (rows, cols) from the coarsest level down to (h, w).
std::vector<std::pair<int, int>> pyramid_level_dims(int h, int w, int root_scale);

/// Build the pyramid for one frame by repeated area-weighted 2x2 pooling.
/// Ragged boundary parents own fewer than four children.
/// Throws FrameOutOfRange when frame is outside [0, T).
QuadtreePyramid build_pyramid(const TokenGrid& grid, int frame, int root_scale);

/// A surviving quadtree node: one rectangle of one frame.
struct SpatialToken {
    int frame = 0;
    Rect rect;
    int level = 0;  // 1 = coarsest (root) level
    FeatureVector feature;
    long area = 0;
};

struct SpatialMergeResult {
    std::vector<SpatialToken> tokens;  // sorted by (y0, x0); partitions the frame
    std::uint64_t comparisons = 0;     // parent-child similarity evaluations
};

/// Coarse-to-fine granularity decision: a node is retained iff the cosine
/// similarity to every existing child exceeds tau_s; otherwise its children
/// are searched at the next level. Leaf nodes are always retained when
/// reached. All children of a visited node are evaluated (matching a
/// per-level batched implementation), so the comparison count is
/// deterministic and independent of traversal order.
SpatialMergeResult spatial_merge(const QuadtreePyramid& pyramid, double tau_s);

/// Number of parent-child similarity evaluations spatial_merge performs.
std::uint64_t count_spatial_comparisons(const QuadtreePyramid& pyramid, double tau_s);

/// Per-frame list of spatial tokens for a whole video.
struct SpatialTokenSet {
    int t = 0;
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<std::vector<SpatialToken>> frames;
};

}  // namespace tokmerge
