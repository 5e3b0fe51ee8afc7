// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/quadtree.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "tokmerge/errors.hpp"

namespace tokmerge {

std::vector<std::pair<int, int>> pyramid_level_dims(int h, int w, int root_scale) {
    if (root_scale != 2 && root_scale != 4) {
        throw InvariantError("root_scale must be 2 or 4");
    }
    std::vector<std::pair<int, int>> dims{{h, w}};
    while (std::min(dims.back().first, dims.back().second) > root_scale) {
        dims.emplace_back((dims.back().first + 1) / 2, (dims.back().second + 1) / 2);
    }
    std::reverse(dims.begin(), dims.end());
    return dims;
}

namespace {

// Children of node (y, x) at the next-finer level, in fixed (dy, dx) order.
// Returns the number of children (1, 2, or 4 at ragged boundaries).
inline int children_of(int y, int x, int fine_rows, int fine_cols,
                       std::array<std::pair<int, int>, 4>& out) {
    int n = 0;
    for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
            const int cy = 2 * y + dy;
            const int cx = 2 * x + dx;
            if (cy < fine_rows && cx < fine_cols) out[n++] = {cy, cx};
        }
    }
    return n;
}

}  // namespace

QuadtreePyramid build_pyramid(const TokenGrid& grid, int frame, int root_scale) {
    if (frame < 0 || frame >= grid.t) {
        throw FrameOutOfRange("frame " + std::to_string(frame) + " outside [0, " +
                              std::to_string(grid.t) + ")");
    }
    const auto dims = pyramid_level_dims(grid.h, grid.w, root_scale);

    QuadtreePyramid pyr;
    pyr.frame = frame;
    pyr.leaf_h = grid.h;
    pyr.leaf_w = grid.w;
    pyr.channels = grid.c;
    pyr.levels.resize(dims.size());

    // Leaf level: copy of the frame plus unit rectangles.
    PyramidLevel& leaf = pyr.levels.back();
    leaf.rows = grid.h;
    leaf.cols = grid.w;
    leaf.channels = grid.c;
    const std::size_t frame_floats =
        static_cast<std::size_t>(grid.h) * grid.w * static_cast<std::size_t>(grid.c);
    leaf.features.assign(grid.data.begin() + static_cast<std::ptrdiff_t>(frame * frame_floats),
                         grid.data.begin() + static_cast<std::ptrdiff_t>((frame + 1) * frame_floats));
    leaf.rects.resize(static_cast<std::size_t>(grid.h) * grid.w);
    for (int y = 0; y < grid.h; ++y) {
        for (int x = 0; x < grid.w; ++x) {
            leaf.rects[static_cast<std::size_t>(y) * grid.w + x] = Rect{y, x, 1, 1};
        }
    }

    // Coarser levels, fine to coarse.
    for (int lv = static_cast<int>(dims.size()) - 2; lv >= 0; --lv) {
        PyramidLevel& cur = pyr.levels[static_cast<std::size_t>(lv)];
        const PyramidLevel& fine = pyr.levels[static_cast<std::size_t>(lv) + 1];
        cur.rows = dims[static_cast<std::size_t>(lv)].first;
        cur.cols = dims[static_cast<std::size_t>(lv)].second;
        cur.channels = grid.c;
        cur.features.resize(static_cast<std::size_t>(cur.rows) * cur.cols *
                            static_cast<std::size_t>(grid.c));
        cur.rects.resize(static_cast<std::size_t>(cur.rows) * cur.cols);

        std::array<std::pair<int, int>, 4> kids{};
        std::array<WeightedFeature, 4> pooled{};
        for (int y = 0; y < cur.rows; ++y) {
            for (int x = 0; x < cur.cols; ++x) {
                const int n = children_of(y, x, fine.rows, fine.cols, kids);
                int y1 = grid.h, x1 = grid.w, y2 = 0, x2 = 0;
                for (int k = 0; k < n; ++k) {
                    const Rect& r = fine.rect_at(kids[k].first, kids[k].second);
                    pooled[static_cast<std::size_t>(k)] =
                        WeightedFeature{fine.feature_at(kids[k].first, kids[k].second), r.area()};
                    y1 = std::min(y1, r.y0);
                    x1 = std::min(x1, r.x0);
                    y2 = std::max(y2, r.y0 + r.h);
                    x2 = std::max(x2, r.x0 + r.w);
                }
                area_weighted_pool_into({pooled.data(), static_cast<std::size_t>(n)},
                                        cur.feature_at_mut(y, x));
                cur.rects[static_cast<std::size_t>(y) * cur.cols + x] =
                    Rect{y1, x1, y2 - y1, x2 - x1};
            }
        }
    }
    return pyr;
}

SpatialMergeResult spatial_merge(const QuadtreePyramid& pyr, double tau_s) {
    SpatialMergeResult result;
    const int n_levels = static_cast<int>(pyr.levels.size());
    if (n_levels == 0) return result;

    std::vector<char> active(
        static_cast<std::size_t>(pyr.levels[0].rows) * pyr.levels[0].cols, 1);

    for (int lv = 0; lv < n_levels; ++lv) {
        const PyramidLevel& cur = pyr.levels[static_cast<std::size_t>(lv)];
        const bool is_leaf = lv == n_levels - 1;
        std::vector<char> next_active;
        const PyramidLevel* fine = nullptr;
        if (!is_leaf) {
            fine = &pyr.levels[static_cast<std::size_t>(lv) + 1];
            next_active.assign(static_cast<std::size_t>(fine->rows) * fine->cols, 0);
        }

        std::array<std::pair<int, int>, 4> kids{};
        for (int y = 0; y < cur.rows; ++y) {
            for (int x = 0; x < cur.cols; ++x) {
                if (!active[static_cast<std::size_t>(y) * cur.cols + x]) continue;
                const Rect& rect = cur.rect_at(y, x);
                if (is_leaf) {
                    result.tokens.push_back(SpatialToken{
                        pyr.frame, rect, lv + 1,
                        FeatureVector(cur.feature_at(y, x).begin(), cur.feature_at(y, x).end()),
                        rect.area()});
                    continue;
                }
                const int n = children_of(y, x, fine->rows, fine->cols, kids);
                bool retain = true;
                for (int k = 0; k < n; ++k) {
                    ++result.comparisons;
                    const double sim = cosine_similarity(
                        cur.feature_at(y, x), fine->feature_at(kids[k].first, kids[k].second));
                    if (!(sim > tau_s)) retain = false;
                }
                if (retain) {
                    result.tokens.push_back(SpatialToken{
                        pyr.frame, rect, lv + 1,
                        FeatureVector(cur.feature_at(y, x).begin(), cur.feature_at(y, x).end()),
                        rect.area()});
                } else {
                    for (int k = 0; k < n; ++k) {
                        next_active[static_cast<std::size_t>(kids[k].first) * fine->cols +
                                    kids[k].second] = 1;
                    }
                }
            }
        }
        if (!is_leaf) active = std::move(next_active);
    }

    std::sort(result.tokens.begin(), result.tokens.end(),
              [](const SpatialToken& a, const SpatialToken& b) {
                  return a.rect.y0 != b.rect.y0 ? a.rect.y0 < b.rect.y0 : a.rect.x0 < b.rect.x0;
              });
    return result;
}

std::uint64_t count_spatial_comparisons(const QuadtreePyramid& pyr, double tau_s) {
    return spatial_merge(pyr, tau_s).comparisons;
}

}  // namespace tokmerge
