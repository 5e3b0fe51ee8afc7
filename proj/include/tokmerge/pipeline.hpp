// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tokmerge/metadata.hpp"
#include "tokmerge/ordering.hpp"
#include "tokmerge/quadtree.hpp"
#include "tokmerge/temporal.hpp"

namespace tokmerge {

struct MergeParams {
    double tau_s = 0.80;
    double tau_t = 0.90;
    int root_scale = 4;
    DestinationPolicy policy = DestinationPolicy::top_left;
    PositionStrategy strategy = PositionStrategy::reassigned;
    int n_threads = 0;  // 0 = TOKMERGE_THREADS env or all cores
};

struct PipelineResult {
    OrderedOutput ordered;
    std::vector<PositionRecord> positions;
    MergeStats stats;
};

/// Full merge: per-frame quadtree search, temporal linking, union-find
/// resolution, tracklet aggregation, reordering, and position assignment.
/// Deterministic for fixed inputs regardless of thread count.
PipelineResult merge_video(const TokenGrid& grid, const MergeParams& params);

/// Spatial stage only: one entry per frame, plus the comparison counter.
struct SpatialStageResult {
    SpatialTokenSet set;
    std::uint64_t comparisons = 0;
};
SpatialStageResult spatial_stage(const TokenGrid& grid, double tau_s, int root_scale,
                                 int n_threads = 1);

/// Flattened (N_ST x C) feature matrix of the final sequence.
std::vector<float> flatten_features(const OrderedOutput& ordered);

MergeMetadata build_metadata(const PipelineResult& result, const TokenGrid& grid,
                             const MergeParams& params);

}  // namespace tokmerge
