// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/pipeline.hpp"

#include <chrono>

#include "tokmerge/parallel.hpp"

namespace tokmerge {

SpatialStageResult spatial_stage(const TokenGrid& grid, double tau_s, int root_scale,
                                 int n_threads) {
    SpatialStageResult result;
    result.set.t = grid.t;
    result.set.h = grid.h;
    result.set.w = grid.w;
    result.set.c = grid.c;
    result.set.frames.resize(static_cast<std::size_t>(grid.t));

    std::vector<std::uint64_t> per_frame(static_cast<std::size_t>(grid.t), 0);
    parallel_for(grid.t, n_threads, [&](int begin, int end) {
        for (int frame = begin; frame < end; ++frame) {
            const QuadtreePyramid pyramid = build_pyramid(grid, frame, root_scale);
            SpatialMergeResult merged = spatial_merge(pyramid, tau_s);
            per_frame[static_cast<std::size_t>(frame)] = merged.comparisons;
            result.set.frames[static_cast<std::size_t>(frame)] = std::move(merged.tokens);
        }
    });
    for (const std::uint64_t n : per_frame) result.comparisons += n;
    return result;
}

std::vector<float> flatten_features(const OrderedOutput& ordered) {
    std::vector<float> out;
    out.reserve(ordered.sequence.size() * static_cast<std::size_t>(ordered.c));
    for (const MergedToken& token : ordered.sequence) {
        out.insert(out.end(), token.feature.begin(), token.feature.end());
    }
    return out;
}

PipelineResult merge_video(const TokenGrid& grid, const MergeParams& params) {
    const auto start = std::chrono::steady_clock::now();
    grid.validate();
    const int n_threads = resolve_thread_count(params.n_threads);

    SpatialStageResult spatial = spatial_stage(grid, params.tau_s, params.root_scale, n_threads);
    TemporalMergeResult temporal =
        link_frames(std::move(spatial.set), params.tau_t, params.policy, n_threads);
    resolve_roots(temporal.forest);
    MergedTokenSet merged = aggregate_tracklets(temporal.forest, grid.t);

    PipelineResult result;
    result.ordered = reorder(std::move(merged));
    result.positions = assign_positions(result.ordered, params.strategy);

    result.stats.n_input_tokens = grid.cell_count();
    result.stats.n_output_tokens = result.ordered.sequence.size();
    result.stats.retention_ratio = static_cast<double>(result.stats.n_output_tokens) /
                                   static_cast<double>(result.stats.n_input_tokens);
    result.stats.spatial_comparisons = spatial.comparisons;
    result.stats.temporal_comparisons = temporal.comparisons;
    result.stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

MergeMetadata build_metadata(const PipelineResult& result, const TokenGrid& grid,
                             const MergeParams& params) {
    MergeMetadata meta;
    meta.t = grid.t;
    meta.h = grid.h;
    meta.w = grid.w;
    meta.c = grid.c;
    meta.tau_s = params.tau_s;
    meta.tau_t = params.tau_t;
    meta.root_scale = params.root_scale;
    meta.position_strategy = std::string(strategy_name(params.strategy));
    meta.tokens.reserve(result.ordered.sequence.size());
    for (std::size_t i = 0; i < result.ordered.sequence.size(); ++i) {
        const MergedToken& token = result.ordered.sequence[i];
        TokenRecord record;
        record.id = static_cast<int>(i);
        record.root_frame = token.root_frame;
        record.regions = token.regions;
        record.area = token.total_area;
        record.positions = result.positions[i];
        meta.tokens.push_back(std::move(record));
    }
    meta.stats = result.stats;
    return meta;
}

}  // namespace tokmerge
