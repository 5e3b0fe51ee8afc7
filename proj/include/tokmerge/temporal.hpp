// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tokmerge/quadtree.hpp"

namespace tokmerge {

/// Candidate temporal merge: src indexes the next frame's token list, dst the
/// previous frame's.
struct CandidatePair {
    int src = 0;
    int dst = 0;
};

/// All (src, dst) pairs whose rectangles overlap with positive area, each
/// listed once. Both lists must partition the same h x w grid; otherwise
/// PartitionMismatch is thrown.
std::vector<CandidatePair> overlap_candidates(std::span<const SpatialToken> prev,
                                              std::span<const SpatialToken> next,
                                              int h, int w);

/// Destination choice when several previous-frame candidates qualify.
enum class DestinationPolicy {
    top_left,  // lexicographically smallest (y0, x0); enables vectorized linking
    optimal,   // most similar candidate (ablation path)
};

struct TemporalLinkResult {
    std::vector<int> dst_for_src;   // per next-frame token; -1 when unlinked
    std::uint64_t comparisons = 0;  // similarity evaluations
};

/// For each src, among candidate dsts with similarity strictly above tau_t,
/// select one according to the policy. Ties under `optimal` fall back to the
/// top-left rule so linking stays deterministic.
TemporalLinkResult temporal_link(std::span<const SpatialToken> prev,
                                 std::span<const SpatialToken> next,
                                 std::span<const CandidatePair> candidates, double tau_t,
                                 DestinationPolicy policy = DestinationPolicy::top_left);

/// Directed merge forest over all spatial tokens of a video. Nodes are stored
/// frame-major, raster-ordered within each frame; every non-self parent edge
/// points to a node exactly one frame earlier.
struct MergeForest {
    std::vector<SpatialToken> nodes;
    std::vector<int> frame_offsets;      // size T+1; frame t owns [offsets[t], offsets[t+1])
    std::vector<std::int32_t> parent;    // parent[i] == i for roots
    std::vector<std::int32_t> roots;     // filled by resolve_roots
    int leaf_h = 0;
    int leaf_w = 0;
    int channels = 0;
};

/// Link every consecutive frame pair of `set` and assemble the forest.
struct TemporalMergeResult {
    MergeForest forest;
    std::uint64_t comparisons = 0;
};
TemporalMergeResult link_frames(SpatialTokenSet set, double tau_t,
                                DestinationPolicy policy = DestinationPolicy::top_left,
                                int n_threads = 1);

/// Similarity evaluations linking would perform; always <= (T-1) * H * W.
std::uint64_t count_temporal_comparisons(const SpatialTokenSet& set);

/// Resolve each node's terminal ancestor by synchronous pointer jumping
/// (parent <- parent[parent]) until fixpoint; converges in at most
/// ceil(log2(T)) + 1 passes. Throws CycleDetected if it does not (impossible
/// for forests produced by link_frames; checked defensively).
std::span<const std::int32_t> resolve_roots(MergeForest& forest);

/// Final merged token: one tracklet aggregated into its earliest member.
struct MergedToken {
    FeatureVector feature;
    std::vector<std::pair<int, Rect>> regions;  // (frame, rect), frame-major raster order
    int root_frame = 0;
    Rect root_rect;
    long total_area = 0;  // leaf-cell x frame count
};

struct MergedTokenSet {
    int t = 0;
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<MergedToken> tokens;
};

/// One MergedToken per distinct root; features are area-weighted means of the
/// member tokens, accumulated in node order so results are deterministic.
MergedTokenSet aggregate_tracklets(const MergeForest& forest, int t);

}  // namespace tokmerge
