// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "tokmerge/quadtree.hpp"
#include "tokmerge/temporal.hpp"

namespace tokmerge {

// Naive reference implementations for equivalence testing. They share only
// the tensor-core math with the main pipeline; search, linking, and
// component resolution are reimplemented directly (plain recursion and
// depth-first traversal, no masks, no pointer jumping). Intended for small
// grids; cost grows quadratically with token count.

/// Top-down recursive granularity decision for one frame.
std::vector<SpatialToken> oracle_spatial(const TokenGrid& grid, int frame, double tau_s,
                                         int root_scale);

/// Explicit graph construction and per-component traversal.
MergedTokenSet oracle_temporal(const SpatialTokenSet& spatial, double tau_t,
                               DestinationPolicy policy = DestinationPolicy::top_left);

/// Both stages composed.
MergedTokenSet oracle_merge(const TokenGrid& grid, double tau_s, double tau_t, int root_scale,
                            DestinationPolicy policy = DestinationPolicy::top_left);

/// Equivalence check between the oracle's token set and the pipeline's final
/// sequence: region sets must match exactly, features within `feature_tol`
/// relative L2 error. On mismatch, `detail` names the first difference.
struct EquivalenceReport {
    bool match = true;
    std::string detail;
};
EquivalenceReport compare_merged(const MergedTokenSet& oracle_tokens,
                                 const std::vector<MergedToken>& pipeline_sequence,
                                 double feature_tol = 1e-5);

}  // namespace tokmerge
