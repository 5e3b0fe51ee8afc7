// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tokmerge/errors.hpp"
#include "tokmerge/parallel.hpp"

namespace tokmerge {

namespace {

// Fill `owner` (h*w, raster) with the index of the token covering each cell.
// Throws PartitionMismatch unless the tokens tile the grid exactly once.
void build_owner_map(std::span<const SpatialToken> tokens, int h, int w,
                     std::vector<std::int32_t>& owner) {
    owner.assign(static_cast<std::size_t>(h) * w, -1);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Rect& r = tokens[i].rect;
        if (r.y0 < 0 || r.x0 < 0 || r.h < 1 || r.w < 1 || r.y0 + r.h > h || r.x0 + r.w > w) {
            throw PartitionMismatch("token rectangle outside the grid");
        }
        for (int y = r.y0; y < r.y0 + r.h; ++y) {
            for (int x = r.x0; x < r.x0 + r.w; ++x) {
                std::int32_t& cell = owner[static_cast<std::size_t>(y) * w + x];
                if (cell != -1) throw PartitionMismatch("overlapping token rectangles");
                cell = static_cast<std::int32_t>(i);
            }
        }
    }
    for (const std::int32_t cell : owner) {
        if (cell == -1) throw PartitionMismatch("uncovered grid cell");
    }
}

std::vector<CandidatePair> candidates_from_owner(const std::vector<std::int32_t>& prev_owner,
                                                 std::span<const SpatialToken> next, int w,
                                                 std::size_t n_prev) {
    std::vector<CandidatePair> out;
    out.reserve(next.size());
    std::vector<std::int32_t> stamp(n_prev, -1);
    for (std::size_t s = 0; s < next.size(); ++s) {
        const Rect& r = next[s].rect;
        for (int y = r.y0; y < r.y0 + r.h; ++y) {
            for (int x = r.x0; x < r.x0 + r.w; ++x) {
                const std::int32_t d = prev_owner[static_cast<std::size_t>(y) * w + x];
                if (stamp[static_cast<std::size_t>(d)] != static_cast<std::int32_t>(s)) {
                    stamp[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(s);
                    out.push_back(CandidatePair{static_cast<int>(s), static_cast<int>(d)});
                }
            }
        }
    }
    return out;
}

inline bool rect_top_left_less(const Rect& a, const Rect& b) {
    return a.y0 != b.y0 ? a.y0 < b.y0 : a.x0 < b.x0;
}

}  // namespace

std::vector<CandidatePair> overlap_candidates(std::span<const SpatialToken> prev,
                                              std::span<const SpatialToken> next,
                                              int h, int w) {
    std::vector<std::int32_t> owner;
    build_owner_map(prev, h, w, owner);
    {
        std::vector<std::int32_t> next_owner;
        build_owner_map(next, h, w, next_owner);
    }
    return candidates_from_owner(owner, next, w, prev.size());
}

TemporalLinkResult temporal_link(std::span<const SpatialToken> prev,
                                 std::span<const SpatialToken> next,
                                 std::span<const CandidatePair> candidates, double tau_t,
                                 DestinationPolicy policy) {
    TemporalLinkResult result;
    result.dst_for_src.assign(next.size(), -1);
    std::vector<double> best_sim(next.size(), -2.0);

    for (const CandidatePair& cand : candidates) {
        ++result.comparisons;
        const double sim =
            cosine_similarity(next[static_cast<std::size_t>(cand.src)].feature,
                              prev[static_cast<std::size_t>(cand.dst)].feature);
        if (!(sim > tau_t)) continue;

        int& chosen = result.dst_for_src[static_cast<std::size_t>(cand.src)];
        if (chosen == -1) {
            chosen = cand.dst;
            best_sim[static_cast<std::size_t>(cand.src)] = sim;
            continue;
        }
        const Rect& new_rect = prev[static_cast<std::size_t>(cand.dst)].rect;
        const Rect& cur_rect = prev[static_cast<std::size_t>(chosen)].rect;
        if (policy == DestinationPolicy::top_left) {
            if (rect_top_left_less(new_rect, cur_rect)) chosen = cand.dst;
        } else {
            double& best = best_sim[static_cast<std::size_t>(cand.src)];
            if (sim > best || (sim == best && rect_top_left_less(new_rect, cur_rect))) {
                best = sim;
                chosen = cand.dst;
            }
        }
    }
    return result;
}

TemporalMergeResult link_frames(SpatialTokenSet set, double tau_t, DestinationPolicy policy,
                                int n_threads) {
    TemporalMergeResult result;
    MergeForest& forest = result.forest;
    forest.leaf_h = set.h;
    forest.leaf_w = set.w;
    forest.channels = set.c;

    forest.frame_offsets.resize(static_cast<std::size_t>(set.t) + 1, 0);
    for (int t = 0; t < set.t; ++t) {
        forest.frame_offsets[static_cast<std::size_t>(t) + 1] =
            forest.frame_offsets[static_cast<std::size_t>(t)] +
            static_cast<int>(set.frames[static_cast<std::size_t>(t)].size());
    }
    forest.nodes.reserve(static_cast<std::size_t>(forest.frame_offsets.back()));
    for (auto& frame : set.frames) {
        for (auto& token : frame) forest.nodes.push_back(std::move(token));
    }
    forest.parent.resize(forest.nodes.size());
    std::iota(forest.parent.begin(), forest.parent.end(), 0);

    const int n_pairs = set.t - 1;
    if (n_pairs > 0) {
        std::vector<std::uint64_t> pair_comparisons(static_cast<std::size_t>(n_pairs), 0);
        parallel_for(n_pairs, n_threads, [&](int begin, int end) {
            for (int p = begin; p < end; ++p) {
                const int off_prev = forest.frame_offsets[static_cast<std::size_t>(p)];
                const int off_next = forest.frame_offsets[static_cast<std::size_t>(p) + 1];
                const int off_end = forest.frame_offsets[static_cast<std::size_t>(p) + 2];
                const std::span<const SpatialToken> prev{
                    forest.nodes.data() + off_prev, static_cast<std::size_t>(off_next - off_prev)};
                const std::span<const SpatialToken> next{
                    forest.nodes.data() + off_next, static_cast<std::size_t>(off_end - off_next)};
                const auto cands = overlap_candidates(prev, next, set.h, set.w);
                const auto link = temporal_link(prev, next, cands, tau_t, policy);
                pair_comparisons[static_cast<std::size_t>(p)] = link.comparisons;
                for (std::size_t s = 0; s < link.dst_for_src.size(); ++s) {
                    if (link.dst_for_src[s] >= 0) {
                        forest.parent[static_cast<std::size_t>(off_next) + s] =
                            off_prev + link.dst_for_src[s];
                    }
                }
            }
        });
        for (const std::uint64_t n : pair_comparisons) result.comparisons += n;
    }
    return result;
}

std::uint64_t count_temporal_comparisons(const SpatialTokenSet& set) {
    std::uint64_t total = 0;
    for (int t = 0; t + 1 < set.t; ++t) {
        const auto& prev = set.frames[static_cast<std::size_t>(t)];
        const auto& next = set.frames[static_cast<std::size_t>(t) + 1];
        total += overlap_candidates(prev, next, set.h, set.w).size();
    }
    return total;
}

std::span<const std::int32_t> resolve_roots(MergeForest& forest) {
    const std::size_t n = forest.parent.size();
    forest.roots = forest.parent;
    if (n == 0) return forest.roots;

    const int t = static_cast<int>(forest.frame_offsets.size()) - 1;
    int cap = 1;  // passes needed: ceil(log2(T)) + 1
    for (int span = 1; span < std::max(t, 2); span *= 2) ++cap;

    std::vector<std::int32_t> next(n);
    for (int pass = 0; pass < cap; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::int32_t r = forest.roots[static_cast<std::size_t>(forest.roots[i])];
            next[i] = r;
            changed |= r != forest.roots[i];
        }
        forest.roots.swap(next);
        if (!changed) return forest.roots;
    }
    // One more pass must observe a fixpoint for any forest of backward edges.
    for (std::size_t i = 0; i < n; ++i) {
        if (forest.roots[static_cast<std::size_t>(forest.roots[i])] != forest.roots[i]) {
            throw CycleDetected();
        }
    }
    return forest.roots;
}

MergedTokenSet aggregate_tracklets(const MergeForest& forest, int t) {
    if (forest.roots.size() != forest.nodes.size()) {
        throw InvariantError("aggregate_tracklets: roots not resolved");
    }
    MergedTokenSet out;
    out.t = t;
    out.h = forest.leaf_h;
    out.w = forest.leaf_w;
    out.c = forest.channels;

    const std::size_t n = forest.nodes.size();
    std::vector<std::int32_t> member_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++member_count[static_cast<std::size_t>(forest.roots[i])];
    }

    // Tokens emerge ordered by root node index, i.e. (frame, y0, x0) of the
    // root, because a root always precedes its members in node order.
    std::vector<std::int32_t> merged_index(n, -1);
    std::vector<std::vector<double>> acc;  // multi-member accumulators only
    std::vector<std::int32_t> acc_index(n, -1);

    for (std::size_t i = 0; i < n; ++i) {
        const auto root = static_cast<std::size_t>(forest.roots[i]);
        const SpatialToken& node = forest.nodes[i];
        if (merged_index[root] == -1) {
            if (root != i) throw InvariantError("root does not precede member");
            merged_index[root] = static_cast<std::int32_t>(out.tokens.size());
            MergedToken token;
            token.root_frame = node.frame;
            token.root_rect = node.rect;
            token.regions.reserve(static_cast<std::size_t>(member_count[root]));
            out.tokens.push_back(std::move(token));
            if (member_count[root] > 1) {
                acc_index[root] = static_cast<std::int32_t>(acc.size());
                acc.emplace_back(static_cast<std::size_t>(forest.channels), 0.0);
            }
        }
        MergedToken& token = out.tokens[static_cast<std::size_t>(merged_index[root])];
        token.regions.emplace_back(node.frame, node.rect);
        token.total_area += node.area;
        if (member_count[root] == 1) {
            token.feature = node.feature;
        } else {
            auto& sums = acc[static_cast<std::size_t>(acc_index[root])];
            const double weight = static_cast<double>(node.area);
            for (std::size_t c = 0; c < sums.size(); ++c) {
                sums[c] += weight * node.feature[c];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (merged_index[i] == -1 || acc_index[i] == -1) continue;
        MergedToken& token = out.tokens[static_cast<std::size_t>(merged_index[i])];
        const auto& sums = acc[static_cast<std::size_t>(acc_index[i])];
        const double inv = 1.0 / static_cast<double>(token.total_area);
        token.feature.resize(sums.size());
        for (std::size_t c = 0; c < sums.size(); ++c) {
            token.feature[c] = static_cast<float>(sums[c] * inv);
        }
    }
    return out;
}

}  // namespace tokmerge
