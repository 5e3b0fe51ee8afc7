// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tokmerge/errors.hpp"

namespace tokmerge {

namespace {

// Lazy recursive view of one frame's quadtree. Features are pooled with the
// same tensor-core primitive and child order as the main pipeline, so both
// paths see bit-identical values; only the search logic differs.
class RecursiveFrame {
public:
    RecursiveFrame(const TokenGrid& grid, int frame, int root_scale)
        : m_grid(grid), m_frame(frame) {
        int rows = grid.h, cols = grid.w;
        m_dims.emplace_back(rows, cols);
        while (std::min(m_dims.back().first, m_dims.back().second) > root_scale) {
            m_dims.emplace_back((m_dims.back().first + 1) / 2, (m_dims.back().second + 1) / 2);
        }
        std::reverse(m_dims.begin(), m_dims.end());
        m_memo.resize(m_dims.size());
        for (std::size_t lv = 0; lv < m_dims.size(); ++lv) {
            m_memo[lv].resize(static_cast<std::size_t>(m_dims[lv].first) * m_dims[lv].second);
        }
    }

    int n_levels() const { return static_cast<int>(m_dims.size()); }
    int rows(int lv) const { return m_dims[static_cast<std::size_t>(lv)].first; }
    int cols(int lv) const { return m_dims[static_cast<std::size_t>(lv)].second; }

    std::vector<std::pair<int, int>> children(int lv, int y, int x) const {
        std::vector<std::pair<int, int>> out;
        for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
                const int cy = 2 * y + dy;
                const int cx = 2 * x + dx;
                if (cy < rows(lv + 1) && cx < cols(lv + 1)) out.emplace_back(cy, cx);
            }
        }
        return out;
    }

    Rect rect(int lv, int y, int x) const {
        if (lv == n_levels() - 1) return Rect{y, x, 1, 1};
        int y1 = m_grid.h, x1 = m_grid.w, y2 = 0, x2 = 0;
        for (const auto& [cy, cx] : children(lv, y, x)) {
            const Rect r = rect(lv + 1, cy, cx);
            y1 = std::min(y1, r.y0);
            x1 = std::min(x1, r.x0);
            y2 = std::max(y2, r.y0 + r.h);
            x2 = std::max(x2, r.x0 + r.w);
        }
        return Rect{y1, x1, y2 - y1, x2 - x1};
    }

    const FeatureVector& feature(int lv, int y, int x) {
        FeatureVector& memo =
            m_memo[static_cast<std::size_t>(lv)][static_cast<std::size_t>(y) * cols(lv) + x];
        if (!memo.empty()) return memo;
        if (lv == n_levels() - 1) {
            const auto cell = m_grid.at(m_frame, y, x);
            memo.assign(cell.begin(), cell.end());
            return memo;
        }
        std::array<WeightedFeature, 4> pooled{};
        std::size_t n = 0;
        for (const auto& [cy, cx] : children(lv, y, x)) {
            pooled[n++] = WeightedFeature{feature(lv + 1, cy, cx), rect(lv + 1, cy, cx).area()};
        }
        memo = area_weighted_pool({pooled.data(), n});
        return memo;
    }

private:
    const TokenGrid& m_grid;
    int m_frame;
    std::vector<std::pair<int, int>> m_dims;  // coarse -> fine
    std::vector<std::vector<FeatureVector>> m_memo;
};

void decide(RecursiveFrame& frame, int lv, int y, int x, double tau_s,
            std::vector<SpatialToken>& out) {
    const Rect r = frame.rect(lv, y, x);
    if (lv == frame.n_levels() - 1) {
        out.push_back(SpatialToken{0, r, lv + 1, frame.feature(lv, y, x), r.area()});
        return;
    }
    bool retain = true;
    for (const auto& [cy, cx] : frame.children(lv, y, x)) {
        if (!(cosine_similarity(frame.feature(lv, y, x), frame.feature(lv + 1, cy, cx)) > tau_s)) {
            retain = false;
        }
    }
    if (retain) {
        out.push_back(SpatialToken{0, r, lv + 1, frame.feature(lv, y, x), r.area()});
    } else {
        for (const auto& [cy, cx] : frame.children(lv, y, x)) {
            decide(frame, lv + 1, cy, cx, tau_s, out);
        }
    }
}

}  // namespace

std::vector<SpatialToken> oracle_spatial(const TokenGrid& grid, int frame, double tau_s,
                                         int root_scale) {
    if (frame < 0 || frame >= grid.t) throw FrameOutOfRange("oracle_spatial: bad frame");
    RecursiveFrame rec(grid, frame, root_scale);
    std::vector<SpatialToken> out;
    for (int y = 0; y < rec.rows(0); ++y) {
        for (int x = 0; x < rec.cols(0); ++x) decide(rec, 0, y, x, tau_s, out);
    }
    for (auto& token : out) token.frame = frame;
    std::sort(out.begin(), out.end(), [](const SpatialToken& a, const SpatialToken& b) {
        return a.rect.y0 != b.rect.y0 ? a.rect.y0 < b.rect.y0 : a.rect.x0 < b.rect.x0;
    });
    return out;
}

MergedTokenSet oracle_temporal(const SpatialTokenSet& spatial, double tau_t,
                               DestinationPolicy policy) {
    struct Node {
        const SpatialToken* token;
        int out_edge = -1;  // global node index of the chosen destination
    };
    std::vector<Node> nodes;
    std::vector<int> offsets{0};
    for (const auto& frame : spatial.frames) {
        for (const auto& token : frame) nodes.push_back(Node{&token});
        offsets.push_back(static_cast<int>(nodes.size()));
    }

    // Choose each source's destination by direct scan over the previous frame.
    for (int t = 1; t < spatial.t; ++t) {
        for (int s = offsets[static_cast<std::size_t>(t)];
             s < offsets[static_cast<std::size_t>(t) + 1]; ++s) {
            const SpatialToken& src = *nodes[static_cast<std::size_t>(s)].token;
            int chosen = -1;
            double chosen_sim = -2.0;
            for (int d = offsets[static_cast<std::size_t>(t) - 1];
                 d < offsets[static_cast<std::size_t>(t)]; ++d) {
                const SpatialToken& dst = *nodes[static_cast<std::size_t>(d)].token;
                if (!intersects(src.rect, dst.rect)) continue;
                const double sim = cosine_similarity(src.feature, dst.feature);
                if (!(sim > tau_t)) continue;
                if (chosen == -1) {
                    chosen = d;
                    chosen_sim = sim;
                    continue;
                }
                const Rect& cur = nodes[static_cast<std::size_t>(chosen)].token->rect;
                const bool more_top_left =
                    dst.rect.y0 != cur.y0 ? dst.rect.y0 < cur.y0 : dst.rect.x0 < cur.x0;
                if (policy == DestinationPolicy::top_left) {
                    if (more_top_left) chosen = d;
                } else if (sim > chosen_sim || (sim == chosen_sim && more_top_left)) {
                    chosen = d;
                    chosen_sim = sim;
                }
            }
            nodes[static_cast<std::size_t>(s)].out_edge = chosen;
        }
    }

    // Undirected components by depth-first traversal.
    const std::size_t n = nodes.size();
    std::vector<std::vector<int>> adjacency(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int d = nodes[i].out_edge;
        if (d >= 0) {
            adjacency[i].push_back(d);
            adjacency[static_cast<std::size_t>(d)].push_back(static_cast<int>(i));
        }
    }
    MergedTokenSet out;
    out.t = spatial.t;
    out.h = spatial.h;
    out.w = spatial.w;
    out.c = spatial.c;

    std::vector<char> visited(n, 0);
    std::vector<std::vector<int>> components;
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start]) continue;
        std::vector<int> stack{static_cast<int>(start)};
        std::vector<int> members;
        visited[start] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (const int u : adjacency[static_cast<std::size_t>(v)]) {
                if (!visited[static_cast<std::size_t>(u)]) {
                    visited[static_cast<std::size_t>(u)] = 1;
                    stack.push_back(u);
                }
            }
        }
        components.push_back(std::move(members));
    }

    // Aggregate each component into its unique sink (the earliest member).
    std::vector<std::pair<int, int>> order;  // (sink node, component)
    for (std::size_t comp = 0; comp < components.size(); ++comp) {
        int sink = -1;
        for (const int v : components[comp]) {
            if (nodes[static_cast<std::size_t>(v)].out_edge == -1) {
                if (sink != -1) throw InvariantError("oracle: component with two sinks");
                sink = v;
            }
        }
        if (sink == -1) throw CycleDetected("oracle: component without a sink");
        order.emplace_back(sink, static_cast<int>(comp));
    }
    std::sort(order.begin(), order.end());

    for (const auto& [sink, comp] : order) {
        auto members = components[static_cast<std::size_t>(comp)];
        std::sort(members.begin(), members.end());  // node order is (frame, y0, x0)
        MergedToken token;
        const SpatialToken& root = *nodes[static_cast<std::size_t>(sink)].token;
        token.root_frame = root.frame;
        token.root_rect = root.rect;
        std::vector<WeightedFeature> pooled;
        pooled.reserve(members.size());
        for (const int v : members) {
            const SpatialToken& member = *nodes[static_cast<std::size_t>(v)].token;
            if (member.frame < root.frame) throw InvariantError("oracle: sink is not earliest");
            token.regions.emplace_back(member.frame, member.rect);
            token.total_area += member.area;
            pooled.push_back(WeightedFeature{member.feature, member.area});
        }
        token.feature = area_weighted_pool(pooled);
        out.tokens.push_back(std::move(token));
    }
    return out;
}

MergedTokenSet oracle_merge(const TokenGrid& grid, double tau_s, double tau_t, int root_scale,
                            DestinationPolicy policy) {
    SpatialTokenSet spatial;
    spatial.t = grid.t;
    spatial.h = grid.h;
    spatial.w = grid.w;
    spatial.c = grid.c;
    spatial.frames.resize(static_cast<std::size_t>(grid.t));
    for (int t = 0; t < grid.t; ++t) {
        spatial.frames[static_cast<std::size_t>(t)] = oracle_spatial(grid, t, tau_s, root_scale);
    }
    return oracle_temporal(spatial, tau_t, policy);
}

EquivalenceReport compare_merged(const MergedTokenSet& oracle_tokens,
                                 const std::vector<MergedToken>& pipeline_sequence,
                                 double feature_tol) {
    const auto fail = [](std::string detail) {
        return EquivalenceReport{false, std::move(detail)};
    };
    if (oracle_tokens.tokens.size() != pipeline_sequence.size()) {
        return fail("token count " + std::to_string(pipeline_sequence.size()) + " vs oracle " +
                    std::to_string(oracle_tokens.tokens.size()));
    }
    for (std::size_t i = 0; i < pipeline_sequence.size(); ++i) {
        const MergedToken& a = oracle_tokens.tokens[i];
        const MergedToken& b = pipeline_sequence[i];
        const std::string where = "token " + std::to_string(i);
        if (a.root_frame != b.root_frame || !(a.root_rect == b.root_rect)) {
            return fail(where + ": root mismatch");
        }
        if (a.regions != b.regions) return fail(where + ": region set mismatch");
        if (a.total_area != b.total_area) return fail(where + ": area mismatch");
        if (a.feature.size() != b.feature.size()) return fail(where + ": feature size mismatch");
        double diff_sq = 0.0, norm_sq = 0.0;
        for (std::size_t c = 0; c < a.feature.size(); ++c) {
            const double d = double(a.feature[c]) - double(b.feature[c]);
            diff_sq += d * d;
            norm_sq += double(a.feature[c]) * double(a.feature[c]);
        }
        const double rel = std::sqrt(diff_sq) / std::max(std::sqrt(norm_sq), 1e-12);
        if (!(rel <= feature_tol)) {
            return fail(where + ": feature error " + std::to_string(rel));
        }
    }
    return {};
}

}  // namespace tokmerge
