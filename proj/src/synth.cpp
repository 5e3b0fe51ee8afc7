// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokmerge/errors.hpp"
#include "tokmerge/rng.hpp"

namespace tokmerge {

Scenario parse_scenario(std::string_view name) {
    if (name == "static") return Scenario::static_scene;
    if (name == "scene-cut") return Scenario::scene_cut;
    if (name == "moving-block") return Scenario::moving_block;
    if (name == "needle") return Scenario::needle;
    if (name == "noise") return Scenario::noise;
    throw InvalidSpec("unknown scenario: " + std::string(name));
}

std::string_view scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::static_scene: return "static";
        case Scenario::scene_cut: return "scene-cut";
        case Scenario::moving_block: return "moving-block";
        case Scenario::needle: return "needle";
        case Scenario::noise: return "noise";
    }
    throw InvalidSpec("unknown scenario enum value");
}

void SynthSpec::validate() const {
    if (t < 1 || h < 1 || w < 1 || c < 1) throw InvalidSpec("dims must be >= 1");
    switch (scenario) {
        case Scenario::scene_cut: {
            int last = 0;
            for (const int f : cut_frames) {
                if (f <= last || f >= t) {
                    throw InvalidSpec("cut frames must be strictly increasing in [1, T)");
                }
                last = f;
            }
            break;
        }
        case Scenario::moving_block:
            if (block_size < 1 || block_size > h || block_size > w) {
                throw InvalidSpec("block size outside grid");
            }
            if (c < 2) throw InvalidSpec("moving-block needs at least 2 channels");
            break;
        case Scenario::needle: {
            const Rect& r = needle_rect;
            if (c < 2) throw InvalidSpec("needle needs at least 2 channels");
            if (needle_frame < 0 || needle_frame >= t) throw InvalidSpec("needle frame outside video");
            if (r.y0 < 0 || r.x0 < 0 || r.h < 1 || r.w < 1 || r.y0 + r.h > h || r.x0 + r.w > w) {
                throw InvalidSpec("needle rectangle outside grid");
            }
            if (!(needle_similarity > -1.0 && needle_similarity < 1.0)) {
                throw InvalidSpec("needle similarity must lie in (-1, 1)");
            }
            break;
        }
        default: break;
    }
}

namespace {

// Feature with an exact target cosine against `base`: rotate toward an
// orthonormalized second direction.
FeatureVector feature_at_similarity(const FeatureVector& base, SplitMix64& rng, double target) {
    const std::size_t dim = base.size();
    FeatureVector other;
    double cross = 1.0, norm_sq = 0.0;
    do {
        other = rng.next_unit_feature(static_cast<int>(dim));
        cross = 0.0;
        for (std::size_t i = 0; i < dim; ++i) cross += double(base[i]) * other[i];
        norm_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double v = other[i] - cross * base[i];
            norm_sq += v * v;
        }
    } while (norm_sq < 1e-6);  // retry near-parallel draws; needs dim >= 2
    const double inv = 1.0 / std::sqrt(norm_sq);
    const double ortho_scale = std::sqrt(1.0 - target * target);
    FeatureVector out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double ortho = (other[i] - cross * base[i]) * inv;
        out[i] = static_cast<float>(target * base[i] + ortho_scale * ortho);
    }
    return out;
}

void fill_cell(TokenGrid& grid, int t, int y, int x, const FeatureVector& f) {
    auto dst = grid.at_mut(t, y, x);
    std::copy(f.begin(), f.end(), dst.begin());
}

long coarsest_node_count(int h, int w, int root_scale) {
    const auto dims = pyramid_level_dims(h, w, root_scale);
    return static_cast<long>(dims.front().first) * dims.front().second;
}

}  // namespace

SynthResult synth_video(const SynthSpec& spec, int root_scale) {
    spec.validate();
    SplitMix64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);

    SynthResult result;
    TokenGrid& grid = result.grid;
    grid.t = spec.t;
    grid.h = spec.h;
    grid.w = spec.w;
    grid.c = spec.c;
    grid.data.resize(grid.cell_count() * static_cast<std::size_t>(spec.c));

    const double cells = static_cast<double>(grid.cell_count());
    const long n_root = coarsest_node_count(spec.h, spec.w, root_scale);

    switch (spec.scenario) {
        case Scenario::static_scene: {
            const FeatureVector base = rng.next_unit_feature(spec.c);
            for (int t = 0; t < spec.t; ++t) {
                for (int y = 0; y < spec.h; ++y) {
                    for (int x = 0; x < spec.w; ++x) fill_cell(grid, t, y, x, base);
                }
            }
            result.planted_retention = static_cast<double>(n_root) / cells;
            break;
        }
        case Scenario::scene_cut: {
            const std::size_t n_segments = spec.cut_frames.size() + 1;
            // Mutually low-similarity segment features: orthogonalize when the
            // channel count allows, otherwise keep the raw unit draws.
            std::vector<FeatureVector> segment_features;
            for (std::size_t s = 0; s < n_segments; ++s) {
                FeatureVector f = rng.next_unit_feature(spec.c);
                if (static_cast<int>(n_segments) <= spec.c) {
                    for (const auto& prev : segment_features) {
                        double dot = 0.0;
                        for (std::size_t i = 0; i < f.size(); ++i) dot += double(f[i]) * prev[i];
                        for (std::size_t i = 0; i < f.size(); ++i) {
                            f[i] = static_cast<float>(f[i] - dot * prev[i]);
                        }
                    }
                    double norm_sq = 0.0;
                    for (const float v : f) norm_sq += double(v) * v;
                    const double inv = 1.0 / std::sqrt(norm_sq);
                    for (float& v : f) v = static_cast<float>(v * inv);
                }
                segment_features.push_back(std::move(f));
            }
            std::size_t segment = 0;
            for (int t = 0; t < spec.t; ++t) {
                if (segment < spec.cut_frames.size() &&
                    t == spec.cut_frames[segment]) {
                    ++segment;
                }
                for (int y = 0; y < spec.h; ++y) {
                    for (int x = 0; x < spec.w; ++x) {
                        fill_cell(grid, t, y, x, segment_features[segment]);
                    }
                }
            }
            result.planted_retention =
                static_cast<double>(n_root) * static_cast<double>(n_segments) / cells;
            break;
        }
        case Scenario::moving_block: {
            const FeatureVector background = rng.next_unit_feature(spec.c);
            const FeatureVector block = feature_at_similarity(background, rng, 0.0);
            for (int t = 0; t < spec.t; ++t) {
                const int by = std::clamp(t * spec.velocity.first, 0, spec.h - spec.block_size);
                const int bx = std::clamp(t * spec.velocity.second, 0, spec.w - spec.block_size);
                for (int y = 0; y < spec.h; ++y) {
                    for (int x = 0; x < spec.w; ++x) {
                        const bool inside = y >= by && y < by + spec.block_size && x >= bx &&
                                            x < bx + spec.block_size;
                        fill_cell(grid, t, y, x, inside ? block : background);
                    }
                }
            }
            break;
        }
        case Scenario::needle: {
            const FeatureVector background = rng.next_unit_feature(spec.c);
            const FeatureVector needle =
                feature_at_similarity(background, rng, spec.needle_similarity);
            for (int t = 0; t < spec.t; ++t) {
                for (int y = 0; y < spec.h; ++y) {
                    for (int x = 0; x < spec.w; ++x) fill_cell(grid, t, y, x, background);
                }
            }
            for (int y = spec.needle_rect.y0; y < spec.needle_rect.y0 + spec.needle_rect.h; ++y) {
                for (int x = spec.needle_rect.x0; x < spec.needle_rect.x0 + spec.needle_rect.w;
                     ++x) {
                    fill_cell(grid, spec.needle_frame, y, x, needle);
                }
            }
            break;
        }
        case Scenario::noise: {
            for (int t = 0; t < spec.t; ++t) {
                for (int y = 0; y < spec.h; ++y) {
                    for (int x = 0; x < spec.w; ++x) {
                        fill_cell(grid, t, y, x, rng.next_unit_feature(spec.c));
                    }
                }
            }
            result.planted_retention = 1.0;
            break;
        }
    }
    return result;
}

}  // namespace tokmerge
