// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "tokmerge/quadtree.hpp"
#include "tokmerge/tensor.hpp"

namespace tokmerge {

enum class Scenario {
    static_scene,  // T identical frames of one repeated feature
    scene_cut,     // static segments with mutually dissimilar features
    moving_block,  // static background, one block translating per frame
    needle,        // static background, one rectangle overwritten in one frame
    noise,         // every cell an independent unit-sphere feature
};

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario scenario);

/// Description of a synthetic token video. Deterministic for a given seed.
struct SynthSpec {
    int t = 4;
    int h = 8;
    int w = 8;
    int c = 16;
    Scenario scenario = Scenario::static_scene;
    std::uint64_t seed = 0;

    std::vector<int> cut_frames;        // scene_cut: segment starts, strictly increasing in [1, T)
    int block_size = 2;                 // moving_block
    std::pair<int, int> velocity{0, 1};  // moving_block: cells per frame (dy, dx)
    int needle_frame = 0;               // needle
    Rect needle_rect{0, 0, 1, 1};       // needle
    double needle_similarity = 0.3;     // needle: cosine(background, needle)

    void validate() const;  // throws InvalidSpec
};

struct SynthResult {
    TokenGrid grid;
    /// Retention ratio the construction plants, where it has a closed form
    /// (static and scene_cut under thresholds inside the generic window and
    /// the given root scale); nullopt otherwise.
    std::optional<double> planted_retention;
};

SynthResult synth_video(const SynthSpec& spec, int root_scale = 4);

}  // namespace tokmerge
