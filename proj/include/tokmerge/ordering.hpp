// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "tokmerge/temporal.hpp"

namespace tokmerge {

/// The three ways to index merged tokens for rotary position embeddings.
enum class PositionStrategy {
    merged,      // average the covered cell positions
    survived,    // keep the root token's original position
    reassigned,  // fresh consecutive sequence indices
};

/// Parses "merged" | "survived" | "reassigned"; throws UnknownStrategy.
PositionStrategy parse_strategy(std::string_view name);
std::string_view strategy_name(PositionStrategy strategy);

/// All three position records for one token. All are emitted always; the
/// selected strategy only marks the default column in the metadata.
struct PositionRecord {
    std::array<double, 3> merged{};  // area-weighted mean of cell centers (t, y+0.5, x+0.5)
    std::array<int, 3> survived{};   // (root_frame, root y0, root x0)
    int reassigned = 0;              // sequence index
};

/// Merged tokens linearized for LLM input: frame-major, then raster by the
/// root rectangle's top-left corner.
struct OrderedOutput {
    int t = 0;
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<MergedToken> sequence;
};

OrderedOutput reorder(MergedTokenSet merged);

std::vector<PositionRecord> assign_positions(const OrderedOutput& ordered,
                                             PositionStrategy strategy);

}  // namespace tokmerge
