// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/ordering.hpp"

#include <algorithm>
#include <string>

#include "tokmerge/errors.hpp"

namespace tokmerge {

PositionStrategy parse_strategy(std::string_view name) {
    if (name == "merged") return PositionStrategy::merged;
    if (name == "survived") return PositionStrategy::survived;
    if (name == "reassigned") return PositionStrategy::reassigned;
    throw UnknownStrategy("unknown position strategy: " + std::string(name));
}

std::string_view strategy_name(PositionStrategy strategy) {
    switch (strategy) {
        case PositionStrategy::merged: return "merged";
        case PositionStrategy::survived: return "survived";
        case PositionStrategy::reassigned: return "reassigned";
    }
    throw UnknownStrategy("unknown position strategy enum value");
}

OrderedOutput reorder(MergedTokenSet merged) {
    OrderedOutput out;
    out.t = merged.t;
    out.h = merged.h;
    out.w = merged.w;
    out.c = merged.c;
    out.sequence = std::move(merged.tokens);
    // Roots partition each frame, so (frame, y0, x0) is unique and the order
    // is total and deterministic.
    std::sort(out.sequence.begin(), out.sequence.end(),
              [](const MergedToken& a, const MergedToken& b) {
                  if (a.root_frame != b.root_frame) return a.root_frame < b.root_frame;
                  if (a.root_rect.y0 != b.root_rect.y0) return a.root_rect.y0 < b.root_rect.y0;
                  return a.root_rect.x0 < b.root_rect.x0;
              });
    return out;
}

std::vector<PositionRecord> assign_positions(const OrderedOutput& ordered,
                                             PositionStrategy strategy) {
    strategy_name(strategy);  // validates the enum value
    std::vector<PositionRecord> records(ordered.sequence.size());
    for (std::size_t i = 0; i < ordered.sequence.size(); ++i) {
        const MergedToken& token = ordered.sequence[i];
        PositionRecord& rec = records[i];

        // Mean of (t, y + 0.5, x + 0.5) over all covered cells. Per region,
        // the cell-center mean collapses to the rectangle midpoint.
        double t_acc = 0.0, y_acc = 0.0, x_acc = 0.0, area_acc = 0.0;
        for (const auto& [frame, rect] : token.regions) {
            const double a = static_cast<double>(rect.area());
            t_acc += a * frame;
            y_acc += a * (rect.y0 + rect.h / 2.0);
            x_acc += a * (rect.x0 + rect.w / 2.0);
            area_acc += a;
        }
        rec.merged = {t_acc / area_acc, y_acc / area_acc, x_acc / area_acc};
        rec.survived = {token.root_frame, token.root_rect.y0, token.root_rect.x0};
        rec.reassigned = static_cast<int>(i);
    }
    return records;
}

}  // namespace tokmerge
