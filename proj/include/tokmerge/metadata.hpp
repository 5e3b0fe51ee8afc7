// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tokmerge/ordering.hpp"
#include "tokmerge/quadtree.hpp"

namespace tokmerge {

inline constexpr const char* kMetadataVersion = "1.0";

struct MergeStats {
    std::uint64_t n_input_tokens = 0;
    std::uint64_t n_output_tokens = 0;
    double retention_ratio = 0.0;
    std::uint64_t spatial_comparisons = 0;
    std::uint64_t temporal_comparisons = 0;
    double wall_time_ms = 0.0;
};

struct TokenRecord {
    int id = 0;
    int root_frame = 0;
    std::vector<std::pair<int, Rect>> regions;
    long area = 0;
    PositionRecord positions;
};

struct MergeMetadata {
    std::string version = kMetadataVersion;
    int t = 0, h = 0, w = 0, c = 0;
    double tau_s = 0.0;
    double tau_t = 0.0;
    int root_scale = 0;
    std::string position_strategy = "reassigned";
    std::vector<TokenRecord> tokens;
    MergeStats stats;
};

/// Canonical JSON: fixed key order, floats limited to 9 significant digits,
/// byte-deterministic for identical inputs.
std::string metadata_to_json(const MergeMetadata& meta);
void write_metadata(const MergeMetadata& meta, const std::filesystem::path& path);
MergeMetadata read_metadata(const std::filesystem::path& path);

}  // namespace tokmerge
