// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/metadata.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tokmerge/errors.hpp"

namespace tokmerge {

namespace {

using ordered_json = nlohmann::ordered_json;

// Round to 9 significant digits so the dumped shortest representation never
// exceeds them.
double sig9(double v) {
    if (!std::isfinite(v)) throw InvariantError("metadata value is not finite");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

ordered_json region_to_json(const std::pair<int, Rect>& region) {
    const auto& [frame, rect] = region;
    return ordered_json{{"t", frame}, {"y0", rect.y0}, {"x0", rect.x0}, {"h", rect.h}, {"w", rect.w}};
}

std::pair<int, Rect> region_from_json(const ordered_json& j) {
    return {j.at("t").get<int>(),
            Rect{j.at("y0").get<int>(), j.at("x0").get<int>(), j.at("h").get<int>(),
                 j.at("w").get<int>()}};
}

}  // namespace

std::string metadata_to_json(const MergeMetadata& meta) {
    ordered_json j;
    j["version"] = meta.version;
    j["grid"] = ordered_json{{"t", meta.t}, {"h", meta.h}, {"w", meta.w}, {"c", meta.c}};
    j["thresholds"] = ordered_json{{"tau_s", sig9(meta.tau_s)}, {"tau_t", sig9(meta.tau_t)}};
    j["root_scale"] = meta.root_scale;
    j["position_strategy"] = meta.position_strategy;

    ordered_json tokens = ordered_json::array();
    for (const TokenRecord& record : meta.tokens) {
        ordered_json regions = ordered_json::array();
        for (const auto& region : record.regions) regions.push_back(region_to_json(region));
        tokens.push_back(ordered_json{
            {"id", record.id},
            {"root_frame", record.root_frame},
            {"regions", std::move(regions)},
            {"area", record.area},
            {"merged_pos", ordered_json{sig9(record.positions.merged[0]),
                                        sig9(record.positions.merged[1]),
                                        sig9(record.positions.merged[2])}},
            {"survived_pos", ordered_json{record.positions.survived[0],
                                          record.positions.survived[1],
                                          record.positions.survived[2]}},
            {"reassigned_pos", record.positions.reassigned},
        });
    }
    j["tokens"] = std::move(tokens);
    j["stats"] = ordered_json{
        {"n_input_tokens", meta.stats.n_input_tokens},
        {"n_output_tokens", meta.stats.n_output_tokens},
        {"retention_ratio", sig9(meta.stats.retention_ratio)},
        {"spatial_comparisons", meta.stats.spatial_comparisons},
        {"temporal_comparisons", meta.stats.temporal_comparisons},
        {"wall_time_ms", sig9(meta.stats.wall_time_ms)},
    };
    return j.dump();
}

void write_metadata(const MergeMetadata& meta, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
    const std::string body = metadata_to_json(meta);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.put('\n');
    if (!out) throw IoFailure("write failed for " + path.string());
}

MergeMetadata read_metadata(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid metadata json: " + std::string(e.what()));
    }
    try {
        MergeMetadata meta;
        meta.version = j.at("version").get<std::string>();
        const auto& grid = j.at("grid");
        meta.t = grid.at("t").get<int>();
        meta.h = grid.at("h").get<int>();
        meta.w = grid.at("w").get<int>();
        meta.c = grid.at("c").get<int>();
        meta.tau_s = j.at("thresholds").at("tau_s").get<double>();
        meta.tau_t = j.at("thresholds").at("tau_t").get<double>();
        meta.root_scale = j.at("root_scale").get<int>();
        meta.position_strategy = j.at("position_strategy").get<std::string>();
        for (const auto& tj : j.at("tokens")) {
            TokenRecord record;
            record.id = tj.at("id").get<int>();
            record.root_frame = tj.at("root_frame").get<int>();
            for (const auto& rj : tj.at("regions")) record.regions.push_back(region_from_json(rj));
            record.area = tj.at("area").get<long>();
            const auto& mp = tj.at("merged_pos");
            record.positions.merged = {mp.at(0).get<double>(), mp.at(1).get<double>(),
                                       mp.at(2).get<double>()};
            const auto& sp = tj.at("survived_pos");
            record.positions.survived = {sp.at(0).get<int>(), sp.at(1).get<int>(),
                                         sp.at(2).get<int>()};
            record.positions.reassigned = tj.at("reassigned_pos").get<int>();
            meta.tokens.push_back(std::move(record));
        }
        const auto& stats = j.at("stats");
        meta.stats.n_input_tokens = stats.at("n_input_tokens").get<std::uint64_t>();
        meta.stats.n_output_tokens = stats.at("n_output_tokens").get<std::uint64_t>();
        meta.stats.retention_ratio = stats.at("retention_ratio").get<double>();
        meta.stats.spatial_comparisons = stats.at("spatial_comparisons").get<std::uint64_t>();
        meta.stats.temporal_comparisons = stats.at("temporal_comparisons").get<std::uint64_t>();
        meta.stats.wall_time_ms = stats.at("wall_time_ms").get<double>();
        return meta;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("metadata schema mismatch: " + std::string(e.what()));
    }
}

}  // namespace tokmerge
