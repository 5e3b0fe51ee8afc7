// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tokmerge/calibrate.hpp"
#include "tokmerge/errors.hpp"
#include "tokmerge/metadata.hpp"
#include "tokmerge/npy.hpp"
#include "tokmerge/oracle.hpp"
#include "tokmerge/pipeline.hpp"
#include "tokmerge/synth.hpp"

namespace {

using namespace tokmerge;

struct MergeOptions {
    std::string input;
    std::string features_path;
    std::string metadata_path;
    double tau_s = 0.80;
    double tau_t = 0.90;
    int root_scale = 4;
    std::string policy = "top_left";
    std::string strategy = "reassigned";
    int threads = 0;
    double budget = 0.0;  // 0 = disabled
};

DestinationPolicy parse_policy(const std::string& name) {
    if (name == "top_left") return DestinationPolicy::top_left;
    if (name == "optimal") return DestinationPolicy::optimal;
    throw FormatError("unknown destination policy: " + name);
}

void print_summary(const MergeStats& stats) {
    std::printf("%llu %llu %.6f %llu %llu %.3f\n",
                static_cast<unsigned long long>(stats.n_input_tokens),
                static_cast<unsigned long long>(stats.n_output_tokens), stats.retention_ratio,
                static_cast<unsigned long long>(stats.spatial_comparisons),
                static_cast<unsigned long long>(stats.temporal_comparisons), stats.wall_time_ms);
}

int cmd_merge(const MergeOptions& opt) {
    const TokenGrid grid = read_tensor(opt.input);

    MergeParams params;
    params.tau_s = opt.tau_s;
    params.tau_t = opt.tau_t;
    params.root_scale = opt.root_scale;
    params.policy = parse_policy(opt.policy);
    params.strategy = parse_strategy(opt.strategy);
    params.n_threads = opt.threads;

    if (opt.budget > 0.0) {
        CalibrationConfig config;
        config.tau_s = opt.tau_s;
        config.root_scale = opt.root_scale;
        config.policy = params.policy;
        config.n_threads = opt.threads;
        const CalibrationResult cal = calibrate(grid, opt.budget, config);
        params.tau_s = cal.tau_s;
        params.tau_t = cal.tau_t;
        std::fprintf(stderr,
                     "calibrated tau_s=%.6f tau_t=%.6f achieved=%.6f iterations=%d%s\n",
                     cal.tau_s, cal.tau_t, cal.achieved_ratio, cal.iterations,
                     cal.converged ? "" : " (budget not met; best effort)");
    }

    const PipelineResult result = merge_video(grid, params);
    write_features(opt.features_path, static_cast<std::int64_t>(result.ordered.sequence.size()),
                   grid.c, flatten_features(result.ordered));
    write_metadata(build_metadata(result, grid, params), opt.metadata_path);
    print_summary(result.stats);
    return 0;
}

int cmd_calibrate(const std::string& input, double target, double tau_s, int root_scale,
                  bool couple, double delta, int threads) {
    const TokenGrid grid = read_tensor(input);
    CalibrationConfig config;
    config.tau_s = tau_s;
    config.root_scale = root_scale;
    config.couple = couple;
    config.coupling_delta = delta;
    config.n_threads = threads;
    const CalibrationResult result = calibrate(grid, target, config);
    nlohmann::ordered_json j{{"tau_s", result.tau_s},
                             {"tau_t", result.tau_t},
                             {"achieved_ratio", result.achieved_ratio},
                             {"iterations", result.iterations},
                             {"converged", result.converged}};
    std::printf("%s\n", j.dump().c_str());
    return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_path) {
    const SynthResult result = synth_video(spec);
    const std::int64_t shape[4] = {spec.t, spec.h, spec.w, spec.c};
    write_npy(out_path, shape, result.grid.data);
    if (result.planted_retention) {
        std::printf("%s %dx%dx%dx%d seed=%llu planted_retention=%.6f\n",
                    std::string(scenario_name(spec.scenario)).c_str(), spec.t, spec.h, spec.w,
                    spec.c, static_cast<unsigned long long>(spec.seed),
                    *result.planted_retention);
    } else {
        std::printf("%s %dx%dx%dx%d seed=%llu planted_retention=-\n",
                    std::string(scenario_name(spec.scenario)).c_str(), spec.t, spec.h, spec.w,
                    spec.c, static_cast<unsigned long long>(spec.seed));
    }
    return 0;
}

int cmd_verify(const std::string& input, double tau_s, double tau_t, int root_scale,
               const std::string& policy_name) {
    const TokenGrid grid = read_tensor(input);
    if (grid.cell_count() > 8192) {
        throw FormatError("verify is limited to small inputs (T*H*W <= 8192)");
    }
    const DestinationPolicy policy = parse_policy(policy_name);

    MergeParams params;
    params.tau_s = tau_s;
    params.tau_t = tau_t;
    params.root_scale = root_scale;
    params.policy = policy;
    const PipelineResult pipeline = merge_video(grid, params);
    const MergedTokenSet reference = oracle_merge(grid, tau_s, tau_t, root_scale, policy);
    const EquivalenceReport report = compare_merged(reference, pipeline.ordered.sequence);
    if (report.match) {
        std::printf("PASS %zu tokens\n", pipeline.ordered.sequence.size());
        return 0;
    }
    std::printf("FAIL %s\n", report.detail.c_str());
    return 1;
}

int cmd_stats(const std::string& metadata_path) {
    const MergeMetadata meta = read_metadata(metadata_path);
    if (meta.tokens.size() != meta.stats.n_output_tokens) {
        throw InvariantError("metadata token count disagrees with stats.n_output_tokens");
    }
    for (std::size_t i = 0; i < meta.tokens.size(); ++i) {
        if (meta.tokens[i].id != static_cast<int>(i)) {
            throw InvariantError("token ids are not contiguous in sequence order");
        }
    }
    const double recomputed = static_cast<double>(meta.stats.n_output_tokens) /
                              static_cast<double>(meta.stats.n_input_tokens);
    if (std::abs(recomputed - meta.stats.retention_ratio) > 1e-6) {
        throw InvariantError("retention_ratio is inconsistent with token counts");
    }
    print_summary(meta.stats);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatio-temporal video token merging engine"};
    app.require_subcommand(1);

    // merge
    MergeOptions merge_opt;
    auto* merge = app.add_subcommand("merge", "Merge a token tensor and write features + metadata");
    merge->add_option("-i,--input", merge_opt.input, "Input tensor (.npy, shape T,H,W,C)")
        ->required();
    merge->add_option("-f,--features", merge_opt.features_path, "Output features (.npy, N x C)")
        ->required();
    merge->add_option("-m,--metadata", merge_opt.metadata_path, "Output metadata (.json)")
        ->required();
    merge->add_option("--tau-s", merge_opt.tau_s, "Spatial similarity threshold")
        ->check(CLI::Range(0.0, 1.0));
    merge->add_option("--tau-t", merge_opt.tau_t, "Temporal similarity threshold")
        ->check(CLI::Range(0.0, 1.0));
    merge->add_option("--root-scale", merge_opt.root_scale, "Coarsest quadtree grid scale")
        ->check(CLI::IsMember({2, 4}));
    merge->add_option("--policy", merge_opt.policy, "Destination policy")
        ->check(CLI::IsMember({"top_left", "optimal"}));
    merge->add_option("--strategy", merge_opt.strategy, "Default position strategy")
        ->check(CLI::IsMember({"merged", "survived", "reassigned"}));
    merge->add_option("--threads", merge_opt.threads,
                      "Worker threads (0 = TOKMERGE_THREADS env or all cores)");
    merge->add_option("--budget", merge_opt.budget,
                      "Target retention ratio; calibrates tau_t before merging")
        ->check(CLI::Range(0.0, 1.0));

    // synth
    SynthSpec spec;
    std::string synth_out;
    std::string scenario = "static";
    std::vector<int> cuts;
    std::vector<int> velocity;
    std::vector<int> needle_rect;
    auto* synth = app.add_subcommand("synth", "Write a synthetic token tensor");
    synth->add_option("-o,--out", synth_out, "Output tensor (.npy)")->required();
    synth->add_option("--scenario", scenario, "static|scene-cut|moving-block|needle|noise");
    synth->add_option("-t,--frames", spec.t, "Frames");
    synth->add_option("--height", spec.h, "Grid height");
    synth->add_option("--width", spec.w, "Grid width");
    synth->add_option("-c,--channels", spec.c, "Feature channels");
    synth->add_option("--seed", spec.seed, "RNG seed");
    synth->add_option("--cut-frames", cuts, "scene-cut: segment start frames");
    synth->add_option("--block-size", spec.block_size, "moving-block: block side length");
    synth->add_option("--velocity", velocity, "moving-block: dy dx per frame")->expected(2);
    synth->add_option("--needle-frame", spec.needle_frame, "needle: frame index");
    synth->add_option("--needle-rect", needle_rect, "needle: y0 x0 h w")->expected(4);
    synth->add_option("--needle-similarity", spec.needle_similarity,
                      "needle: cosine against the background");

    // verify
    std::string verify_input;
    double verify_tau_s = 0.80, verify_tau_t = 0.90;
    int verify_root_scale = 4;
    std::string verify_policy = "top_left";
    auto* verify = app.add_subcommand("verify", "Check pipeline output against the naive oracle");
    verify->add_option("-i,--input", verify_input, "Input tensor (.npy; small)")->required();
    verify->add_option("--tau-s", verify_tau_s, "Spatial threshold")->check(CLI::Range(0.0, 1.0));
    verify->add_option("--tau-t", verify_tau_t, "Temporal threshold")->check(CLI::Range(0.0, 1.0));
    verify->add_option("--root-scale", verify_root_scale, "Coarsest grid scale")
        ->check(CLI::IsMember({2, 4}));
    verify->add_option("--policy", verify_policy, "Destination policy")
        ->check(CLI::IsMember({"top_left", "optimal"}));

    // calibrate
    std::string cal_input;
    double cal_target = 0.5, cal_tau_s = 0.80, cal_delta = 0.10;
    int cal_root_scale = 4, cal_threads = 0;
    bool cal_couple = false;
    auto* cal = app.add_subcommand("calibrate", "Search tau_t for a target retention ratio");
    cal->add_option("-i,--input", cal_input, "Input tensor (.npy)")->required();
    cal->add_option("--target", cal_target, "Target retention ratio in (0, 1]")->required();
    cal->add_option("--tau-s", cal_tau_s, "Fixed spatial threshold")->check(CLI::Range(0.0, 1.0));
    cal->add_option("--root-scale", cal_root_scale, "Coarsest grid scale")
        ->check(CLI::IsMember({2, 4}));
    cal->add_flag("--couple", cal_couple, "Search both thresholds with tau_s = tau_t - delta");
    cal->add_option("--delta", cal_delta, "Coupling delta");
    cal->add_option("--threads", cal_threads, "Worker threads");

    // stats
    std::string stats_path;
    auto* stats = app.add_subcommand("stats", "Recompute and print a metadata file's summary");
    stats->add_option("-m,--metadata", stats_path, "Metadata (.json)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (merge->parsed()) return cmd_merge(merge_opt);
        if (synth->parsed()) {
            spec.scenario = parse_scenario(scenario);
            spec.cut_frames = cuts;
            if (velocity.size() == 2) spec.velocity = {velocity[0], velocity[1]};
            if (needle_rect.size() == 4) {
                spec.needle_rect = Rect{needle_rect[0], needle_rect[1], needle_rect[2],
                                        needle_rect[3]};
            }
            return cmd_synth(spec, synth_out);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_input, verify_tau_s, verify_tau_t, verify_root_scale,
                              verify_policy);
        }
        if (cal->parsed()) {
            return cmd_calibrate(cal_input, cal_target, cal_tau_s, cal_root_scale, cal_couple,
                                 cal_delta, cal_threads);
        }
        if (stats->parsed()) return cmd_stats(stats_path);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
