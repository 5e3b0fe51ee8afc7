// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tokmerge/pipeline.hpp"

namespace tokmerge {

/// Threshold search settings. By default tau_s stays fixed and only tau_t is
/// bisected, since temporal merging dominates the reduction on video. With
/// `couple` set, both move together along tau_s = tau_t - coupling_delta.
struct CalibrationConfig {
    double tau_s = 0.80;
    bool couple = false;
    double coupling_delta = 0.10;
    int root_scale = 4;
    DestinationPolicy policy = DestinationPolicy::top_left;
    double tolerance = 0.02;
    int max_iter = 20;
    int n_threads = 0;
};

struct CalibrationResult {
    double tau_s = 0.0;
    double tau_t = 0.0;
    double achieved_ratio = 0.0;
    int iterations = 0;  // pipeline evaluations; <= max_iter + 2
    /// True when the budget is met: achieved <= target + tolerance
    /// (under-budget always counts as success).
    bool converged = false;
};

/// Bisection on the searched threshold over [0, 1], exploiting monotonicity
/// of the retention ratio. Returns the evaluation closest to the target,
/// preferring candidates that meet the budget. Throws InvalidTarget unless
/// target is in (0, 1].
CalibrationResult calibrate(const TokenGrid& grid, double target_ratio,
                            const CalibrationConfig& config = {});

}  // namespace tokmerge
