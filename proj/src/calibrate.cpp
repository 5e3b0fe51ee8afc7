// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "tokmerge/errors.hpp"

namespace tokmerge {

namespace {

struct Evaluation {
    double tau_t = 0.0;
    double ratio = 0.0;
};

// Prefer evaluations meeting the budget (ratio <= target + tol); within the
// same class, prefer the one closest to target.
bool better(const Evaluation& a, const Evaluation& b, double target, double tol) {
    const bool a_meets = a.ratio <= target + tol;
    const bool b_meets = b.ratio <= target + tol;
    if (a_meets != b_meets) return a_meets;
    return std::abs(a.ratio - target) < std::abs(b.ratio - target);
}

}  // namespace

CalibrationResult calibrate(const TokenGrid& grid, double target_ratio,
                            const CalibrationConfig& config) {
    if (!(target_ratio > 0.0) || target_ratio > 1.0) {
        throw InvalidTarget("target ratio must lie in (0, 1]");
    }
    grid.validate();

    int evaluations = 0;
    const auto evaluate = [&](double tau_t) {
        MergeParams params;
        params.tau_t = tau_t;
        params.tau_s = config.couple
                           ? std::clamp(tau_t - config.coupling_delta, 0.0, 1.0)
                           : config.tau_s;
        params.root_scale = config.root_scale;
        params.policy = config.policy;
        params.n_threads = config.n_threads;
        ++evaluations;
        return Evaluation{tau_t, merge_video(grid, params).stats.retention_ratio};
    };

    // Endpoints bracket the monotone retention curve.
    Evaluation best = evaluate(0.0);
    double lo = 0.0, hi = 1.0;
    if (std::abs(best.ratio - target_ratio) > config.tolerance) {
        const Evaluation top = evaluate(1.0);
        if (better(top, best, target_ratio, config.tolerance)) best = top;
        for (int iter = 0;
             iter < config.max_iter && std::abs(best.ratio - target_ratio) > config.tolerance;
             ++iter) {
            const double mid = 0.5 * (lo + hi);
            const Evaluation eval = evaluate(mid);
            if (better(eval, best, target_ratio, config.tolerance)) best = eval;
            if (eval.ratio > target_ratio) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    CalibrationResult result;
    result.tau_t = best.tau_t;
    result.tau_s =
        config.couple ? std::clamp(best.tau_t - config.coupling_delta, 0.0, 1.0) : config.tau_s;
    result.achieved_ratio = best.ratio;
    result.iterations = evaluations;
    result.converged = best.ratio <= target_ratio + config.tolerance;
    return result;
}

}  // namespace tokmerge
