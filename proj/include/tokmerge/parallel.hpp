// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace tokmerge {

/// Resolve a requested worker count: 0 means "use TOKMERGE_THREADS if set,
/// otherwise all hardware threads". Always returns >= 1.
int resolve_thread_count(int requested);

/// Run fn(begin, end) over a deterministic contiguous chunking of [0, n).
/// Each chunk is processed by exactly one worker; results must be written to
/// disjoint, index-addressed slots so the outcome is independent of scheduling.
void parallel_for(int n, int n_threads, const std::function<void(int, int)>& fn);

}  // namespace tokmerge
