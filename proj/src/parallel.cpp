// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tokmerge {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TOKMERGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, int n_threads, const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    n_threads = resolve_thread_count(n_threads);
    if (n_threads > n) n_threads = n;
    if (n_threads == 1) {
        fn(0, n);
        return;
    }
    const int chunk = (n + n_threads - 1) / n_threads;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (int t = 0; t < n_threads; ++t) {
        const int begin = t * chunk;
        const int end = begin + chunk < n ? begin + chunk : n;
        if (begin >= end) break;
        workers.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tokmerge
