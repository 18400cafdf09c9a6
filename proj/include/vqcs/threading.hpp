// Copyright 2026 The vqcs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdlib>
#include <span>
#include <thread>
#include <vector>

namespace vqcs {

/// Environment variable consulted for the default worker count.
inline constexpr const char *kNumThreadsEnvVar = "VQCS_NUM_THREADS";

inline int default_num_threads() {
    if (const char *env = std::getenv(kNumThreadsEnvVar)) {
        const int v = std::atoi(env);
        if (v >= 1) {
            return v;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Shared-memory execution settings for the gate kernels. A
/// default-constructed config picks up VQCS_NUM_THREADS; an explicitly set
/// num_threads always wins.
struct ThreadConfig {
    int num_threads = default_num_threads();
    /// States smaller than this many amplitudes are processed serially.
    std::size_t min_work_per_thread = std::size_t(1) << 12;

    static ThreadConfig single_threaded() { return {1, std::size_t(1) << 12}; }
    static ThreadConfig with_threads(int t) { return {t, std::size_t(1) << 12}; }
};

namespace detail {

/// Runs body(i) for i in [0, count), spreading indices over up to
/// num_threads workers. Bodies must touch disjoint data.
template <typename F> void run_indexed(std::size_t count, int num_threads, F &&body) {
    if (count == 0) {
        return;
    }
    if (num_threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(count - 1);
    for (std::size_t i = 1; i < count; ++i) {
        workers.emplace_back([&body, i] { body(i); });
    }
    body(0);
}

} // namespace detail
} // namespace vqcs
