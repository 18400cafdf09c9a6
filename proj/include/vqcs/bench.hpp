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

// Benchmark harness: layered random circuits, timing runs, thread sweeps
// and machine-readable reports.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vqcs/bench_circuits.hpp"
#include "vqcs/errors.hpp"

namespace vqcs::bench {

enum class Task {
    SingleGate,
    Rqc,
    RqcGrad,
    NoisyGrad,
    ThreadSweep,
};

enum class ReportFormat {
    Json,
    Csv,
};

const char *task_name(Task t);
Task parse_task(const std::string &name);

struct BenchSpec {
    Task task = Task::Rqc;
    int num_qubits = 4;
    int depth = 2;
    std::vector<int> threads = {1};
    int repetitions = 10;
    std::uint64_t seed = 1234;
    double noise_p = 0.05;
    std::string out;        // empty = stdout
    ReportFormat format = ReportFormat::Json;
    bool verify = false;
};

struct BenchRecord {
    std::string task;
    int num_qubits = 0;
    int depth = 0;
    int threads = 1;
    std::vector<double> seconds; // one entry per repetition (warm-up excluded)
    double mean = 0;
    double stddev = 0; // population standard deviation
    double speedup = 0; // 0 when not a thread sweep
    std::map<std::string, std::string> info;

    void finish_stats();
};

/// Runs the benchmark described by the spec. Verification failures throw;
/// timings are measured on a monotonic clock with one warm-up iteration
/// excluded from the samples.
std::vector<BenchRecord> run_bench(const BenchSpec &spec);

/// Writes records as CSV (columns task,n,depth,threads,rep,seconds) or as a
/// JSON array with stable field order.
void emit_report(const std::vector<BenchRecord> &records, ReportFormat format,
                 std::ostream &out);

/// Runs and reports in one step, honoring spec.out.
void run_and_report(const BenchSpec &spec, std::ostream &console);

} // namespace vqcs::bench
