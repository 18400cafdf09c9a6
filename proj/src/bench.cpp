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

#include "vqcs/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "vqcs/autodiff.hpp"
#include "vqcs/circuit.hpp"
#include "vqcs/observables.hpp"
#include "vqcs/state.hpp"

namespace vqcs::bench {
namespace {

using Clock = std::chrono::steady_clock;

constexpr int kMaxRqcQubits = 24;
constexpr int kMaxNoisyQubits = 14;

double elapsed_seconds(Clock::time_point t0, Clock::time_point t1) {
    return std::chrono::duration<double>(t1 - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void validate(const BenchSpec &spec) {
    if (spec.num_qubits < 1) {
        throw DomainError("bench: qubit count must be >= 1");
    }
    if (spec.repetitions < 1) {
        throw DomainError("bench: repetitions must be >= 1");
    }
    if (spec.threads.empty()) {
        throw UsageError("bench: the thread list must not be empty");
    }
    for (int t : spec.threads) {
        if (t < 1) {
            throw DomainError("bench: thread counts must be >= 1");
        }
    }
    const bool noisy = spec.task == Task::NoisyGrad;
    const int cap = noisy ? kMaxNoisyQubits : kMaxRqcQubits;
    if (spec.task != Task::SingleGate && spec.num_qubits > cap) {
        throw DomainError("bench: " + std::string(task_name(spec.task)) +
                          " supports at most " + std::to_string(cap) + " qubits");
    }
    if (spec.task != Task::SingleGate && spec.depth < 1) {
        throw DomainError("bench: depth must be >= 1");
    }
}

/// Times one call per repetition, excluding a single warm-up run.
template <typename Fn>
std::vector<double> time_repetitions(int reps, Fn &&body) {
    body(); // warm-up
    std::vector<double> seconds;
    seconds.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        body();
        seconds.push_back(elapsed_seconds(t0, Clock::now()));
    }
    return seconds;
}

BenchRecord base_record(const BenchSpec &spec, int threads) {
    BenchRecord rec;
    rec.task = task_name(spec.task);
    rec.num_qubits = spec.num_qubits;
    rec.depth = spec.depth;
    rec.threads = threads;
    rec.info["seed"] = std::to_string(spec.seed);
    return rec;
}

std::vector<BenchRecord> run_single_gate(const BenchSpec &spec) {
    const int n = spec.num_qubits;
    const ThreadConfig cfg = ThreadConfig::with_threads(spec.threads.front());
    const int mid = (n + 1) / 2;
    PureState<double> state(n);

    std::vector<std::pair<std::string, GateOp<double>>> gates;
    gates.emplace_back("H", standard_gate<double>(GateKind::H, {mid}));
    gates.emplace_back("Rx", parametric_gate<double>(GateKind::Rx, {mid},
                                                     std::numbers::pi / 2, false));
    if (n >= 2) {
        gates.emplace_back("CNOT", standard_gate<double>(
                                       GateKind::Cnot, {1, mid == 1 ? 2 : mid + 1}));
    }

    std::vector<BenchRecord> records;
    for (auto &[name, gate] : gates) {
        BenchRecord rec = base_record(spec, cfg.num_threads);
        rec.depth = 0;
        rec.info["gate"] = name;
        rec.seconds = time_repetitions(spec.repetitions, [&] {
            apply_gate_fast(state.amplitudes(), n, gate, cfg);
        });
        rec.finish_stats();
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<BenchRecord> run_rqc(const BenchSpec &spec) {
    const ThreadConfig cfg = ThreadConfig::with_threads(spec.threads.front());
    const Circuit<double> circ =
        generate_rqc<double>(spec.num_qubits, spec.depth, spec.seed);
    PureState<double> state(spec.num_qubits);
    BenchRecord rec = base_record(spec, cfg.num_threads);
    rec.seconds = time_repetitions(spec.repetitions, [&] {
        std::fill(state.amplitudes().begin(), state.amplitudes().end(),
                  cplx<double>(0));
        state[0] = 1;
        apply_circuit(circ, state, cfg);
    });
    if (spec.verify) {
        const double norm = state.norm();
        rec.info["verify_norm"] = fmt(norm);
        if (std::abs(norm - 1.0) > 1e-10) {
            throw ValidityError("bench rqc: final state norm " + fmt(norm) +
                                " deviates from 1 beyond 1e-10");
        }
        rec.info["verify"] = "pass";
    }
    rec.finish_stats();
    return {rec};
}

std::vector<BenchRecord> run_rqc_grad(const BenchSpec &spec) {
    const ThreadConfig cfg = ThreadConfig::with_threads(spec.threads.front());
    Circuit<double> circ =
        generate_rqc<double>(spec.num_qubits, spec.depth, spec.seed);
    const PauliOperator op = heisenberg_1d(spec.num_qubits);
    const PureState<double> s0(spec.num_qubits);
    GradientResult grad;
    BenchRecord rec = base_record(spec, cfg.num_threads);
    rec.seconds = time_repetitions(spec.repetitions,
                                   [&] { grad = gradient_pure(op, circ, s0, cfg); });
    rec.info["loss"] = fmt(grad.loss);
    rec.info["parameters"] = std::to_string(grad.grads.size());
    if (spec.verify) {
        auto loss_fn = [&](const Circuit<double> &c) {
            return loss_pure(op, c, s0, cfg);
        };
        const auto fd = finite_difference_gradient(loss_fn, circ, 1e-5);
        double max_err = 0;
        for (std::size_t j = 0; j < fd.size(); ++j) {
            max_err = std::max(max_err, std::abs(fd[j] - grad.grads[j]));
        }
        rec.info["verify_max_grad_err"] = fmt(max_err);
        if (max_err > 1e-6) {
            throw ValidityError("bench rqc-grad: gradient deviates from finite "
                                "differences by " +
                                fmt(max_err));
        }
        rec.info["verify"] = "pass";
    }
    rec.finish_stats();
    return {rec};
}

std::vector<BenchRecord> run_noisy_grad(const BenchSpec &spec) {
    const ThreadConfig cfg = ThreadConfig::with_threads(spec.threads.front());
    Circuit<double> circ = generate_noisy_rqc<double>(spec.num_qubits, spec.depth,
                                                      spec.noise_p, spec.seed);
    const PauliOperator op = heisenberg_1d(spec.num_qubits);
    const MixedState<double> dm0(spec.num_qubits);
    GradientResult grad;
    BenchRecord rec = base_record(spec, cfg.num_threads);
    rec.info["noise_p"] = fmt(spec.noise_p);
    rec.seconds = time_repetitions(
        spec.repetitions, [&] { grad = gradient_mixed(op, circ, dm0, cfg); });
    rec.info["loss"] = fmt(grad.loss);
    rec.info["parameters"] = std::to_string(grad.grads.size());
    if (spec.verify) {
        auto loss_fn = [&](const Circuit<double> &c) {
            return loss_mixed(op, c, dm0, cfg);
        };
        const auto fd = finite_difference_gradient(loss_fn, circ, 1e-5);
        double max_err = 0;
        for (std::size_t j = 0; j < fd.size(); ++j) {
            max_err = std::max(max_err, std::abs(fd[j] - grad.grads[j]));
        }
        rec.info["verify_max_grad_err"] = fmt(max_err);
        if (max_err > 1e-6) {
            throw ValidityError("bench noisy-grad: gradient deviates from finite "
                                "differences by " +
                                fmt(max_err));
        }
        rec.info["verify"] = "pass";
    }
    rec.finish_stats();
    return {rec};
}

std::vector<BenchRecord> run_thread_sweep(const BenchSpec &spec) {
    std::vector<int> threads = spec.threads;
    if (std::find(threads.begin(), threads.end(), 1) == threads.end()) {
        threads.insert(threads.begin(), 1); // speedups need the baseline
    }
    const Circuit<double> circ =
        generate_rqc<double>(spec.num_qubits, spec.depth, spec.seed);

    // Correctness first: states across all thread counts must agree.
    PureState<double> reference(spec.num_qubits);
    apply_circuit(circ, reference, ThreadConfig::with_threads(1));
    for (int t : threads) {
        PureState<double> state(spec.num_qubits);
        apply_circuit(circ, state, ThreadConfig::with_threads(t));
        double max_diff = 0;
        for (std::uint64_t k = 0; k < state.size(); ++k) {
            max_diff = std::max(max_diff, std::abs(state[k] - reference[k]));
        }
        if (max_diff > 1e-12) {
            throw ValidityError("bench thread-sweep: states disagree across "
                                "thread counts by " +
                                fmt(max_diff));
        }
    }

    std::vector<BenchRecord> records;
    PureState<double> state(spec.num_qubits);
    double baseline_mean = 0;
    for (int t : threads) {
        const ThreadConfig cfg = ThreadConfig::with_threads(t);
        BenchRecord rec = base_record(spec, t);
        rec.seconds = time_repetitions(spec.repetitions, [&] {
            std::fill(state.amplitudes().begin(), state.amplitudes().end(),
                      cplx<double>(0));
            state[0] = 1;
            apply_circuit(circ, state, cfg);
        });
        rec.finish_stats();
        if (t == 1) {
            baseline_mean = rec.mean;
        }
        rec.speedup = t == 1 ? 1.0 : baseline_mean / rec.mean;
        rec.info["states_agree"] = "pass";
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace

const char *task_name(Task t) {
    switch (t) {
    case Task::SingleGate:
        return "single-gate";
    case Task::Rqc:
        return "rqc";
    case Task::RqcGrad:
        return "rqc-grad";
    case Task::NoisyGrad:
        return "noisy-grad";
    case Task::ThreadSweep:
        return "thread-sweep";
    }
    return "?";
}

Task parse_task(const std::string &name) {
    for (Task t : {Task::SingleGate, Task::Rqc, Task::RqcGrad, Task::NoisyGrad,
                   Task::ThreadSweep}) {
        if (name == task_name(t)) {
            return t;
        }
    }
    throw UsageError("bench: unknown task '" + name + "'");
}

void BenchRecord::finish_stats() {
    if (seconds.empty()) {
        return;
    }
    double sum = 0;
    for (double s : seconds) {
        sum += s;
    }
    mean = sum / static_cast<double>(seconds.size());
    double sq = 0;
    for (double s : seconds) {
        sq += (s - mean) * (s - mean);
    }
    stddev = std::sqrt(sq / static_cast<double>(seconds.size()));
}

std::vector<BenchRecord> run_bench(const BenchSpec &spec) {
    validate(spec);
    switch (spec.task) {
    case Task::SingleGate:
        return run_single_gate(spec);
    case Task::Rqc:
        return run_rqc(spec);
    case Task::RqcGrad:
        return run_rqc_grad(spec);
    case Task::NoisyGrad:
        return run_noisy_grad(spec);
    case Task::ThreadSweep:
        return run_thread_sweep(spec);
    }
    throw UsageError("bench: unknown task");
}

void emit_report(const std::vector<BenchRecord> &records, ReportFormat format,
                 std::ostream &out) {
    if (records.empty()) {
        throw UsageError("emit_report: no records to write");
    }
    if (format == ReportFormat::Csv) {
        out << "task,n,depth,threads,rep,seconds\n";
        for (const auto &rec : records) {
            for (std::size_t r = 0; r < rec.seconds.size(); ++r) {
                out << rec.task << ',' << rec.num_qubits << ',' << rec.depth << ','
                    << rec.threads << ',' << r << ',' << fmt(rec.seconds[r])
                    << '\n';
            }
        }
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto &rec : records) {
            nlohmann::ordered_json j;
            j["task"] = rec.task;
            j["n"] = rec.num_qubits;
            j["depth"] = rec.depth;
            j["threads"] = rec.threads;
            j["seconds"] = rec.seconds;
            j["mean_seconds"] = rec.mean;
            j["stddev_seconds"] = rec.stddev;
            if (rec.speedup != 0) {
                j["speedup"] = rec.speedup;
            }
            nlohmann::ordered_json params = nlohmann::ordered_json::object();
            for (const auto &[k, v] : rec.info) {
                params[k] = v;
            }
            j["params"] = params;
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << '\n';
    }
    if (!out) {
        throw IoError("emit_report: write failed");
    }
}

void run_and_report(const BenchSpec &spec, std::ostream &console) {
    const std::vector<BenchRecord> records = run_bench(spec);
    if (spec.out.empty()) {
        emit_report(records, spec.format, console);
    } else {
        std::ofstream f(spec.out);
        if (!f) {
            throw IoError("bench: cannot open '" + spec.out + "' for writing");
        }
        emit_report(records, spec.format, f);
        console << "wrote " << records.size() << " record(s) to " << spec.out
                << "\n";
    }
    for (const auto &rec : records) {
        console << rec.task;
        if (rec.info.count("gate")) {
            console << '[' << rec.info.at("gate") << ']';
        }
        console << " n=" << rec.num_qubits << " depth=" << rec.depth
                << " threads=" << rec.threads << " mean=" << fmt(rec.mean)
                << "s stddev=" << fmt(rec.stddev) << "s";
        if (rec.speedup != 0) {
            console << " speedup=" << fmt(rec.speedup);
        }
        console << "\n";
    }
}

} // namespace vqcs::bench
