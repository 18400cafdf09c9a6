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

// Command-line front end: `vqcs bench <task> ...` runs the benchmark
// harness, `vqcs run ...` applies a circuit file to the all-zero state.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqcs/autodiff.hpp"
#include "vqcs/bench.hpp"
#include "vqcs/circuit.hpp"
#include "vqcs/io.hpp"
#include "vqcs/observables.hpp"
#include "vqcs/state.hpp"

namespace {

struct RunOptions {
    std::string circuit_path;
    std::string observable_path;
    std::string state_out;
    int qubits = 0; // 0 = infer from the circuit
    int measure_qubit = 0;
    int threads = vqcs::default_num_threads();
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string precision = "double";
};

std::string read_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw vqcs::IoError("cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

template <typename T> int run_circuit(const RunOptions &opt) {
    const vqcs::Circuit<T> circ =
        vqcs::parse_circuit<T>(read_file(opt.circuit_path));
    int n = opt.qubits;
    if (n == 0) {
        circ.for_each_element(
            [&](const vqcs::GateOp<T> &g) {
                for (int p : g.positions) {
                    n = std::max(n, p);
                }
            },
            [&](const vqcs::ChannelOp<T> &c) {
                for (int p : c.positions) {
                    n = std::max(n, p);
                }
            });
    }
    if (n == 0) {
        throw vqcs::UsageError("run: empty circuit and no --qubits given");
    }
    const vqcs::ThreadConfig cfg = vqcs::ThreadConfig::with_threads(opt.threads);
    std::mt19937_64 rng(opt.seed_set ? opt.seed : std::random_device{}());

    if (circ.has_channels()) {
        if (!opt.state_out.empty()) {
            throw vqcs::UsageError(
                "run: --state-out supports noiseless circuits only");
        }
        vqcs::MixedState<T> dm(n);
        vqcs::apply_circuit(circ, dm, cfg);
        if (!opt.observable_path.empty()) {
            const vqcs::PauliOperator op =
                vqcs::parse_operator(read_file(opt.observable_path));
            const auto val = vqcs::expectation(op, dm, cfg);
            std::cout << "expectation: " << val.real() << " " << val.imag()
                      << "i\n";
        }
        if (opt.measure_qubit > 0) {
            const auto m = vqcs::measure(dm, opt.measure_qubit, rng);
            std::cout << "measured qubit " << opt.measure_qubit << ": outcome "
                      << m.outcome << " (probability " << m.probability << ")\n";
        }
        std::cout << "trace: " << dm.trace().real() << "\n";
    } else {
        vqcs::PureState<T> state(n);
        vqcs::apply_circuit(circ, state, cfg);
        if (!opt.observable_path.empty()) {
            const vqcs::PauliOperator op =
                vqcs::parse_operator(read_file(opt.observable_path));
            const auto val = vqcs::expectation(op, state, cfg);
            std::cout << "expectation: " << val.real() << " " << val.imag()
                      << "i\n";
        }
        if (opt.measure_qubit > 0) {
            const auto m = vqcs::measure(state, opt.measure_qubit, rng);
            std::cout << "measured qubit " << opt.measure_qubit << ": outcome "
                      << m.outcome << " (probability " << m.probability << ")\n";
        }
        if (!opt.state_out.empty()) {
            vqcs::save_state(state, opt.state_out);
            std::cout << "wrote state to " << opt.state_out << "\n";
        }
        std::cout << "norm: " << state.norm() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"vqcs: variational quantum circuit simulator"};
    app.require_subcommand(1);

    // ---- bench ----
    CLI::App *bench = app.add_subcommand("bench", "timing benchmarks");
    bench->require_subcommand(1);
    vqcs::bench::BenchSpec spec;
    std::string format = "json";
    std::vector<int> threads;
    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--qubits", spec.num_qubits, "number of qubits")
            ->required();
        cmd->add_option("--depth", spec.depth, "number of layers");
        cmd->add_option("--threads", threads,
                        "comma-separated worker counts (first one used unless "
                        "sweeping)")
            ->delimiter(',');
        cmd->add_option("--reps", spec.repetitions, "timed repetitions");
        cmd->add_option("--seed", spec.seed, "circuit generator seed");
        cmd->add_option("--noise-p", spec.noise_p,
                        "depolarizing strength for noisy tasks");
        cmd->add_option("--out", spec.out, "report path (default: stdout)");
        cmd->add_option("--format", format, "report format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_flag("--verify", spec.verify,
                      "check results against independent references");
    };
    for (vqcs::bench::Task task :
         {vqcs::bench::Task::SingleGate, vqcs::bench::Task::Rqc,
          vqcs::bench::Task::RqcGrad, vqcs::bench::Task::NoisyGrad,
          vqcs::bench::Task::ThreadSweep}) {
        CLI::App *cmd = bench->add_subcommand(vqcs::bench::task_name(task));
        add_common(cmd);
        cmd->callback([&, task] { spec.task = task; });
    }

    // ---- run ----
    CLI::App *run = app.add_subcommand("run", "apply a circuit file");
    RunOptions ropt;
    run->add_option("--circuit", ropt.circuit_path, "circuit text file")
        ->required();
    run->add_option("--qubits", ropt.qubits,
                    "qubit count (default: highest position used)");
    run->add_option("--observable", ropt.observable_path,
                    "operator text file; prints its expectation value");
    run->add_option("--state-out", ropt.state_out,
                    "write the final state (noiseless circuits)");
    run->add_option("--measure", ropt.measure_qubit,
                    "measure this qubit after the circuit");
    run->add_option("--threads", ropt.threads, "worker count");
    run->add_option("--seed", ropt.seed, "measurement RNG seed")
        ->each([&](const std::string &) { ropt.seed_set = true; });
    run->add_option("--precision", ropt.precision, "single or double")
        ->check(CLI::IsMember({"single", "double"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) {
            if (!threads.empty()) {
                spec.threads = threads;
            }
            spec.format = format == "csv" ? vqcs::bench::ReportFormat::Csv
                                          : vqcs::bench::ReportFormat::Json;
            vqcs::bench::run_and_report(spec, std::cout);
            return 0;
        }
        if (run->parsed()) {
            return ropt.precision == "single" ? run_circuit<float>(ropt)
                                              : run_circuit<double>(ropt);
        }
    } catch (const vqcs::UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const vqcs::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
