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

#include <doctest.h>

#include <sstream>
#include <variant>

#include <json.hpp>

#include "oracles.hpp"
#include "vqcs/bench.hpp"
#include "vqcs/circuit.hpp"

using namespace vqcs;
using vqcs::bench::BenchRecord;
using vqcs::bench::BenchSpec;

TEST_SUITE("bench") {

TEST_CASE("layered circuit generation is deterministic and sized correctly") {
    const auto c = bench::generate_rqc<double>(3, 4, 99);
    CHECK(c.size() == 32); // 4 layers x (2 CNOTs + 6 rotations)
    CHECK(active_parameters(c).size() == 24);

    const auto again = bench::generate_rqc<double>(3, 4, 99);
    CHECK(active_parameters(c) == active_parameters(again));

    const auto other = bench::generate_rqc<double>(3, 4, 100);
    CHECK(active_parameters(c) != active_parameters(other));

    CHECK_THROWS_AS(bench::generate_rqc<double>(1, 4, 0), DomainError);
    CHECK_THROWS_AS(bench::generate_rqc<double>(3, 0, 0), DomainError);
}

TEST_CASE("noisy circuits append a depolarizing channel per qubit per layer") {
    const int n = 3, depth = 2;
    const auto c = bench::generate_noisy_rqc<double>(n, depth, 0.1, 7);
    CHECK(c.size() == std::size_t(depth * (3 * n - 1 + n)));
    CHECK(active_parameters(c).size() == std::size_t(2 * n * depth));

    // Channel positions: each layer ends with channels on qubits 1..n.
    int channels = 0;
    c.for_each_element([](const GateOp<double> &) {},
                       [&](const ChannelOp<double> &ch) {
                           CHECK(ch.kind == ChannelKind::Depolarizing);
                           ++channels;
                       });
    CHECK(channels == n * depth);

    CHECK_THROWS_AS(bench::generate_noisy_rqc<double>(3, 2, 1.5, 7), DomainError);
}

TEST_CASE("single-gate task emits one record per gate") {
    BenchSpec spec;
    spec.task = vqcs::bench::Task::SingleGate;
    spec.num_qubits = 6;
    spec.repetitions = 2;
    const auto records = run_bench(spec);
    REQUIRE(records.size() == 3);
    CHECK(records[0].info.at("gate") == "H");
    CHECK(records[1].info.at("gate") == "Rx");
    CHECK(records[2].info.at("gate") == "CNOT");
    for (const auto &rec : records) {
        CHECK(rec.seconds.size() == 2);
        CHECK(rec.mean > 0);
    }
}

TEST_CASE("rqc task verifies the final norm when asked") {
    BenchSpec spec;
    spec.task = vqcs::bench::Task::Rqc;
    spec.num_qubits = 5;
    spec.depth = 3;
    spec.repetitions = 2;
    spec.verify = true;
    const auto records = run_bench(spec);
    REQUIRE(records.size() == 1);
    CHECK(records[0].info.at("verify") == "pass");
}

TEST_CASE("gradient tasks verify against finite differences when asked") {
    BenchSpec spec;
    spec.task = vqcs::bench::Task::RqcGrad;
    spec.num_qubits = 3;
    spec.depth = 2;
    spec.repetitions = 1;
    spec.verify = true;
    const auto rqc = run_bench(spec);
    CHECK(rqc[0].info.at("verify") == "pass");

    spec.task = vqcs::bench::Task::NoisyGrad;
    spec.noise_p = 0.05;
    const auto noisy = run_bench(spec);
    CHECK(noisy[0].info.at("verify") == "pass");
    CHECK(noisy[0].info.at("noise_p") == "0.05");
}

TEST_CASE("thread sweep reports an exact baseline speedup of 1") {
    BenchSpec spec;
    spec.task = vqcs::bench::Task::ThreadSweep;
    spec.num_qubits = 6;
    spec.depth = 2;
    spec.repetitions = 2;
    spec.threads = {1, 2};
    const auto records = run_bench(spec);
    REQUIRE(records.size() == 2);
    CHECK(records[0].threads == 1);
    CHECK(records[0].speedup == 1.0);
    CHECK(records[1].threads == 2);
    CHECK(records[1].speedup > 0);
    CHECK(records[0].info.at("states_agree") == "pass");

    // The baseline is added implicitly when missing.
    spec.threads = {2};
    const auto implicit = run_bench(spec);
    REQUIRE(implicit.size() == 2);
    CHECK(implicit[0].threads == 1);
}

TEST_CASE("bench specs are validated") {
    BenchSpec spec;
    spec.num_qubits = 0;
    CHECK_THROWS_AS(run_bench(spec), DomainError);
    spec.num_qubits = 4;
    spec.repetitions = 0;
    CHECK_THROWS_AS(run_bench(spec), DomainError);
    spec.repetitions = 1;
    spec.threads = {};
    CHECK_THROWS_AS(run_bench(spec), UsageError);
    spec.threads = {1};
    spec.num_qubits = 30; // above the rqc cap
    CHECK_THROWS_AS(run_bench(spec), DomainError);
    spec.task = vqcs::bench::Task::NoisyGrad;
    spec.num_qubits = 15; // above the noisy cap
    CHECK_THROWS_AS(run_bench(spec), DomainError);
}

TEST_CASE("reports are written as CSV and JSON") {
    BenchRecord rec;
    rec.task = "rqc";
    rec.num_qubits = 4;
    rec.depth = 2;
    rec.threads = 1;
    rec.seconds = {0.25, 0.75};
    rec.finish_stats();
    CHECK(rec.mean == doctest::Approx(0.5));
    CHECK(rec.stddev == doctest::Approx(0.25));
    rec.info["seed"] = "1";

    std::ostringstream csv;
    emit_report({rec}, vqcs::bench::ReportFormat::Csv, csv);
    CHECK(csv.str() == "task,n,depth,threads,rep,seconds\n"
                       "rqc,4,2,1,0,0.25\n"
                       "rqc,4,2,1,1,0.75\n");

    std::ostringstream js;
    emit_report({rec}, vqcs::bench::ReportFormat::Json, js);
    const auto parsed = nlohmann::json::parse(js.str());
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0]["task"] == "rqc");
    CHECK(parsed[0]["n"] == 4);
    CHECK(parsed[0]["seconds"].size() == 2);
    CHECK(parsed[0]["mean_seconds"] == doctest::Approx(0.5));
    CHECK(parsed[0]["params"]["seed"] == "1");

    std::ostringstream empty;
    CHECK_THROWS_AS(emit_report({}, vqcs::bench::ReportFormat::Csv, empty),
                    UsageError);
}

TEST_CASE("identical specs produce identical verification numbers") {
    BenchSpec spec;
    spec.task = vqcs::bench::Task::RqcGrad;
    spec.num_qubits = 4;
    spec.depth = 2;
    spec.repetitions = 1;
    spec.seed = 424242;
    const auto a = run_bench(spec);
    const auto b = run_bench(spec);
    CHECK(a[0].info.at("loss") == b[0].info.at("loss"));
}

} // TEST_SUITE
