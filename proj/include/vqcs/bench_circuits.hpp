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

// Layered random-circuit generators used as benchmark workloads: per layer
// a CNOT ladder followed by a variational Ry and Rx rotation on every
// qubit, with angles drawn standard-normal from per-(layer, qubit)
// substreams of the master seed.

#pragma once

#include <cstdint>

#include "vqcs/circuit.hpp"
#include "vqcs/gates.hpp"
#include "vqcs/rng.hpp"

namespace vqcs::bench {

/// Deterministic layered random circuit with 2*n*depth active parameters.
template <typename T = double>
Circuit<T> generate_rqc(int n, int depth, std::uint64_t seed) {
    if (n < 2) {
        throw DomainError("generate_rqc: needs at least 2 qubits");
    }
    if (depth < 1) {
        throw DomainError("generate_rqc: depth must be >= 1");
    }
    Circuit<T> c;
    for (int layer = 1; layer <= depth; ++layer) {
        for (int i = 1; i < n; ++i) {
            c.push_back(standard_gate<T>(GateKind::Cnot, {i, i + 1}));
        }
        for (int i = 1; i <= n; ++i) {
            SplitMix64 stream = child_stream(seed, layer, i);
            const auto [ry_angle, rx_angle] = stream.next_normal_pair();
            c.push_back(parametric_gate<T>(GateKind::Ry, {i}, ry_angle, true));
            c.push_back(parametric_gate<T>(GateKind::Rx, {i}, rx_angle, true));
        }
    }
    return c;
}

/// Same layered circuit with a depolarizing channel on every qubit after
/// each layer.
template <typename T = double>
Circuit<T> generate_noisy_rqc(int n, int depth, double p, std::uint64_t seed) {
    if (p < 0 || p > 1) {
        throw DomainError("generate_noisy_rqc: p must lie in [0, 1]");
    }
    Circuit<T> noiseless = generate_rqc<T>(n, depth, seed);
    // Re-emit layer by layer, appending channels after each layer's gates.
    Circuit<T> c;
    const std::size_t per_layer = static_cast<std::size_t>(3 * n - 1);
    std::size_t k = 0;
    for (const auto &e : noiseless.elements()) {
        c.elements().push_back(e);
        if (++k % per_layer == 0) {
            for (int i = 1; i <= n; ++i) {
                c.push_back(standard_channel<T>(ChannelKind::Depolarizing, i, p));
            }
        }
    }
    return c;
}

} // namespace vqcs::bench
