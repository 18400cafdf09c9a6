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

// Deterministic random streams for circuit generation. SplitMix64 supplies
// the raw 64-bit stream (finalizer from Steele et al.'s SplittableRandom);
// derived per-(layer, qubit) seeds make generated circuits reproducible
// across platforms. Normal deviates come from an explicit Box-Muller
// transform rather than an implementation-defined distribution.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace vqcs {

/// SplitMix64 finalizer: bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1].
    double next_unit() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard-normal pair via Box-Muller.
    std::pair<double, double> next_normal_pair() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }
};

/// Independent child stream for one (layer, qubit) slot of a generated
/// circuit: the same master seed always yields the same substream.
inline SplitMix64 child_stream(std::uint64_t seed, std::uint64_t layer,
                               std::uint64_t qubit) {
    return SplitMix64(mix64(mix64(mix64(seed) ^ layer) ^ (qubit << 20 | qubit)));
}

} // namespace vqcs
