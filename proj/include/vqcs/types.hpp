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

#include <complex>
#include <cstdint>
#include <vector>

namespace vqcs {

/// Scalar precision of a simulation. All states, gates and channels that
/// interact in one simulation share one precision.
enum class Precision : std::uint8_t {
    ComplexSingle = 1,
    ComplexDouble = 2,
};

template <typename T> using cplx = std::complex<T>;
template <typename T> using cvector = std::vector<std::complex<T>>;

template <typename T> struct precision_of;
template <> struct precision_of<float> {
    static constexpr Precision value = Precision::ComplexSingle;
};
template <> struct precision_of<double> {
    static constexpr Precision value = Precision::ComplexDouble;
};

} // namespace vqcs
