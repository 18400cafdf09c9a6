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

// Raw state dumps:
//   magic "VQCS" | u32 version (=1) | u32 qubit count | u8 precision
// followed by 2^n little-endian (re, im) double pairs in flat amplitude
// order. The precision byte records the precision of the producing
// simulation (1 = complex single, 2 = complex double); the payload itself
// is always stored as doubles.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vqcs/errors.hpp"
#include "vqcs/state.hpp"
#include "vqcs/types.hpp"

static_assert(std::endian::native == std::endian::little,
              "state dumps assume a little-endian host");

namespace vqcs {

inline constexpr char kStateMagic[4] = {'V', 'Q', 'C', 'S'};
inline constexpr std::uint32_t kStateFormatVersion = 1;

struct LoadedState {
    int num_qubits = 0;
    Precision precision = Precision::ComplexDouble;
    std::vector<std::complex<double>> amplitudes;

    template <typename T> PureState<T> to_pure() const {
        cvector<T> amps(amplitudes.size());
        for (std::size_t k = 0; k < amps.size(); ++k) {
            amps[k] = static_cast<cplx<T>>(amplitudes[k]);
        }
        return PureState<T>(unchecked, std::move(amps));
    }
};

template <typename T>
void save_state(const PureState<T> &state, std::ostream &out) {
    out.write(kStateMagic, 4);
    const std::uint32_t version = kStateFormatVersion;
    const std::uint32_t n = static_cast<std::uint32_t>(state.num_qubits());
    const std::uint8_t prec = static_cast<std::uint8_t>(state.precision());
    out.write(reinterpret_cast<const char *>(&version), sizeof(version));
    out.write(reinterpret_cast<const char *>(&n), sizeof(n));
    out.write(reinterpret_cast<const char *>(&prec), sizeof(prec));
    for (const auto &a : state.amplitudes()) {
        const double pair[2] = {static_cast<double>(a.real()),
                                static_cast<double>(a.imag())};
        out.write(reinterpret_cast<const char *>(pair), sizeof(pair));
    }
    if (!out) {
        throw IoError("save_state: write failed");
    }
}

template <typename T>
void save_state(const PureState<T> &state, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("save_state: cannot open '" + path + "' for writing");
    }
    save_state(state, f);
}

inline LoadedState load_state(std::istream &in) {
    char magic[4];
    std::uint32_t version = 0, n = 0;
    std::uint8_t prec = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char *>(&version), sizeof(version));
    in.read(reinterpret_cast<char *>(&n), sizeof(n));
    in.read(reinterpret_cast<char *>(&prec), sizeof(prec));
    if (!in || std::memcmp(magic, kStateMagic, 4) != 0) {
        throw IoError("load_state: not a state dump (bad magic)");
    }
    if (version != kStateFormatVersion) {
        throw IoError("load_state: unsupported format version " +
                      std::to_string(version));
    }
    if (n < 1 || n > PureState<double>::kMaxQubits) {
        throw IoError("load_state: qubit count " + std::to_string(n) +
                      " out of range");
    }
    if (prec != 1 && prec != 2) {
        throw IoError("load_state: unknown precision tag");
    }
    LoadedState s;
    s.num_qubits = static_cast<int>(n);
    s.precision = static_cast<Precision>(prec);
    s.amplitudes.resize(std::size_t(1) << n);
    for (auto &a : s.amplitudes) {
        double pair[2];
        in.read(reinterpret_cast<char *>(pair), sizeof(pair));
        a = {pair[0], pair[1]};
    }
    if (!in) {
        throw IoError("load_state: truncated amplitude payload");
    }
    return s;
}

inline LoadedState load_state(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("load_state: cannot open '" + path + "'");
    }
    return load_state(f);
}

} // namespace vqcs
