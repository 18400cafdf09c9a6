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

// The circuit container and whole-circuit operations: application,
// parameter traversal, gate fusion and projective measurement.

#pragma once

#include <cctype>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vqcs/gates.hpp"
#include "vqcs/kernels.hpp"
#include "vqcs/state.hpp"

namespace vqcs {

/// Ordered sequence of gates, channels and nested circuits. Elements apply
/// in order; parameter traversal is depth-first in element order.
template <typename T> class Circuit {
  public:
    using Element = std::variant<GateOp<T>, ChannelOp<T>, Circuit<T>>;

    Circuit() = default;
    Circuit(std::initializer_list<Element> elems) : elements_(elems) {}

    void push_back(GateOp<T> g) { elements_.emplace_back(std::move(g)); }
    void push_back(ChannelOp<T> c) { elements_.emplace_back(std::move(c)); }
    void push_back(Circuit<T> sub) { elements_.emplace_back(std::move(sub)); }

    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    const std::vector<Element> &elements() const { return elements_; }
    std::vector<Element> &elements() { return elements_; }

    bool has_channels() const {
        for (const auto &e : elements_) {
            if (std::holds_alternative<ChannelOp<T>>(e)) {
                return true;
            }
            if (const auto *sub = std::get_if<Circuit<T>>(&e)) {
                if (sub->has_channels()) {
                    return true;
                }
            }
        }
        return false;
    }

    /// Depth-first visit of every gate (const).
    template <typename F> void for_each_gate(F &&f) const {
        for (const auto &e : elements_) {
            if (const auto *g = std::get_if<GateOp<T>>(&e)) {
                f(*g);
            } else if (const auto *sub = std::get_if<Circuit<T>>(&e)) {
                sub->for_each_gate(f);
            }
        }
    }

    /// Depth-first visit of every gate (mutable).
    template <typename F> void for_each_gate_mut(F &&f) {
        for (auto &e : elements_) {
            if (auto *g = std::get_if<GateOp<T>>(&e)) {
                f(*g);
            } else if (auto *sub = std::get_if<Circuit<T>>(&e)) {
                sub->for_each_gate_mut(f);
            }
        }
    }

    /// Depth-first visit of every element: f(const GateOp&) or
    /// f(const ChannelOp&).
    template <typename G, typename C> void for_each_element(G &&on_gate, C &&on_channel) const {
        for (const auto &e : elements_) {
            if (const auto *g = std::get_if<GateOp<T>>(&e)) {
                on_gate(*g);
            } else if (const auto *c = std::get_if<ChannelOp<T>>(&e)) {
                on_channel(*c);
            } else {
                std::get<Circuit<T>>(e).for_each_element(on_gate, on_channel);
            }
        }
    }

  private:
    std::vector<Element> elements_;
};

/// Applies every element in order to a pure state, in place. Channels are
/// rejected: they need a density matrix.
template <typename T>
void apply_circuit(const Circuit<T> &c, PureState<T> &state,
                   const ThreadConfig &cfg = {}) {
    c.for_each_element(
        [&](const GateOp<T> &g) {
            apply_gate_fast(state.amplitudes(), state.num_qubits(), g, cfg);
        },
        [&](const ChannelOp<T> &) -> void {
            throw TypeError("apply_circuit: a quantum channel cannot act on a "
                            "pure state; use a MixedState");
        });
}

template <typename T>
void apply_circuit(const Circuit<T> &c, MixedState<T> &dm,
                   const ThreadConfig &cfg = {}) {
    c.for_each_element(
        [&](const GateOp<T> &g) { apply_gate_mixed(dm, g, cfg); },
        [&](const ChannelOp<T> &ch) { apply_channel(dm, ch, cfg); });
}

/// Out-of-place variants: the input state is left untouched.
template <typename T>
PureState<T> apply_circuit_copy(const Circuit<T> &c, const PureState<T> &state,
                                const ThreadConfig &cfg = {}) {
    PureState<T> out = state;
    apply_circuit(c, out, cfg);
    return out;
}

template <typename T>
MixedState<T> apply_circuit_copy(const Circuit<T> &c, const MixedState<T> &dm,
                                 const ThreadConfig &cfg = {}) {
    MixedState<T> out = dm;
    apply_circuit(c, out, cfg);
    return out;
}

/// Values of the variational parameters in traversal order.
template <typename T> std::vector<double> active_parameters(const Circuit<T> &c) {
    std::vector<double> values;
    c.for_each_gate([&](const GateOp<T> &g) {
        for (std::size_t i = 0; i < g.params.size(); ++i) {
            if (g.is_param[i]) {
                values.push_back(g.params[i]);
            }
        }
    });
    return values;
}

/// Replaces the variational parameters in traversal order and rebuilds the
/// affected gate matrices from their closed forms.
template <typename T>
void reset_parameters(Circuit<T> &c, std::span<const double> values) {
    std::size_t cursor = 0;
    c.for_each_gate_mut([&](GateOp<T> &g) {
        bool touched = false;
        for (std::size_t i = 0; i < g.params.size(); ++i) {
            if (g.is_param[i]) {
                if (cursor >= values.size()) {
                    throw ShapeError("reset_parameters: too few values");
                }
                g.params[i] = values[cursor++];
                touched = true;
            }
        }
        if (touched) {
            rebuild_matrix(g);
        }
    });
    if (cursor != values.size()) {
        throw ShapeError("reset_parameters: expected " + std::to_string(cursor) +
                         " values, got " + std::to_string(values.size()));
    }
}

namespace detail {

/// Embeds a single-qubit matrix into the 4x4 local space of a two-qubit
/// gate, at local bit 0 or 1.
template <typename T>
cvector<T> embed_1q_in_2q(const cvector<T> &m, int local_bit) {
    const cvector<T> eye = linalg::identity<T>(2);
    return local_bit == 0 ? linalg::kron(eye, std::size_t(2), m, std::size_t(2))
                          : linalg::kron(m, std::size_t(2), eye, std::size_t(2));
}

} // namespace detail

/// Absorbs single-qubit gates into adjacent two-qubit gates (single
/// left-to-right pass; a gate sitting between two eligible neighbours
/// merges into the later one). Every surviving gate becomes a
/// non-parametric generic gate. Noiseless circuits only.
template <typename T> Circuit<T> fuse_gates(const Circuit<T> &c) {
    if (c.has_channels()) {
        throw UnsupportedError("fuse_gates: circuit contains quantum channels");
    }
    std::vector<GateOp<T>> flat;
    c.for_each_gate([&](const GateOp<T> &g) { flat.push_back(g); });

    const std::size_t count = flat.size();
    auto touches = [](const GateOp<T> &g, int q) {
        for (int p : g.positions) {
            if (p == q) {
                return true;
            }
        }
        return false;
    };

    // merge_into[i] = index of the two-qubit gate that absorbs gate i.
    std::vector<std::ptrdiff_t> merge_into(count, -1);
    for (std::size_t i = 0; i < count; ++i) {
        if (flat[i].num_targets() != 1) {
            continue;
        }
        const int q = flat[i].positions[0];
        std::ptrdiff_t prev = -1, next = -1;
        for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - 1; j >= 0; --j) {
            if (touches(flat[j], q)) {
                prev = j;
                break;
            }
        }
        for (std::size_t j = i + 1; j < count; ++j) {
            if (touches(flat[j], q)) {
                next = static_cast<std::ptrdiff_t>(j);
                break;
            }
        }
        const bool next_ok = next >= 0 && flat[next].num_targets() == 2;
        const bool prev_ok = prev >= 0 && flat[prev].num_targets() == 2;
        if (next_ok) {
            merge_into[i] = next;
        } else if (prev_ok) {
            merge_into[i] = prev;
        }
    }

    Circuit<T> fused;
    for (std::size_t i = 0; i < count; ++i) {
        if (merge_into[i] >= 0) {
            continue;
        }
        GateOp<T> out;
        out.positions = flat[i].positions;
        out.matrix = flat[i].matrix;
        if (flat[i].num_targets() == 2) {
            const std::size_t j = i;
            // Earlier mergers multiply from the right (they apply first),
            // later ones from the left.
            for (std::size_t k = 0; k < count; ++k) {
                if (merge_into[k] != static_cast<std::ptrdiff_t>(j)) {
                    continue;
                }
                const int q = flat[k].positions[0];
                const int bit = (q == out.positions[0]) ? 0 : 1;
                const cvector<T> embedded = detail::embed_1q_in_2q(flat[k].matrix, bit);
                out.matrix = (k < j) ? linalg::matmul(out.matrix, embedded, 4)
                                     : linalg::matmul(embedded, out.matrix, 4);
            }
        }
        fused.push_back(std::move(out));
    }
    return fused;
}

struct MeasurementOutcome {
    int outcome;        // 0 or 1
    double probability; // exact probability of the drawn outcome
};

namespace detail {

inline double clamp_probability(double p) {
    return p < 0 ? 0.0 : (p > 1 ? 1.0 : p);
}

/// Uniform double in [0, 1) from the top 53 bits of the stream.
inline double uniform_unit(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 &default_measure_rng() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    return rng;
}

} // namespace detail

/// Measures qubit i, collapsing the state in place. The outcome is drawn
/// from the caller-supplied stream; the returned probability is exact.
template <typename T>
MeasurementOutcome measure(PureState<T> &state, int qubit, std::mt19937_64 &rng) {
    const int n = state.num_qubits();
    if (qubit < 1 || qubit > n) {
        throw IndexError("measure: qubit " + std::to_string(qubit) +
                         " does not fit a " + std::to_string(n) + "-qubit state");
    }
    const std::uint64_t mask = std::uint64_t(1) << (qubit - 1);
    auto amps = state.amplitudes();
    double p1 = 0;
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        if (k & mask) {
            p1 += std::norm(cplx<double>(amps[k]));
        }
    }
    p1 = detail::clamp_probability(p1);
    const double p0 = detail::clamp_probability(1.0 - p1);
    if (p0 == 0 && p1 == 0) {
        throw DegenerateStateError("measure: both outcome probabilities vanish");
    }
    const int outcome = detail::uniform_unit(rng) < p1 ? 1 : 0;
    const double p = outcome == 1 ? p1 : p0;
    if (p == 0) {
        throw DegenerateStateError("measure: drawn outcome has zero probability");
    }
    const T scale = static_cast<T>(1.0 / std::sqrt(p));
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        if (((k & mask) != 0) == (outcome == 1)) {
            amps[k] *= scale;
        } else {
            amps[k] = cplx<T>(0);
        }
    }
    return {outcome, p};
}

template <typename T>
MeasurementOutcome measure(MixedState<T> &dm, int qubit, std::mt19937_64 &rng) {
    const int n = dm.num_qubits();
    if (qubit < 1 || qubit > n) {
        throw IndexError("measure: qubit " + std::to_string(qubit) +
                         " does not fit a " + std::to_string(n) + "-qubit state");
    }
    const std::uint64_t mask = std::uint64_t(1) << (qubit - 1);
    const std::uint64_t dim = dm.dim();
    double p1 = 0;
    for (std::uint64_t k = 0; k < dim; ++k) {
        if (k & mask) {
            p1 += cplx<double>(dm.at(k, k)).real();
        }
    }
    p1 = detail::clamp_probability(p1);
    const double p0 = detail::clamp_probability(1.0 - p1);
    if (p0 == 0 && p1 == 0) {
        throw DegenerateStateError("measure: both outcome probabilities vanish");
    }
    const int outcome = detail::uniform_unit(rng) < p1 ? 1 : 0;
    const double p = outcome == 1 ? p1 : p0;
    if (p == 0) {
        throw DegenerateStateError("measure: drawn outcome has zero probability");
    }
    const T scale = static_cast<T>(1.0 / p);
    auto entries = dm.entries();
    for (std::uint64_t col = 0; col < dim; ++col) {
        const bool col_keep = ((col & mask) != 0) == (outcome == 1);
        for (std::uint64_t row = 0; row < dim; ++row) {
            const bool keep = col_keep && (((row & mask) != 0) == (outcome == 1));
            auto &e = entries[row + col * dim];
            e = keep ? e * scale : cplx<T>(0);
        }
    }
    return {outcome, p};
}

template <typename T>
MeasurementOutcome measure(PureState<T> &state, int qubit) {
    return measure(state, qubit, detail::default_measure_rng());
}

template <typename T>
MeasurementOutcome measure(MixedState<T> &dm, int qubit) {
    return measure(dm, qubit, detail::default_measure_rng());
}

// ---- line-oriented circuit interchange ----
//
//   GATE <kind> <p1[,p2,...]> [param1,...] [flag1,...]
//   CHANNEL <kind> <pos> <param>
//
// Blank lines and lines starting with '#' are skipped. Nested circuits are
// written flattened; generic matrix-valued gates have no text form.

namespace detail {

inline std::string join_csv(const std::vector<int> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += std::to_string(v[i]);
    }
    return s;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Fn>
void split_csv(const std::string &s, const char *what, Fn &&per_token) {
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string tok =
            s.substr(start, comma == std::string::npos ? comma : comma - start);
        if (tok.empty()) {
            throw UsageError(std::string("circuit text: empty token in ") + what);
        }
        per_token(tok);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
}

inline GateKind parse_gate_kind(const std::string &name) {
    for (GateKind k :
         {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S,
          GateKind::T, GateKind::SqrtX, GateKind::SqrtY, GateKind::Swap,
          GateKind::ISwap, GateKind::CZ, GateKind::Cnot, GateKind::Toffoli,
          GateKind::Fredkin, GateKind::Rx, GateKind::Ry, GateKind::Rz,
          GateKind::CRx, GateKind::CRy, GateKind::CRz, GateKind::Fsim}) {
        std::string cand = gate_kind_name(k);
        std::string lhs = name;
        for (auto &ch : cand) {
            ch = static_cast<char>(std::tolower(ch));
        }
        for (auto &ch : lhs) {
            ch = static_cast<char>(std::tolower(ch));
        }
        if (cand == lhs) {
            return k;
        }
    }
    throw UsageError("circuit text: unknown gate kind '" + name + "'");
}

inline ChannelKind parse_channel_kind(const std::string &name) {
    for (ChannelKind k : {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping,
                          ChannelKind::Depolarizing}) {
        std::string cand = channel_kind_name(k);
        std::string lhs = name;
        for (auto &ch : cand) {
            ch = static_cast<char>(std::tolower(ch));
        }
        for (auto &ch : lhs) {
            ch = static_cast<char>(std::tolower(ch));
        }
        if (cand == lhs) {
            return k;
        }
    }
    throw UsageError("circuit text: unknown channel kind '" + name + "'");
}

} // namespace detail

template <typename T> std::string format_circuit(const Circuit<T> &c) {
    std::string out;
    c.for_each_element(
        [&](const GateOp<T> &g) {
            if (g.kind == GateKind::Generic) {
                throw UnsupportedError(
                    "format_circuit: generic matrix gates have no text form");
            }
            out += "GATE ";
            out += gate_kind_name(g.kind);
            out += ' ';
            out += detail::join_csv(g.positions);
            if (!g.params.empty()) {
                out += ' ';
                for (std::size_t i = 0; i < g.params.size(); ++i) {
                    if (i) {
                        out += ',';
                    }
                    out += detail::format_double(g.params[i]);
                }
                out += ' ';
                for (std::size_t i = 0; i < g.is_param.size(); ++i) {
                    if (i) {
                        out += ',';
                    }
                    out += g.is_param[i] ? '1' : '0';
                }
            }
            out += '\n';
        },
        [&](const ChannelOp<T> &ch) {
            if (ch.kind == ChannelKind::Generic) {
                throw UnsupportedError(
                    "format_circuit: generic channels have no text form");
            }
            out += "CHANNEL ";
            out += channel_kind_name(ch.kind);
            out += ' ';
            out += detail::join_csv(ch.positions);
            out += ' ';
            out += detail::format_double(ch.noise_params.begin()->second);
            out += '\n';
        });
    return out;
}

template <typename T = double> Circuit<T> parse_circuit(std::string_view text) {
    Circuit<T> c;
    std::istringstream lines{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head[0] == '#') {
            continue;
        }
        for (auto &ch : head) {
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        }
        auto fail = [&](const std::string &msg) -> void {
            throw UsageError("circuit text line " + std::to_string(lineno) + ": " +
                             msg);
        };
        if (head == "GATE") {
            std::string kind_name, pos_csv, param_csv, flag_csv;
            if (!(ls >> kind_name >> pos_csv)) {
                fail("expected GATE <kind> <positions>");
            }
            const GateKind kind = detail::parse_gate_kind(kind_name);
            std::vector<int> positions;
            detail::split_csv(pos_csv, "positions",
                              [&](const std::string &t) { positions.push_back(std::stoi(t)); });
            if (detail::param_arity(kind) == 0) {
                c.push_back(standard_gate<T>(kind, std::move(positions)));
                continue;
            }
            if (!(ls >> param_csv)) {
                fail("parametric gate needs parameter values");
            }
            std::vector<double> params;
            detail::split_csv(param_csv, "parameters",
                              [&](const std::string &t) { params.push_back(std::stod(t)); });
            std::vector<bool> flags(params.size(), false);
            if (ls >> flag_csv) {
                flags.clear();
                detail::split_csv(flag_csv, "flags", [&](const std::string &t) {
                    if (t != "0" && t != "1") {
                        fail("flags must be 0 or 1");
                    }
                    flags.push_back(t == "1");
                });
            }
            c.push_back(parametric_gate<T>(kind, std::move(positions),
                                           std::move(params), std::move(flags)));
        } else if (head == "CHANNEL") {
            std::string kind_name;
            int pos = 0;
            double param = 0;
            if (!(ls >> kind_name >> pos >> param)) {
                fail("expected CHANNEL <kind> <pos> <param>");
            }
            c.push_back(standard_channel<T>(detail::parse_channel_kind(kind_name),
                                            pos, param));
        } else {
            fail("unknown directive '" + head + "'");
        }
    }
    return c;
}

} // namespace vqcs
