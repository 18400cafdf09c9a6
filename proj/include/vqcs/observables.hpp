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

// Weighted sums of Pauli strings, expectation values on pure and mixed
// states, and the Heisenberg-chain builder used by the benchmarks.

#pragma once

#include <cctype>
#include <complex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vqcs/circuit.hpp"
#include "vqcs/gates.hpp"
#include "vqcs/kernels.hpp"
#include "vqcs/state.hpp"

namespace vqcs {

enum class PauliLabel : char { X = 'x', Y = 'y', Z = 'z' };

/// One Pauli string: a product of single-qubit x/y/z factors (identity on
/// every other qubit) with a complex weight.
struct PauliTerm {
    std::vector<std::pair<int, PauliLabel>> factors; // distinct qubit indices
    std::complex<double> coeff{1.0, 0.0};

    PauliTerm() = default;
    PauliTerm(std::vector<std::pair<int, PauliLabel>> f, std::complex<double> c)
        : factors(std::move(f)), coeff(c) {
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (factors[i].first < 1) {
                throw ValidityError("PauliTerm: qubit indices must be >= 1");
            }
            for (std::size_t j = i + 1; j < factors.size(); ++j) {
                if (factors[i].first == factors[j].first) {
                    throw ValidityError("PauliTerm: duplicate qubit index " +
                                        std::to_string(factors[i].first));
                }
            }
        }
    }

    int max_qubit() const {
        int m = 0;
        for (const auto &[q, l] : factors) {
            m = std::max(m, q);
        }
        return m;
    }
};

inline PauliLabel parse_pauli_label(char c) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'x':
        return PauliLabel::X;
    case 'y':
        return PauliLabel::Y;
    case 'z':
        return PauliLabel::Z;
    default:
        throw ValidityError(std::string("unknown Pauli label '") + c + "'");
    }
}

/// A sum of Pauli strings. Duplicate strings are allowed and simply add.
class PauliOperator {
  public:
    PauliOperator() = default;
    explicit PauliOperator(std::vector<PauliTerm> terms) : terms_(std::move(terms)) {}

    void add_term(PauliTerm t) { terms_.push_back(std::move(t)); }
    const std::vector<PauliTerm> &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    int max_qubit() const {
        int m = 0;
        for (const auto &t : terms_) {
            m = std::max(m, t.max_qubit());
        }
        return m;
    }

    /// Term-wise complex conjugate (coefficients conjugated).
    PauliOperator conjugated() const {
        PauliOperator out;
        out.terms_ = terms_;
        for (auto &t : out.terms_) {
            t.coeff = std::conj(t.coeff);
        }
        return out;
    }

  private:
    std::vector<PauliTerm> terms_;
};

/// Nearest-neighbour Heisenberg chain:
///   sum_i hz z_i + J sum_i (x_i x_{i+1} + y_i y_{i+1} + z_i z_{i+1}).
inline PauliOperator heisenberg_1d(int length, double hz = 1.0, double J = 1.0) {
    if (length < 1) {
        throw DomainError("heisenberg_1d: length must be >= 1");
    }
    PauliOperator op;
    for (int i = 1; i <= length; ++i) {
        op.add_term(PauliTerm({{i, PauliLabel::Z}}, hz));
    }
    for (int i = 1; i < length; ++i) {
        for (PauliLabel l : {PauliLabel::X, PauliLabel::Y, PauliLabel::Z}) {
            op.add_term(PauliTerm({{i, l}, {i + 1, l}}, J));
        }
    }
    return op;
}

namespace detail {

inline GateKind pauli_gate_kind(PauliLabel l) {
    switch (l) {
    case PauliLabel::X:
        return GateKind::X;
    case PauliLabel::Y:
        return GateKind::Y;
    case PauliLabel::Z:
        return GateKind::Z;
    }
    return GateKind::X;
}

inline void check_operator_fits(const PauliOperator &op, int n, const char *what) {
    if (op.max_qubit() > n) {
        throw IndexError(std::string(what) + ": operator acts on qubit " +
                         std::to_string(op.max_qubit()) + " but the state has " +
                         std::to_string(n) + " qubits");
    }
}

/// Applies the factors of one term to a scratch buffer via the single-qubit
/// gate kernels. `shift` relocates factor qubits (used for the ket half of
/// a vectorized density matrix).
template <typename T>
void apply_term_factors(const PauliTerm &t, std::span<cplx<T>> scratch, int n,
                        const ThreadConfig &cfg, int shift = 0) {
    for (const auto &[q, l] : t.factors) {
        const GateOp<T> g = standard_gate<T>(pauli_gate_kind(l), {q + shift});
        apply_gate_fast(scratch, n, g, cfg);
    }
}

template <typename T>
cplx<double> dot(std::span<const cplx<T>> a, std::span<const cplx<T>> b) {
    cplx<double> acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc += std::conj(cplx<double>(a[k])) * cplx<double>(b[k]);
    }
    return acc;
}

} // namespace detail

/// <psi| H |psi>, term by term; one scratch state is reused across terms.
template <typename T>
std::complex<double> expectation(const PauliOperator &op, const PureState<T> &state,
                                 const ThreadConfig &cfg = {}) {
    detail::check_operator_fits(op, state.num_qubits(), "expectation");
    PureState<T> scratch(unchecked, cvector<T>(state.size()));
    std::complex<double> acc = 0;
    for (const auto &t : op.terms()) {
        std::copy(state.amplitudes().begin(), state.amplitudes().end(),
                  scratch.amplitudes().begin());
        detail::apply_term_factors(t, scratch.amplitudes(), state.num_qubits(), cfg);
        acc += t.coeff * detail::dot(state.amplitudes(),
                                     std::span<const cplx<T>>(scratch.amplitudes()));
    }
    return acc;
}

/// tr(H rho) through the vectorized state: H acts on the ket indices of a
/// scratch copy, then the diagonal is summed against the identity bra.
template <typename T>
std::complex<double> expectation(const PauliOperator &op, const MixedState<T> &dm,
                                 const ThreadConfig &cfg = {}) {
    detail::check_operator_fits(op, dm.num_qubits(), "expectation");
    const int n = dm.num_qubits();
    const std::uint64_t dim = dm.dim();
    PureState<T> scratch(unchecked, cvector<T>(dm.size()));
    std::complex<double> acc = 0;
    for (const auto &t : op.terms()) {
        std::copy(dm.entries().begin(), dm.entries().end(),
                  scratch.amplitudes().begin());
        detail::apply_term_factors(t, scratch.amplitudes(), 2 * n, cfg);
        std::complex<double> tr = 0;
        for (std::uint64_t k = 0; k < dim; ++k) {
            tr += cplx<double>(scratch[k + k * dim]);
        }
        acc += t.coeff * tr;
    }
    return acc;
}

/// H |psi>, accumulated term by term. The result is generally unnormalized.
template <typename T>
PureState<T> apply_operator(const PauliOperator &op, const PureState<T> &state,
                            const ThreadConfig &cfg = {}) {
    detail::check_operator_fits(op, state.num_qubits(), "apply_operator");
    PureState<T> out(unchecked, cvector<T>(state.size()));
    {
        PureState<T> scratch(unchecked, cvector<T>(state.size()));
        auto outs = out.amplitudes();
        for (const auto &t : op.terms()) {
            std::copy(state.amplitudes().begin(), state.amplitudes().end(),
                      scratch.amplitudes().begin());
            detail::apply_term_factors(t, scratch.amplitudes(), state.num_qubits(),
                                       cfg);
            const cplx<T> w = static_cast<cplx<T>>(t.coeff);
            const auto scr = scratch.amplitudes();
            for (std::size_t k = 0; k < outs.size(); ++k) {
                outs[k] += w * scr[k];
            }
        }
    }
    return out;
}

// ---- operator interchange: one term per line ----
//
//   TERM <coeff_re> <coeff_im> <qubit>:<label> [<qubit>:<label> ...]

inline std::string format_operator(const PauliOperator &op) {
    std::string out;
    for (const auto &t : op.terms()) {
        out += "TERM ";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g %.17g", t.coeff.real(),
                      t.coeff.imag());
        out += buf;
        for (const auto &[q, l] : t.factors) {
            out += ' ';
            out += std::to_string(q);
            out += ':';
            out += static_cast<char>(l);
        }
        out += '\n';
    }
    return out;
}

inline PauliOperator parse_operator(std::string_view text) {
    PauliOperator op;
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
        if (head != "TERM") {
            throw UsageError("operator text line " + std::to_string(lineno) +
                             ": expected TERM");
        }
        double re = 0, im = 0;
        if (!(ls >> re >> im)) {
            throw UsageError("operator text line " + std::to_string(lineno) +
                             ": expected coefficient re and im");
        }
        std::vector<std::pair<int, PauliLabel>> factors;
        std::string tok;
        while (ls >> tok) {
            const std::size_t colon = tok.find(':');
            if (colon == std::string::npos || colon + 2 != tok.size()) {
                throw UsageError("operator text line " + std::to_string(lineno) +
                                 ": factor must look like 2:z");
            }
            factors.emplace_back(std::stoi(tok.substr(0, colon)),
                                 parse_pauli_label(tok[colon + 1]));
        }
        op.add_term(PauliTerm(std::move(factors), {re, im}));
    }
    return op;
}

} // namespace vqcs
