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

// Exact gradients of expectation-value losses. The noiseless path runs a
// reverse sweep that re-derives intermediate states by applying gate
// inverses, so only two full-size working states are ever held. The noisy
// path runs the same sweep on the vectorized density matrix, where gates
// become U (x) conj(U) superoperators and channel superoperators are
// inverted numerically.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vqcs/circuit.hpp"
#include "vqcs/gates.hpp"
#include "vqcs/kernels.hpp"
#include "vqcs/linalg.hpp"
#include "vqcs/observables.hpp"
#include "vqcs/state.hpp"

namespace vqcs {

struct GradientResult {
    double loss = 0;
    std::vector<double> grads; // one per active parameter, traversal order
};

/// Optional introspection of a gradient call.
struct GradientDiagnostics {
    /// max |phi_end - initial state| after the reverse sweep; measures the
    /// accumulated inverse-application error.
    double reverse_residual = 0;
};

/// Condition-number limit above which a channel superoperator counts as
/// non-invertible for the noisy reverse sweep.
inline constexpr double kChannelConditionLimit = 1e12;

namespace detail {

template <typename T>
std::vector<const GateOp<T> *> flatten_gates_noiseless(const Circuit<T> &c,
                                                       const char *what) {
    if (c.has_channels()) {
        throw TypeError(std::string(what) +
                        ": circuit contains quantum channels; use the mixed-state "
                        "variant");
    }
    std::vector<const GateOp<T> *> gates;
    c.for_each_gate([&](const GateOp<T> &g) { gates.push_back(&g); });
    return gates;
}

template <typename T>
double max_abs_diff(std::span<const cplx<T>> a, std::span<const cplx<T>> b) {
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(cplx<double>(a[k]) - cplx<double>(b[k])));
    }
    return m;
}

} // namespace detail

/// Loss of a noiseless circuit: Re <s0| C^dag H C |s0>. Does not mutate s0.
template <typename T>
double loss_pure(const PauliOperator &op, const Circuit<T> &c,
                 const PureState<T> &s0, const ThreadConfig &cfg = {}) {
    if (c.has_channels()) {
        throw TypeError("loss_pure: circuit contains quantum channels");
    }
    PureState<T> s = s0;
    apply_circuit(c, s, cfg);
    return expectation(op, s, cfg).real();
}

/// Loss and exact gradient of a noiseless circuit via the reverse sweep:
/// forward to |Phi_M>, set |Psi> = H|Phi_M>, then per gate (last to first)
/// pull both states back through the inverse and take
/// grads[j] = 2 Re <Psi| dQ/dtheta_j |Phi_(j-1)>.
template <typename T>
GradientResult gradient_pure(const PauliOperator &op, const Circuit<T> &c,
                             const PureState<T> &s0, const ThreadConfig &cfg = {},
                             GradientDiagnostics *diag = nullptr) {
    const auto gates = detail::flatten_gates_noiseless(c, "gradient_pure");
    const int n = s0.num_qubits();
    detail::check_operator_fits(op, n, "gradient_pure");

    // Global parameter offsets in traversal order.
    std::vector<int> param_base(gates.size());
    int total_params = 0;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        param_base[i] = total_params;
        total_params += gates[i]->num_active_params();
    }

    PureState<T> phi = s0;
    for (const auto *g : gates) {
        apply_gate_fast(phi.amplitudes(), n, *g, cfg);
    }
    GradientResult result;
    if (total_params == 0) {
        result.loss = expectation(op, phi, cfg).real();
        if (diag) {
            diag->reverse_residual = 0;
        }
        return result;
    }

    PureState<T> psi = apply_operator(op, phi, cfg);
    result.loss = detail::dot(std::span<const cplx<T>>(phi.amplitudes()),
                              std::span<const cplx<T>>(psi.amplitudes()))
                      .real();
    result.grads.assign(total_params, 0.0);

    for (std::size_t i = gates.size(); i-- > 0;) {
        const GateOp<T> &g = *gates[i];
        const GateOp<T> inv = gate_inverse(g);
        if (!g.has_active_params()) {
            apply_gate_fast(phi.amplitudes(), n, inv, cfg);
            apply_gate_fast(psi.amplitudes(), n, inv, cfg);
            continue;
        }
        std::vector<cvector<T>> dmats;
        for (std::size_t p = 0; p < g.params.size(); ++p) {
            if (g.is_param[p]) {
                dmats.push_back(gate_derivative(g, static_cast<int>(p)));
            }
        }
        const auto accs = reverse_sweep_step(
            phi.amplitudes(), psi.amplitudes(), n, g.positions, inv.matrix,
            std::span<const cvector<T>>(dmats), cfg);
        for (std::size_t k = 0; k < accs.size(); ++k) {
            result.grads[param_base[i] + k] = 2.0 * accs[k].real();
        }
    }
    if (diag) {
        diag->reverse_residual = detail::max_abs_diff(
            std::span<const cplx<T>>(phi.amplitudes()), s0.amplitudes());
    }
    return result;
}

/// Loss of a (possibly noisy) circuit on a density matrix:
/// tr(H C(rho0)). Does not mutate dm0.
template <typename T>
double loss_mixed(const PauliOperator &op, const Circuit<T> &c,
                  const MixedState<T> &dm0, const ThreadConfig &cfg = {}) {
    detail::check_operator_fits(op, dm0.num_qubits(), "loss_mixed");
    MixedState<T> dm = dm0;
    apply_circuit(c, dm, cfg);
    return expectation(op, dm, cfg).real();
}

namespace detail {

/// Local matrix of the gate superoperator high = conj(B) on the bra bits,
/// low = A on the ket bits, matching positions (ket..., bra...).
template <typename T>
cvector<T> gate_superop_local(const cvector<T> &ket_matrix,
                              const cvector<T> &bra_matrix, std::size_t d) {
    return linalg::kron(bra_matrix, d, ket_matrix, d);
}

} // namespace detail

/// Loss and exact gradient of a noisy circuit through the vectorized
/// representation. Channels must have invertible superoperators; unitary
/// gates reverse through their adjoints without a linear solve.
template <typename T>
GradientResult gradient_mixed(const PauliOperator &op, const Circuit<T> &c,
                              const MixedState<T> &dm0,
                              const ThreadConfig &cfg = {},
                              GradientDiagnostics *diag = nullptr) {
    const int n = dm0.num_qubits();
    const int big_n = 2 * n;
    detail::check_operator_fits(op, n, "gradient_mixed");

    struct ElemRef {
        const GateOp<T> *gate = nullptr;
        const ChannelOp<T> *channel = nullptr;
    };
    std::vector<ElemRef> elems;
    c.for_each_element(
        [&](const GateOp<T> &g) { elems.push_back({&g, nullptr}); },
        [&](const ChannelOp<T> &ch) { elems.push_back({nullptr, &ch}); });

    std::vector<int> param_base(elems.size());
    int total_params = 0;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        param_base[i] = total_params;
        if (elems[i].gate) {
            total_params += elems[i].gate->num_active_params();
        }
    }

    // Forward pass on the vectorized density matrix.
    PureState<T> phi(unchecked,
                     cvector<T>(dm0.entries().begin(), dm0.entries().end()));
    auto apply_gate_both_sides = [&](PureState<T> &state, const GateOp<T> &ket_gate,
                                     const cvector<T> &bra_matrix,
                                     GateKind bra_kind) {
        apply_gate_fast(state.amplitudes(), big_n, ket_gate, cfg);
        GateOp<T> bra;
        bra.positions.reserve(ket_gate.positions.size());
        for (int p : ket_gate.positions) {
            bra.positions.push_back(p + n);
        }
        bra.matrix = bra_matrix;
        bra.kind = bra_kind;
        apply_gate_fast(state.amplitudes(), big_n, bra, cfg);
    };
    for (const auto &e : elems) {
        if (e.gate) {
            const cvector<T> braM = linalg::conjugated(e.gate->matrix);
            apply_gate_both_sides(phi, *e.gate, braM,
                                  braM == e.gate->matrix ? e.gate->kind
                                                         : GateKind::Generic);
        } else {
            const Superoperator<T> s = channel_superoperator(*e.channel);
            const auto positions = s.bound_positions(n);
            apply_matrix(phi.amplitudes(), big_n, positions, s.matrix, cfg);
        }
    }

    // <<Psi_M| = <<I| H as a ket: apply the adjoint operator to |I>>.
    PureState<T> psi = [&] {
        PureState<T> ident(unchecked, cvector<T>(dm0.size()));
        const std::uint64_t dim = dm0.dim();
        for (std::uint64_t k = 0; k < dim; ++k) {
            ident[k + k * dim] = cplx<T>(1);
        }
        return apply_operator(op.conjugated(), ident, cfg);
    }();

    GradientResult result;
    result.loss =
        detail::dot(std::span<const cplx<T>>(psi.amplitudes()),
                    std::span<const cplx<T>>(phi.amplitudes()))
            .real();
    result.grads.assign(total_params, 0.0);
    if (total_params == 0) {
        if (diag) {
            diag->reverse_residual = 0;
        }
        return result;
    }

    for (std::size_t i = elems.size(); i-- > 0;) {
        if (elems[i].channel != nullptr) {
            const ChannelOp<T> &ch = *elems[i].channel;
            const Superoperator<T> s = channel_superoperator(ch);
            const std::size_t d = s.dim();
            const auto lu = linalg::lu_inverse(s.matrix, d);
            if (lu.singular || lu.condition > kChannelConditionLimit) {
                throw NonInvertibleChannelError(
                    std::string("gradient_mixed: the superoperator of channel '") +
                    channel_kind_name(ch.kind) + "' on qubit " +
                    std::to_string(ch.positions[0]) + " (element " +
                    std::to_string(i + 1) +
                    ") is singular or too ill-conditioned to invert");
            }
            const auto positions = s.bound_positions(n);
            apply_matrix(phi.amplitudes(), big_n, positions, lu.inverse, cfg);
            apply_matrix(psi.amplitudes(), big_n, positions,
                         linalg::adjoint(s.matrix, d), cfg);
            continue;
        }
        const GateOp<T> &g = *elems[i].gate;
        const GateOp<T> inv = gate_inverse(g);
        const cvector<T> inv_bra = linalg::conjugated(inv.matrix);
        if (!g.has_active_params()) {
            // S^-1 = S^dag = U^dag (x) conj(U^dag) for unitary gates.
            apply_gate_both_sides(phi, inv, inv_bra,
                                  inv_bra == inv.matrix ? inv.kind
                                                        : GateKind::Generic);
            apply_gate_both_sides(psi, inv, inv_bra,
                                  inv_bra == inv.matrix ? inv.kind
                                                        : GateKind::Generic);
            continue;
        }
        const std::size_t d = g.dim();
        const cvector<T> inv_local = detail::gate_superop_local(inv.matrix, inv_bra, d);
        std::vector<cvector<T>> dmats;
        for (std::size_t p = 0; p < g.params.size(); ++p) {
            if (!g.is_param[p]) {
                continue;
            }
            // dS = dU (x) conj(U) + U (x) conj(dU).
            const cvector<T> du = gate_derivative(g, static_cast<int>(p));
            cvector<T> ds = detail::gate_superop_local(du, linalg::conjugated(g.matrix), d);
            const cvector<T> second =
                detail::gate_superop_local(g.matrix, linalg::conjugated(du), d);
            for (std::size_t k = 0; k < ds.size(); ++k) {
                ds[k] += second[k];
            }
            dmats.push_back(std::move(ds));
        }
        std::vector<int> positions = g.positions;
        for (int p : g.positions) {
            positions.push_back(p + n);
        }
        const auto accs = reverse_sweep_step(
            phi.amplitudes(), psi.amplitudes(), big_n, positions, inv_local,
            std::span<const cvector<T>>(dmats), cfg);
        for (std::size_t k = 0; k < accs.size(); ++k) {
            result.grads[param_base[i] + k] = accs[k].real();
        }
    }
    if (diag) {
        diag->reverse_residual = detail::max_abs_diff(
            std::span<const cplx<T>>(phi.amplitudes()), dm0.entries());
    }
    return result;
}

/// Central finite differences of an arbitrary loss evaluator over the
/// circuit's active parameters; the parameters are restored afterwards.
template <typename T, typename LossFn>
std::vector<double> finite_difference_gradient(LossFn &&loss, Circuit<T> &c,
                                               double h) {
    if (h <= 0) {
        throw DomainError("finite_difference_gradient: step must be positive");
    }
    const std::vector<double> params = active_parameters(c);
    std::vector<double> grads(params.size());
    std::vector<double> shifted = params;
    for (std::size_t j = 0; j < params.size(); ++j) {
        shifted[j] = params[j] + h;
        reset_parameters(c, shifted);
        const double up = loss(c);
        shifted[j] = params[j] - h;
        reset_parameters(c, shifted);
        const double down = loss(c);
        grads[j] = (up - down) / (2 * h);
        shifted[j] = params[j];
    }
    reset_parameters(c, params);
    return grads;
}

} // namespace vqcs
