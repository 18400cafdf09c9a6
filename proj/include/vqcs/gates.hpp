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

// Unitary gates (fixed and parametric), quantum channels, their derivative
// and inverse matrices, and storage-order conversion.
//
// Gate matrices use the same convention as the states: the first listed
// position is the least significant bit of the local row/column index, and
// the matrix is stored column-major. Textbook matrices written with the
// first qubit as the most significant bit can be converted with
// row_major_to_column_major().

#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "vqcs/errors.hpp"
#include "vqcs/linalg.hpp"
#include "vqcs/types.hpp"

namespace vqcs {

enum class GateKind {
    Generic,
    X,
    Y,
    Z,
    H,
    S,
    T,
    SqrtX,
    SqrtY,
    Swap,
    ISwap,
    CZ,
    Cnot,
    Toffoli,
    Fredkin,
    Rx,
    Ry,
    Rz,
    CRx,
    CRy,
    CRz,
    Fsim,
};

enum class ChannelKind {
    Generic,
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
};

const char *gate_kind_name(GateKind kind);
const char *channel_kind_name(ChannelKind kind);

namespace detail {

inline void check_positions(const std::vector<int> &positions, const char *what) {
    if (positions.empty()) {
        throw ShapeError(std::string(what) + ": needs at least one position");
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] < 1) {
            throw ValidityError(std::string(what) + ": positions must be >= 1");
        }
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (positions[i] == positions[j]) {
                throw ValidityError(std::string(what) + ": duplicate position " +
                                    std::to_string(positions[i]));
            }
        }
    }
}

inline std::size_t checked_gate_dim(std::size_t matrix_size, std::size_t m,
                                    const char *what) {
    const std::size_t d = std::size_t(1) << m;
    if (matrix_size != d * d) {
        throw ShapeError(std::string(what) + ": matrix size " +
                         std::to_string(matrix_size) + " does not match " +
                         std::to_string(m) + " qubit position(s)");
    }
    return d;
}

} // namespace detail

/// A unitary operation on 1..few qubits.
template <typename T> struct GateOp {
    std::vector<int> positions;
    cvector<T> matrix; // column-major, dim = 2^positions.size()
    GateKind kind = GateKind::Generic;
    std::vector<double> params;
    std::vector<bool> is_param;

    int num_targets() const { return static_cast<int>(positions.size()); }
    std::size_t dim() const { return std::size_t(1) << positions.size(); }
    bool has_active_params() const {
        for (bool b : is_param) {
            if (b) {
                return true;
            }
        }
        return false;
    }
    int num_active_params() const {
        int c = 0;
        for (bool b : is_param) {
            c += b ? 1 : 0;
        }
        return c;
    }
};

/// A quantum channel given by its Kraus operators.
template <typename T> struct ChannelOp {
    std::vector<int> positions;
    std::vector<cvector<T>> kraus;
    ChannelKind kind = ChannelKind::Generic;
    std::map<std::string, double> noise_params;

    int num_targets() const { return static_cast<int>(positions.size()); }
    std::size_t dim() const { return std::size_t(1) << positions.size(); }
};

/// The 4^m x 4^m matrix acting on vectorized density matrices, equivalent
/// to a 2m-qubit gate on the ket positions and their bra mirrors.
template <typename T> struct Superoperator {
    std::vector<int> ket_positions;
    cvector<T> matrix; // column-major, dim = 4^ket_positions.size()

    std::size_t dim() const { return std::size_t(1) << (2 * ket_positions.size()); }
    /// Positions in a 2n-qubit pseudo state: ket qubits then bra mirrors.
    std::vector<int> bound_positions(int num_qubits) const {
        std::vector<int> p = ket_positions;
        for (int q : ket_positions) {
            p.push_back(q + num_qubits);
        }
        return p;
    }
};

/// Builds a generic gate from a column-major unitary matrix.
template <typename T>
GateOp<T> make_gate(std::vector<int> positions, cvector<T> matrix) {
    detail::check_positions(positions, "make_gate");
    const std::size_t d =
        detail::checked_gate_dim(matrix.size(), positions.size(), "make_gate");
    if (linalg::unitarity_defect(matrix, d) > 1e-8) {
        throw ValidityError("make_gate: matrix is not unitary within 1e-8");
    }
    GateOp<T> g;
    g.positions = std::move(positions);
    g.matrix = std::move(matrix);
    return g;
}

namespace detail {

template <typename T> cvector<T> pauli_x() {
    return {0, 1, 1, 0};
}
template <typename T> cvector<T> pauli_y() {
    using C = cplx<T>;
    return {C(0), C(0, 1), C(0, -1), C(0)};
}
template <typename T> cvector<T> pauli_z() {
    return {1, 0, 0, -1};
}

template <typename T> cvector<T> fixed_gate_matrix(GateKind kind) {
    using C = cplx<T>;
    const T isq = static_cast<T>(std::numbers::sqrt2 / 2);
    switch (kind) {
    case GateKind::X:
        return pauli_x<T>();
    case GateKind::Y:
        return pauli_y<T>();
    case GateKind::Z:
        return pauli_z<T>();
    case GateKind::H:
        return {C(isq), C(isq), C(isq), C(-isq)};
    case GateKind::S:
        return {C(1), C(0), C(0), C(0, 1)};
    case GateKind::T:
        return {C(1), C(0), C(0), C(isq, isq)};
    case GateKind::SqrtX:
        return {C(T(0.5), T(0.5)), C(T(0.5), T(-0.5)), C(T(0.5), T(-0.5)),
                C(T(0.5), T(0.5))};
    case GateKind::SqrtY:
        return {C(T(0.5), T(0.5)), C(T(0.5), T(0.5)), C(T(-0.5), T(-0.5)),
                C(T(0.5), T(0.5))};
    case GateKind::Swap: {
        cvector<T> m(16);
        m[0 + 0 * 4] = 1;
        m[2 + 1 * 4] = 1;
        m[1 + 2 * 4] = 1;
        m[3 + 3 * 4] = 1;
        return m;
    }
    case GateKind::ISwap: {
        cvector<T> m(16);
        m[0 + 0 * 4] = 1;
        m[2 + 1 * 4] = C(0, 1);
        m[1 + 2 * 4] = C(0, 1);
        m[3 + 3 * 4] = 1;
        return m;
    }
    case GateKind::CZ: {
        cvector<T> m = linalg::identity<T>(4);
        m[3 + 3 * 4] = -1;
        return m;
    }
    case GateKind::Cnot: {
        // First position controls, second is the target.
        cvector<T> m(16);
        m[0 + 0 * 4] = 1;
        m[2 + 2 * 4] = 1;
        m[3 + 1 * 4] = 1;
        m[1 + 3 * 4] = 1;
        return m;
    }
    case GateKind::Toffoli: {
        cvector<T> m = linalg::identity<T>(8);
        m[3 + 3 * 8] = 0;
        m[7 + 7 * 8] = 0;
        m[7 + 3 * 8] = 1;
        m[3 + 7 * 8] = 1;
        return m;
    }
    case GateKind::Fredkin: {
        cvector<T> m = linalg::identity<T>(8);
        m[3 + 3 * 8] = 0;
        m[5 + 5 * 8] = 0;
        m[5 + 3 * 8] = 1;
        m[3 + 5 * 8] = 1;
        return m;
    }
    default:
        throw UnsupportedError("fixed_gate_matrix: not a fixed gate kind");
    }
}

inline int gate_arity(GateKind kind) {
    switch (kind) {
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::H:
    case GateKind::S:
    case GateKind::T:
    case GateKind::SqrtX:
    case GateKind::SqrtY:
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
        return 1;
    case GateKind::Swap:
    case GateKind::ISwap:
    case GateKind::CZ:
    case GateKind::Cnot:
    case GateKind::CRx:
    case GateKind::CRy:
    case GateKind::CRz:
    case GateKind::Fsim:
        return 2;
    case GateKind::Toffoli:
    case GateKind::Fredkin:
        return 3;
    case GateKind::Generic:
        return 0;
    }
    return 0;
}

inline int param_arity(GateKind kind) {
    switch (kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::CRx:
    case GateKind::CRy:
    case GateKind::CRz:
        return 1;
    case GateKind::Fsim:
        return 5;
    default:
        return 0;
    }
}

template <typename T> cvector<T> rotation_matrix(GateKind kind, double theta) {
    using C = cplx<T>;
    const T c = static_cast<T>(std::cos(theta / 2));
    const T s = static_cast<T>(std::sin(theta / 2));
    switch (kind) {
    case GateKind::Rx:
    case GateKind::CRx:
        return {C(c), C(0, -s), C(0, -s), C(c)};
    case GateKind::Ry:
    case GateKind::CRy:
        return {C(c), C(s), C(-s), C(c)};
    case GateKind::Rz:
    case GateKind::CRz:
        return {C(c, -s), C(0), C(0), C(c, s)};
    default:
        throw UnsupportedError("rotation_matrix: not a rotation kind");
    }
}

template <typename T> cvector<T> rotation_derivative(GateKind kind, double theta) {
    using C = cplx<T>;
    const T c = static_cast<T>(0.5 * std::cos(theta / 2));
    const T s = static_cast<T>(0.5 * std::sin(theta / 2));
    switch (kind) {
    case GateKind::Rx:
    case GateKind::CRx:
        return {C(-s), C(0, -c), C(0, -c), C(-s)};
    case GateKind::Ry:
    case GateKind::CRy:
        return {C(-s), C(c), C(-c), C(-s)};
    case GateKind::Rz:
    case GateKind::CRz:
        return {C(-s, -c), C(0), C(0), C(-s, c)};
    default:
        throw UnsupportedError("rotation_derivative: not a rotation kind");
    }
}

/// Embeds a single-qubit block as a controlled operation: identity on the
/// control-0 subspace (control = local bit 0, target = local bit 1).
template <typename T> cvector<T> controlled_block(const cvector<T> &u2) {
    cvector<T> m(16);
    m[0 + 0 * 4] = 1;
    m[2 + 2 * 4] = 1;
    m[1 + 1 * 4] = u2[0];
    m[3 + 1 * 4] = u2[1];
    m[1 + 3 * 4] = u2[2];
    m[3 + 3 * 4] = u2[3];
    return m;
}

template <typename T>
cvector<T> fsim_matrix(const std::vector<double> &p) {
    using C = cplx<T>;
    const double theta = p[0], phi = p[1], dplus = p[2], dminus = p[3], doff = p[4];
    const double ct = std::cos(theta), st = std::sin(theta);
    cvector<T> m(16);
    m[0 + 0 * 4] = 1;
    m[1 + 1 * 4] = static_cast<C>(std::polar(ct, dplus + dminus));
    m[2 + 1 * 4] = static_cast<C>(cplx<double>(0, -1) * std::polar(st, dplus + doff));
    m[1 + 2 * 4] = static_cast<C>(cplx<double>(0, -1) * std::polar(st, dplus - doff));
    m[2 + 2 * 4] = static_cast<C>(std::polar(ct, dplus - dminus));
    m[3 + 3 * 4] = static_cast<C>(std::polar(1.0, 2 * dplus - phi));
    return m;
}

template <typename T>
cvector<T> fsim_derivative(const std::vector<double> &p, int index) {
    using C = cplx<T>;
    const double theta = p[0], phi = p[1], dplus = p[2], dminus = p[3], doff = p[4];
    const double ct = std::cos(theta), st = std::sin(theta);
    const cplx<double> i1(0, 1);
    cvector<T> m(16);
    const cplx<double> e11 = std::polar(ct, dplus + dminus);
    const cplx<double> e21 = -i1 * std::polar(st, dplus + doff);
    const cplx<double> e12 = -i1 * std::polar(st, dplus - doff);
    const cplx<double> e22 = std::polar(ct, dplus - dminus);
    const cplx<double> e33 = std::polar(1.0, 2 * dplus - phi);
    switch (index) {
    case 0: // theta
        m[1 + 1 * 4] = static_cast<C>(-std::polar(st, dplus + dminus));
        m[2 + 1 * 4] = static_cast<C>(-i1 * std::polar(ct, dplus + doff));
        m[1 + 2 * 4] = static_cast<C>(-i1 * std::polar(ct, dplus - doff));
        m[2 + 2 * 4] = static_cast<C>(-std::polar(st, dplus - dminus));
        break;
    case 1: // phi
        m[3 + 3 * 4] = static_cast<C>(-i1 * e33);
        break;
    case 2: // delta_plus
        m[1 + 1 * 4] = static_cast<C>(i1 * e11);
        m[2 + 1 * 4] = static_cast<C>(i1 * e21);
        m[1 + 2 * 4] = static_cast<C>(i1 * e12);
        m[2 + 2 * 4] = static_cast<C>(i1 * e22);
        m[3 + 3 * 4] = static_cast<C>(2.0 * i1 * e33);
        break;
    case 3: // delta_minus
        m[1 + 1 * 4] = static_cast<C>(i1 * e11);
        m[2 + 2 * 4] = static_cast<C>(-i1 * e22);
        break;
    case 4: // delta_minus_off
        m[2 + 1 * 4] = static_cast<C>(i1 * e21);
        m[1 + 2 * 4] = static_cast<C>(-i1 * e12);
        break;
    default:
        throw DomainError("fsim_derivative: parameter index out of range");
    }
    return m;
}

template <typename T>
cvector<T> parametric_matrix(GateKind kind, const std::vector<double> &params) {
    switch (kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
        return rotation_matrix<T>(kind, params[0]);
    case GateKind::CRx:
    case GateKind::CRy:
    case GateKind::CRz:
        return controlled_block(rotation_matrix<T>(kind, params[0]));
    case GateKind::Fsim:
        return fsim_matrix<T>(params);
    default:
        throw UnsupportedError("parametric_matrix: kind has no parametric form");
    }
}

} // namespace detail

/// Builds one of the named fixed gates on the given positions.
template <typename T = double>
GateOp<T> standard_gate(GateKind kind, std::vector<int> positions) {
    detail::check_positions(positions, "standard_gate");
    const int arity = detail::gate_arity(kind);
    if (arity == 0 || detail::param_arity(kind) != 0) {
        throw UnsupportedError("standard_gate: kind is not a fixed named gate");
    }
    if (static_cast<int>(positions.size()) != arity) {
        throw ShapeError(std::string("standard_gate: ") + gate_kind_name(kind) +
                         " needs " + std::to_string(arity) + " position(s), got " +
                         std::to_string(positions.size()));
    }
    GateOp<T> g;
    g.positions = std::move(positions);
    g.matrix = detail::fixed_gate_matrix<T>(kind);
    g.kind = kind;
    return g;
}

/// Controlled application of a single-qubit unitary; with two controls the
/// target block is applied only when both are 1.
template <typename T>
GateOp<T> controlled_gate(std::vector<int> controls, int target,
                          const cvector<T> &target_matrix) {
    if (controls.empty() || controls.size() > 2) {
        throw ShapeError("controlled_gate: needs 1 or 2 control positions");
    }
    if (target_matrix.size() != 4) {
        throw ShapeError("controlled_gate: target matrix must be 2x2");
    }
    if (linalg::unitarity_defect(target_matrix, 2) > 1e-8) {
        throw ValidityError("controlled_gate: target matrix is not unitary");
    }
    std::vector<int> positions = controls;
    positions.push_back(target);
    detail::check_positions(positions, "controlled_gate");

    const std::size_t m = positions.size();
    const std::size_t d = std::size_t(1) << m;
    const std::uint64_t control_mask = (std::uint64_t(1) << (m - 1)) - 1;
    const std::uint64_t target_bit = std::uint64_t(1) << (m - 1);
    cvector<T> mat(d * d);
    for (std::uint64_t k = 0; k < d; ++k) {
        if ((k & control_mask) != control_mask) {
            mat[k + k * d] = 1;
        }
    }
    for (int rt = 0; rt < 2; ++rt) {
        for (int ct = 0; ct < 2; ++ct) {
            const std::uint64_t row = control_mask | (std::uint64_t(rt) * target_bit);
            const std::uint64_t col = control_mask | (std::uint64_t(ct) * target_bit);
            mat[row + col * d] = target_matrix[rt + 2 * ct];
        }
    }
    GateOp<T> g;
    g.positions = std::move(positions);
    g.matrix = std::move(mat);
    return g;
}

/// Builds a named parametric gate; is_param marks which parameters are
/// treated as variational.
template <typename T = double>
GateOp<T> parametric_gate(GateKind kind, std::vector<int> positions,
                          std::vector<double> params, std::vector<bool> is_param) {
    detail::check_positions(positions, "parametric_gate");
    const int arity = detail::gate_arity(kind);
    const int nparams = detail::param_arity(kind);
    if (nparams == 0) {
        throw UnsupportedError("parametric_gate: kind has no parameters");
    }
    if (static_cast<int>(positions.size()) != arity) {
        throw ShapeError(std::string("parametric_gate: ") + gate_kind_name(kind) +
                         " needs " + std::to_string(arity) + " position(s)");
    }
    if (static_cast<int>(params.size()) != nparams ||
        is_param.size() != params.size()) {
        throw ShapeError(std::string("parametric_gate: ") + gate_kind_name(kind) +
                         " takes " + std::to_string(nparams) + " parameter(s)");
    }
    GateOp<T> g;
    g.positions = std::move(positions);
    g.matrix = detail::parametric_matrix<T>(kind, params);
    g.kind = kind;
    g.params = std::move(params);
    g.is_param = std::move(is_param);
    return g;
}

template <typename T = double>
GateOp<T> parametric_gate(GateKind kind, std::vector<int> positions, double theta,
                          bool is_param) {
    return parametric_gate<T>(kind, std::move(positions), std::vector<double>{theta},
                              std::vector<bool>{is_param});
}

/// Rebuilds the matrix of a named parametric gate from its closed form.
template <typename T> void rebuild_matrix(GateOp<T> &g) {
    if (detail::param_arity(g.kind) != 0) {
        g.matrix = detail::parametric_matrix<T>(g.kind, g.params);
    }
}

/// Analytic derivative of the gate matrix with respect to one parameter.
template <typename T>
cvector<T> gate_derivative(const GateOp<T> &g, int param_index) {
    if (g.kind == GateKind::Generic || detail::param_arity(g.kind) == 0) {
        throw UnsupportedError("gate_derivative: gate has no closed form");
    }
    if (param_index < 0 || param_index >= static_cast<int>(g.params.size())) {
        throw DomainError("gate_derivative: parameter index out of range");
    }
    if (!g.is_param[param_index]) {
        throw DomainError("gate_derivative: parameter " +
                          std::to_string(param_index) + " is not variational");
    }
    switch (g.kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
        return detail::rotation_derivative<T>(g.kind, g.params[0]);
    case GateKind::CRx:
    case GateKind::CRy:
    case GateKind::CRz: {
        // Nonzero only in the control-1 target block.
        const cvector<T> dr = detail::rotation_derivative<T>(g.kind, g.params[0]);
        cvector<T> m(16);
        m[1 + 1 * 4] = dr[0];
        m[3 + 1 * 4] = dr[1];
        m[1 + 3 * 4] = dr[2];
        m[3 + 3 * 4] = dr[3];
        return m;
    }
    case GateKind::Fsim:
        return detail::fsim_derivative<T>(g.params, param_index);
    default:
        throw UnsupportedError("gate_derivative: unsupported kind");
    }
}

/// Inverse (= adjoint) gate. Named parametric kinds keep their kind with
/// the angle negated; the result carries no variational parameters.
template <typename T> GateOp<T> gate_inverse(const GateOp<T> &g) {
    GateOp<T> inv;
    inv.positions = g.positions;
    switch (g.kind) {
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::H:
    case GateKind::Swap:
    case GateKind::CZ:
    case GateKind::Cnot:
    case GateKind::Toffoli:
    case GateKind::Fredkin:
        inv.kind = g.kind;
        inv.matrix = g.matrix;
        return inv;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::CRx:
    case GateKind::CRy:
    case GateKind::CRz:
        inv.kind = g.kind;
        inv.params = {-g.params[0]};
        inv.is_param = {false};
        inv.matrix = detail::parametric_matrix<T>(g.kind, inv.params);
        return inv;
    case GateKind::Fsim:
        inv.kind = g.kind;
        inv.params = {-g.params[0], -g.params[1], -g.params[2], -g.params[3],
                      g.params[4]};
        inv.is_param = {false, false, false, false, false};
        inv.matrix = detail::parametric_matrix<T>(g.kind, inv.params);
        return inv;
    default:
        inv.matrix = linalg::adjoint(g.matrix, g.dim());
        return inv;
    }
}

/// Builds a generic channel from a Kraus operator list.
template <typename T>
ChannelOp<T> make_channel(std::vector<int> positions,
                          std::vector<cvector<T>> kraus) {
    detail::check_positions(positions, "make_channel");
    if (kraus.empty()) {
        throw ShapeError("make_channel: needs at least one Kraus operator");
    }
    const std::size_t d =
        detail::checked_gate_dim(kraus[0].size(), positions.size(), "make_channel");
    cvector<T> sum(d * d);
    for (const auto &k : kraus) {
        if (k.size() != d * d) {
            throw ShapeError("make_channel: Kraus operators differ in size");
        }
        const cvector<T> kd = linalg::adjoint(k, d);
        const cvector<T> prod = linalg::matmul(kd, k, d);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += prod[i];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        sum[i + i * d] -= 1;
    }
    if (linalg::max_abs(sum) > 1e-8) {
        throw ValidityError("make_channel: Kraus operators violate the "
                            "completeness relation within 1e-8");
    }
    ChannelOp<T> c;
    c.positions = std::move(positions);
    c.kraus = std::move(kraus);
    return c;
}

/// Named single-qubit channels. Depolarizing uses Pauli Kraus weights
/// sqrt(p)/2 so the completeness relation holds exactly.
template <typename T = double>
ChannelOp<T> standard_channel(ChannelKind kind, int position, double param) {
    if (param < 0 || param > 1) {
        throw DomainError(std::string("standard_channel: ") +
                          channel_kind_name(kind) + " parameter must lie in [0,1]");
    }
    using C = cplx<T>;
    std::vector<cvector<T>> kraus;
    std::string param_name;
    switch (kind) {
    case ChannelKind::AmplitudeDamping: {
        param_name = "gamma";
        const T root = static_cast<T>(std::sqrt(1 - param));
        kraus.push_back({C(1), C(0), C(0), C(root)});
        kraus.push_back({C(0), C(0), C(static_cast<T>(std::sqrt(param))), C(0)});
        break;
    }
    case ChannelKind::PhaseDamping: {
        param_name = "gamma";
        const T root = static_cast<T>(std::sqrt(1 - param));
        kraus.push_back({C(1), C(0), C(0), C(root)});
        kraus.push_back({C(0), C(0), C(0), C(static_cast<T>(std::sqrt(param)))});
        break;
    }
    case ChannelKind::Depolarizing: {
        param_name = "p";
        const T w0 = static_cast<T>(std::sqrt(1 - 0.75 * param));
        const T w = static_cast<T>(0.5 * std::sqrt(param));
        kraus.push_back({C(w0), C(0), C(0), C(w0)});
        auto scale = [w](cvector<T> m) {
            for (auto &x : m) {
                x *= w;
            }
            return m;
        };
        kraus.push_back(scale(detail::pauli_x<T>()));
        kraus.push_back(scale(detail::pauli_y<T>()));
        kraus.push_back(scale(detail::pauli_z<T>()));
        break;
    }
    default:
        throw UnsupportedError("standard_channel: not a named channel kind");
    }
    ChannelOp<T> c = make_channel<T>({position}, std::move(kraus));
    c.kind = kind;
    c.noise_params[param_name] = param;
    return c;
}

/// M[(tau,tau'),(sigma,sigma')] = sum_s K^s[tau,sigma] * conj(K^s[tau',sigma']).
/// For a unitary gate wrapped as a single-Kraus channel this is U (x) conj(U).
template <typename T>
Superoperator<T> channel_superoperator(const ChannelOp<T> &c) {
    const std::size_t d = c.dim();
    const std::size_t dd = d * d;
    Superoperator<T> s;
    s.ket_positions = c.positions;
    s.matrix.assign(dd * dd, cplx<T>(0));
    for (const auto &k : c.kraus) {
        for (std::size_t tp = 0; tp < d; ++tp) {
            for (std::size_t sp = 0; sp < d; ++sp) {
                const cplx<T> kc = std::conj(k[tp + sp * d]);
                if (kc == cplx<T>(0)) {
                    continue;
                }
                for (std::size_t sig = 0; sig < d; ++sig) {
                    for (std::size_t tau = 0; tau < d; ++tau) {
                        s.matrix[(tau + tp * d) + (sig + sp * d) * dd] +=
                            k[tau + sig * d] * kc;
                    }
                }
            }
        }
    }
    return s;
}

/// Re-indexes an m-qubit operator from the textbook basis order (first
/// listed qubit most significant) to the internal order (first listed qubit
/// least significant): conjugation by the bit-reversal permutation.
template <typename T>
cvector<T> row_major_to_column_major(const cvector<T> &matrix, int m) {
    if (m < 1) {
        throw ShapeError("row_major_to_column_major: qubit count must be >= 1");
    }
    const std::size_t d = std::size_t(1) << m;
    if (matrix.size() != d * d) {
        throw ShapeError("row_major_to_column_major: matrix is not 2^m x 2^m");
    }
    auto rev = [m](std::size_t k) {
        std::size_t r = 0;
        for (int b = 0; b < m; ++b) {
            r |= ((k >> b) & 1) << (m - 1 - b);
        }
        return r;
    };
    cvector<T> out(d * d);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t r = 0; r < d; ++r) {
            out[r + c * d] = matrix[rev(r) + rev(c) * d];
        }
    }
    return out;
}

inline const char *gate_kind_name(GateKind kind) {
    switch (kind) {
    case GateKind::Generic:
        return "Generic";
    case GateKind::X:
        return "X";
    case GateKind::Y:
        return "Y";
    case GateKind::Z:
        return "Z";
    case GateKind::H:
        return "H";
    case GateKind::S:
        return "S";
    case GateKind::T:
        return "T";
    case GateKind::SqrtX:
        return "sqrtX";
    case GateKind::SqrtY:
        return "sqrtY";
    case GateKind::Swap:
        return "SWAP";
    case GateKind::ISwap:
        return "iSWAP";
    case GateKind::CZ:
        return "CZ";
    case GateKind::Cnot:
        return "CNOT";
    case GateKind::Toffoli:
        return "TOFFOLI";
    case GateKind::Fredkin:
        return "FREDKIN";
    case GateKind::Rx:
        return "Rx";
    case GateKind::Ry:
        return "Ry";
    case GateKind::Rz:
        return "Rz";
    case GateKind::CRx:
        return "CRx";
    case GateKind::CRy:
        return "CRy";
    case GateKind::CRz:
        return "CRz";
    case GateKind::Fsim:
        return "FSIM";
    }
    return "?";
}

inline const char *channel_kind_name(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::Generic:
        return "Generic";
    case ChannelKind::AmplitudeDamping:
        return "AmplitudeDamping";
    case ChannelKind::PhaseDamping:
        return "PhaseDamping";
    case ChannelKind::Depolarizing:
        return "Depolarizing";
    }
    return "?";
}

} // namespace vqcs
