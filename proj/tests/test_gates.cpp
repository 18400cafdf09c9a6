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

#include <random>

#include "oracles.hpp"
#include "vqcs/gates.hpp"
#include "vqcs/linalg.hpp"

using namespace vqcs;
using oracles::Cd;

namespace {

/// Central finite difference of a parametric matrix builder.
cvector<double> matrix_fd(GateKind kind, std::vector<double> params, int index,
                          double h) {
    auto up = params, down = params;
    up[index] += h;
    down[index] -= h;
    const auto mu = detail::parametric_matrix<double>(kind, up);
    const auto md = detail::parametric_matrix<double>(kind, down);
    cvector<double> out(mu.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (mu[k] - md[k]) / (2 * h);
    }
    return out;
}

double max_diff(const cvector<double> &a, const cvector<double> &b) {
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

const std::vector<GateKind> kFixedKinds = {
    GateKind::X,       GateKind::Y,     GateKind::Z,     GateKind::H,
    GateKind::S,       GateKind::T,     GateKind::SqrtX, GateKind::SqrtY,
    GateKind::Swap,    GateKind::ISwap, GateKind::CZ,    GateKind::Cnot,
    GateKind::Toffoli, GateKind::Fredkin};

std::vector<int> default_positions(GateKind kind) {
    switch (detail::gate_arity(kind)) {
    case 1:
        return {1};
    case 2:
        return {1, 2};
    default:
        return {1, 2, 3};
    }
}

} // namespace

TEST_SUITE("gates") {

TEST_CASE("make_gate validates unitarity and shape") {
    const auto x = make_gate<double>({1}, {0, 1, 1, 0});
    CHECK(x.kind == GateKind::Generic);
    CHECK(x.dim() == 2);

    const auto noop = make_gate<double>({1, 2}, linalg::identity<double>(4));
    CHECK(noop.dim() == 4);

    CHECK_THROWS_AS(make_gate<double>({1}, {1, 0, 1, 1}), ValidityError);
    CHECK_THROWS_AS(make_gate<double>({1, 2}, {0, 1, 1, 0}), ShapeError);
    CHECK_THROWS_AS(make_gate<double>({1, 1}, linalg::identity<double>(4)),
                    ValidityError);
}

TEST_CASE("every named fixed gate is unitary within 1e-10") {
    for (GateKind kind : kFixedKinds) {
        const auto g = standard_gate<double>(kind, default_positions(kind));
        CHECK_MESSAGE(linalg::unitarity_defect(g.matrix, g.dim()) <= 1e-10,
                      gate_kind_name(kind));
    }
}

TEST_CASE("standard_gate arity is checked") {
    CHECK_THROWS_AS(standard_gate<double>(GateKind::Toffoli, {1, 2}), ShapeError);
    CHECK_THROWS_AS(standard_gate<double>(GateKind::H, {1, 2}), ShapeError);
    CHECK_THROWS_AS(standard_gate<double>(GateKind::Rx, {1}), UnsupportedError);
}

TEST_CASE("CNOT permutes flat indices 1 and 3 (control = first position)") {
    const auto cnot = standard_gate<double>(GateKind::Cnot, {1, 2});
    // Columns are inputs: |sigma1=1, sigma2=0> (index 1) maps to index 3.
    CHECK(cnot.matrix[3 + 1 * 4] == Cd(1));
    CHECK(cnot.matrix[1 + 3 * 4] == Cd(1));
    CHECK(cnot.matrix[0 + 0 * 4] == Cd(1));
    CHECK(cnot.matrix[2 + 2 * 4] == Cd(1));
    Cd sum = 0;
    for (const auto &e : cnot.matrix) {
        sum += e;
    }
    CHECK(sum == Cd(4)); // a permutation matrix has exactly dim ones
}

TEST_CASE("controlled_gate reproduces CNOT and TOFFOLI") {
    const cvector<double> x = {0, 1, 1, 0};
    const auto cx = controlled_gate<double>({1}, 2, x);
    const auto cnot = standard_gate<double>(GateKind::Cnot, {1, 2});
    CHECK(max_diff(cx.matrix, cnot.matrix) == 0);

    const auto ccx = controlled_gate<double>({1, 2}, 3, x);
    const auto toffoli = standard_gate<double>(GateKind::Toffoli, {1, 2, 3});
    CHECK(max_diff(ccx.matrix, toffoli.matrix) == 0);

    CHECK_THROWS_AS(controlled_gate<double>({1}, 1, x), ValidityError);
}

TEST_CASE("rotation gates match their closed forms") {
    const auto rx_pi = parametric_gate(GateKind::Rx, {1}, std::numbers::pi, true);
    CHECK(std::abs(rx_pi.matrix[0]) < 1e-15);
    CHECK(std::abs(rx_pi.matrix[1] - Cd(0, -1)) < 1e-15);
    CHECK(std::abs(rx_pi.matrix[2] - Cd(0, -1)) < 1e-15);

    const auto rz0 = parametric_gate(GateKind::Rz, {1}, 0.0, true);
    CHECK(max_diff(rz0.matrix, linalg::identity<double>(2)) == 0);

    const auto fsim = parametric_gate<double>(
        GateKind::Fsim, {1, 2}, {std::numbers::pi / 2, 0, 0, 0, 0},
        {true, true, true, true, true});
    CHECK(std::abs(fsim.matrix[0 + 0 * 4] - Cd(1)) < 1e-15);
    CHECK(std::abs(fsim.matrix[3 + 3 * 4] - Cd(1)) < 1e-15);
    CHECK(std::abs(fsim.matrix[1 + 1 * 4]) < 1e-15);
    CHECK(std::abs(fsim.matrix[2 + 1 * 4] - Cd(0, -1)) < 1e-15);
    CHECK(std::abs(fsim.matrix[1 + 2 * 4] - Cd(0, -1)) < 1e-15);

    CHECK_THROWS_AS(parametric_gate<double>(GateKind::Fsim, {1, 2}, {0.1}, {true}),
                    ShapeError);
    CHECK_THROWS_AS(
        parametric_gate<double>(GateKind::Rx, {1}, {0.1, 0.2}, {true, true}),
        ShapeError);
}

TEST_CASE("analytic gate derivatives") {
    const auto rx0 = parametric_gate(GateKind::Rx, {1}, 0.0, true);
    const auto drx = gate_derivative(rx0, 0);
    CHECK(std::abs(drx[0]) < 1e-15);
    CHECK(std::abs(drx[1] - Cd(0, -0.5)) < 1e-15);
    CHECK(std::abs(drx[2] - Cd(0, -0.5)) < 1e-15);

    const double theta = 0.7;
    const auto rz = parametric_gate(GateKind::Rz, {1}, theta, true);
    const auto drz = gate_derivative(rz, 0);
    const Cd want0 = Cd(0, -0.5) * std::polar(1.0, -theta / 2);
    const Cd want1 = Cd(0, 0.5) * std::polar(1.0, theta / 2);
    CHECK(std::abs(drz[0] - want0) < 1e-15);
    CHECK(std::abs(drz[3] - want1) < 1e-15);
    CHECK(drz[1] == Cd(0));

    // dFSIM/dphi has a single entry -i e^{i(2 dplus - phi)} at (3,3); checked
    // against a central finite difference with step 1e-6.
    const std::vector<double> p = {0.3, 0.9, 0.2, -0.4, 0.6};
    const auto fsim = parametric_gate<double>(GateKind::Fsim, {1, 2}, p,
                                              {true, true, true, true, true});
    const auto dphi = gate_derivative(fsim, 1);
    for (std::size_t k = 0; k < 16; ++k) {
        if (k != 3 + 3 * 4) {
            CHECK(dphi[k] == Cd(0));
        }
    }
    CHECK(std::abs(dphi[3 + 3 * 4] - Cd(0, -1) * std::polar(1.0, 2 * p[2] - p[1])) <
          1e-14);
    CHECK(max_diff(dphi, matrix_fd(GateKind::Fsim, p, 1, 1e-6)) < 1e-8);

    CHECK_THROWS_AS(gate_derivative(make_gate<double>({1}, {0, 1, 1, 0}), 0),
                    UnsupportedError);
    const auto inactive = parametric_gate(GateKind::Rx, {1}, 0.3, false);
    CHECK_THROWS_AS(gate_derivative(inactive, 0), DomainError);
}

TEST_CASE("derivatives agree with finite differences for every kind") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        for (GateKind kind : {GateKind::Rx, GateKind::Ry, GateKind::Rz,
                              GateKind::CRx, GateKind::CRy, GateKind::CRz}) {
            const double theta = 6 * oracles::uniform(rng) - 3;
            const auto g =
                parametric_gate(kind, default_positions(kind), theta, true);
            const auto fd = matrix_fd(kind, {theta}, 0, 1e-5);
            CHECK_MESSAGE(max_diff(gate_derivative(g, 0), fd) <= 1e-7,
                          gate_kind_name(kind));
        }
        std::vector<double> p(5);
        for (auto &x : p) {
            x = 6 * oracles::uniform(rng) - 3;
        }
        const auto fsim = parametric_gate<double>(GateKind::Fsim, {1, 2}, p,
                                                  {true, true, true, true, true});
        for (int j = 0; j < 5; ++j) {
            CHECK(max_diff(gate_derivative(fsim, j),
                           matrix_fd(GateKind::Fsim, p, j, 1e-5)) <= 1e-7);
        }
    }
}

TEST_CASE("gate inverses") {
    const auto x = standard_gate<double>(GateKind::X, {1});
    const auto xinv = gate_inverse(x);
    CHECK(xinv.kind == GateKind::X);
    CHECK(max_diff(xinv.matrix, x.matrix) == 0);

    const auto rx = parametric_gate(GateKind::Rx, {1}, 0.8, true);
    const auto rxinv = gate_inverse(rx);
    CHECK(rxinv.kind == GateKind::Rx);
    CHECK(rxinv.params[0] == -0.8);
    CHECK(!rxinv.has_active_params());

    std::mt19937_64 rng(7);
    std::vector<GateOp<double>> gates;
    for (GateKind kind : kFixedKinds) {
        gates.push_back(standard_gate<double>(kind, default_positions(kind)));
    }
    for (GateKind kind : {GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::CRx,
                          GateKind::CRy, GateKind::CRz}) {
        gates.push_back(parametric_gate(kind, default_positions(kind),
                                        4 * oracles::uniform(rng) - 2, true));
    }
    std::vector<double> fp(5);
    for (auto &v : fp) {
        v = 4 * oracles::uniform(rng) - 2;
    }
    gates.push_back(parametric_gate<double>(GateKind::Fsim, {1, 2}, fp,
                                            {true, true, true, true, true}));
    gates.push_back(make_gate<double>(
        {1, 2}, oracles::to_cvector<double>(oracles::random_unitary(4, rng))));
    for (const auto &g : gates) {
        const auto inv = gate_inverse(g);
        const auto prod = linalg::matmul(inv.matrix, g.matrix, g.dim());
        CHECK_MESSAGE(max_diff(prod, linalg::identity<double>(g.dim())) <= 1e-12,
                      gate_kind_name(g.kind));
    }
}

TEST_CASE("make_channel enforces the completeness relation") {
    const auto flip = make_channel<double>({1}, {{0, 1, 1, 0}});
    CHECK(flip.kraus.size() == 1);

    const double r = std::numbers::sqrt2 / 2;
    const auto dephase = make_channel<double>({1}, {{r, 0, 0, r}, {r, 0, 0, -r}});
    CHECK(dephase.kraus.size() == 2);

    CHECK_THROWS_AS(make_channel<double>({1}, {{1, 0, 0, 1}, {1, 0, 0, 1}}),
                    ValidityError);
}

TEST_CASE("named channels match their Kraus forms") {
    const auto ad = standard_channel(ChannelKind::AmplitudeDamping, 1, 1.0);
    // gamma = 1 moves |1><1| to |0><0|.
    oracles::Mat rho = {0, 0, 0, 1};
    std::vector<oracles::Mat> kraus;
    for (const auto &k : ad.kraus) {
        kraus.push_back(oracles::Mat(k.begin(), k.end()));
    }
    const auto out = oracles::kraus_sum_apply(kraus, {1}, 1, rho);
    CHECK(std::abs(out[0] - Cd(1)) < 1e-15);
    CHECK(std::abs(out[3]) < 1e-15);

    const auto dep1 = standard_channel(ChannelKind::Depolarizing, 1, 1.0);
    kraus.clear();
    for (const auto &k : dep1.kraus) {
        kraus.push_back(oracles::Mat(k.begin(), k.end()));
    }
    const auto mixed = oracles::kraus_sum_apply(kraus, {1}, 1, {1, 0, 0, 0});
    CHECK(std::abs(mixed[0] - Cd(0.5)) < 1e-15);
    CHECK(std::abs(mixed[3] - Cd(0.5)) < 1e-15);

    const auto dep0 = standard_channel(ChannelKind::Depolarizing, 1, 0.0);
    CHECK(dep0.kraus.size() == 4);
    CHECK(std::abs(dep0.kraus[0][0] - Cd(1)) < 1e-15); // identity channel

    CHECK_THROWS_AS(standard_channel(ChannelKind::Depolarizing, 1, 1.5),
                    DomainError);
    CHECK_THROWS_AS(standard_channel(ChannelKind::AmplitudeDamping, 1, -0.1),
                    DomainError);
}

TEST_CASE("completeness holds for named channels over random parameters") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        const double p = oracles::uniform(rng);
        for (ChannelKind kind :
             {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping,
              ChannelKind::Depolarizing}) {
            const auto ch = standard_channel(kind, 1, p);
            cvector<double> sum(4, 0);
            for (const auto &k : ch.kraus) {
                const auto prod = linalg::matmul(linalg::adjoint(k, 2), k, 2);
                for (int i = 0; i < 4; ++i) {
                    sum[i] += prod[i];
                }
            }
            sum[0] -= 1;
            sum[3] -= 1;
            CHECK(linalg::max_abs(sum) <= 1e-10);
        }
    }
}

TEST_CASE("channel superoperators") {
    const auto ident = make_channel<double>({1}, {linalg::identity<double>(2)});
    const auto sid = channel_superoperator(ident);
    CHECK(max_diff(sid.matrix, linalg::identity<double>(4)) == 0);

    const auto xflip = make_channel<double>({1}, {{0, 1, 1, 0}});
    const auto sx = channel_superoperator(xflip);
    // X (x) conj(X) is real with ones where both halves flip.
    for (std::size_t tt = 0; tt < 4; ++tt) {
        for (std::size_t ss = 0; ss < 4; ++ss) {
            const Cd want = ((tt ^ ss) == 3) ? Cd(1) : Cd(0);
            CHECK(sx.matrix[tt + ss * 4] == want);
        }
    }

    // Unitary single-Kraus channel: M[(t,t'),(s,s')] = U[t,s] conj(U[t',s']).
    std::mt19937_64 rng(17);
    const auto u = oracles::random_unitary(2, rng);
    const auto uc = make_channel<double>({1}, {oracles::to_cvector<double>(u)});
    const auto su = channel_superoperator(uc);
    for (std::size_t tp = 0; tp < 2; ++tp) {
        for (std::size_t t = 0; t < 2; ++t) {
            for (std::size_t sp = 0; sp < 2; ++sp) {
                for (std::size_t s = 0; s < 2; ++s) {
                    const Cd want = u[t + s * 2] * std::conj(u[tp + sp * 2]);
                    CHECK(std::abs(su.matrix[(t + tp * 2) + (s + sp * 2) * 4] -
                                   want) <= 1e-12);
                }
            }
        }
    }

    // Superoperator action equals the Kraus sum on a vectorized state.
    const auto ad = standard_channel(ChannelKind::AmplitudeDamping, 1, 0.3);
    const auto sad = channel_superoperator(ad);
    oracles::Vec vec_rho = {0, 0, 0, 1}; // |1><1| flattened
    const auto via_superop = oracles::matvec(
        oracles::Mat(sad.matrix.begin(), sad.matrix.end()), vec_rho);
    std::vector<oracles::Mat> kraus;
    for (const auto &k : ad.kraus) {
        kraus.push_back(oracles::Mat(k.begin(), k.end()));
    }
    const auto via_kraus = oracles::kraus_sum_apply(kraus, {1}, 1, vec_rho);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(via_superop[k] - via_kraus[k]) <= 1e-12);
    }
}

TEST_CASE("channel superoperators preserve the trace of vectorized states") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 25; ++rep) {
        const double p = oracles::uniform(rng);
        for (ChannelKind kind :
             {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping,
              ChannelKind::Depolarizing}) {
            const auto ch = standard_channel(kind, 1, p);
            const auto s = channel_superoperator(ch);
            // Random Hermitian unit-trace 2x2.
            const double a = oracles::uniform(rng);
            const Cd off = oracles::random_amp(rng) * 0.3;
            const oracles::Vec rho = {Cd(a), off, std::conj(off), Cd(1 - a)};
            const auto out = oracles::matvec(
                oracles::Mat(s.matrix.begin(), s.matrix.end()), rho);
            CHECK(std::abs(out[0] + out[3] - Cd(1)) <= 1e-12);
        }
    }
}

TEST_CASE("row-major to column-major conversion") {
    // Single-qubit matrices are unchanged.
    const cvector<double> h = {1, 2, 3, 4};
    CHECK(max_diff(row_major_to_column_major(h, 1), h) == 0);

    // The textbook CNOT becomes the internal CNOT.
    const cvector<double> textbook = {1, 0, 0, 0, 0, 1, 0, 0,
                                      0, 0, 0, 1, 0, 0, 1, 0};
    const cvector<double> expect = {1, 0, 0, 0, 0, 0, 0, 1,
                                    0, 0, 1, 0, 0, 1, 0, 0};
    CHECK(max_diff(row_major_to_column_major(textbook, 2), expect) == 0);

    // SWAP is symmetric under bit reversal.
    const auto swap = standard_gate<double>(GateKind::Swap, {1, 2});
    CHECK(max_diff(row_major_to_column_major(swap.matrix, 2), swap.matrix) == 0);

    // Involution for m <= 3.
    std::mt19937_64 rng(11);
    for (int m = 1; m <= 3; ++m) {
        const std::size_t d = std::size_t(1) << m;
        cvector<double> mat(d * d);
        for (auto &x : mat) {
            x = oracles::random_amp(rng);
        }
        const auto twice =
            row_major_to_column_major(row_major_to_column_major(mat, m), m);
        CHECK(max_diff(twice, mat) == 0);
    }

    CHECK_THROWS_AS(row_major_to_column_major(cvector<double>(9), 2), ShapeError);
}

TEST_CASE("single-precision gates validate against looser tolerances") {
    const auto h = standard_gate<float>(GateKind::H, {1});
    CHECK(linalg::unitarity_defect(h.matrix, 2) <= 1e-7);
    const auto rx = parametric_gate<float>(GateKind::Rx, {1}, 0.3, true);
    CHECK(linalg::unitarity_defect(rx.matrix, 2) <= 1e-7);
}

} // TEST_SUITE
