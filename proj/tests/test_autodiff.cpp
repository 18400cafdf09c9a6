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
#include "vqcs/autodiff.hpp"
#include "vqcs/bench_circuits.hpp"
#include "vqcs/observables.hpp"

using namespace vqcs;

namespace {

const ThreadConfig kSerial = ThreadConfig::single_threaded();

PauliOperator z_on(int q) {
    PauliOperator op;
    op.add_term(PauliTerm({{q, PauliLabel::Z}}, 1.0));
    return op;
}

double max_abs_err(const std::vector<double> &a, const std::vector<double> &b) {
    REQUIRE(a.size() == b.size());
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

} // namespace

TEST_SUITE("autodiff") {

TEST_CASE("loss of a rotated qubit is cos(theta)") {
    const PureState<double> zero(1);
    const auto op = z_on(1);
    for (double theta : {0.0, 0.4, std::numbers::pi / 2, 2.2}) {
        Circuit<double> c;
        c.push_back(parametric_gate(GateKind::Rx, {1}, theta, true));
        CHECK(loss_pure(op, c, zero, kSerial) ==
              doctest::Approx(std::cos(theta)).epsilon(1e-12));
    }
    CHECK(loss_pure(op, Circuit<double>{}, zero, kSerial) == doctest::Approx(1.0));
    CHECK(zero[0] == cplx<double>(1)); // input state untouched

    Circuit<double> noisy;
    noisy.push_back(standard_channel(ChannelKind::Depolarizing, 1, 0.1));
    CHECK_THROWS_AS(loss_pure(op, noisy, zero, kSerial), TypeError);
}

TEST_CASE("gradient of the rotated qubit is -sin(theta)") {
    const PureState<double> zero(1);
    const auto op = z_on(1);
    for (double theta : {0.0, 0.3, std::numbers::pi / 2, 1.9}) {
        Circuit<double> c;
        c.push_back(parametric_gate(GateKind::Rx, {1}, theta, true));
        const auto res = gradient_pure(op, c, zero, kSerial);
        CHECK(res.loss == doctest::Approx(std::cos(theta)).epsilon(1e-12));
        REQUIRE(res.grads.size() == 1);
        CHECK(res.grads[0] ==
              doctest::Approx(-std::sin(theta)).epsilon(1e-10));
    }

    // No active parameters: empty gradient vector.
    Circuit<double> fixed;
    fixed.push_back(parametric_gate(GateKind::Rx, {1}, 0.8, false));
    fixed.push_back(standard_gate<double>(GateKind::H, {1}));
    const auto res = gradient_pure(op, fixed, zero, kSerial);
    CHECK(res.grads.empty());
}

TEST_CASE("layered-ansatz gradients match finite differences") {
    const int n = 6, depth = 4;
    Circuit<double> c = bench::generate_rqc<double>(n, depth, 2024);
    const auto op = heisenberg_1d(n);
    const PureState<double> s0(n);
    const auto res = gradient_pure(op, c, s0, kSerial);
    REQUIRE(res.grads.size() == std::size_t(2 * n * depth));

    auto loss_fn = [&](const Circuit<double> &cc) {
        return loss_pure(op, cc, s0, kSerial);
    };
    const auto fd = finite_difference_gradient(loss_fn, c, 1e-5);
    CHECK(max_abs_err(res.grads, fd) <= 1e-6);
}

TEST_CASE("multi-parameter gates see one state pair per gate") {
    std::mt19937_64 rng(3);
    Circuit<double> c;
    c.push_back(standard_gate<double>(GateKind::H, {1}));
    c.push_back(parametric_gate<double>(GateKind::Fsim, {1, 2},
                                        {0.4, -0.3, 0.2, 0.7, -0.5},
                                        {true, true, true, true, true}));
    c.push_back(parametric_gate(GateKind::CRy, {2, 3}, 0.9, true));
    const auto op = heisenberg_1d(3);
    const PureState<double> s0(3);
    const auto res = gradient_pure(op, c, s0, kSerial);
    REQUIRE(res.grads.size() == 6);

    auto loss_fn = [&](const Circuit<double> &cc) {
        return loss_pure(op, cc, s0, kSerial);
    };
    const auto fd = finite_difference_gradient(loss_fn, c, 1e-5);
    CHECK(max_abs_err(res.grads, fd) <= 1e-6);
}

TEST_CASE("the reverse sweep returns to the initial state") {
    const int n = 5, depth = 5;
    Circuit<double> c = bench::generate_rqc<double>(n, depth, 77);
    const auto op = heisenberg_1d(n);
    const PureState<double> s0(n);
    GradientDiagnostics diag;
    gradient_pure(op, c, s0, kSerial, &diag);
    CHECK(diag.reverse_residual <= 1e-8);
}

TEST_CASE("only two working states live during the reverse sweep") {
    const int n = 6, depth = 3;
    Circuit<double> c = bench::generate_rqc<double>(n, depth, 5);
    const auto op = heisenberg_1d(n);
    const PureState<double> s0(n);

    const auto before = state_alloc_stats();
    reset_state_alloc_peak();
    gradient_pure(op, c, s0, kSerial);
    const auto after = state_alloc_stats();
    CHECK(after.live == before.live);
    // Two working states plus one transient per-operator scratch.
    CHECK(after.peak - before.live <= 3);
}

TEST_CASE("losses on density matrices") {
    const MixedState<double> dm0(1);
    const auto op = z_on(1);

    Circuit<double> flip;
    flip.push_back(standard_gate<double>(GateKind::X, {1}));
    CHECK(loss_mixed(op, flip, dm0, kSerial) == doctest::Approx(-1.0));

    CHECK(loss_mixed(op, Circuit<double>{}, dm0, kSerial) == doctest::Approx(1.0));

    // Depolarizing shrinks the z component: loss = (1-p) cos(theta).
    for (double theta : {0.3, 1.1}) {
        for (double p : {0.0, 0.3, 0.8}) {
            Circuit<double> c;
            c.push_back(parametric_gate(GateKind::Rx, {1}, theta, true));
            c.push_back(standard_channel(ChannelKind::Depolarizing, 1, p));
            CHECK(loss_mixed(op, c, dm0, kSerial) ==
                  doctest::Approx((1 - p) * std::cos(theta)).epsilon(1e-10));
        }
    }
}

TEST_CASE("noisy gradient of the depolarized rotation") {
    const MixedState<double> dm0(1);
    const auto op = z_on(1);
    const double p = 0.3;
    for (double theta : {0.2, std::numbers::pi / 2, 2.4}) {
        Circuit<double> c;
        c.push_back(parametric_gate(GateKind::Rx, {1}, theta, true));
        c.push_back(standard_channel(ChannelKind::Depolarizing, 1, p));
        const auto res = gradient_mixed(op, c, dm0, kSerial);
        CHECK(res.loss == doctest::Approx((1 - p) * std::cos(theta)).epsilon(1e-10));
        REQUIRE(res.grads.size() == 1);
        CHECK(res.grads[0] ==
              doctest::Approx(-(1 - p) * std::sin(theta)).epsilon(1e-9));
    }
}

TEST_CASE("noisy gradients match finite differences on layered circuits") {
    for (std::uint64_t seed : {11ull, 12ull}) {
        const int n = 3, depth = 2;
        Circuit<double> c = bench::generate_noisy_rqc<double>(n, depth, 0.05, seed);
        const auto op = heisenberg_1d(n);
        const MixedState<double> dm0(n);
        const auto res = gradient_mixed(op, c, dm0, kSerial);
        auto loss_fn = [&](const Circuit<double> &cc) {
            return loss_mixed(op, cc, dm0, kSerial);
        };
        const auto fd = finite_difference_gradient(loss_fn, c, 1e-5);
        CHECK(max_abs_err(res.grads, fd) <= 1e-6);
    }
}

TEST_CASE("channel-free circuits give the same gradient on both paths") {
    const int n = 4, depth = 3;
    Circuit<double> c = bench::generate_rqc<double>(n, depth, 31);
    const auto op = heisenberg_1d(n);
    const PureState<double> s0(n);
    const MixedState<double> dm0(n);
    const auto pure = gradient_pure(op, c, s0, kSerial);
    const auto mixed = gradient_mixed(op, c, dm0, kSerial);
    CHECK(std::abs(pure.loss - mixed.loss) <= 1e-8);
    CHECK(max_abs_err(pure.grads, mixed.grads) <= 1e-8);
}

TEST_CASE("a maximally damping channel cannot be inverted") {
    Circuit<double> c;
    c.push_back(parametric_gate(GateKind::Rx, {1}, 0.4, true));
    c.push_back(standard_channel(ChannelKind::AmplitudeDamping, 1, 1.0));
    const auto op = z_on(1);
    const MixedState<double> dm0(1);
    CHECK_THROWS_WITH_AS(gradient_mixed(op, c, dm0, kSerial),
                         doctest::Contains("AmplitudeDamping"),
                         NonInvertibleChannelError);
    // The loss itself is still well defined.
    CHECK(loss_mixed(op, c, dm0, kSerial) == doctest::Approx(1.0));
}

TEST_CASE("finite differences as a standalone operation") {
    const PureState<double> zero(1);
    const auto op = z_on(1);
    Circuit<double> c;
    c.push_back(parametric_gate(GateKind::Rx, {1}, std::numbers::pi / 2, true));
    auto loss_fn = [&](const Circuit<double> &cc) {
        return loss_pure(op, cc, zero, kSerial);
    };
    const auto fd = finite_difference_gradient(loss_fn, c, 1e-5);
    REQUIRE(fd.size() == 1);
    CHECK(fd[0] == doctest::Approx(-1.0).epsilon(1e-9));
    // Parameters restored afterwards.
    CHECK(active_parameters(c) == std::vector<double>{std::numbers::pi / 2});

    Circuit<double> empty;
    CHECK(finite_difference_gradient(loss_fn, empty, 1e-5).empty());
    CHECK_THROWS_AS(finite_difference_gradient(loss_fn, c, 0.0), DomainError);
    CHECK_THROWS_AS(finite_difference_gradient(loss_fn, c, -1.0), DomainError);
}

TEST_CASE("gradients line up with the active-parameter order") {
    // Perturb one parameter at a time; the loss moves by grad * step.
    std::mt19937_64 rng(8);
    const int n = 3;
    Circuit<double> c;
    c.push_back(parametric_gate(GateKind::Ry, {1}, 0.3, true));
    c.push_back(standard_gate<double>(GateKind::Cnot, {1, 2}));
    c.push_back(parametric_gate(GateKind::Rz, {2}, -0.6, true));
    c.push_back(parametric_gate(GateKind::CRx, {2, 3}, 1.1, true));
    const auto op = heisenberg_1d(n);
    const PureState<double> s0(n);
    const auto res = gradient_pure(op, c, s0, kSerial);
    const auto params = active_parameters(c);
    REQUIRE(res.grads.size() == params.size());
    const double h = 1e-6;
    for (std::size_t j = 0; j < params.size(); ++j) {
        auto shifted = params;
        shifted[j] += h;
        reset_parameters(c, shifted);
        const double up = loss_pure(op, c, s0, kSerial);
        reset_parameters(c, params);
        CHECK(std::abs((up - res.loss) / h - res.grads[j]) <= 1e-4);
    }
}

} // TEST_SUITE
