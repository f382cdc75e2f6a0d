#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "uscqed/errors.hpp"
#include "uscqed/hamiltonian.hpp"

using namespace uscqed;

namespace {

SystemParams three_mode_params() {
    SystemParams p;
    p.theta = std::numbers::pi / 6;
    return p;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("matches the tensor-product oracle") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::array<int, 3> cutoffs{1 + trial % 3, 2, 1 + (trial + 1) % 2};
        SystemParams p;
        p.omega = {1.0, 1.0 + u(rng), 1.5 + u(rng)};
        p.omega_q = 2.0 + u(rng);
        p.g = {0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng)};
        p.theta = std::numbers::pi / 2 * u(rng);
        const auto space = build_space(cutoffs);
        const auto ref = oracle::hamiltonian(cutoffs, p.omega, p.omega_q, p.g, p.theta);
        CHECK(max_abs(build_hamiltonian(space, p) - ref) < 1e-14);
    }
}

TEST_CASE("uncoupled Hamiltonian is diagonal with bare energies") {
    auto p = three_mode_params().uncoupled();
    const auto space = build_space({3, 3, 3});
    const auto h = build_hamiltonian(space, p);
    for (Eigen::Index i = 0; i < space.dimension(); ++i) {
        const auto& s = space.state(i);
        double e = 0.0;
        for (int k = 0; k < 3; ++k) e += s.photons[k] * p.omega[k];
        e += (s.qubit == QubitLevel::e ? 0.5 : -0.5) * p.omega_q;
        CHECK(h(i, i).real() == doctest::Approx(e).epsilon(1e-15));
    }
    CHECK(max_abs(h - Eigen::MatrixXcd(h.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("structure of the coupled Hamiltonian") {
    const auto space = build_space({4, 4, 4});
    const auto p = three_mode_params();
    const auto h = build_hamiltonian(space, p);
    CHECK(max_abs(h - h.adjoint()) <= 1e-14);
    // No direct element between |0,0,0,g> and |1,1,0,g>: that process is second order.
    CHECK(std::abs(h(space.index_of({{0, 0, 0}, QubitLevel::g}), space.index_of({{1, 1, 0}, QubitLevel::g}))) == 0.0);

    // H(g) - H(0) is linear in an overall coupling scale.
    auto p2 = p;
    for (auto& g : p2.g) g *= 2.5;
    const auto h0 = build_hamiltonian(space, p.uncoupled());
    CHECK(max_abs((build_hamiltonian(space, p2) - h0) - 2.5 * (h - h0)) < 1e-14);
}

TEST_CASE("parity is conserved only for transversal coupling") {
    const auto space = build_space({3, 3, 3});
    const auto parity = parity_operator(space);
    auto p = three_mode_params();
    p.theta = 0.0;
    auto h = build_hamiltonian(space, p);
    CHECK(max_abs(h * parity - parity * h) < 1e-13);
    p.theta = std::numbers::pi / 6;
    h = build_hamiltonian(space, p);
    CHECK(max_abs(h * parity - parity * h) > 1e-3);
}

TEST_CASE("parameter validation") {
    SystemParams p;
    p.omega[1] = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = SystemParams{};
    p.g[2] = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = SystemParams{};
    p.theta = 2.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = SystemParams{};
    p.gamma = -1e-3;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);

    TuningSchedule s;
    s.ramp_rate = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = TuningSchedule{};
    s.t_on = s.t_i + 1.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("qubit frequency schedule") {
    TuningSchedule s;
    s.omega_q_initial = 2.47;
    s.delta_omega_q = -0.5;
    s.t_i = 50.0;
    s.ramp_rate = 0.2;
    const double tf = s.t_i + std::numbers::pi / (2 * s.ramp_rate);
    CHECK(s.t_f() == doctest::Approx(tf).epsilon(1e-15));
    CHECK(qubit_frequency_at(s, 0.0) == 2.47);
    CHECK(qubit_frequency_at(s, s.t_i) == 2.47);
    CHECK(qubit_frequency_at(s, s.t_i + std::numbers::pi / (4 * s.ramp_rate)) == doctest::Approx(2.47 - 0.25));
    CHECK(qubit_frequency_at(s, tf) == doctest::Approx(2.47 - 0.5).epsilon(1e-14));
    for (double t : {tf + 0.1, tf + 3.7, tf + 100.0}) {
        CHECK(qubit_frequency_at(s, t) == doctest::Approx(2.47 - 0.5).epsilon(1e-14));
    }
    // Continuity across both switch points.
    for (double t0 : {s.t_i, tf}) {
        CHECK(std::abs(qubit_frequency_at(s, t0 + 1e-9) - qubit_frequency_at(s, t0 - 1e-9)) < 1e-8);
    }
    // Monotone ramp.
    double prev = qubit_frequency_at(s, s.t_i);
    for (double t = s.t_i; t <= tf; t += 0.01) {
        const double w = qubit_frequency_at(s, t);
        CHECK(w <= prev + 1e-15);
        prev = w;
    }
}

TEST_CASE("time-dependent Hamiltonian") {
    const auto space = build_space({2, 2, 1});
    auto p = three_mode_params();
    p.g[2] = 0.0;
    TuningSchedule s;
    s.omega_q_initial = p.omega_q;
    s.delta_omega_q = -0.5;
    s.t_on = 10.0;
    s.t_i = 40.0;
    CHECK(max_abs(hamiltonian_at(space, p, s, 5.0) - build_hamiltonian(space, p.uncoupled())) < 1e-15);
    CHECK(max_abs(hamiltonian_at(space, p, s, 10.0) - build_hamiltonian(space, p)) < 1e-15);
    CHECK(max_abs(hamiltonian_at(space, p, s, 30.0) - build_hamiltonian(space, p)) < 1e-15);
    CHECK(max_abs(hamiltonian_at(space, p, s, s.t_f() + 2.0) -
                  build_hamiltonian(space, p.with_omega_q(p.omega_q - 0.5))) < 1e-13);

    const HamiltonianTerms terms(space, p);
    for (double t : {0.0, 10.0, 41.3, 60.0}) {
        CHECK(max_abs(terms.at(s, t) - hamiltonian_at(space, p, s, t)) < 1e-14);
    }
}

TEST_CASE("capped space Hamiltonian is Hermitian and a restriction") {
    const auto full = build_space({3, 3, 3});
    const auto capped = build_space({3, 3, 3}, 3);
    const auto p = three_mode_params();
    const auto hf = build_hamiltonian(full, p);
    const auto hc = build_hamiltonian(capped, p);
    CHECK(max_abs(hc - hc.adjoint()) <= 1e-14);
    for (Eigen::Index i = 0; i < capped.dimension(); ++i) {
        for (Eigen::Index j = 0; j < capped.dimension(); ++j) {
            CHECK(std::abs(hc(i, j) - hf(full.index_of(capped.state(i)), full.index_of(capped.state(j)))) < 1e-14);
        }
    }
}
