#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "uscqed/errors.hpp"
#include "uscqed/hamiltonian.hpp"
#include "uscqed/lindblad.hpp"
#include "uscqed/log.hpp"
#include "uscqed/protocol.hpp"
#include "uscqed/spectrum.hpp"

using namespace uscqed;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

SystemParams three_mode(double omega_q) {
    SystemParams p;
    p.theta = std::numbers::pi / 6;
    p.omega_q = omega_q;
    return p;
}

std::vector<OperatorMatrix> bare_lowering_ops(const HilbertSpace& space) {
    return {mode_annihilation(space, Mode::a), mode_annihilation(space, Mode::b), mode_annihilation(space, Mode::c),
            qubit_operator(space, QubitOp::sigma_minus)};
}

std::vector<double> uniform_grid(double t_end, double dt) {
    std::vector<double> grid;
    for (int k = 0; k * dt <= t_end + 1e-12; ++k) grid.push_back(k * dt);
    return grid;
}

}  // namespace

TEST_CASE("dressed operators reduce to bare ones without coupling") {
    const auto space = build_space({2, 2, 2});
    const auto d = diagonalize(build_hamiltonian(space, three_mode(2.33).uncoupled()));
    for (const auto& op : bare_lowering_ops(space)) CHECK(max_abs(dressed_lowering(d, op) - op) < 1e-14);
}

TEST_CASE("dressed operators only lower energy") {
    const auto space = build_space({3, 3, 3});
    const auto d = diagonalize(build_hamiltonian(space, three_mode(2.6)));
    for (const auto& op : bare_lowering_ops(space)) {
        const auto dressed = dressed_lowering(d, op);
        const Eigen::MatrixXcd in_eigenbasis = d.states.adjoint() * dressed * d.states;
        for (Eigen::Index m = 0; m < d.size(); ++m) {
            for (Eigen::Index n = 0; n <= m; ++n) CHECK(std::abs(in_eigenbasis(m, n)) < 1e-12);
        }
        // Ground state is annihilated and is a fixed point of the dissipator.
        CHECK((dressed * d.states.col(0)).norm() < 1e-12);
        const DensityMatrix rho0 = d.states.col(0) * d.states.col(0).adjoint();
        CHECK(max_abs(dissipator(dressed, rho0)) < 1e-12);
        CHECK(dressed_population(rho0, dressed) < 1e-15);
    }
}

TEST_CASE("dissipator is traceless") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = oracle::random_density(12, 1 + trial % 4, rng);
        const auto op = oracle::random_matrix(12, rng);
        CHECK(std::abs(dissipator(op, rho).trace()) < 1e-12);
        // Explicit formula.
        const Eigen::MatrixXcd ref =
            0.5 * (2.0 * op * rho * op.adjoint() - op.adjoint() * op * rho - rho * op.adjoint() * op);
        CHECK(max_abs(dissipator(op, rho) - ref) < 1e-12);
    }
}

TEST_CASE("bare dissipation excites the ultrastrong ground state, dressed does not") {
    const auto space = build_space({3, 3, 3});
    SystemParams p;
    p.g = {0.12, 0.12, 0.12};
    p.theta = 0.0;
    p.omega_q = 4.2;
    const auto h = build_hamiltonian(space, p);
    const auto d = diagonalize(h);
    const DensityMatrix rho0 = d.states.col(0) * d.states.col(0).adjoint();

    const auto a = mode_annihilation(space, Mode::a);
    CHECK((rho0 * a.adjoint() * a).trace().real() > 1e-4);  // virtual photons in the ground state

    std::vector<CollapseChannel> bare, dressed;
    const char* names[] = {"a", "b", "c", "q"};
    const auto ops = bare_lowering_ops(space);
    for (int k = 0; k < 4; ++k) {
        bare.push_back({names[k], ops[k], 0.05});
        dressed.push_back({names[k], dressed_lowering(d, ops[k]), 0.05});
        CHECK(dressed_population(rho0, dressed.back().op) < 1e-15);
    }
    const auto grid = uniform_grid(5.0, 1.0);
    EvolveOptions opt;
    opt.verify_step = false;
    opt.max_step = 0.05;
    const auto hamiltonian = [&](double) { return h; };
    const auto with_dressed = evolve(rho0, hamiltonian, dressed, grid, opt);
    const auto with_bare = evolve(rho0, hamiltonian, bare, grid, opt);
    const double e0 = d.energies(0);
    const double e_dressed = (with_dressed.snapshots.back() * h).trace().real();
    const double e_bare = (with_bare.snapshots.back() * h).trace().real();
    CHECK(std::abs(e_dressed - e0) < 1e-10);
    CHECK(max_abs(with_dressed.snapshots.back() - rho0) < 1e-10);
    CHECK(e_bare - e0 > 1e-4);
}

TEST_CASE("two-level amplitude damping follows exp(-gamma t)") {
    const auto space = build_space({1, 1, 1});
    const auto p = three_mode(2.0).uncoupled();
    const auto h = build_hamiltonian(space, p);
    const auto d = diagonalize(h);
    const double gamma = 0.3;
    std::vector<CollapseChannel> channels{{"q", dressed_lowering(d, qubit_operator(space, QubitOp::sigma_minus)), gamma}};
    const auto e = bare_state(space, 0, 0, 0, QubitLevel::e);
    const DensityMatrix rho0 = e * e.adjoint();
    const auto grid = uniform_grid(10.0, 0.5);
    const auto result = evolve(rho0, [&](double) { return h; }, channels, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double pe = (e.adjoint() * result.snapshots[k] * e)(0, 0).real();
        CHECK(pe == doctest::Approx(std::exp(-gamma * grid[k])).epsilon(1e-9));
        CHECK(dressed_population(result.snapshots[k], channels[0].op) ==
              doctest::Approx(std::exp(-gamma * grid[k])).epsilon(1e-9));
    }
    CHECK(result.max_step_deviation < 1e-6);
}

TEST_CASE("unitary evolution conserves purity") {
    const auto space = build_space({2, 2, 1});
    const auto h = build_hamiltonian(space, three_mode(2.4));
    std::mt19937 rng(5);
    Eigen::VectorXcd psi = oracle::random_matrix(space.dimension(), rng).col(0);
    psi.normalize();
    const DensityMatrix rho0 = psi * psi.adjoint();
    const auto result = evolve(rho0, [&](double) { return h; }, std::vector<CollapseChannel>{}, uniform_grid(50.0, 5.0));
    for (const auto& rho : result.snapshots) {
        CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-8);
        const auto c = check_density_matrix(rho);
        CHECK(c.trace_error < 1e-8);
        CHECK(c.hermiticity < 1e-10);
        CHECK(c.min_eigenvalue > -1e-8);
    }
    // Exact propagator oracle.
    const auto d = diagonalize(h);
    const Eigen::VectorXcd phases = (-std::complex<double>(0, 1) * 50.0 * d.energies.cast<std::complex<double>>()).array().exp();
    const Eigen::VectorXcd exact = d.states * phases.asDiagonal() * d.states.adjoint() * psi;
    CHECK(max_abs(result.snapshots.back() - exact * exact.adjoint()) < 1e-8);
}

TEST_CASE("resonant Rabi transfer takes half a period of pi/g_eff") {
    const auto space = build_space({3, 3, 1});
    auto p = three_mode(2.5);
    p.g = {0.1, 0.1, 0.0};
    const auto crossing = find_avoided_crossing(space, p, 2.4, 0.2, {{{0, 0, 0}, QubitLevel::e}, {{1, 1, 0}, QubitLevel::g}});
    const auto h = build_hamiltonian(space, p.with_omega_q(crossing.omega_q_star));
    const auto d = diagonalize(h);
    const auto start = dressed_state(d, bare_state(space, 0, 0, 0, QubitLevel::e));
    const auto goal = dressed_state(d, bare_state(space, 1, 1, 0, QubitLevel::g));
    const double half_period = std::numbers::pi / (2 * crossing.g_eff_numeric);
    EvolveOptions opt;
    opt.max_step = 0.25;
    const auto result = evolve(start * start.adjoint(), [&](double) { return h; }, std::vector<CollapseChannel>{},
                               {0.0, 0.5 * half_period, half_period, 2 * half_period}, opt);
    auto pop = [&](int k) { return (goal.adjoint() * result.snapshots[k] * goal)(0, 0).real(); };
    CHECK(pop(1) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(pop(2) > 0.99);
    CHECK(pop(3) < 0.01);
}

TEST_CASE("dressed populations of a two-photon eigenstate") {
    const auto space = build_space({4, 4, 4});
    const auto d = diagonalize(build_hamiltonian(space, three_mode(3.6)));
    const auto psi = d.states.col(identify_level(d, bare_state(space, 1, 1, 0, QubitLevel::g)).index);
    const DensityMatrix rho = psi * psi.adjoint();
    const auto ops = bare_lowering_ops(space);
    CHECK(dressed_population(rho, dressed_lowering(d, ops[0])) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(dressed_population(rho, dressed_lowering(d, ops[1])) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(dressed_population(rho, dressed_lowering(d, ops[2])) < 0.05);
    CHECK(dressed_population(rho, dressed_lowering(d, ops[3])) < 0.05);

    // Uncoupled limit: equals the bare photon number.
    const auto d0 = diagonalize(build_hamiltonian(space, three_mode(3.6).uncoupled()));
    std::mt19937 rng(9);
    const auto r = oracle::random_density(space.dimension(), 3, rng);
    CHECK(dressed_population(r, dressed_lowering(d0, ops[1])) ==
          doctest::Approx((r * mode_number(space, Mode::b)).trace().real()).epsilon(1e-12));
}

TEST_CASE("negative populations are rejected, round-off is clipped") {
    const auto space = build_space({1, 1, 1});
    const auto sm = qubit_operator(space, QubitOp::sigma_minus);
    DensityMatrix rho = DensityMatrix::Zero(space.dimension(), space.dimension());
    rho(0, 0) = 1.5;
    rho(1, 1) = -0.5;
    CHECK_THROWS_AS(dressed_population(rho, sm), NumericalIntegrity);
    rho(0, 0) = 1.0 + 1e-9;
    rho(1, 1) = -1e-9;
    CHECK(dressed_population(rho, sm) == 0.0);
}

TEST_CASE("excitations decay monotonically at zero temperature") {
    const auto space = build_space({2, 2, 1});
    auto p = three_mode(3.0);
    p.g = {0.1, 0.1, 0.0};
    const auto h = build_hamiltonian(space, p);
    const auto d = diagonalize(h);
    std::vector<CollapseChannel> channels;
    const auto ops = bare_lowering_ops(space);
    for (int k = 0; k < 4; ++k) channels.push_back({"x", dressed_lowering(d, ops[k]), 0.05 + 0.01 * k});
    DensityMatrix rho0 = DensityMatrix::Zero(space.dimension(), space.dimension());
    const double weights[] = {0.1, 0.2, 0.3, 0.25, 0.15};
    for (int n = 0; n < 5; ++n) rho0 += weights[n] * d.states.col(n + 1) * d.states.col(n + 1).adjoint();
    const auto result = evolve(rho0, [&](double) { return h; }, channels, uniform_grid(30.0, 1.0));
    double prev = 1e9;
    for (const auto& rho : result.snapshots) {
        double total = 0.0;
        for (const auto& ch : channels) total += dressed_population(rho, ch.op);
        CHECK(total <= prev + 1e-9);
        prev = total;
    }
}

TEST_CASE("integrity violations are reported with their time") {
    const auto space = build_space({1, 1, 1});
    const Eigen::Index dim = space.dimension();
    const auto e = bare_state(space, 0, 0, 0, QubitLevel::e);
    // A non-Hermitian "Hamiltonian" drains the trace.
    const OperatorMatrix leaky = std::complex<double>(0.0, -0.5) * OperatorMatrix::Identity(dim, dim);
    try {
        evolve(e * e.adjoint(), [&](double) { return leaky; }, std::vector<CollapseChannel>{}, {0.0, 0.5, 1.0});
        FAIL("expected IntegrationFailure");
    } catch (const IntegrationFailure& err) {
        CHECK(err.time() == 0.5);
    }
    DensityMatrix bad = DensityMatrix::Zero(dim, dim);
    bad(0, 0) = 0.5;
    CHECK_THROWS_AS(evolve(bad, [&](double) { return leaky; }, std::vector<CollapseChannel>{}, {0.0, 1.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(ChannelSet({{"x", OperatorMatrix::Zero(dim, dim), -1.0}}, dim), InvalidArgument);
}

TEST_CASE("working basis reproduces plateau spectra") {
    const auto space = build_space({3, 3, 3});
    const auto d1 = diagonalize(build_hamiltonian(space, three_mode(2.47)));
    const auto d2 = diagonalize(build_hamiltonian(space, three_mode(3.47)));
    const double ceiling = 3.0;
    const WorkingBasis basis({d1, d2}, ceiling);
    const auto& v = basis.vectors();
    CHECK(max_abs(v.adjoint() * v - Eigen::MatrixXcd::Identity(basis.size(), basis.size())) < 1e-10);
    for (const auto* d : {&d1, &d2}) {
        const double wq = d == &d1 ? 2.47 : 3.47;
        const auto reduced = diagonalize(basis.project(build_hamiltonian(space, three_mode(wq))));
        for (Eigen::Index n = 0; n < d->size() && d->energies(n) - d->energies(0) <= ceiling; ++n) {
            double nearest = 1e9;
            for (Eigen::Index m = 0; m < reduced.size(); ++m) {
                nearest = std::min(nearest, std::abs(reduced.energies(m) - d->energies(n)));
            }
            CHECK(nearest < 1e-10);
        }
    }
    const DensityMatrix rho = DensityMatrix::Identity(basis.size(), basis.size()) / double(basis.size());
    CHECK(std::abs(basis.lift(rho).trace().real() - 1.0) < 1e-12);
}
