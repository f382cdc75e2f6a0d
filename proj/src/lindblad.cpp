#include "uscqed/lindblad.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "uscqed/errors.hpp"
#include "uscqed/log.hpp"

namespace uscqed {

namespace {

using cd = std::complex<double>;
constexpr cd kMinusI{0.0, -1.0};

void require_square(const OperatorMatrix& m, Eigen::Index dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch");
    }
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

}  // namespace

OperatorMatrix dressed_lowering(const EigenDecomposition& decomp, const OperatorMatrix& bare_op) {
    const auto dim = decomp.size();
    require_square(bare_op, decomp.states.rows(), "dressed_lowering");
    const OperatorMatrix quadrature = bare_op + bare_op.adjoint();
    OperatorMatrix x = decomp.states.adjoint() * quadrature * decomp.states;
    bool degenerate = false;
    for (Eigen::Index n = 0; n < dim; ++n) {
        for (Eigen::Index m = 0; m < dim; ++m) {
            if (m >= n) {
                x(m, n) = 0.0;
            } else if (decomp.energies(n) - decomp.energies(m) < 1e-12 && std::abs(x(m, n)) > 1e-12) {
                degenerate = true;
            }
        }
    }
    if (degenerate) warn("dressed_lowering: degenerate levels coupled by the operator; ordered by index");
    return decomp.states * x * decomp.states.adjoint();
}

DensityMatrix dissipator(const OperatorMatrix& op, const DensityMatrix& rho) {
    require_square(rho, op.rows(), "dissipator");
    const OperatorMatrix odo = op.adjoint() * op;
    return op * rho * op.adjoint() - 0.5 * (odo * rho + rho * odo);
}

double dressed_population(const DensityMatrix& rho, const OperatorMatrix& lowering) {
    require_square(rho, lowering.rows(), "dressed_population");
    const OperatorMatrix number = lowering.adjoint() * lowering;
    // Tr(rho N) without forming the product.
    const double value = (rho.transpose().cwiseProduct(number)).sum().real();
    if (value < -1e-8) {
        throw NumericalIntegrity("dressed population is negative: " + std::to_string(value));
    }
    return std::max(0.0, value);
}

DensityCheck check_density_matrix(const DensityMatrix& rho) {
    DensityCheck c;
    c.trace_error = std::abs(rho.trace() - cd{1.0, 0.0});
    c.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = solver.eigenvalues().minCoeff();
    return c;
}

ChannelSet::ChannelSet(std::vector<CollapseChannel> channels, Eigen::Index dimension)
    : channels_(std::move(channels)), decay_(OperatorMatrix::Zero(dimension, dimension)) {
    for (const auto& ch : channels_) {
        require_square(ch.op, dimension, "ChannelSet");
        if (ch.rate < 0.0) throw InvalidArgument("collapse rate must be >= 0 for channel " + ch.label);
        if (ch.rate == 0.0) continue;
        jumps_.push_back(std::sqrt(ch.rate) * ch.op);
        decay_.noalias() += ch.rate * (ch.op.adjoint() * ch.op);
    }
}

DensityMatrix lindblad_rhs(const OperatorMatrix& h, const ChannelSet& channels, const DensityMatrix& rho) {
    // With H_eff = H - (i/2) sum rate O^dag O, the generator is
    // A + A^dag + sum L rho L^dag with A = -i H_eff rho.
    const OperatorMatrix h_eff = h - cd{0.0, 0.5} * channels.decay();
    DensityMatrix a = DensityMatrix(rho.rows(), rho.cols());
    a.noalias() = (kMinusI * h_eff) * rho;
    DensityMatrix out = a + a.adjoint();
    DensityMatrix tmp(rho.rows(), rho.cols());
    for (const auto& jump : channels.jumps()) {
        tmp.noalias() = jump * rho;
        out.noalias() += tmp * jump.adjoint();
    }
    return out;
}

namespace {

struct Trajectory {
    std::vector<DensityMatrix> snapshots;
    DensityCheck worst;
};

// Propagators exp(-i K h/2) for the current step, reused while K and h repeat
// (constant plateaus).
class StepPropagator {
public:
    const OperatorMatrix& half(const OperatorMatrix& k, double h) {
        if (h != h_ || k.rows() != k_.rows() || !(k.array() == k_.array()).all()) {
            k_ = k;
            h_ = h;
            half_ = (kMinusI * (0.5 * h) * k).exp();
        }
        return half_;
    }

private:
    OperatorMatrix k_;
    double h_ = 0.0;
    OperatorMatrix half_;
};

// Remainder of the generator after removing -i(K rho - rho K^dag).
DensityMatrix remainder_rhs(const OperatorMatrix& h, const ChannelSet& channels, const OperatorMatrix& k,
                            const DensityMatrix& rho) {
    const OperatorMatrix delta = h - cd{0.0, 0.5} * channels.decay() - k;
    DensityMatrix out = DensityMatrix::Zero(rho.rows(), rho.cols());
    if (!(delta.array() == cd{0.0, 0.0}).all()) {
        DensityMatrix a(rho.rows(), rho.cols());
        a.noalias() = (kMinusI * delta) * rho;
        out = a + a.adjoint();
    }
    DensityMatrix tmp(rho.rows(), rho.cols());
    for (const auto& jump : channels.jumps()) {
        tmp.noalias() = jump * rho;
        out.noalias() += tmp * jump.adjoint();
    }
    return out;
}

DensityMatrix sandwich(const OperatorMatrix& p, const DensityMatrix& x) {
    DensityMatrix tmp(x.rows(), x.cols());
    tmp.noalias() = p * x;
    DensityMatrix out(x.rows(), x.cols());
    out.noalias() = tmp * p.adjoint();
    return out;
}

// Integrating-factor (Lawson) RK4: the midpoint effective Hamiltonian K of
// each step is propagated exactly and RK4 handles the remainder, so on
// constant plateaus without loss the evolution is unitary to round-off.
Trajectory integrate(const DensityMatrix& rho0, const HamiltonianFn& hamiltonian, const ChannelFn& channels,
                     const std::vector<double>& t_grid, double step, const IntegrityTolerance& tol) {
    Trajectory out;
    out.snapshots.reserve(t_grid.size());
    out.snapshots.push_back(rho0);
    out.worst = check_density_matrix(rho0);

    DensityMatrix rho = rho0;
    StepPropagator propagator;

    for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
        const double span = t_grid[k + 1] - t_grid[k];
        const auto substeps = std::max<long>(1, static_cast<long>(std::ceil(span / step - 1e-9)));
        const double dt = span / static_cast<double>(substeps);
        for (long s = 0; s < substeps; ++s) {
            const double t = t_grid[k] + dt * static_cast<double>(s);
            const double tm = t + 0.5 * dt;
            const OperatorMatrix h_mid = hamiltonian(tm);
            const auto ch_mid = channels(tm);
            const OperatorMatrix k_mid = h_mid - cd{0.0, 0.5} * ch_mid->decay();
            const OperatorMatrix& p = propagator.half(k_mid, dt);

            const DensityMatrix k1 = remainder_rhs(hamiltonian(t), *channels(t), k_mid, rho);
            const DensityMatrix rho_h = sandwich(p, rho);
            const DensityMatrix k1_h = sandwich(p, k1);
            const DensityMatrix k2 = remainder_rhs(h_mid, *ch_mid, k_mid, rho_h + (0.5 * dt) * k1_h);
            const DensityMatrix k3 = remainder_rhs(h_mid, *ch_mid, k_mid, rho_h + (0.5 * dt) * k2);
            // Left limit at the step end: coefficients may jump at grid points.
            const double t_end = std::nextafter(t + dt, t);
            const DensityMatrix k4 =
                remainder_rhs(hamiltonian(t_end), *channels(t_end), k_mid, sandwich(p, rho_h + dt * k3));
            rho = sandwich(p, rho_h + (dt / 6.0) * k1_h + (dt / 3.0) * (k2 + k3)) + (dt / 6.0) * k4;
        }
        const DensityCheck c = check_density_matrix(rho);
        if (c.trace_error > tol.trace || c.hermiticity > tol.hermiticity || c.min_eigenvalue < tol.min_eigenvalue ||
            !std::isfinite(c.trace_error)) {
            throw IntegrationFailure("density matrix left the physical manifold at t = " +
                                         std::to_string(t_grid[k + 1]) + " (trace error " +
                                         sci(c.trace_error) + ", hermiticity " +
                                         sci(c.hermiticity) + ", min eigenvalue " +
                                         sci(c.min_eigenvalue) + ")",
                                     t_grid[k + 1]);
        }
        out.worst.trace_error = std::max(out.worst.trace_error, c.trace_error);
        out.worst.hermiticity = std::max(out.worst.hermiticity, c.hermiticity);
        out.worst.min_eigenvalue = std::min(out.worst.min_eigenvalue, c.min_eigenvalue);
        out.snapshots.push_back(rho);
    }
    return out;
}

double deviation(const Trajectory& coarse, const Trajectory& fine, const std::vector<double>& t_grid,
                 const ReporterFn& reporter) {
    double worst = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (reporter) {
            const auto a = reporter(t_grid[k], coarse.snapshots[k]);
            const auto b = reporter(t_grid[k], fine.snapshots[k]);
            for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        } else {
            worst = std::max(worst, (coarse.snapshots[k] - fine.snapshots[k]).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace

EvolveResult evolve(const DensityMatrix& rho0, const HamiltonianFn& hamiltonian, const ChannelFn& channels,
                    const std::vector<double>& t_grid, const EvolveOptions& options) {
    if (t_grid.empty()) throw InvalidArgument("evolve: empty time grid");
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InvalidArgument("evolve: time grid must be ascending");
    if (!(options.max_step > 0.0)) throw InvalidArgument("evolve: max_step must be > 0");
    if (rho0.rows() != rho0.cols()) throw InvalidArgument("evolve: rho0 is not square");
    const DensityCheck c0 = check_density_matrix(rho0);
    if (c0.trace_error > options.integrity.trace || c0.hermiticity > options.integrity.hermiticity ||
        c0.min_eigenvalue < options.integrity.min_eigenvalue) {
        throw InvalidArgument("evolve: rho0 is not a valid density matrix");
    }

    double step = options.max_step;
    Trajectory coarse = integrate(rho0, hamiltonian, channels, t_grid, step, options.integrity);
    EvolveResult result;
    if (!options.verify_step) {
        result.snapshots = std::move(coarse.snapshots);
        result.step = step;
        result.worst = coarse.worst;
        return result;
    }
    for (int attempt = 0; attempt <= options.max_refinements; ++attempt) {
        Trajectory fine = integrate(rho0, hamiltonian, channels, t_grid, 0.5 * step, options.integrity);
        const double dev = deviation(coarse, fine, t_grid, options.reporter);
        if (dev < options.step_tolerance) {
            result.snapshots = std::move(coarse.snapshots);
            result.step = step;
            result.max_step_deviation = dev;
            result.worst = coarse.worst;
            return result;
        }
        step *= 0.5;
        coarse = std::move(fine);
    }
    throw IntegrationFailure("step refinement did not reach tolerance " + sci(options.step_tolerance) +
                                 " after " + std::to_string(options.max_refinements) + " halvings",
                             t_grid.back());
}

EvolveResult evolve(const DensityMatrix& rho0, const HamiltonianFn& hamiltonian,
                    const std::vector<CollapseChannel>& channels, const std::vector<double>& t_grid,
                    const EvolveOptions& options) {
    auto fixed = std::make_shared<const ChannelSet>(channels, rho0.rows());
    return evolve(rho0, hamiltonian, [fixed](double) { return fixed; }, t_grid, options);
}

WorkingBasis::WorkingBasis(const std::vector<EigenDecomposition>& plateaus, double ceiling_above_ground) {
    if (plateaus.empty()) throw InvalidArgument("WorkingBasis: need at least one decomposition");
    const auto dim = plateaus.front().states.rows();
    std::vector<Eigen::Index> keep;
    Eigen::Index total = 0;
    for (const auto& p : plateaus) {
        if (p.states.rows() != dim) throw InvalidArgument("WorkingBasis: decompositions differ in dimension");
        Eigen::Index n = 0;
        while (n < p.size() && p.energies(n) - p.energies(0) <= ceiling_above_ground) ++n;
        keep.push_back(n);
        total += n;
    }
    Eigen::MatrixXcd stacked(dim, total);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < plateaus.size(); ++i) {
        stacked.middleCols(col, keep[i]) = plateaus[i].states.leftCols(keep[i]);
        col += keep[i];
    }
    if (plateaus.size() == 1) {
        vectors_ = std::move(stacked);
        return;
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-8) ++rank;
    vectors_ = svd.matrixU().leftCols(rank);
}

}  // namespace uscqed
