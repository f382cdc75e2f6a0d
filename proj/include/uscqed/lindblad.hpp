#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "uscqed/hilbert.hpp"
#include "uscqed/spectrum.hpp"

namespace uscqed {

struct CollapseChannel {
    std::string label;
    OperatorMatrix op;  // dressed lowering operator
    double rate = 0.0;
};

// Dressed lowering operator built from a bare one:
//   O = sum_{E_n > E_m} <Psi_m|(o + o^dag)|Psi_n> |Psi_m><Psi_n|,
// returned in the same basis as the decomposition's vectors. Degenerate
// levels (within 1e-12) are ordered by index, with a warning.
OperatorMatrix dressed_lowering(const EigenDecomposition& decomp, const OperatorMatrix& bare_op);

// D[O]rho = O rho O^dag - (O^dag O rho + rho O^dag O) / 2
DensityMatrix dissipator(const OperatorMatrix& op, const DensityMatrix& rho);

// <O^dag O> = Tr(rho O^dag O) for a lowering operator O: the excitation number
// seen by that channel. Values in [-1e-8, 0) are clipped to 0.
double dressed_population(const DensityMatrix& rho, const OperatorMatrix& lowering);

struct DensityCheck {
    double trace_error = 0.0;     // |Tr rho - 1|
    double hermiticity = 0.0;     // max |rho - rho^dag|
    double min_eigenvalue = 0.0;
};
DensityCheck check_density_matrix(const DensityMatrix& rho);

struct IntegrityTolerance {
    double trace = 1e-8;
    double hermiticity = 1e-10;
    double min_eigenvalue = -1e-8;
};

// Channels with precomputed pieces for the right-hand side.
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(std::vector<CollapseChannel> channels, Eigen::Index dimension);

    const std::vector<CollapseChannel>& channels() const { return channels_; }
    const std::vector<OperatorMatrix>& jumps() const { return jumps_; }          // sqrt(rate) O
    const OperatorMatrix& decay() const { return decay_; }                       // sum rate O^dag O

private:
    std::vector<CollapseChannel> channels_;
    std::vector<OperatorMatrix> jumps_;
    OperatorMatrix decay_;
};

using HamiltonianFn = std::function<OperatorMatrix(double)>;
using ChannelFn = std::function<std::shared_ptr<const ChannelSet>(double)>;
// Values compared between a run and its half-step rerun.
using ReporterFn = std::function<std::vector<double>(double, const DensityMatrix&)>;

// drho/dt = -i[H(t), rho] + sum_k rate_k D[O_k] rho
DensityMatrix lindblad_rhs(const OperatorMatrix& h, const ChannelSet& channels, const DensityMatrix& rho);

struct EvolveOptions {
    double max_step = 0.05;
    // Rerun with half the step and require every reported value (or, without a
    // reporter, every density-matrix element) to agree within step_tolerance;
    // otherwise halve and retry up to max_refinements times.
    bool verify_step = true;
    double step_tolerance = 1e-6;
    int max_refinements = 4;
    ReporterFn reporter;
    IntegrityTolerance integrity;
};

struct EvolveResult {
    std::vector<DensityMatrix> snapshots;  // one per t_grid entry, snapshots[0] = rho0
    double step = 0.0;                     // accepted fixed step size
    double max_step_deviation = 0.0;       // vs the half-step rerun (0 if not verified)
    DensityCheck worst;                    // worst invariant values over all snapshots
};

// Fixed-step 4th-order (integrating-factor RK4) integration reporting at every t_grid point. Throws
// IntegrationFailure (with the offending time) when a snapshot breaks the
// density-matrix invariants or step refinement does not converge.
// H and the channels may jump at t_grid points; each step uses the left limit
// at its end.
EvolveResult evolve(const DensityMatrix& rho0, const HamiltonianFn& hamiltonian, const ChannelFn& channels,
                    const std::vector<double>& t_grid, const EvolveOptions& options = {});

EvolveResult evolve(const DensityMatrix& rho0, const HamiltonianFn& hamiltonian,
                    const std::vector<CollapseChannel>& channels, const std::vector<double>& t_grid,
                    const EvolveOptions& options = {});

// Orthonormal basis spanning the low-energy eigenvectors (E - E_0 <= ceiling)
// of one or more Hamiltonians. Rayleigh-Ritz in this span reproduces those
// eigenpairs exactly, so plateau spectra are preserved by the truncation.
class WorkingBasis {
public:
    WorkingBasis(const std::vector<EigenDecomposition>& plateaus, double ceiling_above_ground);

    Eigen::Index size() const { return vectors_.cols(); }
    const Eigen::MatrixXcd& vectors() const { return vectors_; }

    OperatorMatrix project(const OperatorMatrix& full) const { return vectors_.adjoint() * full * vectors_; }
    StateVector project(const StateVector& full) const { return vectors_.adjoint() * full; }
    DensityMatrix lift(const DensityMatrix& reduced) const { return vectors_ * reduced * vectors_.adjoint(); }

private:
    Eigen::MatrixXcd vectors_;
};

}  // namespace uscqed
