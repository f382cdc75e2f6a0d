#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "uscqed/hamiltonian.hpp"
#include "uscqed/hilbert.hpp"

namespace uscqed {

struct EigenDecomposition {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXcd states;   // column n is the eigenvector of energies(n)

    Eigen::Index size() const { return energies.size(); }
    StateVector state(Eigen::Index n) const { return states.col(n); }
};

// Full Hermitian eigendecomposition. Real-symmetric input takes the real solver.
EigenDecomposition diagonalize(const OperatorMatrix& h);

struct LevelMatch {
    Eigen::Index index = 0;
    double overlap = 0.0;  // |<bare|Psi_index>|^2
};

// Eigenlevel with maximum overlap with the given (bare) vector. Throws
// AmbiguousLabel when that maximum is below 0.5.
LevelMatch identify_level(const EigenDecomposition& decomp, const StateVector& bare_target);

struct LevelScanPoint {
    double omega_q = 0.0;
    std::vector<double> energies;  // lowest K, ascending
};

std::vector<LevelScanPoint> scan_levels(const HilbertSpace& space, const SystemParams& params,
                                        const std::vector<double>& omega_q_grid, std::size_t levels = 12,
                                        std::size_t threads = 1);

struct CrossingInfo {
    double omega_q_star = 0.0;
    double min_splitting = 0.0;
    double g_eff_numeric = 0.0;  // min_splitting / 2
    std::pair<Eigen::Index, Eigen::Index> level_indices{0, 0};
};

// Gap between the two eigenlevels that jointly carry the most weight of the
// bare pair. The two levels swap character across the crossing, so they are
// selected by projected weight rather than by energy order.
struct PairGap {
    double gap = 0.0;
    std::pair<Eigen::Index, Eigen::Index> levels{0, 0};
};
PairGap pair_gap(const EigenDecomposition& decomp, const StateVector& bare_first, const StateVector& bare_second);

// Golden-section minimization of the pair gap over omega_q in
// [omega_q_guess - half_window, omega_q_guess + half_window], to relative
// tolerance 1e-8. Throws SearchFailure if the coarse-sampled gap is not
// unimodal with an interior minimum.
CrossingInfo find_avoided_crossing(const HilbertSpace& space, const SystemParams& params, double omega_q_guess,
                                   double half_window, const std::pair<BasisState, BasisState>& bare_pair);

}  // namespace uscqed
