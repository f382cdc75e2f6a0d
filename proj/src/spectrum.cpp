#include "uscqed/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uscqed/errors.hpp"
#include "uscqed/parallel.hpp"

namespace uscqed {

EigenDecomposition diagonalize(const OperatorMatrix& h) {
    if (h.rows() != h.cols()) throw InvalidArgument("diagonalize: matrix is not square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument("diagonalize: matrix is not Hermitian");
    }
    EigenDecomposition out;
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
        if (solver.info() != Eigen::Success) throw InvalidArgument("diagonalize: eigensolver failed");
        out.energies = solver.eigenvalues();
        out.states = solver.eigenvectors().cast<std::complex<double>>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
        if (solver.info() != Eigen::Success) throw InvalidArgument("diagonalize: eigensolver failed");
        out.energies = solver.eigenvalues();
        out.states = solver.eigenvectors();
    }
    return out;
}

LevelMatch identify_level(const EigenDecomposition& decomp, const StateVector& bare_target) {
    if (bare_target.size() != decomp.states.rows()) {
        throw InvalidArgument("identify_level: target dimension does not match the decomposition");
    }
    const Eigen::VectorXd overlaps = (decomp.states.adjoint() * bare_target).cwiseAbs2();
    LevelMatch m;
    m.overlap = overlaps.maxCoeff(&m.index);
    if (m.overlap < 0.5) {
        throw AmbiguousLabel("no eigenstate has overlap >= 0.5 with the bare target (best " +
                                 std::to_string(m.overlap) + " at level " + std::to_string(m.index) + ")",
                             m.overlap);
    }
    return m;
}

std::vector<LevelScanPoint> scan_levels(const HilbertSpace& space, const SystemParams& params,
                                        const std::vector<double>& omega_q_grid, std::size_t levels,
                                        std::size_t threads) {
    if (!std::is_sorted(omega_q_grid.begin(), omega_q_grid.end())) {
        throw InvalidArgument("scan_levels: omega_q grid must be sorted ascending");
    }
    if (levels == 0 || static_cast<Eigen::Index>(levels) > space.dimension()) {
        throw InvalidArgument("scan_levels: level count must be in [1, dimension]");
    }
    const HamiltonianTerms terms(space, params);
    std::vector<LevelScanPoint> out(omega_q_grid.size());
    parallel_for(omega_q_grid.size(), threads, [&](std::size_t i) {
        const auto decomp = diagonalize(terms.assemble(omega_q_grid[i], true));
        out[i].omega_q = omega_q_grid[i];
        out[i].energies.assign(decomp.energies.data(), decomp.energies.data() + levels);
    });
    return out;
}

PairGap pair_gap(const EigenDecomposition& decomp, const StateVector& bare_first, const StateVector& bare_second) {
    const Eigen::VectorXd weight = (decomp.states.adjoint() * bare_first).cwiseAbs2() +
                                   (decomp.states.adjoint() * bare_second).cwiseAbs2();
    Eigen::Index first = 0;
    weight.maxCoeff(&first);
    Eigen::Index second = first == 0 ? 1 : 0;
    for (Eigen::Index n = 0; n < weight.size(); ++n) {
        if (n != first && weight(n) > weight(second)) second = n;
    }
    PairGap out;
    out.levels = {std::min(first, second), std::max(first, second)};
    out.gap = std::abs(decomp.energies(first) - decomp.energies(second));
    return out;
}

CrossingInfo find_avoided_crossing(const HilbertSpace& space, const SystemParams& params, double omega_q_guess,
                                   double half_window, const std::pair<BasisState, BasisState>& bare_pair) {
    if (!(half_window > 0.0)) throw InvalidArgument("find_avoided_crossing: window must be > 0");
    const double lo = omega_q_guess - half_window;
    const double hi = omega_q_guess + half_window;
    if (!(lo > 0.0)) throw InvalidArgument("find_avoided_crossing: window reaches omega_q <= 0");

    const HamiltonianTerms terms(space, params);
    const StateVector first = bare_state(space, bare_pair.first);
    const StateVector second = bare_state(space, bare_pair.second);
    auto evaluate = [&](double wq) { return pair_gap(diagonalize(terms.assemble(wq, true)), first, second); };

    constexpr int kCoarse = 41;
    std::vector<double> x(kCoarse), gap(kCoarse);
    for (int i = 0; i < kCoarse; ++i) {
        x[i] = lo + (hi - lo) * i / (kCoarse - 1);
        gap[i] = evaluate(x[i]).gap;
    }
    const auto k = static_cast<int>(std::min_element(gap.begin(), gap.end()) - gap.begin());
    if (k == 0 || k == kCoarse - 1) {
        throw SearchFailure("avoided-crossing search: gap minimum lies on the window edge at omega_q = " +
                            std::to_string(x[k]));
    }
    const double tol = 1e-12 * (1.0 + *std::max_element(gap.begin(), gap.end()));
    for (int i = 0; i < kCoarse - 1; ++i) {
        const bool ok = i < k ? gap[i] >= gap[i + 1] - tol : gap[i + 1] >= gap[i] - tol;
        if (!ok) {
            throw SearchFailure("avoided-crossing search: gap is not unimodal in the window near omega_q = " +
                                std::to_string(x[i]));
        }
    }

    // Golden-section search on the bracket around the coarse minimum.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = x[k - 1], b = x[k + 1];
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = evaluate(c).gap, fd = evaluate(d).gap;
    while (b - a > 1e-8 * std::abs(0.5 * (a + b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = evaluate(c).gap;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = evaluate(d).gap;
        }
    }
    CrossingInfo info;
    info.omega_q_star = 0.5 * (a + b);
    const PairGap best = evaluate(info.omega_q_star);
    info.min_splitting = best.gap;
    info.g_eff_numeric = 0.5 * best.gap;
    info.level_indices = best.levels;
    return info;
}

}  // namespace uscqed
