#include "uscqed/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uscqed/errors.hpp"

namespace uscqed {

void SystemParams::validate() const {
    for (std::size_t j = 0; j < kNumModes; ++j) {
        const char name = mode_name(static_cast<Mode>(j));
        if (!(omega[j] > 0.0)) throw InvalidArgument(std::string("omega_") + name + " must be > 0");
        if (!(g[j] >= 0.0)) throw InvalidArgument(std::string("g_") + name + " must be >= 0");
        if (!(kappa[j] >= 0.0)) throw InvalidArgument(std::string("kappa_") + name + " must be >= 0");
    }
    if (!(omega_q > 0.0)) throw InvalidArgument("omega_q must be > 0");
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
        throw InvalidArgument("theta must lie in [0, pi/2]");
    }
}

double TuningSchedule::t_f() const { return t_i + std::numbers::pi / (2.0 * ramp_rate); }

double TuningSchedule::ramp_midpoint() const { return 0.5 * (t_i + t_f()); }

void TuningSchedule::validate() const {
    if (!(ramp_rate > 0.0)) throw InvalidArgument("ramp rate A must be > 0");
    if (!(t_on >= 0.0)) throw InvalidArgument("t_on must be >= 0");
    if (!(t_on <= t_i)) throw InvalidArgument("t_on must not exceed t_i");
    if (!(omega_q_initial > 0.0)) throw InvalidArgument("initial qubit frequency must be > 0");
    if (!(omega_q_initial + delta_omega_q > 0.0)) {
        throw InvalidArgument("detuned qubit frequency must stay > 0");
    }
}

double qubit_frequency_at(const TuningSchedule& schedule, double t) {
    double step = 0.0;
    if (t > schedule.t_i) {
        const double s = std::sin(schedule.ramp_rate * (t - schedule.t_i));
        step += s * s;
    }
    const double t_f = schedule.t_f();
    if (t > t_f) {
        const double s = std::sin(schedule.ramp_rate * (t - t_f));
        step += s * s;
    }
    return schedule.omega_q_initial + schedule.delta_omega_q * step;
}

HamiltonianTerms::HamiltonianTerms(const HilbertSpace& space, const SystemParams& params) {
    params.validate();
    const auto dim = space.dimension();
    free_ = OperatorMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j < kNumModes; ++j) free_ += params.omega[j] * mode_number(space, static_cast<Mode>(j));
    sigma_z_ = qubit_operator(space, QubitOp::sigma_z);

    // Built element by element so a capped space gets the exact restriction of
    // the product (a + a^dag)(cos sx + sin sz), not a product of truncations.
    const double transversal = std::cos(params.theta);
    const double longitudinal = std::sin(params.theta);
    coupling_ = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const BasisState& s = space.state(col);
        const double sz = s.qubit == QubitLevel::e ? 1.0 : -1.0;
        BasisState flipped_qubit = s;
        flipped_qubit.qubit = s.qubit == QubitLevel::e ? QubitLevel::g : QubitLevel::e;
        for (std::size_t j = 0; j < kNumModes; ++j) {
            if (params.g[j] == 0.0) continue;
            for (int step : {-1, 1}) {
                const int n = s.photons[j] + step;
                if (n < 0) continue;
                const double ladder = params.g[j] * std::sqrt(static_cast<double>(std::max(n, s.photons[j])));
                BasisState moved = s;
                moved.photons[j] = n;
                if (space.contains(moved)) coupling_(space.index_of(moved), col) += ladder * longitudinal * sz;
                moved.qubit = flipped_qubit.qubit;
                if (space.contains(moved)) coupling_(space.index_of(moved), col) += ladder * transversal;
            }
        }
    }
}

OperatorMatrix HamiltonianTerms::assemble(double omega_q, bool coupled) const {
    OperatorMatrix h = free_ + (0.5 * omega_q) * sigma_z_;
    if (coupled) h += coupling_;
    return h;
}

OperatorMatrix HamiltonianTerms::at(const TuningSchedule& schedule, double t) const {
    return assemble(qubit_frequency_at(schedule, t), t >= schedule.t_on);
}

OperatorMatrix build_hamiltonian(const HilbertSpace& space, const SystemParams& params) {
    return HamiltonianTerms(space, params).assemble(params.omega_q, true);
}

OperatorMatrix hamiltonian_at(const HilbertSpace& space, const SystemParams& params,
                              const TuningSchedule& schedule, double t) {
    return HamiltonianTerms(space, params).at(schedule, t);
}

OperatorMatrix parity_operator(const HilbertSpace& space) {
    const auto dim = space.dimension();
    OperatorMatrix p = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const BasisState& s = space.state(i);
        const int photons = s.photons[0] + s.photons[1] + s.photons[2];
        const double sz = s.qubit == QubitLevel::e ? 1.0 : -1.0;
        p(i, i) = (photons % 2 == 0 ? 1.0 : -1.0) * sz;
    }
    return p;
}

}  // namespace uscqed
