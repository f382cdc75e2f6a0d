#pragma once

#include <array>

#include "uscqed/hilbert.hpp"

namespace uscqed {

// Generalized multimode quantum Rabi model parameters. Frequencies, couplings
// and rates are in units of omega_a (omega_a = 1 sets the time unit 1/omega_a).
struct SystemParams {
    std::array<double, kNumModes> omega{1.0, 1.5, 1.75};  // resonator frequencies a, b, c
    double omega_q = 2.5;                                   // qubit frequency
    std::array<double, kNumModes> g{0.1, 0.1, 0.1};        // qubit-mode couplings
    double theta = 0.0;                                     // longitudinal/transversal mixing angle
    std::array<double, kNumModes> kappa{0.0, 0.0, 0.0};    // resonator decay rates
    double gamma = 0.0;                                     // qubit decay rate

    // Throws InvalidArgument when any invariant is broken.
    void validate() const;

    SystemParams with_omega_q(double w) const {
        SystemParams p = *this;
        p.omega_q = w;
        return p;
    }
    SystemParams uncoupled() const {
        SystemParams p = *this;
        p.g = {0.0, 0.0, 0.0};
        return p;
    }
};

// Smoothed-step qubit-frequency schedule with an instantaneous coupling switch-on.
//
//   omega_q(t) = omega_q_initial + delta_omega_q * { sin^2[A(t - t_i)] H(t - t_i)
//                                                  + sin^2[A(t - t_f)] H(t - t_f) },
//   t_f = t_i + pi / (2A).
struct TuningSchedule {
    double omega_q_initial = 2.5;
    double delta_omega_q = 1.0;
    double t_on = 0.0;
    double t_i = 100.0;
    double ramp_rate = 0.2;  // A

    double t_f() const;
    double ramp_midpoint() const;
    void validate() const;
};

// H = sum_j w_j n_j + (w_q/2) sz + [sum_j g_j (a_j + a_j^dag)] (sx cos th + sz sin th)
OperatorMatrix build_hamiltonian(const HilbertSpace& space, const SystemParams& params);

double qubit_frequency_at(const TuningSchedule& schedule, double t);

// Couplings are zero before t_on; omega_q follows the schedule.
OperatorMatrix hamiltonian_at(const HilbertSpace& space, const SystemParams& params,
                              const TuningSchedule& schedule, double t);

// Cached operator pieces so that H(omega_q, couplings on/off) is a cheap linear
// combination: H = free + (w_q/2) sz + [coupling if on].
class HamiltonianTerms {
public:
    HamiltonianTerms(const HilbertSpace& space, const SystemParams& params);

    OperatorMatrix assemble(double omega_q, bool coupled) const;
    OperatorMatrix at(const TuningSchedule& schedule, double t) const;

    const OperatorMatrix& free_modes() const { return free_; }
    const OperatorMatrix& sigma_z() const { return sigma_z_; }
    const OperatorMatrix& coupling() const { return coupling_; }

private:
    OperatorMatrix free_;
    OperatorMatrix sigma_z_;
    OperatorMatrix coupling_;
};

// P = sz * prod_j exp(i pi n_j); commutes with H when theta = 0.
OperatorMatrix parity_operator(const HilbertSpace& space);

}  // namespace uscqed
