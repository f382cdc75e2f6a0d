#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "uscqed/hamiltonian.hpp"
#include "uscqed/hilbert.hpp"
#include "uscqed/lindblad.hpp"
#include "uscqed/spectrum.hpp"

namespace uscqed {

// B110/B101/B011 entangle photons in modes ab/ac/bc; GHZ entangles all three.
enum class Target { B110, B101, B011, GHZ };

struct TargetSpec {
    Target target;
    std::vector<Mode> active_modes;  // couplings switched on
    BasisState photonic;             // bare |psi_n, g>
};

TargetSpec target_spec(Target target);
std::string to_string(Target target);
Target parse_target(const std::string& name);  // throws InvalidArgument

// How collapse operators follow the spectrum while omega_q moves.
enum class DressingPolicy {
    plateau,        // resonant-plateau operators until the ramp midpoint, detuned ones after
    instantaneous,  // re-diagonalize H(t) at every stage inside the ramp
};
std::string to_string(DressingPolicy policy);
DressingPolicy parse_dressing_policy(const std::string& name);

struct ProtocolConfig {
    Target target = Target::B110;
    double g = 0.1;
    double theta = std::numbers::pi / 6;  // must be 0 for GHZ
    std::array<double, kNumModes> omega{1.0, 1.5, 1.75};
    double gamma = 1e-3;
    std::optional<std::array<double, kNumModes>> kappa;  // default gamma / 2 for every mode
    std::array<int, kNumModes> cutoffs{4, 4, 4};         // inactive Bell mode is forced to 1
    std::optional<int> excitation_cap;

    double t_on = 0.0;
    double delta_omega_q = 1.0;
    double ramp_rate = 0.2;
    std::optional<double> hold_time;          // default pi / (2 g_eff_numeric)
    std::optional<double> omega_q_resonance;  // default: numerically located crossing
    double crossing_half_window = 0.2;        // search around (sum of active omegas) - 0.1
    double t_tail = 20.0;                     // simulated time after t_f
    std::optional<double> t_end;

    double dt = 0.25;       // integration step on the plateaus
    double ramp_dt = 0.05;  // integration step while omega_q moves
    double output_step = 0.5;
    double energy_margin = 0.5;  // kept eigenstates reach this far above the crossing pair
    DressingPolicy dressing = DressingPolicy::plateau;
    bool verify_step = true;

    void validate() const;
    std::array<double, kNumModes> resolved_kappa() const;
};

// Everything derived from a ProtocolConfig before time evolution starts.
struct ResolvedProtocol {
    ProtocolConfig config;
    TargetSpec spec;
    HilbertSpace space{{1, 1, 1}};
    SystemParams resonant;  // couplings per target, omega_q at the crossing
    SystemParams detuned;   // same with omega_q + delta_omega_q
    TuningSchedule schedule;
    std::optional<CrossingInfo> crossing;  // absent when omega_q_resonance is given
    double g_eff_numeric = 0.0;            // 0 when hold_time and omega_q_resonance are both given
    double hold_time = 0.0;
    double t_end = 0.0;
};

ResolvedProtocol resolve_protocol(const ProtocolConfig& config);

// Couplings g on the target's active modes, 0 elsewhere.
SystemParams target_params(const ProtocolConfig& config, double omega_q);

// Dressed counterpart of a bare vector. A single eigenstate is used when it
// carries >= 0.9 of the bare weight; when the weight is split across an
// avoided crossing, the normalized projection onto the two strongest
// eigenstates is returned instead. Throws AmbiguousLabel otherwise.
StateVector dressed_state(const EigenDecomposition& decomp, const StateVector& bare);

// (|psi_0,g> + |psi_0,e>)/sqrt2 from the coupled resonant Hamiltonian.
DensityMatrix prepare_initial(const HilbertSpace& space, const SystemParams& params_resonant);
DensityMatrix prepare_initial(const EigenDecomposition& decomp, const StateVector& bare_ground,
                              const StateVector& bare_excited);

struct TargetFamily {
    StateVector ground;   // |psi_0, g>
    StateVector photons;  // |psi_n, g>
    StateVector operator()(double phi) const;
};

TargetFamily target_state(const ProtocolConfig& config, const HilbertSpace& space, const SystemParams& params_detuned);
TargetFamily target_state(const EigenDecomposition& detuned, const StateVector& bare_ground,
                          const StateVector& bare_photons);

struct FidelityResult {
    double fidelity = 0.0;
    double phase = 0.0;  // maximizing phi in (-pi, pi]
};

// max_phi sqrt(<psi(phi)|rho|psi(phi)>) on a 1e-3 rad grid refined by golden section.
FidelityResult fidelity(const DensityMatrix& rho, const TargetFamily& family);

struct SimResult {
    std::vector<double> t;
    std::vector<double> pop_a, pop_b, pop_c, pop_qubit;
    std::vector<double> omega_q;
    std::vector<double> fidelity;
    std::vector<double> phase;
    double final_fidelity = 0.0;
    double final_phase = 0.0;

    ResolvedProtocol resolved;
    Eigen::Index working_dimension = 0;
    double step = 0.0;
    double max_step_deviation = 0.0;
    DensityCheck worst;
    double upper_shell_population = 0.0;  // max weight in kept states above the crossing pair
    double final_qubit_purity = 0.0;      // bare reduced qubit state at t_end
};

SimResult run_protocol(const ProtocolConfig& config);
SimResult run_protocol(const ResolvedProtocol& resolved);

struct SweepEntry {
    double gamma = 0.0;
    SimResult result;
};

// One independent run per gamma with kappa_j = gamma / 2.
std::vector<SweepEntry> decoherence_sweep(const ProtocolConfig& config, const std::vector<double>& gammas,
                                          std::size_t threads = 1);

}  // namespace uscqed
