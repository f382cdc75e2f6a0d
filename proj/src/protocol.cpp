#include "uscqed/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "uscqed/errors.hpp"
#include "uscqed/log.hpp"
#include "uscqed/parallel.hpp"

namespace uscqed {

namespace {

using cd = std::complex<double>;

// Rotates v so that <bare|v> is real and positive.
StateVector fix_phase(StateVector v, const StateVector& bare) {
    const cd overlap = bare.dot(v);
    if (std::abs(overlap) > 0.0) v *= std::conj(overlap) / std::abs(overlap);
    return v;
}

double wrap_phase(double phi) {
    phi = std::remainder(phi, 2.0 * std::numbers::pi);
    return phi <= -std::numbers::pi ? phi + 2.0 * std::numbers::pi : phi;
}

const char* kChannelLabels[] = {"X_a", "X_b", "X_c", "S"};

}  // namespace

TargetSpec target_spec(Target target) {
    switch (target) {
        case Target::B110: return {target, {Mode::a, Mode::b}, BasisState{{1, 1, 0}, QubitLevel::g}};
        case Target::B101: return {target, {Mode::a, Mode::c}, BasisState{{1, 0, 1}, QubitLevel::g}};
        case Target::B011: return {target, {Mode::b, Mode::c}, BasisState{{0, 1, 1}, QubitLevel::g}};
        case Target::GHZ: return {target, {Mode::a, Mode::b, Mode::c}, BasisState{{1, 1, 1}, QubitLevel::g}};
    }
    throw InvalidArgument("unknown target");
}

std::string to_string(Target target) {
    switch (target) {
        case Target::B110: return "B110";
        case Target::B101: return "B101";
        case Target::B011: return "B011";
        case Target::GHZ: return "GHZ";
    }
    return "?";
}

Target parse_target(const std::string& name) {
    for (Target t : {Target::B110, Target::B101, Target::B011, Target::GHZ}) {
        if (to_string(t) == name) return t;
    }
    throw InvalidArgument("unknown target '" + name + "' (expected B110, B101, B011 or GHZ)");
}

std::string to_string(DressingPolicy policy) {
    return policy == DressingPolicy::plateau ? "plateau" : "instantaneous";
}

DressingPolicy parse_dressing_policy(const std::string& name) {
    if (name == "plateau") return DressingPolicy::plateau;
    if (name == "instantaneous") return DressingPolicy::instantaneous;
    throw InvalidArgument("unknown dressing policy '" + name + "' (expected plateau or instantaneous)");
}

void ProtocolConfig::validate() const {
    if (!(g >= 0.0)) throw InvalidArgument("g must be >= 0");
    if (target == Target::GHZ && theta != 0.0) {
        throw InvalidArgument("the GHZ protocol uses purely transversal coupling (theta = 0)");
    }
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
    for (double k : resolved_kappa()) {
        if (!(k >= 0.0)) throw InvalidArgument("kappa must be >= 0");
    }
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(ramp_dt > 0.0)) throw InvalidArgument("ramp_dt must be > 0");
    if (!(output_step > 0.0)) throw InvalidArgument("output_step must be > 0");
    if (!(energy_margin > 0.0)) throw InvalidArgument("energy_margin must be > 0");
    if (!(ramp_rate > 0.0)) throw InvalidArgument("ramp_rate must be > 0");
    if (!(t_on >= 0.0)) throw InvalidArgument("t_on must be >= 0");
    if (!(t_tail >= 0.0)) throw InvalidArgument("t_tail must be >= 0");
    if (!(crossing_half_window > 0.0)) throw InvalidArgument("crossing_half_window must be > 0");
    if (hold_time && !(*hold_time > 0.0)) throw InvalidArgument("hold_time must be > 0");
    if (omega_q_resonance && !(*omega_q_resonance > 0.0)) throw InvalidArgument("omega_q_resonance must be > 0");
    SystemParams probe;
    probe.omega = omega;
    probe.theta = theta;
    probe.validate();
}

std::array<double, kNumModes> ProtocolConfig::resolved_kappa() const {
    return kappa.value_or(std::array<double, kNumModes>{gamma / 2, gamma / 2, gamma / 2});
}

SystemParams target_params(const ProtocolConfig& config, double omega_q) {
    const TargetSpec spec = target_spec(config.target);
    SystemParams p;
    p.omega = config.omega;
    p.omega_q = omega_q;
    p.g = {0.0, 0.0, 0.0};
    for (Mode m : spec.active_modes) p.g[static_cast<std::size_t>(m)] = config.g;
    p.theta = config.theta;
    p.kappa = config.resolved_kappa();
    p.gamma = config.gamma;
    return p;
}

ResolvedProtocol resolve_protocol(const ProtocolConfig& config) {
    config.validate();
    ResolvedProtocol r;
    r.config = config;
    r.spec = target_spec(config.target);

    auto cutoffs = config.cutoffs;
    if (r.spec.active_modes.size() == 2) {
        for (std::size_t j = 0; j < kNumModes; ++j) {
            if (std::find(r.spec.active_modes.begin(), r.spec.active_modes.end(), static_cast<Mode>(j)) ==
                r.spec.active_modes.end()) {
                cutoffs[j] = 1;
            }
        }
    }
    r.space = build_space(cutoffs, config.excitation_cap);

    double resonance_sum = 0.0;
    for (Mode m : r.spec.active_modes) resonance_sum += config.omega[static_cast<std::size_t>(m)];

    if (!(config.omega_q_resonance && config.hold_time)) {
        const SystemParams probe = target_params(config, resonance_sum);
        r.crossing = find_avoided_crossing(r.space, probe, resonance_sum - 0.1, config.crossing_half_window,
                                           {BasisState{{0, 0, 0}, QubitLevel::e}, r.spec.photonic});
        r.g_eff_numeric = r.crossing->g_eff_numeric;
    }
    const double omega_q = config.omega_q_resonance.value_or(r.crossing ? r.crossing->omega_q_star : resonance_sum);
    r.resonant = target_params(config, omega_q);
    r.detuned = r.resonant.with_omega_q(omega_q + config.delta_omega_q);
    r.resonant.validate();
    r.detuned.validate();

    if (config.hold_time) {
        r.hold_time = *config.hold_time;
    } else {
        if (!(r.g_eff_numeric > 0.0)) throw InvalidArgument("effective coupling vanishes; hold time is undefined");
        r.hold_time = std::numbers::pi / (2.0 * r.g_eff_numeric);
    }

    // The ramp midpoint marks the end of the resonant hold.
    r.schedule.omega_q_initial = omega_q;
    r.schedule.delta_omega_q = config.delta_omega_q;
    r.schedule.t_on = config.t_on;
    r.schedule.ramp_rate = config.ramp_rate;
    r.schedule.t_i = config.t_on + r.hold_time - std::numbers::pi / (4.0 * config.ramp_rate);
    if (r.schedule.t_i < config.t_on) {
        throw InvalidArgument("ramp is too slow for the hold time: need pi/(4A) <= hold time");
    }
    r.schedule.validate();
    r.t_end = config.t_end.value_or(r.schedule.t_f() + config.t_tail);
    if (!(r.t_end > 0.0)) throw InvalidArgument("t_end must be > 0");
    return r;
}

StateVector dressed_state(const EigenDecomposition& decomp, const StateVector& bare) {
    const StateVector amplitudes = decomp.states.adjoint() * bare;
    const Eigen::VectorXd weight = amplitudes.cwiseAbs2();
    Eigen::Index best = 0;
    weight.maxCoeff(&best);
    if (weight(best) >= 0.9) return fix_phase(decomp.states.col(best), bare);

    Eigen::Index second = best == 0 ? 1 : 0;
    for (Eigen::Index n = 0; n < weight.size(); ++n) {
        if (n != best && weight(n) > weight(second)) second = n;
    }
    if (weight.size() < 2 || weight(best) + weight(second) < 0.9) {
        throw AmbiguousLabel("bare state is spread over more than two dressed levels (best pair weight " +
                                 std::to_string(weight(best) + (weight.size() > 1 ? weight(second) : 0.0)) + ")",
                             weight(best));
    }
    StateVector v = decomp.states.col(best) * amplitudes(best) + decomp.states.col(second) * amplitudes(second);
    return v / v.norm();
}

DensityMatrix prepare_initial(const EigenDecomposition& decomp, const StateVector& bare_ground,
                              const StateVector& bare_excited) {
    const LevelMatch ground = identify_level(decomp, bare_ground);
    const StateVector g = fix_phase(decomp.states.col(ground.index), bare_ground);
    const StateVector e = dressed_state(decomp, bare_excited);
    const StateVector psi = (g + e) / std::sqrt(2.0);
    return psi * psi.adjoint();
}

DensityMatrix prepare_initial(const HilbertSpace& space, const SystemParams& params_resonant) {
    return prepare_initial(diagonalize(build_hamiltonian(space, params_resonant)),
                           bare_state(space, 0, 0, 0, QubitLevel::g), bare_state(space, 0, 0, 0, QubitLevel::e));
}

StateVector TargetFamily::operator()(double phi) const {
    return (ground + std::polar(1.0, phi) * photons) / std::sqrt(2.0);
}

TargetFamily target_state(const EigenDecomposition& detuned, const StateVector& bare_ground,
                          const StateVector& bare_photons) {
    TargetFamily f;
    f.ground = fix_phase(detuned.states.col(identify_level(detuned, bare_ground).index), bare_ground);
    f.photons = fix_phase(detuned.states.col(identify_level(detuned, bare_photons).index), bare_photons);
    return f;
}

TargetFamily target_state(const ProtocolConfig& config, const HilbertSpace& space, const SystemParams& params_detuned) {
    const auto decomp = diagonalize(build_hamiltonian(space, params_detuned));
    return target_state(decomp, bare_state(space, 0, 0, 0, QubitLevel::g),
                        bare_state(space, target_spec(config.target).photonic));
}

FidelityResult fidelity(const DensityMatrix& rho, const TargetFamily& family) {
    if (rho.rows() != family.ground.size()) throw InvalidArgument("fidelity: dimension mismatch");
    // <psi(phi)|rho|psi(phi)> = (rho_00 + rho_11)/2 + Re(e^{i phi} rho_01)
    const double diag = 0.5 * (family.ground.dot(rho * family.ground).real() +
                               family.photons.dot(rho * family.photons).real());
    const cd coherence = family.ground.dot(rho * family.photons);
    auto overlap = [&](double phi) { return diag + (std::polar(1.0, phi) * coherence).real(); };

    constexpr double kGrid = 1e-3;
    const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi / kGrid));
    double best_phi = -std::numbers::pi, best = overlap(best_phi);
    for (int i = 1; i < n; ++i) {
        const double phi = -std::numbers::pi + kGrid * i;
        const double v = overlap(phi);
        if (v > best) {
            best = v;
            best_phi = phi;
        }
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_phi - kGrid, b = best_phi + kGrid;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    while (b - a > 1e-12) {
        if (overlap(c) > overlap(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    const double phi = 0.5 * (a + b);
    FidelityResult r;
    r.phase = wrap_phase(phi);
    r.fidelity = std::sqrt(std::clamp(std::max(best, overlap(phi)), 0.0, 1.0));
    return r;
}

SimResult run_protocol(const ProtocolConfig& config) { return run_protocol(resolve_protocol(config)); }

SimResult run_protocol(const ResolvedProtocol& r) {
    const auto& cfg = r.config;
    const auto& space = r.space;
    const HamiltonianTerms terms(space, r.resonant);
    const bool has_precoupling = cfg.t_on > 0.0;

    const auto full_resonant = diagonalize(terms.assemble(r.resonant.omega_q, true));
    const auto full_detuned = diagonalize(terms.assemble(r.detuned.omega_q, true));
    const StateVector bare_g = bare_state(space, 0, 0, 0, QubitLevel::g);
    const StateVector bare_e = bare_state(space, 0, 0, 0, QubitLevel::e);
    const StateVector bare_target = bare_state(space, r.spec.photonic);

    // Keep everything up to the upper level of the crossing pair plus a margin;
    // population in the top half of that margin is reported as truncation leak.
    const PairGap pair = pair_gap(full_resonant, bare_e, bare_target);
    const double pair_top = full_resonant.energies(pair.levels.second) - full_resonant.energies(0);
    const double ceiling = pair_top + cfg.energy_margin;
    std::vector<EigenDecomposition> plateaus{full_resonant, full_detuned};
    if (has_precoupling) plateaus.push_back(diagonalize(terms.assemble(r.resonant.omega_q, false)));
    const WorkingBasis basis(plateaus, ceiling);
    const Eigen::Index dim = basis.size();

    const OperatorMatrix free_w = basis.project(terms.free_modes());
    const OperatorMatrix sz_w = basis.project(terms.sigma_z());
    const OperatorMatrix coupling_w = basis.project(terms.coupling());
    auto h_reduced = [&](double omega_q, bool coupled) {
        OperatorMatrix h = free_w + (0.5 * omega_q) * sz_w;
        if (coupled) h += coupling_w;
        return OperatorMatrix(0.5 * (h + h.adjoint()));
    };
    const HamiltonianFn hamiltonian = [&](double t) {
        return h_reduced(qubit_frequency_at(r.schedule, t), t >= r.schedule.t_on);
    };

    std::array<OperatorMatrix, 4> bare_ops;
    for (std::size_t j = 0; j < kNumModes; ++j) bare_ops[j] = basis.project(mode_annihilation(space, static_cast<Mode>(j)));
    bare_ops[3] = basis.project(qubit_operator(space, QubitOp::sigma_minus));
    const std::array<double, 4> rates{r.resonant.kappa[0], r.resonant.kappa[1], r.resonant.kappa[2], r.resonant.gamma};
    auto channels_for = [&](const EigenDecomposition& d) {
        std::vector<CollapseChannel> chans;
        for (std::size_t k = 0; k < 4; ++k) chans.push_back({kChannelLabels[k], dressed_lowering(d, bare_ops[k]), rates[k]});
        return std::make_shared<const ChannelSet>(std::move(chans), dim);
    };

    const auto dec_resonant = diagonalize(h_reduced(r.resonant.omega_q, true));
    const auto dec_detuned = diagonalize(h_reduced(r.detuned.omega_q, true));
    const auto dec_pre = has_precoupling ? diagonalize(h_reduced(r.resonant.omega_q, false)) : dec_resonant;
    const auto set_resonant = channels_for(dec_resonant);
    const auto set_detuned = channels_for(dec_detuned);
    const auto set_pre = has_precoupling ? channels_for(dec_pre) : set_resonant;

    const double t_mid = r.schedule.ramp_midpoint();
    const double t_i = r.schedule.t_i, t_f = r.schedule.t_f();
    struct Memo {
        double t = -1.0;
        std::shared_ptr<const ChannelSet> set;
    };
    auto memo = std::make_shared<Memo>();
    const ChannelFn channels = [&, memo](double t) -> std::shared_ptr<const ChannelSet> {
        if (t < r.schedule.t_on) return set_pre;
        if (cfg.dressing == DressingPolicy::instantaneous && t > t_i && t < t_f) {
            if (memo->t != t) {
                memo->t = t;
                memo->set = channels_for(diagonalize(hamiltonian(t)));
            }
            return memo->set;
        }
        return t < t_mid ? set_resonant : set_detuned;
    };

    const DensityMatrix rho0 = prepare_initial(dec_pre, basis.project(bare_g), basis.project(bare_e));
    const TargetFamily target = target_state(dec_detuned, basis.project(bare_g), basis.project(bare_target));

    std::vector<double> outputs;
    for (long k = 0;; ++k) {
        const double t = cfg.output_step * static_cast<double>(k);
        if (t >= r.t_end - 1e-9 * r.t_end) break;
        outputs.push_back(t);
    }
    outputs.push_back(r.t_end);
    // Schedule kinks and channel switches become step boundaries.
    std::vector<double> grid = outputs;
    for (double b : {r.schedule.t_on, t_i, t_mid, t_f}) {
        if (b > 0.0 && b < r.t_end) grid.push_back(b);
    }
    // The ramp is the only stretch where H changes continuously; it gets the
    // finer step.
    const double ramp_step = std::min(cfg.ramp_dt, cfg.dt);
    const auto ramp_points = static_cast<long>(std::ceil((t_f - t_i) / ramp_step));
    for (long k = 1; k < ramp_points; ++k) {
        const double b = t_i + (t_f - t_i) * static_cast<double>(k) / static_cast<double>(ramp_points);
        if (b > 0.0 && b < r.t_end) grid.push_back(b);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto observe = [&](double t, const DensityMatrix& rho) {
        const auto set = channels(t);
        std::vector<double> v;
        for (const auto& ch : set->channels()) v.push_back(dressed_population(rho, ch.op));
        v.push_back(fidelity(rho, target).fidelity);
        return v;
    };

    EvolveOptions options;
    options.max_step = cfg.dt;
    options.verify_step = cfg.verify_step;
    options.reporter = observe;
    const EvolveResult evolved = evolve(rho0, hamiltonian, channels, grid, options);

    SimResult out;
    out.resolved = r;
    out.working_dimension = dim;
    out.step = evolved.step;
    out.max_step_deviation = evolved.max_step_deviation;
    out.worst = evolved.worst;
    const double shell_floor = pair_top + 0.5 * cfg.energy_margin + std::max(0.0, cfg.delta_omega_q);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        if (!std::binary_search(outputs.begin(), outputs.end(), t)) continue;
        const DensityMatrix& rho = evolved.snapshots[k];
        const auto values = observe(t, rho);
        const FidelityResult f = fidelity(rho, target);
        out.t.push_back(t);
        out.pop_a.push_back(values[0]);
        out.pop_b.push_back(values[1]);
        out.pop_c.push_back(values[2]);
        out.pop_qubit.push_back(values[3]);
        out.omega_q.push_back(qubit_frequency_at(r.schedule, t));
        out.fidelity.push_back(f.fidelity);
        out.phase.push_back(f.phase);

        const auto& dec = t < r.schedule.t_on ? dec_pre : (t < t_mid ? dec_resonant : dec_detuned);
        double shell = 0.0;
        for (Eigen::Index n = 0; n < dec.size(); ++n) {
            if (dec.energies(n) - dec.energies(0) > shell_floor) {
                shell += dec.states.col(n).dot(rho * dec.states.col(n)).real();
            }
        }
        out.upper_shell_population = std::max(out.upper_shell_population, shell);
    }
    out.final_fidelity = out.fidelity.back();
    out.final_phase = out.phase.back();

    const Eigen::Matrix2cd qubit = reduce_to_qubit(space, basis.lift(evolved.snapshots.back()));
    out.final_qubit_purity = (qubit * qubit).trace().real();

    if (out.upper_shell_population > 1e-3) {
        warn("states near the truncation ceiling reached population " + std::to_string(out.upper_shell_population) +
             "; consider a larger energy_margin");
    }
    return out;
}

std::vector<SweepEntry> decoherence_sweep(const ProtocolConfig& config, const std::vector<double>& gammas,
                                          std::size_t threads) {
    if (gammas.empty()) throw InvalidArgument("decoherence sweep needs at least one gamma");
    for (double g : gammas) {
        if (!(g >= 0.0)) throw InvalidArgument("gamma values must be >= 0");
    }
    // Resolve once: the crossing and schedule do not depend on the rates.
    ProtocolConfig base = config;
    base.kappa.reset();
    const ResolvedProtocol resolved = resolve_protocol(base);

    std::vector<SweepEntry> out(gammas.size());
    parallel_for(gammas.size(), threads, [&](std::size_t i) {
        ResolvedProtocol r = resolved;
        r.config.gamma = gammas[i];
        r.config.kappa.reset();
        r.resonant.gamma = r.detuned.gamma = gammas[i];
        r.resonant.kappa = r.detuned.kappa = r.config.resolved_kappa();
        out[i] = {gammas[i], run_protocol(r)};
    });

    std::vector<std::size_t> order(gammas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gammas[a] < gammas[b]; });
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const auto& lo = out[order[k]].result;
        const auto& hi = out[order[k + 1]].result;
        if (hi.final_fidelity > lo.final_fidelity + 1e-9) {
            warn("final fidelity increases from gamma = " + std::to_string(gammas[order[k]]) + " to " +
                 std::to_string(gammas[order[k + 1]]));
        }
    }
    return out;
}

}  // namespace uscqed
