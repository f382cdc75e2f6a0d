#include "uscqed/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "uscqed/errors.hpp"
#include "uscqed/log.hpp"

namespace uscqed {

namespace {

constexpr double kGuardBand = 1e-6;      // in units of omega_a
constexpr double kVanishingCoeff = 1e-15;  // cos(pi/2) is not exactly 0 in floating point

std::string label(const BasisState& s) {
    std::ostringstream os;
    os << '|' << s.photons[0] << ',' << s.photons[1] << ',' << s.photons[2] << ','
       << (s.qubit == QubitLevel::e ? 'e' : 'g') << '>';
    return os.str();
}

void warn_if_commensurate(const SystemParams& params, double omega_q) {
    std::vector<std::pair<std::string, double>> freqs{{"omega_q", omega_q}};
    for (std::size_t j = 0; j < kNumModes; ++j) {
        if (params.g[j] != 0.0) freqs.emplace_back(std::string("omega_") + mode_name(static_cast<Mode>(j)), params.omega[j]);
    }
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        for (std::size_t k = i + 1; k < freqs.size(); ++k) {
            const double hi = std::max(freqs[i].second, freqs[k].second);
            const double lo = std::min(freqs[i].second, freqs[k].second);
            const double ratio = hi / lo;
            if (std::abs(ratio - std::round(ratio)) < 1e-9 * ratio) {
                warn("commensurate frequencies " + freqs[i].first + " and " + freqs[k].first +
                     " (ratio " + std::to_string(std::round(ratio)) + "); perturbative path sum may be unreliable");
            }
        }
    }
}

}  // namespace

double TransitionPath::contribution() const {
    double value = 1.0;
    for (const auto& h : hops) value *= h.element;
    for (double d : denominators) value /= d;
    return value;
}

double bare_energy(const BasisState& s, const SystemParams& params) {
    double e = 0.0;
    for (std::size_t j = 0; j < kNumModes; ++j) e += s.photons[j] * params.omega[j];
    return e + (s.qubit == QubitLevel::e ? 0.5 : -0.5) * params.omega_q;
}

std::vector<Hop> interaction_neighbors(const BasisState& from, const SystemParams& params) {
    const double transversal = std::cos(params.theta);
    const double longitudinal = std::sin(params.theta);
    const double sz = from.qubit == QubitLevel::e ? 1.0 : -1.0;
    std::vector<Hop> out;
    for (std::size_t j = 0; j < kNumModes; ++j) {
        if (params.g[j] == 0.0) continue;
        for (bool create : {false, true}) {
            const int n = from.photons[j];
            if (!create && n == 0) continue;
            const double ladder = std::sqrt(static_cast<double>(create ? n + 1 : n));
            for (Vertex v : {Vertex::transversal, Vertex::longitudinal}) {
                const double coeff = v == Vertex::transversal ? transversal : longitudinal * sz;
                if (std::abs(coeff) < kVanishingCoeff) continue;
                Hop h;
                h.to = from;
                h.to.photons[j] += create ? 1 : -1;
                if (v == Vertex::transversal) h.to.qubit = from.qubit == QubitLevel::g ? QubitLevel::e : QubitLevel::g;
                h.mode = static_cast<Mode>(j);
                h.creates_photon = create;
                h.vertex = v;
                h.element = params.g[j] * ladder * coeff;
                out.push_back(h);
            }
        }
    }
    return out;
}

double resonant_qubit_frequency(const BasisState& initial, const BasisState& final_state,
                                const SystemParams& params) {
    if (initial.qubit == final_state.qubit) {
        throw InvalidArgument("resonance requires the initial and final states to differ in qubit level");
    }
    // E_i = E_f  <=>  photons_i -/+ w_q/2 = photons_f +/- w_q/2.
    const double photons_i = bare_energy(initial, params.with_omega_q(0.0));
    const double photons_f = bare_energy(final_state, params.with_omega_q(0.0));
    const double wq = initial.qubit == QubitLevel::e ? photons_f - photons_i : photons_i - photons_f;
    if (!(wq > 0.0)) throw InvalidArgument("process " + label(initial) + " -> " + label(final_state) +
                                           " has no positive resonant qubit frequency");
    return wq;
}

double g_eff_bell_closed(const SystemParams& params, std::pair<Mode, Mode> mode_pair) {
    const auto i = static_cast<std::size_t>(mode_pair.first);
    const auto j = static_cast<std::size_t>(mode_pair.second);
    if (i == j) throw InvalidArgument("g_eff_bell_closed: the mode pair must be two different modes");
    if (params.theta == 0.0) {
        warn("theta = 0: the two-photon process needs longitudinal coupling, effective coupling vanishes");
        return 0.0;
    }
    const double wi = params.omega[i], wj = params.omega[j];
    return -params.g[i] * params.g[j] * (wi + wj) * std::sin(2.0 * params.theta) / (wi * wj);
}

double g_eff_ghz_closed(const SystemParams& params) {
    const auto& w = params.omega;
    const auto& g = params.g;
    return -4.0 * g[0] * g[1] * g[2] * (w[0] + w[1] + w[2]) / ((w[0] + w[1]) * (w[0] + w[2]) * (w[1] + w[2]));
}

std::vector<TransitionPath> enumerate_paths(const BasisState& initial, const BasisState& final_state, int order,
                                            const SystemParams& params) {
    if (order != 2 && order != 3) throw InvalidArgument("enumerate_paths: only orders 2 and 3 are supported");
    const SystemParams at_resonance = params.with_omega_q(resonant_qubit_frequency(initial, final_state, params));
    const double e_initial = bare_energy(initial, at_resonance);

    std::vector<TransitionPath> paths;
    TransitionPath current;
    current.states.push_back(initial);

    std::function<void(const BasisState&, int)> extend = [&](const BasisState& from, int remaining) {
        for (const Hop& h : interaction_neighbors(from, at_resonance)) {
            if (remaining == 1) {
                if (h.to != final_state) continue;
                current.hops.push_back(h);
                current.states.push_back(h.to);
                paths.push_back(current);
                current.hops.pop_back();
                current.states.pop_back();
                continue;
            }
            if (h.to == initial || h.to == final_state) continue;
            current.hops.push_back(h);
            current.states.push_back(h.to);
            current.denominators.push_back(e_initial - bare_energy(h.to, at_resonance));
            extend(h.to, remaining - 1);
            current.hops.pop_back();
            current.states.pop_back();
            current.denominators.pop_back();
        }
    };
    extend(initial, order);
    return paths;
}

double g_eff_path_sum(const BasisState& initial, const BasisState& final_state, int order,
                      const SystemParams& params) {
    const double wq = resonant_qubit_frequency(initial, final_state, params);
    warn_if_commensurate(params, wq);
    double total = 0.0;
    for (const auto& path : enumerate_paths(initial, final_state, order, params)) {
        for (std::size_t k = 0; k < path.denominators.size(); ++k) {
            if (std::abs(path.denominators[k]) < kGuardBand * params.omega[0]) {
                throw DivergentDenominator("intermediate state " + label(path.states[k + 1]) +
                                           " is degenerate with " + label(initial) +
                                           " at resonance; perturbation theory is not valid here");
            }
        }
        total += path.contribution();
    }
    return total;
}

}  // namespace uscqed
