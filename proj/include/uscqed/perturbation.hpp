#pragma once

#include <utility>
#include <vector>

#include "uscqed/hamiltonian.hpp"
#include "uscqed/hilbert.hpp"

namespace uscqed {

// Which factor of the coupling (sx cos th + sz sin th) mediates a hop.
enum class Vertex { transversal, longitudinal };

struct Hop {
    BasisState to;
    Mode mode = Mode::a;
    bool creates_photon = false;
    Vertex vertex = Vertex::transversal;
    double element = 0.0;  // <to|V|from>
};

// A chain initial -> n_1 -> ... -> final of single applications of the
// interaction V. `denominators[k]` is E_i - E(n_{k+1}) for each intermediate.
struct TransitionPath {
    std::vector<BasisState> states;  // initial, intermediates..., final
    std::vector<Hop> hops;
    std::vector<double> denominators;

    int order() const { return static_cast<int>(hops.size()); }
    double contribution() const;
};

// Uncoupled energy sum_j n_j w_j -/+ w_q/2.
double bare_energy(const BasisState& s, const SystemParams& params);

// All bare states reachable from `from` by one application of V, with their
// nonzero matrix elements, in a fixed order (mode a..c, lowering then raising,
// transversal then longitudinal).
std::vector<Hop> interaction_neighbors(const BasisState& from, const SystemParams& params);

// Qubit frequency that makes the two bare states degenerate. The two states
// must differ in qubit level.
double resonant_qubit_frequency(const BasisState& initial, const BasisState& final_state,
                                const SystemParams& params);

// Closed-form second-order coupling for the pair (i, j):
//   -g_i g_j (w_i + w_j) sin(2 theta) / (w_i w_j).
// Returns 0 with a warning when theta = 0.
double g_eff_bell_closed(const SystemParams& params, std::pair<Mode, Mode> mode_pair);

// Closed-form third-order coupling at theta = 0:
//   -4 g_a g_b g_c (w_a + w_b + w_c) / [(w_a + w_b)(w_a + w_c)(w_b + w_c)].
double g_eff_ghz_closed(const SystemParams& params);

// Enumerates all order-length paths with nonzero hops, intermediates distinct
// from the endpoints. Denominators use the resonant qubit frequency.
std::vector<TransitionPath> enumerate_paths(const BasisState& initial, const BasisState& final_state, int order,
                                            const SystemParams& params);

// Sum over enumerated paths of prod(V) / prod(E_i - E_n), evaluated at the
// resonant qubit frequency. Throws DivergentDenominator when any intermediate
// lies within 1e-6 w_a of the initial energy.
double g_eff_path_sum(const BasisState& initial, const BasisState& final_state, int order,
                      const SystemParams& params);

}  // namespace uscqed
