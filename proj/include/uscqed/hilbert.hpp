#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace uscqed {

using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

enum class Mode { a = 0, b = 1, c = 2 };
enum class QubitLevel { g = 0, e = 1 };
enum class QubitOp { sigma_x, sigma_z, sigma_minus };

inline constexpr std::size_t kNumModes = 3;

struct BasisState {
    std::array<int, kNumModes> photons{};
    QubitLevel qubit = QubitLevel::g;

    int excitations() const {
        return photons[0] + photons[1] + photons[2] + static_cast<int>(qubit);
    }
    friend bool operator==(const BasisState&, const BasisState&) = default;
};

// Truncated Fock(a) x Fock(b) x Fock(c) x qubit space.
//
// Basis vectors are enumerated lexicographically in (n_a, n_b, n_c, qubit)
// with g before e, skipping states above the optional total excitation cap
// (photons plus qubit level). Immutable after construction.
class HilbertSpace {
public:
    HilbertSpace(std::array<int, kNumModes> mode_cutoffs,
                 std::optional<int> total_excitation_cap = std::nullopt);

    const std::array<int, kNumModes>& mode_cutoffs() const { return cutoffs_; }
    const std::optional<int>& total_excitation_cap() const { return cap_; }
    Eigen::Index dimension() const { return static_cast<Eigen::Index>(basis_.size()); }

    const BasisState& state(Eigen::Index index) const { return basis_.at(static_cast<std::size_t>(index)); }
    const std::vector<BasisState>& basis() const { return basis_; }

    bool contains(const BasisState& s) const;
    // Throws InvalidArgument when the state lies outside the truncation.
    Eigen::Index index_of(const BasisState& s) const;

    friend bool operator==(const HilbertSpace& l, const HilbertSpace& r) {
        return l.cutoffs_ == r.cutoffs_ && l.cap_ == r.cap_;
    }

private:
    std::size_t dense_key(const BasisState& s) const;

    std::array<int, kNumModes> cutoffs_;
    std::optional<int> cap_;
    std::vector<BasisState> basis_;
    std::vector<Eigen::Index> lookup_;  // dense key -> basis index, -1 if truncated away
};

HilbertSpace build_space(std::array<int, kNumModes> mode_cutoffs,
                         std::optional<int> total_excitation_cap = std::nullopt);

// Bare annihilation operator of one resonator mode. Creation is the adjoint.
OperatorMatrix mode_annihilation(const HilbertSpace& space, Mode mode);
// Photon-number operator a^dag a of one mode (diagonal).
OperatorMatrix mode_number(const HilbertSpace& space, Mode mode);
// Pauli/lowering operator on the qubit factor; sigma_z|e> = +|e>.
OperatorMatrix qubit_operator(const HilbertSpace& space, QubitOp which);

StateVector bare_state(const HilbertSpace& space, int n_a, int n_b, int n_c, QubitLevel qubit);
StateVector bare_state(const HilbertSpace& space, const BasisState& s);

// Bare-basis reduced density matrix of the qubit (2x2, g first).
Eigen::Matrix2cd reduce_to_qubit(const HilbertSpace& space, const DensityMatrix& rho);

Mode mode_from_index(int index);
char mode_name(Mode mode);

}  // namespace uscqed
