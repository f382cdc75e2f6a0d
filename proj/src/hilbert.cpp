#include "uscqed/hilbert.hpp"

#include <cmath>
#include <string>

#include "uscqed/errors.hpp"

namespace uscqed {

HilbertSpace::HilbertSpace(std::array<int, kNumModes> mode_cutoffs, std::optional<int> total_excitation_cap)
    : cutoffs_(mode_cutoffs), cap_(total_excitation_cap) {
    for (std::size_t j = 0; j < kNumModes; ++j) {
        if (cutoffs_[j] < 1) {
            throw InvalidArgument("mode cutoff must be >= 1, got " + std::to_string(cutoffs_[j]) +
                                  " for mode " + mode_name(mode_from_index(static_cast<int>(j))));
        }
    }
    if (cap_ && *cap_ < 1) {
        throw InvalidArgument("total excitation cap must be >= 1, got " + std::to_string(*cap_));
    }

    const std::size_t dense_size =
        static_cast<std::size_t>(cutoffs_[0] + 1) * (cutoffs_[1] + 1) * (cutoffs_[2] + 1) * 2;
    lookup_.assign(dense_size, -1);
    for (int na = 0; na <= cutoffs_[0]; ++na) {
        for (int nb = 0; nb <= cutoffs_[1]; ++nb) {
            for (int nc = 0; nc <= cutoffs_[2]; ++nc) {
                for (int q = 0; q < 2; ++q) {
                    BasisState s{{na, nb, nc}, static_cast<QubitLevel>(q)};
                    if (cap_ && s.excitations() > *cap_) continue;
                    lookup_[dense_key(s)] = static_cast<Eigen::Index>(basis_.size());
                    basis_.push_back(s);
                }
            }
        }
    }
}

std::size_t HilbertSpace::dense_key(const BasisState& s) const {
    std::size_t key = static_cast<std::size_t>(s.photons[0]);
    key = key * (cutoffs_[1] + 1) + s.photons[1];
    key = key * (cutoffs_[2] + 1) + s.photons[2];
    return key * 2 + static_cast<std::size_t>(s.qubit);
}

bool HilbertSpace::contains(const BasisState& s) const {
    for (std::size_t j = 0; j < kNumModes; ++j) {
        if (s.photons[j] < 0 || s.photons[j] > cutoffs_[j]) return false;
    }
    return lookup_[dense_key(s)] >= 0;
}

Eigen::Index HilbertSpace::index_of(const BasisState& s) const {
    if (!contains(s)) {
        throw InvalidArgument("basis state (" + std::to_string(s.photons[0]) + "," +
                              std::to_string(s.photons[1]) + "," + std::to_string(s.photons[2]) + "," +
                              (s.qubit == QubitLevel::e ? "e" : "g") + ") is outside the truncated space");
    }
    return lookup_[dense_key(s)];
}

HilbertSpace build_space(std::array<int, kNumModes> mode_cutoffs, std::optional<int> total_excitation_cap) {
    return HilbertSpace(mode_cutoffs, total_excitation_cap);
}

OperatorMatrix mode_annihilation(const HilbertSpace& space, Mode mode) {
    const auto j = static_cast<std::size_t>(mode);
    if (j >= kNumModes) throw InvalidArgument("mode index out of range");
    const auto dim = space.dimension();
    OperatorMatrix op = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        BasisState s = space.state(col);
        const int n = s.photons[j];
        if (n == 0) continue;
        s.photons[j] = n - 1;
        // Lowering never leaves a capped space.
        op(space.index_of(s), col) = std::sqrt(static_cast<double>(n));
    }
    return op;
}

OperatorMatrix mode_number(const HilbertSpace& space, Mode mode) {
    const auto j = static_cast<std::size_t>(mode);
    if (j >= kNumModes) throw InvalidArgument("mode index out of range");
    const auto dim = space.dimension();
    OperatorMatrix op = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) op(i, i) = space.state(i).photons[j];
    return op;
}

OperatorMatrix qubit_operator(const HilbertSpace& space, QubitOp which) {
    const auto dim = space.dimension();
    OperatorMatrix op = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const BasisState& s = space.state(col);
        BasisState flipped = s;
        flipped.qubit = s.qubit == QubitLevel::g ? QubitLevel::e : QubitLevel::g;
        switch (which) {
            case QubitOp::sigma_z:
                op(col, col) = s.qubit == QubitLevel::e ? 1.0 : -1.0;
                break;
            case QubitOp::sigma_x:
                // g -> e can leave a capped space; those elements are truncated.
                if (space.contains(flipped)) op(space.index_of(flipped), col) = 1.0;
                break;
            case QubitOp::sigma_minus:
                if (s.qubit == QubitLevel::e) op(space.index_of(flipped), col) = 1.0;
                break;
        }
    }
    return op;
}

StateVector bare_state(const HilbertSpace& space, const BasisState& s) {
    StateVector v = StateVector::Zero(space.dimension());
    v(space.index_of(s)) = 1.0;
    return v;
}

StateVector bare_state(const HilbertSpace& space, int n_a, int n_b, int n_c, QubitLevel qubit) {
    return bare_state(space, BasisState{{n_a, n_b, n_c}, qubit});
}

Eigen::Matrix2cd reduce_to_qubit(const HilbertSpace& space, const DensityMatrix& rho) {
    if (rho.rows() != space.dimension() || rho.cols() != space.dimension()) {
        throw InvalidArgument("density matrix does not match the space dimension");
    }
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (Eigen::Index i = 0; i < space.dimension(); ++i) {
        const BasisState& si = space.state(i);
        for (int q = 0; q < 2; ++q) {
            BasisState sj = si;
            sj.qubit = static_cast<QubitLevel>(q);
            if (!space.contains(sj)) continue;
            out(static_cast<int>(si.qubit), q) += rho(i, space.index_of(sj));
        }
    }
    return out;
}

Mode mode_from_index(int index) {
    if (index < 0 || index >= static_cast<int>(kNumModes)) {
        throw InvalidArgument("mode index must be 0, 1 or 2, got " + std::to_string(index));
    }
    return static_cast<Mode>(index);
}

char mode_name(Mode mode) { return "abc"[static_cast<int>(mode)]; }

}  // namespace uscqed
