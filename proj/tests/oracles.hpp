#pragma once

// Independent reference constructions used by several test binaries. Nothing
// here calls into the library's operator builders.

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

using Eigen::MatrixXcd;

inline MatrixXcd lowering(int cutoff) {
    MatrixXcd a = MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// Full tensor-product operator with ordering a (x) b (x) c (x) qubit, matching
// lexicographic (n_a, n_b, n_c, q) enumeration with g = index 0.
inline MatrixXcd embed(const std::array<int, 3>& cutoffs, int slot, const MatrixXcd& local) {
    std::array<MatrixXcd, 4> factors;
    for (int k = 0; k < 3; ++k) factors[k] = MatrixXcd::Identity(cutoffs[k] + 1, cutoffs[k] + 1);
    factors[3] = MatrixXcd::Identity(2, 2);
    factors[slot] = local;
    MatrixXcd out = factors[0];
    for (int k = 1; k < 4; ++k) {
        MatrixXcd next = Eigen::kroneckerProduct(out, factors[k]).eval();
        out = next;
    }
    return out;
}

// Pauli matrices in the (g, e) ordering with sz|e> = +|e>.
inline MatrixXcd sx() {
    MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline MatrixXcd sz() {
    MatrixXcd m(2, 2);
    m << -1, 0, 0, 1;
    return m;
}
inline MatrixXcd sminus() {
    MatrixXcd m = MatrixXcd::Zero(2, 2);
    m(0, 1) = 1.0;  // |g><e|
    return m;
}

inline MatrixXcd hamiltonian(const std::array<int, 3>& cutoffs, const std::array<double, 3>& omega, double omega_q,
                             const std::array<double, 3>& g, double theta) {
    const Eigen::Index dim = 2 * (cutoffs[0] + 1) * (cutoffs[1] + 1) * (cutoffs[2] + 1);
    MatrixXcd h = MatrixXcd::Zero(dim, dim);
    MatrixXcd field = MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < 3; ++k) {
        const MatrixXcd a = embed(cutoffs, k, lowering(cutoffs[k]));
        h += omega[k] * a.adjoint() * a;
        field += g[k] * (a + a.adjoint());
    }
    h += 0.5 * omega_q * embed(cutoffs, 3, sz());
    const MatrixXcd qubit = std::cos(theta) * embed(cutoffs, 3, sx()) + std::sin(theta) * embed(cutoffs, 3, sz());
    h += field * qubit;
    return h;
}

// Random density matrix of given rank: W W^dag / tr.
inline MatrixXcd random_density(Eigen::Index dim, Eigen::Index rank, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    MatrixXcd w(dim, rank);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < rank; ++j) w(i, j) = {n(rng), n(rng)};
    }
    MatrixXcd rho = w * w.adjoint();
    return rho / rho.trace().real();
}

inline MatrixXcd random_matrix(Eigen::Index dim, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    MatrixXcd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = {n(rng), n(rng)};
    }
    return m;
}

}  // namespace oracle
