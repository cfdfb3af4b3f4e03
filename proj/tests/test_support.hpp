#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "tcm/tensor.hpp"

namespace tcm::testing {

inline CVector gaussian(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> nd;
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = nd(rng);
        v(i) = cplx(re, nd(rng));
    }
    return v;
}

inline CVector random_unit(std::mt19937_64& rng, Eigen::Index n) {
    CVector v = gaussian(rng, n);
    return v / v.norm();
}

inline PureState random_state(std::mt19937_64& rng, const SystemShape& shape) {
    return PureState::normalized(shape, gaussian(rng, static_cast<Eigen::Index>(shape.total())));
}

/// Haar unitary via QR with the phase fix on R's diagonal.
inline CMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
    CMatrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j) z.col(j) = gaussian(rng, n);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return q;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Applies an independent Haar unitary to every factor.
inline PureState random_local_unitary(std::mt19937_64& rng, const PureState& s) {
    CMatrix u = CMatrix::Identity(1, 1);
    for (int d : s.shape().dims()) u = kron(u, random_unitary(rng, d));
    return PureState::normalized(s.shape(), u * s.amplitudes());
}

/// Random density matrix of the given rank: partial trace of a Haar vector.
inline CMatrix random_density(std::mt19937_64& rng, int dim, int rank) {
    CMatrix w(dim, rank);
    for (int j = 0; j < rank; ++j) w.col(j) = gaussian(rng, dim);
    CMatrix rho = w * w.adjoint();
    return rho / rho.trace().real();
}

/// Reorders the factors of a pure state: new factor k is old factor perm[k].
inline PureState permute(const PureState& s, const std::vector<int>& perm) {
    std::vector<int> dims;
    for (int p : perm) dims.push_back(s.shape().dim(static_cast<std::size_t>(p)));
    const SystemShape out_shape(dims);
    CVector out(s.amplitudes().size());
    for (std::size_t i = 0; i < s.shape().total(); ++i) {
        const auto old_labels = s.shape().labels(i);
        std::vector<int> nl;
        for (int p : perm) nl.push_back(old_labels[static_cast<std::size_t>(p)]);
        out(static_cast<Eigen::Index>(out_shape.index(nl))) = s.amplitudes()(static_cast<Eigen::Index>(i));
    }
    return PureState(out_shape, out);
}

inline PureState ghz() {
    CVector v = CVector::Zero(8);
    v(0) = v(7) = 1.0 / std::sqrt(2.0);
    return PureState({2, 2, 2}, v);
}

inline PureState w_state() {
    CVector v = CVector::Zero(8);
    v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
    return PureState({2, 2, 2}, v);
}

inline CMatrix singlet_projector() {
    CVector s = CVector::Zero(4);
    s(1) = 1.0 / std::sqrt(2.0);
    s(2) = -1.0 / std::sqrt(2.0);
    return s * s.adjoint();
}

}  // namespace tcm::testing
