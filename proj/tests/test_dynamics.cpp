#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcm/dynamics.hpp"
#include "tcm/entanglement.hpp"

using namespace tcm;

namespace {

PureState product(const CVector& atoms, const CVector& field) {
    const int D = static_cast<int>(field.size());
    CVector amps(4 * D);
    for (int a = 0; a < 4; ++a) amps.segment(a * D, D) = atoms(a) * field;
    return PureState::normalized(SystemShape::tcm(D), amps);
}

PureState fock_product(const std::string& atoms, int n, int n_max) {
    return product(atomic_state(atoms), fock_state(n, n_max));
}

}  // namespace

TEST(FockState, Examples) {
    const CVector v0 = fock_state(0, 5);
    EXPECT_EQ(v0.size(), 6);
    EXPECT_EQ(v0(0), cplx(1.0));
    const CVector v10 = fock_state(10, 20);
    EXPECT_EQ(v10(10), cplx(1.0));
    EXPECT_NEAR(v10.norm(), 1.0, 0.0);
    EXPECT_THROW(fock_state(21, 20), std::out_of_range);
    EXPECT_THROW(fock_state(-1, 20), std::out_of_range);
}

TEST(CoherentState, Vacuum) {
    const CoherentField c = coherent_state(0.0, 1e-12);
    EXPECT_EQ(c.n_max, 0);
    EXPECT_EQ(c.amplitudes(0), cplx(1.0));
}

TEST(CoherentState, MeanHundred) {
    const double tol = 1e-12;
    const CoherentField c = coherent_state(100.0, tol);
    Eigen::Index peak = 0;
    c.amplitudes.cwiseAbs().maxCoeff(&peak);
    // Poisson(100) has equal masses at 99 and 100
    EXPECT_TRUE(peak == 99 || peak == 100);
    double mean = 0.0;
    for (Eigen::Index n = 0; n < c.amplitudes.size(); ++n) mean += static_cast<double>(n) * std::norm(c.amplitudes(n));
    EXPECT_NEAR(mean, 100.0, tol * 100.0 + 1e-9);
    EXPECT_NEAR(c.amplitudes.norm(), 1.0, 1e-14);
}

TEST(CoherentState, CutoffIsSmallestWithTailBelowTolerance) {
    const double mu = 100.0;
    const double tol = 1e-12;
    const CoherentField c = coherent_state(mu, tol);
    // independent oracle: upper tail by direct summation in long double
    auto tail_above = [&](int cut) {
        long double s = 0.0L;
        for (int k = cut + 1; k < 2000; ++k)
            s += std::exp(static_cast<long double>(-mu + k * std::log(mu)) - std::lgamma(static_cast<long double>(k) + 1));
        return static_cast<double>(s);
    };
    EXPECT_LT(tail_above(c.n_max), tol);
    EXPECT_GE(tail_above(c.n_max - 1), tol);
    EXPECT_GT(c.n_max, 150);
    EXPECT_LT(c.n_max, 250);
}

TEST(CoherentState, BadArguments) {
    EXPECT_THROW(coherent_state(10.0, 0.0), std::invalid_argument);
    EXPECT_THROW(coherent_state(10.0, 1.0), std::invalid_argument);
    EXPECT_THROW(coherent_state(-1.0, 1e-6), std::invalid_argument);
}

TEST(AtomicState, Named) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector sym(4), cat(4), sing(4);
    sym << 0, s, s, 0;
    cat << s, 0, 0, s;
    sing << 0, s, -s, 0;
    EXPECT_TRUE(atomic_state("sym_plus").isApprox(sym));
    EXPECT_TRUE(atomic_state("cat_plus").isApprox(cat));
    EXPECT_TRUE(atomic_state("singlet").isApprox(sing));
    EXPECT_EQ(atomic_state("ee")(0), cplx(1.0));
    EXPECT_EQ(atomic_state("gg")(3), cplx(1.0));
    EXPECT_THROW(atomic_state("bogus"), std::invalid_argument);
}

TEST(AtomicState, RawAmplitudes) {
    CVector raw(4);
    raw << 3, 0, 0, 4;
    EXPECT_NEAR(atomic_state(raw)(0).real(), 0.6, 1e-15);
    EXPECT_THROW(atomic_state(CVector(CVector::Zero(4))), std::invalid_argument);
    EXPECT_THROW(atomic_state(CVector(CVector::Ones(3))), DimensionError);
}

TEST(BuildBlock, Dimensions) {
    const ModelParams p{1.0, 0.0, 10};
    EXPECT_EQ(build_block(0, p).basis.size(), 1u);
    EXPECT_EQ(build_block(1, p).basis.size(), 3u);
    for (int K = 2; K <= 10; ++K) EXPECT_EQ(build_block(K, p).basis.size(), 4u);
    EXPECT_THROW(build_block(-1, p), std::invalid_argument);
}

TEST(BuildBlock, KOneSpectrum) {
    const double g = 0.7;
    const BlockPropagator b = build_block(1, {g, 0.0, 4});
    std::vector<double> ev(b.eigenvalues.data(), b.eigenvalues.data() + 3);
    std::sort(ev.begin(), ev.end());
    EXPECT_NEAR(ev[0], -std::sqrt(2.0) * g, 1e-13);
    EXPECT_NEAR(ev[1], 0.0, 1e-13);
    EXPECT_NEAR(ev[2], std::sqrt(2.0) * g, 1e-13);
}

TEST(BuildBlock, KTwoMatrixElements) {
    const BlockPropagator b = build_block(2, {1.0, 0.0, 4});
    // basis ee,0 / eg,1 / ge,1 / gg,2
    const RMatrix& h = b.hamiltonian;
    EXPECT_NEAR(h(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(h(0, 2), 1.0, 1e-15);
    EXPECT_NEAR(h(1, 3), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(h(2, 3), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(h(0, 3), 0.0, 0.0);
    EXPECT_NEAR(h(1, 2), 0.0, 0.0);
    EXPECT_TRUE(h.isApprox(h.transpose()));
}

TEST(BuildBlock, EigenvectorsUnitary) {
    const ModelParams p{1.3, 0.4, 30};
    for (int K = 0; K <= 32; ++K) {
        const BlockPropagator b = build_block(K, p);
        const auto n = b.eigenvectors.rows();
        EXPECT_LT((b.eigenvectors.transpose() * b.eigenvectors - RMatrix::Identity(n, n)).norm(), 1e-12);
        EXPECT_LT((b.eigenvectors * b.eigenvalues.asDiagonal() * b.eigenvectors.transpose() - b.hamiltonian).norm(),
                  1e-12);
    }
}

TEST(Evolve, GroundVacuumStationary) {
    const PureState s = fock_product("gg", 0, 6);
    const PureState e = evolve(s, 3.7, {1.0, 0.0, 6});
    EXPECT_NEAR(std::abs(s.amplitudes().dot(e.amplitudes())), 1.0, 1e-14);
}

TEST(Evolve, GgOneReturnProbability) {
    const ModelParams p{1.0, 0.0, 8};
    const PureState s = fock_product("gg", 1, 8);
    const Propagator prop(p);
    const Trajectory traj(prop, s);
    for (double t = 0.0; t <= 10.0; t += 0.173) {
        const double ret = std::norm(s.amplitudes().dot(traj.amplitudes_at(t)));
        EXPECT_NEAR(ret, std::pow(std::cos(std::sqrt(2.0) * t), 2), 1e-12) << "t=" << t;
    }
}

TEST(Evolve, PropagatorAndTrajectoryAgree) {
    const CoherentField c = coherent_state(2.0, 1e-10);
    const int n_max = c.n_max + 6;
    const ModelParams p{1.0, 0.3, n_max};
    const PureState s = product(atomic_state("sym_plus"), resize_field(c.amplitudes, n_max));
    const Propagator prop(p);
    const Trajectory traj(prop, s);
    for (double t : {0.0, 0.4, 2.2, 9.1}) EXPECT_LT((prop.evolve(s, t).amplitudes() - traj.at(t).amplitudes()).norm(), 1e-12);
}

TEST(Evolve, TruncationGuardFires) {
    // |ee, n_max - 1> leaks straight into the guard band
    const ModelParams p{1.0, 0.0, 6};
    const PureState s = fock_product("ee", 5, 6);
    EXPECT_THROW(check_truncation(s), TruncationError);
    const PureState ok = fock_product("ee", 1, 6);
    EXPECT_NO_THROW(evolve(ok, 1.0, p));
    const PureState edge = fock_product("ee", 3, 6);
    EXPECT_THROW(evolve(edge, 1.0, p), TruncationError);
}

TEST(Inversion, Examples) {
    EXPECT_NEAR(atomic_inversion(fock_product("ee", 3, 10)), 1.0, 1e-15);
    const CoherentField c = coherent_state(9.0, 1e-12);
    EXPECT_NEAR(atomic_inversion(product(atomic_state("gg"), c.amplitudes)), -1.0, 1e-14);
    EXPECT_NEAR(atomic_inversion(product(atomic_state("sym_plus"), c.amplitudes)), 0.0, 1e-15);
}

TEST(Conservation, NormExcitationsAndEnergy) {
    const CoherentField c = coherent_state(25.0, 1e-12);
    const int n_max = c.n_max + 6;
    const ModelParams p{1.0, 0.0, n_max};
    CVector field = resize_field(c.amplitudes, n_max);
    CVector raw(4);
    raw << cplx(0.3, 0.1), cplx(-0.2, 0.5), 0.4, cplx(0.1, -0.6);
    const PureState s = product(atomic_state(raw), field);
    const Propagator prop(p);
    const Trajectory traj(prop, s);
    const auto k0 = excitation_distribution(s);
    const double e0 = energy(s, p);
    for (double t = 0.0; t < 40.0; t += 1.37) {
        const CVector a = traj.amplitudes_at(t);
        EXPECT_NEAR(a.norm(), 1.0, 1e-10);
        const PureState st(SystemShape::tcm(n_max + 1), a);
        const auto k = excitation_distribution(st);
        for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(k[i], k0[i], 1e-10);
        EXPECT_NEAR(energy(st, p), e0, 1e-9);
    }
}

TEST(Conservation, EnergyWithFreePart) {
    const CoherentField c = coherent_state(3.0, 1e-12);
    const ModelParams p{1.0, 2.5, c.n_max + 6};
    const PureState s = product(atomic_state("cat_plus"), resize_field(c.amplitudes, p.n_max));
    const Propagator prop(p);
    const Trajectory traj(prop, s);
    const double e0 = energy(s, p);
    for (double t : {0.5, 1.7, 6.0}) EXPECT_NEAR(energy(traj.at(t), p), e0, 1e-9);
}

// The free Hamiltonian is a product of local unitaries, so every tangle and
// the inversion are the same in both pictures.
TEST(PictureInvariance, TanglesMatch) {
    const int n_max = 16;
    const PureState s = fock_product("ee", 10, n_max);
    const Propagator inter({1.0, 0.0, n_max});
    const Propagator full({1.0, 3.1, n_max});
    for (double t : {0.3, 1.1, 2.9, 4.4}) {
        const TangleReport a = tangle_report(inter.evolve(s, t), t);
        const TangleReport b = tangle_report(full.evolve(s, t), t);
        EXPECT_NEAR(a.tau_F_AA, b.tau_F_AA, 1e-9);
        EXPECT_NEAR(a.tau_A_rest, b.tau_A_rest, 1e-9);
        EXPECT_NEAR(a.tau_AA, b.tau_AA, 1e-9);
        EXPECT_NEAR(a.tau_AF, b.tau_AF, 1e-9);
        EXPECT_NEAR(a.tau_res, b.tau_res, 1e-9);
        EXPECT_NEAR(a.inversion, b.inversion, 1e-9);
    }
}

TEST(DarkState, SingletTanglesConstant) {
    const int n_max = 14;
    const PureState s = fock_product("singlet", 7, n_max);
    const Propagator prop({1.0, 0.0, n_max});
    const TangleReport r0 = tangle_report(s, 0.0);
    for (double t = 0.0; t < 20.0; t += 0.77) {
        const TangleReport r = tangle_report(prop.evolve(s, t), t);
        EXPECT_NEAR(r.tau_F_AA, r0.tau_F_AA, 1e-10);
        EXPECT_NEAR(r.tau_A_rest, r0.tau_A_rest, 1e-10);
        EXPECT_NEAR(r.tau_AA, r0.tau_AA, 1e-10);
        EXPECT_NEAR(r.tau_AF, r0.tau_AF, 1e-10);
    }
    EXPECT_NEAR(r0.tau_AA, 1.0, 1e-12);
}

TEST(ExcitationDistribution, SumsToOne) {
    const PureState s = fock_product("eg", 4, 9);
    const auto k = excitation_distribution(s);
    EXPECT_EQ(k.size(), 12u);
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(k[5], 1.0, 1e-15);
}
