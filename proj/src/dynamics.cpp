#include "tcm/dynamics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace tcm {

void ModelParams::validate() const {
    if (!(g > 0.0)) throw std::invalid_argument("ModelParams: g must be positive");
    if (n_max < 1) throw std::invalid_argument("ModelParams: n_max must be at least 1");
    if (!std::isfinite(omega)) throw std::invalid_argument("ModelParams: omega must be finite");
}

std::size_t tcm_index(int field_dim, Level a1, Level a2, int n) {
    return (static_cast<std::size_t>(a1) * 2 + static_cast<std::size_t>(a2)) * static_cast<std::size_t>(field_dim) +
           static_cast<std::size_t>(n);
}

CVector fock_state(int n, int n_max) {
    if (n < 0 || n > n_max) throw std::out_of_range("fock_state: photon number outside [0, n_max]");
    CVector v = CVector::Zero(n_max + 1);
    v(n) = 1.0;
    return v;
}

CoherentField coherent_state(double mean_n, double tail_tol) {
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw std::invalid_argument("coherent_state: tail_tol must be in (0, 1)");
    if (!(mean_n >= 0.0)) throw std::invalid_argument("coherent_state: mean_n must be nonnegative");
    if (mean_n == 0.0) return {fock_state(0, 0), 0};

    const int hi = static_cast<int>(std::ceil(mean_n + 40.0 * std::sqrt(mean_n) + 60.0));
    std::vector<double> pmf(static_cast<std::size_t>(hi) + 1);
    const double log_mu = std::log(mean_n);
    for (int n = 0; n <= hi; ++n) pmf[static_cast<std::size_t>(n)] = std::exp(-mean_n + n * log_mu - std::lgamma(n + 1.0));

    // tail[n] = sum_{k > n} pmf[k], accumulated from the top
    int cut = hi;
    double tail = 0.0;
    for (int n = hi; n >= 0; --n) {
        if (tail >= tail_tol) break;
        cut = n;
        tail += pmf[static_cast<std::size_t>(n)];
    }
    // `cut` is now the smallest index whose strict tail is below tail_tol
    CVector amps(cut + 1);
    for (int n = 0; n <= cut; ++n) amps(n) = std::sqrt(pmf[static_cast<std::size_t>(n)]);
    amps /= amps.norm();
    return {amps, cut};
}

CVector resize_field(const CVector& field, int n_max) {
    CVector out = CVector::Zero(n_max + 1);
    const Eigen::Index n = std::min<Eigen::Index>(field.size(), n_max + 1);
    out.head(n) = field.head(n);
    return out;
}

CVector atomic_state(const CVector& raw) {
    if (raw.size() != 4) throw DimensionError("atomic_state: expected four amplitudes (ee, eg, ge, gg)");
    const double n = raw.norm();
    if (!(n > 0.0)) throw std::invalid_argument("atomic_state: zero vector");
    return raw / n;
}

CVector atomic_state(const std::string& name) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    if (name == "ee") {
        v(0) = 1.0;
    } else if (name == "eg") {
        v(1) = 1.0;
    } else if (name == "ge") {
        v(2) = 1.0;
    } else if (name == "gg") {
        v(3) = 1.0;
    } else if (name == "sym_plus") {
        v(1) = s;
        v(2) = s;
    } else if (name == "cat_plus") {
        v(0) = s;
        v(3) = s;
    } else if (name == "singlet") {
        v(1) = s;
        v(2) = -s;
    } else {
        throw std::invalid_argument("atomic_state: unknown state '" + name + "'");
    }
    return v;
}

BlockPropagator build_block(int K, const ModelParams& params) {
    params.validate();
    if (K < 0) throw std::invalid_argument("build_block: negative excitation number");
    if (K > params.n_max + 2) throw std::invalid_argument("build_block: block lies outside the truncated space");

    BlockPropagator b;
    b.K = K;
    const int D = params.n_max + 1;
    const BasisLabel candidates[4] = {
        {Level::e, Level::e, K - 2}, {Level::e, Level::g, K - 1}, {Level::g, Level::e, K - 1}, {Level::g, Level::g, K}};
    for (const auto& c : candidates) {
        if (c.photons < 0 || c.photons > params.n_max) continue;
        b.basis.push_back(c);
        b.flat_index.push_back(static_cast<Eigen::Index>(tcm_index(D, c.atom1, c.atom2, c.photons)));
    }
    const auto dim = static_cast<Eigen::Index>(b.basis.size());
    b.hamiltonian = RMatrix::Identity(dim, dim) * (params.omega * (K - 1));
    // g * sqrt(photons after emission) between states differing by one atomic flip
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto& lo = b.basis[static_cast<std::size_t>(i)];  // fewer photons
            const auto& hi = b.basis[static_cast<std::size_t>(j)];
            if (hi.photons != lo.photons + 1) continue;
            const bool flip1 = lo.atom1 == Level::e && hi.atom1 == Level::g && lo.atom2 == hi.atom2;
            const bool flip2 = lo.atom2 == Level::e && hi.atom2 == Level::g && lo.atom1 == hi.atom1;
            if (!(flip1 || flip2)) continue;
            const double el = params.g * std::sqrt(static_cast<double>(hi.photons));
            b.hamiltonian(i, j) = el;
            b.hamiltonian(j, i) = el;
        }
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(b.hamiltonian);
    b.eigenvalues = es.eigenvalues();
    b.eigenvectors = es.eigenvectors();
    return b;
}

Propagator::Propagator(const ModelParams& params) : params_(params) {
    params_.validate();
    for (int K = 0; K <= params_.n_max + 2; ++K) blocks_.push_back(build_block(K, params_));
}

namespace {

void apply_block(const RVector& eigenvalues, const RMatrix& eigenvectors, const std::vector<Eigen::Index>& flat,
                 const CVector& projection, double t, CVector& out) {
    CVector phased(projection.size());
    for (Eigen::Index k = 0; k < projection.size(); ++k)
        phased(k) = projection(k) * std::polar(1.0, -eigenvalues(k) * t);
    const CVector local = eigenvectors.cast<cplx>() * phased;
    for (Eigen::Index i = 0; i < local.size(); ++i) out(flat[static_cast<std::size_t>(i)]) = local(i);
}

void require_shape(const PureState& state, int n_max) {
    if (!(state.shape() == SystemShape::tcm(n_max + 1)))
        throw DimensionError("state shape does not match the model truncation");
}

}  // namespace

PureState Propagator::evolve(const PureState& state, double t) const {
    require_shape(state, params_.n_max);
    CVector out = CVector::Zero(state.amplitudes().size());
    for (const auto& b : blocks_) {
        CVector local(static_cast<Eigen::Index>(b.flat_index.size()));
        for (std::size_t i = 0; i < b.flat_index.size(); ++i) local(static_cast<Eigen::Index>(i)) = state.amplitudes()(b.flat_index[i]);
        if (local.squaredNorm() == 0.0) continue;
        const CVector proj = b.eigenvectors.transpose().cast<cplx>() * local;
        apply_block(b.eigenvalues, b.eigenvectors, b.flat_index, proj, t, out);
    }
    PureState result(state.shape(), std::move(out));
    check_truncation(result);
    return result;
}

Trajectory::Trajectory(const Propagator& propagator, const PureState& initial) : initial_(initial) {
    require_shape(initial, propagator.params().n_max);
    check_truncation(initial);
    for (const auto& b : propagator.blocks()) {
        CVector local(static_cast<Eigen::Index>(b.flat_index.size()));
        for (std::size_t i = 0; i < b.flat_index.size(); ++i) local(static_cast<Eigen::Index>(i)) = initial.amplitudes()(b.flat_index[i]);
        if (local.squaredNorm() == 0.0) continue;
        populated_.push_back({b.flat_index, b.eigenvalues, b.eigenvectors, b.eigenvectors.transpose().cast<cplx>() * local});
    }
}

CVector Trajectory::amplitudes_at(double t) const {
    CVector out = CVector::Zero(initial_.amplitudes().size());
    for (const auto& p : populated_) apply_block(p.eigenvalues, p.eigenvectors, p.flat_index, p.projection, t, out);
    return out;
}

PureState Trajectory::at(double t) const {
    PureState result(initial_.shape(), amplitudes_at(t));
    check_truncation(result);
    return result;
}

PureState evolve(const PureState& state, double t, const ModelParams& params) {
    return Propagator(params).evolve(state, t);
}

double top_fock_population(const PureState& state, int width) {
    const auto& shape = state.shape();
    if (shape.factor_count() != 3 || shape.dim(0) != 2 || shape.dim(1) != 2)
        throw DimensionError("expected a (2, 2, D) state");
    const int D = shape.dim(2);
    double pop = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int n = std::max(0, D - width); n < D; ++n) pop += std::norm(state.amplitudes()(a * D + n));
    return pop;
}

void check_truncation(const PureState& state) {
    const double pop = top_fock_population(state);
    if (pop > kGuardThreshold) {
        std::ostringstream msg;
        msg << "population " << std::scientific << std::setprecision(3) << pop << " within " << kGuardWidth
            << " photons of the Fock cutoff; increase n_max";
        throw TruncationError(msg.str());
    }
}

double atomic_inversion(const PureState& state) {
    const CMatrix psi = bipartite_matrix(state, {0, 1});  // rows ee, eg, ge, gg
    return psi.row(0).squaredNorm() - psi.row(3).squaredNorm();
}

std::vector<double> excitation_distribution(const PureState& state) {
    const int D = state.shape().dim(2);
    std::vector<double> dist(static_cast<std::size_t>(D) + 2, 0.0);
    for (int a = 0; a < 4; ++a) {
        // excitations carried by the atoms: 2 for ee, 1 for eg/ge, 0 for gg
        const int atomic = a == 0 ? 2 : (a == 3 ? 0 : 1);
        for (int n = 0; n < D; ++n) dist[static_cast<std::size_t>(n + atomic)] += std::norm(state.amplitudes()(a * D + n));
    }
    return dist;
}

double energy(const PureState& state, const ModelParams& params) {
    require_shape(state, params.n_max);
    double e = 0.0;
    for (int K = 0; K <= params.n_max + 2; ++K) {
        const BlockPropagator b = build_block(K, params);
        CVector local(static_cast<Eigen::Index>(b.flat_index.size()));
        for (std::size_t i = 0; i < b.flat_index.size(); ++i) local(static_cast<Eigen::Index>(i)) = state.amplitudes()(b.flat_index[i]);
        e += (local.adjoint() * b.hamiltonian.cast<cplx>() * local)(0).real();
    }
    return e;
}

}  // namespace tcm
