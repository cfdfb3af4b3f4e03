#include "tcm/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "tcm/random_states.hpp"

namespace tcm {

namespace {

void require_two_factors(const DensityMatrix& rho) {
    if (rho.factors().size() != 2) throw DimensionError("expected a density matrix on two factors");
}

// Eigenvector (index x * d1 + y) as a d0 x d1 matrix.
CMatrix as_matrix(const CVector& v, int d0, int d1) {
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), d0, d1);
}

CVector flatten(const CMatrix& m) {
    CVector v(m.size());
    for (Eigen::Index x = 0; x < m.rows(); ++x)
        for (Eigen::Index y = 0; y < m.cols(); ++y) v(x * m.cols() + y) = m(x, y);
    return v;
}

constexpr double kWoottersDust = 1e-14;

const Eigen::Matrix4cd& spin_flip() {
    static const Eigen::Matrix4cd yy = [] {
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        m(0, 3) = -1.0;
        m(1, 2) = 1.0;
        m(2, 1) = 1.0;
        m(3, 0) = -1.0;
        return m;
    }();
    return yy;
}

}  // namespace

CMatrix universal_inversion(const DensityMatrix& rho, double nu_a, double nu_b) {
    require_two_factors(rho);
    const int da = rho.shape().dim(0);
    const int db = rho.shape().dim(1);
    const DensityMatrix rho_a = partial_trace(rho, {rho.factors()[0]});
    const DensityMatrix rho_b = partial_trace(rho, {rho.factors()[1]});
    const CMatrix ia = CMatrix::Identity(da, da);
    const CMatrix ib = CMatrix::Identity(db, db);
    const CMatrix id = CMatrix::Identity(rho.dim(), rho.dim());
    const CMatrix a_part = Eigen::kroneckerProduct(rho_a.matrix(), ib);
    const CMatrix b_part = Eigen::kroneckerProduct(ia, rho_b.matrix());
    return nu_a * nu_b * (id - a_part - b_part + rho.matrix());
}

double inversion_overlap(const DensityMatrix& rho) {
    return (rho.matrix() * universal_inversion(rho)).trace().real();
}

double wootters_tangle(const CMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("wootters_tangle: expected a 4x4 matrix");
    // rho = W W^dagger; the lambda_i are the singular values of W^T (sy (x) sy) W,
    // which avoids square roots of roundoff-level eigenvalues
    const Eigen::Matrix4cd rho4 = rho;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho4);
    Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
        const double p = es.eigenvalues()(k);
        if (p > kWoottersDust) w.col(k) = es.eigenvectors().col(k) * std::sqrt(p);
    }
    const Eigen::Matrix4cd tau = w.transpose() * spin_flip() * w;
    Eigen::Vector4d lam = Eigen::JacobiSVD<Eigen::Matrix4cd>(tau).singularValues();
    std::sort(lam.data(), lam.data() + 4, std::greater<>());
    const double c = std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
    return c * c;
}

double wootters_tangle(const DensityMatrix& rho) {
    require_two_factors(rho);
    if (rho.shape().dim(0) != 2 || rho.shape().dim(1) != 2) throw DimensionError("wootters_tangle: expected two qubits");
    return wootters_tangle(rho.matrix());
}

double pure_itangle(const PureState& state, const Cut& cut, double nu_product) {
    cut.validate(state.shape().factor_count());
    return 2.0 * nu_product * (1.0 - purity(reduced_gram(state, cut.side_a)));
}

// ---------------------------------------------------------------------------
// Rank-two closed form

namespace {

// B(|a><b|, |c><d|) for the universal-inversion bilinear form with unit scale,
// given P_xy = E_x E_y^dagger over the smaller factor and orthonormal vectors.
struct InversionForm {
    std::array<std::array<CMatrix, 2>, 2> p;

    cplx element(int k, int l, int m, int n) const {
        const double kron = (l == k ? 1.0 : 0.0) * (n == m ? 1.0 : 0.0) + (l == m ? 1.0 : 0.0) * (n == k ? 1.0 : 0.0);
        return kron - (p[k][l] * p[m][n]).trace() - (p[k][n] * p[m][l]).trace();
    }

    cplx bilinear(const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) const {
        cplx s = 0.0;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n) {
                        if (x(k, l) == 0.0 || y(m, n) == 0.0) continue;
                        s += x(k, l) * y(m, n) * element(k, l, m, n);
                    }
        return s;
    }
};

}  // namespace

Rank2ITangle rank2_itangle_factored(const std::vector<CMatrix>& vectors, double rank_tol) {
    if (vectors.empty() || vectors.size() > 2) throw std::invalid_argument("rank2_itangle: need one or two vectors");
    std::vector<CMatrix> w;
    for (const auto& v : vectors) w.push_back(v.rows() <= v.cols() ? v : CMatrix(v.transpose()));
    const Eigen::Index da = w[0].rows();
    const Eigen::Index db = w[0].cols();
    for (const auto& v : w)
        if (v.rows() != da || v.cols() != db) throw DimensionError("rank2_itangle: vector shapes differ");

    const auto k = static_cast<Eigen::Index>(w.size());
    Eigen::Matrix2cd gram = Eigen::Matrix2cd::Zero();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) gram(i, j) = (w[static_cast<std::size_t>(i)].conjugate().cwiseProduct(w[static_cast<std::size_t>(j)])).sum();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gram);
    const double total = es.eigenvalues().sum();
    if (!(total > 0.0)) throw std::invalid_argument("rank2_itangle: zero state");

    Rank2ITangle out;
    // descending eigenpairs
    std::vector<double> mu;
    std::vector<CMatrix> e;
    for (int idx = 1; idx >= 0; --idx) {
        const double m = es.eigenvalues()(idx);
        if (m / total <= rank_tol) continue;
        CMatrix ek = CMatrix::Zero(da, db);
        for (Eigen::Index j = 0; j < k; ++j) ek += es.eigenvectors()(j, idx) * w[static_cast<std::size_t>(j)];
        ek /= std::sqrt(m);
        mu.push_back(m / total);
        e.push_back(std::move(ek));
    }
    out.rank = static_cast<int>(mu.size());
    if (out.rank == 0) throw std::invalid_argument("rank2_itangle: zero state");
    if (out.rank == 1) {
        const CMatrix r = e[0] * e[0].adjoint();
        out.inversion_overlap = 2.0 * (1.0 - r.squaredNorm());
        out.value = out.inversion_overlap;
        return out;
    }

    InversionForm form;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) form.p[a][b] = e[a] * e[b].adjoint();

    Eigen::Matrix2cd x = Eigen::Matrix2cd::Zero();
    x(0, 0) = mu[0];
    x(1, 1) = mu[1];
    out.inversion_overlap = form.bilinear(x, x).real();
    out.purity = mu[0] * mu[0] + mu[1] * mu[1];

    std::array<Eigen::Matrix2cd, 3> pauli;
    pauli[0] << 0, 1, 1, 0;
    pauli[1] << 0, cplx(0, -1), cplx(0, 1), 0;
    pauli[2] << 1, 0, 0, -1;
    out.m_matrix = RMatrix(3, 3);
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            const double v = 0.25 * form.bilinear(pauli[a], pauli[b]).real();
            out.m_matrix(a, b) = v;
            out.m_matrix(b, a) = v;
        }
    Eigen::SelfAdjointEigenSolver<RMatrix> ms(out.m_matrix, Eigen::EigenvaluesOnly);
    out.lambda_min = ms.eigenvalues()(0);
    out.value = out.inversion_overlap + 2.0 * out.lambda_min * (1.0 - out.purity);
    return out;
}

namespace {

struct Spectrum {
    std::vector<double> values;  // descending, above tolerance
    std::vector<CVector> vectors;
};

Spectrum support(const CMatrix& m, double rank_tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    Spectrum s;
    for (Eigen::Index i = m.rows() - 1; i >= 0; --i) {
        if (es.eigenvalues()(i) <= rank_tol) continue;
        s.values.push_back(es.eigenvalues()(i));
        s.vectors.push_back(es.eigenvectors().col(i));
    }
    return s;
}

}  // namespace

Rank2ITangle rank2_itangle_terms(const DensityMatrix& rho, double rank_tol) {
    require_two_factors(rho);
    const Spectrum s = support(rho.matrix(), rank_tol);
    if (s.values.size() > 2) throw std::invalid_argument("rank2_itangle: rank exceeds two");
    if (s.values.empty()) throw std::invalid_argument("rank2_itangle: zero state");
    std::vector<CMatrix> w;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        w.push_back(std::sqrt(s.values[i]) * as_matrix(s.vectors[i], rho.shape().dim(0), rho.shape().dim(1)));
    return rank2_itangle_factored(w, rank_tol);
}

double rank2_itangle(const DensityMatrix& rho, double rank_tol) { return rank2_itangle_terms(rho, rank_tol).value; }

// ---------------------------------------------------------------------------
// Convex roof

namespace {

// Average pure I-tangle of the ensemble Phi_i = sum_j U_ij V_j and its
// Wirtinger gradient with respect to conj(U).
class RoofObjective {
  public:
    explicit RoofObjective(std::vector<CMatrix> basis) : basis_(std::move(basis)) {}

    double operator()(const CMatrix& u, CMatrix* grad) const {
        const auto m = u.rows();
        const auto r = u.cols();
        double f = 0.0;
        if (grad) grad->setZero(m, r);
        for (Eigen::Index i = 0; i < m; ++i) {
            CMatrix phi = CMatrix::Zero(basis_[0].rows(), basis_[0].cols());
            for (Eigen::Index j = 0; j < r; ++j) phi += u(i, j) * basis_[static_cast<std::size_t>(j)];
            const double n = phi.squaredNorm();
            if (n < 1e-300) continue;
            const CMatrix red = phi * phi.adjoint();
            const double tau = 2.0 * (n * n - red.squaredNorm());
            f += tau / n;
            if (!grad) continue;
            const CMatrix dtau = 4.0 * (n * phi - red * phi);
            const CMatrix dg = dtau / n - (tau / (n * n)) * phi;
            for (Eigen::Index j = 0; j < r; ++j)
                (*grad)(i, j) = (basis_[static_cast<std::size_t>(j)].conjugate().cwiseProduct(dg)).sum();
        }
        return f;
    }

    CMatrix member(const CMatrix& u, Eigen::Index i) const {
        CMatrix phi = CMatrix::Zero(basis_[0].rows(), basis_[0].cols());
        for (Eigen::Index j = 0; j < u.cols(); ++j) phi += u(i, j) * basis_[static_cast<std::size_t>(j)];
        return phi;
    }

  private:
    std::vector<CMatrix> basis_;
};

CMatrix cayley(const CMatrix& a, double s) {
    const CMatrix id = CMatrix::Identity(a.rows(), a.cols());
    return (id - 0.5 * s * a).partialPivLu().solve(id + 0.5 * s * a);
}

struct LocalMinimum {
    double value;
    CMatrix u;
};

// Riemannian steepest descent on the Stiefel manifold with Armijo backtracking;
// steps are Cayley rotations so U stays an isometry to roundoff.
LocalMinimum refine(const RoofObjective& f, CMatrix u, double tol, int max_iterations) {
    CMatrix g;
    double value = f(u, &g);
    double step = 0.5;
    CMatrix g_new;
    for (int it = 0; it < max_iterations; ++it) {
        const CMatrix x = u * g.adjoint();
        const CMatrix a = x - x.adjoint();
        const double slope = a.squaredNorm();
        if (std::sqrt(slope) < tol) break;
        bool accepted = false;
        while (step > 1e-14) {
            const CMatrix trial = cayley(a, step) * u;
            const double v = f(trial, &g_new);
            if (v <= value - 1e-4 * step * slope) {
                accepted = true;
                const double gain = value - v;
                u = trial;
                g.swap(g_new);
                value = v;
                step = std::min(step * 2.0, 64.0);
                if (gain < 1e-16) it = max_iterations;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    return {value, u};
}

CMatrix random_isometry(Eigen::Index m, Eigen::Index r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    CMatrix z(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) z(i, j) = cplx(normal(rng), normal(rng));
    Eigen::HouseholderQR<CMatrix> qr(z);
    const CMatrix q = qr.householderQ();
    return q.leftCols(r);
}

}  // namespace

RoofResult convex_roof_itangle(const DensityMatrix& rho, const RoofOptions& opts) {
    require_two_factors(rho);
    if (opts.restarts < 1) throw std::invalid_argument("convex_roof_itangle: restarts must be at least 1");
    const Spectrum s = support(rho.matrix(), opts.rank_tol);
    const auto rank = static_cast<int>(s.values.size());
    if (rank == 0) throw std::invalid_argument("convex_roof_itangle: zero state");

    std::vector<int> sizes = opts.ensemble_sizes;
    if (sizes.empty())
        for (int m = rank; m <= rank * rank; ++m) sizes.push_back(m);
    for (int m : sizes)
        if (m < rank) throw std::invalid_argument("convex_roof_itangle: rank exceeds ensemble-size budget");

    const int d0 = rho.shape().dim(0);
    const int d1 = rho.shape().dim(1);
    const double weight_sum = std::accumulate(s.values.begin(), s.values.end(), 0.0);
    std::vector<CMatrix> basis;
    for (int j = 0; j < rank; ++j) {
        CMatrix v = std::sqrt(s.values[static_cast<std::size_t>(j)] / weight_sum) * as_matrix(s.vectors[static_cast<std::size_t>(j)], d0, d1);
        basis.push_back(d0 <= d1 ? v : CMatrix(v.transpose()));
    }
    const RoofObjective objective(basis);

    RoofResult best;
    CMatrix best_u;
    for (int m : sizes) {
        std::vector<LocalMinimum> found(static_cast<std::size_t>(opts.restarts), {std::numeric_limits<double>::infinity(), {}});
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < opts.restarts; ++k) {
            const std::uint64_t seed = derive_seed(opts.seed, (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint64_t>(k));
            const CMatrix u0 = (m == 1) ? CMatrix::Ones(1, 1) : random_isometry(m, rank, seed);
            found[static_cast<std::size_t>(k)] = refine(objective, u0, opts.tol, opts.max_iterations);
        }
        for (const auto& lm : found)  // first minimum wins ties, so the result is schedule independent
            if (lm.value < best.value) {
                best.value = lm.value;
                best.ensemble_size = m;
                best_u = lm.u;
            }
    }

    for (Eigen::Index i = 0; i < best_u.rows(); ++i) {
        CMatrix phi = objective.member(best_u, i);
        if (d0 > d1) phi.transposeInPlace();
        const double p = phi.squaredNorm();
        best.weights.push_back(p);
        best.states.push_back(p > 0.0 ? CVector(flatten(phi) / std::sqrt(p)) : CVector(flatten(phi)));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Tripartite quantities

namespace {

// For traced factor z, the (d_x x d_y) slice psi[x, y, z] with x < y.
std::vector<CMatrix> slices(const PureState& state, int x, int y, int z) {
    const auto& shape = state.shape();
    std::vector<CMatrix> out;
    std::vector<int> lab(3);
    for (int c = 0; c < shape.dim(static_cast<std::size_t>(z)); ++c) {
        CMatrix m(shape.dim(static_cast<std::size_t>(x)), shape.dim(static_cast<std::size_t>(y)));
        lab[static_cast<std::size_t>(z)] = c;
        for (int a = 0; a < m.rows(); ++a)
            for (int b = 0; b < m.cols(); ++b) {
                lab[static_cast<std::size_t>(x)] = a;
                lab[static_cast<std::size_t>(y)] = b;
                m(a, b) = state.amplitude(lab);
            }
        out.push_back(std::move(m));
    }
    return out;
}

double pair_itangle(const PureState& state, int x, int y, int z, const RoofOptions& roof) {
    const auto& shape = state.shape();
    if (shape.dim(static_cast<std::size_t>(x)) == 2 && shape.dim(static_cast<std::size_t>(y)) == 2)
        return wootters_tangle(partial_trace(state, {x, y}).matrix());
    if (shape.dim(static_cast<std::size_t>(z)) <= 2) return rank2_itangle_factored(slices(state, x, y, z)).value;
    return convex_roof_itangle(partial_trace(state, {x, y}), roof).value;
}

}  // namespace

ResidualTerms i_residual_terms(const PureState& state, double rank_tol, const RoofOptions& roof) {
    if (!(rank_tol > 0.0)) throw std::invalid_argument("i_residual_tangle: rank_tol must be positive");
    if (state.shape().factor_count() != 3) throw DimensionError("i_residual_tangle: expected three factors");
    ResidualTerms t;
    for (int f = 0; f < 3; ++f) {
        const CMatrix gram = reduced_gram(state, {f});
        t.eff_dims[static_cast<std::size_t>(f)] = effective_rank(gram, rank_tol);
        t.one_vs_rest_unit[static_cast<std::size_t>(f)] = 2.0 * (1.0 - purity(gram));
        // the complementary side has the same rank, so d is this factor's rank
        t.one_vs_rest[static_cast<std::size_t>(f)] = 0.5 * t.eff_dims[static_cast<std::size_t>(f)] * t.one_vs_rest_unit[static_cast<std::size_t>(f)];
    }
    constexpr std::array<std::array<int, 3>, 3> pairs{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    for (std::size_t p = 0; p < 3; ++p) {
        const auto [x, y, z] = pairs[p];
        const int d = std::min(t.eff_dims[static_cast<std::size_t>(x)], t.eff_dims[static_cast<std::size_t>(y)]);
        t.pairwise_unit[p] = pair_itangle(state, x, y, z, roof);
        t.pairwise[p] = 0.5 * d * t.pairwise_unit[p];
    }
    const double one = t.one_vs_rest[0] + t.one_vs_rest[1] + t.one_vs_rest[2];
    const double two = t.pairwise[0] + t.pairwise[1] + t.pairwise[2];
    t.value = one / 3.0 - 2.0 * two / 3.0;
    return t;
}

double i_residual_tangle(const PureState& state, double rank_tol) { return i_residual_terms(state, rank_tol).value; }

namespace {

void require_tcm(const PureState& state) {
    const auto& s = state.shape();
    if (s.factor_count() != 3 || s.dim(0) != 2 || s.dim(1) != 2) throw DimensionError("expected a (2, 2, D) state");
}

double inversion_of(const PureState& state) {
    const CMatrix psi = bipartite_matrix(state, {0, 1});
    return psi.row(0).squaredNorm() - psi.row(3).squaredNorm();
}

}  // namespace

TangleReport bipartite_tangles_all(const PureState& state) {
    require_tcm(state);
    TangleReport r;
    r.tau_F_AA = pure_itangle(state, {{2}, {0, 1}});
    r.tau_A_rest = pure_itangle(state, {{0}, {1, 2}});
    r.tau_AA = wootters_tangle(partial_trace(state, {0, 1}).matrix());
    r.tau_AF = rank2_itangle_factored(slices(state, 0, 2, 1)).value;
    r.inversion = inversion_of(state);
    return r;
}

TangleReport tangle_report(const PureState& state, double t, double rank_tol) {
    require_tcm(state);
    const ResidualTerms terms = i_residual_terms(state, rank_tol);
    TangleReport r;
    r.t = t;
    r.tau_F_AA = terms.one_vs_rest_unit[2];
    r.tau_A_rest = terms.one_vs_rest_unit[0];
    r.tau_AA = terms.pairwise_unit[0];
    r.tau_AF = terms.pairwise_unit[1];
    r.tau_res = terms.value;
    r.inversion = inversion_of(state);
    r.field_eff_dim = terms.eff_dims[2];
    return r;
}

}  // namespace tcm
