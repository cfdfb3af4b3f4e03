#pragma once

// Tangles: two-qubit (Wootters), pure-state I-tangle, mixed-state I-tangle by
// convex-roof optimization and by the closed form for rank-two states, and
// the dimension-rescaled I-residual tangle of a tripartite pure state.

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "tcm/tensor.hpp"

namespace tcm {

/// nu_a nu_b (I - rho_A (x) I - I (x) rho_B + rho) for a two-factor rho.
CMatrix universal_inversion(const DensityMatrix& rho, double nu_a = 1.0, double nu_b = 1.0);

/// tr(rho rho~) with unit scale factors.
double inversion_overlap(const DensityMatrix& rho);

/// Squared concurrence of a two-qubit density matrix.
double wootters_tangle(const DensityMatrix& rho);
double wootters_tangle(const CMatrix& rho);

/// 2 nu [1 - tr(rho_A^2)] across `cut`.
double pure_itangle(const PureState& state, const Cut& cut, double nu_product = 1.0);

struct RoofOptions {
    int restarts = 20;
    /// Decomposition lengths to try; empty means rank, rank + 1, ..., rank^2.
    std::vector<int> ensemble_sizes;
    double tol = 1e-8;
    int max_iterations = 4000;
    std::uint64_t seed = 0x5eed;
    double rank_tol = 1e-10;
};

struct RoofResult {
    double value = std::numeric_limits<double>::infinity();
    int ensemble_size = 0;
    std::vector<double> weights;
    std::vector<CVector> states;  ///< normalized, in the density matrix's index order
};

/// Numerical convex roof of the pure I-tangle (unit scale factors).
RoofResult convex_roof_itangle(const DensityMatrix& rho, const RoofOptions& opts = {});

/// Closed-form I-tangle of a bipartite state of rank at most two:
///   tau = tr(rho rho~) + 2 lambda_min [1 - tr(rho^2)].
/// M is the quadratic form of the pure-state tangle over the Bloch sphere of
/// the support, so lambda_min is its lowest eigenvalue.
struct Rank2ITangle {
    double value = 0.0;
    double inversion_overlap = 0.0;
    double purity = 1.0;
    double lambda_min = 0.0;  ///< zero when the state is pure
    RMatrix m_matrix;         ///< 3x3, empty when the state is pure
    int rank = 0;
};

Rank2ITangle rank2_itangle_terms(const DensityMatrix& rho, double rank_tol = 1e-10);
double rank2_itangle(const DensityMatrix& rho, double rank_tol = 1e-10);

/// Same closed form for rho = sum_j w_j w_j^dagger with each w_j given as a
/// (d_first x d_second) matrix. At most two vectors.
Rank2ITangle rank2_itangle_factored(const std::vector<CMatrix>& vectors, double rank_tol = 1e-10);

/// The five tangles of a two-atom TCM state plus the atomic inversion.
struct TangleReport {
    double t = 0.0;
    double tau_F_AA = 0.0;    ///< field vs both atoms
    double tau_A_rest = 0.0;  ///< atom 1 vs atom 2 and field
    double tau_AA = 0.0;      ///< atom 1 vs atom 2 (Wootters)
    double tau_AF = 0.0;      ///< atom 1 vs field (rank-two I-tangle)
    double tau_res = std::numeric_limits<double>::quiet_NaN();
    double inversion = 0.0;
    int field_eff_dim = 0;
};

/// Bipartite tangles with unit scale factors; tau_res is left NaN.
TangleReport bipartite_tangles_all(const PureState& state);

/// Terms of the I-residual tangle for factors A, B, C = 0, 1, 2.
struct ResidualTerms {
    std::array<double, 3> one_vs_rest{};  ///< A(BC), B(AC), C(AB), each scaled by d/2
    std::array<double, 3> pairwise{};     ///< AB, AC, BC, each scaled by d/2
    std::array<double, 3> one_vs_rest_unit{};  ///< same terms with unit scale factors
    std::array<double, 3> pairwise_unit{};
    std::array<int, 3> eff_dims{};        ///< effective rank of each single-factor marginal
    double value = 0.0;
};

ResidualTerms i_residual_terms(const PureState& state, double rank_tol = 1e-10,
                               const RoofOptions& roof = {});
double i_residual_tangle(const PureState& state, double rank_tol = 1e-10);

/// All report entries including tau_res and field_eff_dim.
TangleReport tangle_report(const PureState& state, double t, double rank_tol = 1e-10);

}  // namespace tcm
