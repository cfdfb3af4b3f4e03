#pragma once

// Two-atom Tavis-Cummings dynamics in the excitation-number blocks
//   Omega_K = span{|ee,K-2>, |eg,K-1>, |ge,K-1>, |gg,K>}
// with hbar = 1 and resonant coupling. The free part omega * (K - 1) is a
// phase per block, so omega = 0 gives the interaction picture.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcm/tensor.hpp"

namespace tcm {

/// Atomic level labels; the two-atom 4-vector is ordered ee, eg, ge, gg.
enum class Level : int { e = 0, g = 1 };

struct ModelParams {
    double g = 1.0;
    double omega = 0.0;
    int n_max = 1;

    void validate() const;
};

/// Raised when population reaches the top of the truncated Fock space.
class TruncationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Population within this many photon indices of n_max is guarded.
inline constexpr int kGuardWidth = 3;
inline constexpr double kGuardThreshold = 1e-8;

struct BasisLabel {
    Level atom1;
    Level atom2;
    int photons;
};

/// Eigendecomposition of the Hamiltonian restricted to one block.
struct BlockPropagator {
    int K = 0;
    std::vector<BasisLabel> basis;
    std::vector<Eigen::Index> flat_index;  ///< position of each basis state in the full vector
    RMatrix hamiltonian;
    RVector eigenvalues;
    RMatrix eigenvectors;  ///< columns are eigenvectors; real orthogonal
};

[[nodiscard]] std::size_t tcm_index(int field_dim, Level a1, Level a2, int n);

CVector fock_state(int n, int n_max);

struct CoherentField {
    CVector amplitudes;
    int n_max = 0;  ///< smallest cutoff whose discarded Poisson mass is below tail_tol
};

/// Real-amplitude coherent state truncated by Poisson tail mass.
CoherentField coherent_state(double mean_n, double tail_tol);

/// Pads or truncates a field vector to n_max + 1 entries.
CVector resize_field(const CVector& field, int n_max);

/// Named atomic states: ee, gg, eg, ge, sym_plus, cat_plus, singlet.
CVector atomic_state(const std::string& name);
/// Normalizes raw amplitudes in the order ee, eg, ge, gg.
CVector atomic_state(const CVector& raw);

BlockPropagator build_block(int K, const ModelParams& params);

/// Caches every block of the truncated space for one set of parameters.
class Propagator {
  public:
    explicit Propagator(const ModelParams& params);

    [[nodiscard]] const ModelParams& params() const { return params_; }
    [[nodiscard]] const std::vector<BlockPropagator>& blocks() const { return blocks_; }
    [[nodiscard]] SystemShape shape() const { return SystemShape::tcm(params_.n_max + 1); }

    /// exp(-iHt)|psi>, followed by the truncation guard.
    [[nodiscard]] PureState evolve(const PureState& state, double t) const;

  private:
    ModelParams params_;
    std::vector<BlockPropagator> blocks_;
};

/// A fixed initial state projected onto the block eigenbases once, so each
/// time point costs one phase multiply per populated eigenvector.
class Trajectory {
  public:
    Trajectory(const Propagator& propagator, const PureState& initial);

    /// Evolved state; the norm is not re-imposed, so drift surfaces as an error.
    [[nodiscard]] PureState at(double t) const;
    [[nodiscard]] CVector amplitudes_at(double t) const;
    [[nodiscard]] const PureState& initial() const { return initial_; }

  private:
    struct Populated {
        std::vector<Eigen::Index> flat_index;
        RVector eigenvalues;
        RMatrix eigenvectors;
        CVector projection;
    };
    PureState initial_;
    std::vector<Populated> populated_;
};

PureState evolve(const PureState& state, double t, const ModelParams& params);

/// Throws TruncationError if the top kGuardWidth photon indices carry more
/// than kGuardThreshold population.
void check_truncation(const PureState& state);
double top_fock_population(const PureState& state, int width = kGuardWidth);

/// P(ee) - P(gg).
double atomic_inversion(const PureState& state);

/// Probability of each excitation number K = 0..n_max+2.
std::vector<double> excitation_distribution(const PureState& state);

/// <psi|H|psi> including the free part omega * (K - 1).
double energy(const PureState& state, const ModelParams& params);

}  // namespace tcm
