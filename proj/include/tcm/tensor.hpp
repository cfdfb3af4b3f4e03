#pragma once

// Pure states and density matrices over a small tensor product of factors
// (two atoms and a truncated field mode for the Tavis-Cummings model).
//
// Index convention: amplitudes are stored lexicographically in the factor
// order given by SystemShape, first factor slowest and last factor fastest.
// For the TCM shape (2, 2, D) this is index = (s1 * 2 + s2) * D + n.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tcm {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kNegativityTolerance = 1e-10;

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Ordered list of tensor factor dimensions.
class SystemShape {
  public:
    SystemShape() = default;
    explicit SystemShape(std::vector<int> dims);
    SystemShape(std::initializer_list<int> dims) : SystemShape(std::vector<int>(dims)) {}

    static SystemShape tcm(int field_dim) { return SystemShape({2, 2, field_dim}); }

    [[nodiscard]] std::size_t factor_count() const { return dims_.size(); }
    [[nodiscard]] int dim(std::size_t factor) const { return dims_.at(factor); }
    [[nodiscard]] const std::vector<int>& dims() const { return dims_; }
    [[nodiscard]] std::size_t total() const { return total_; }

    /// Flat index for a multi-index given in factor order.
    [[nodiscard]] std::size_t index(const std::vector<int>& labels) const;
    [[nodiscard]] std::vector<int> labels(std::size_t index) const;

    /// Shape restricted to the listed factors (in the listed order).
    [[nodiscard]] SystemShape subshape(const std::vector<int>& factors) const;

    bool operator==(const SystemShape& other) const { return dims_ == other.dims_; }

  private:
    std::vector<int> dims_;
    std::size_t total_ = 0;
};

/// Normalized state vector on a SystemShape.
class PureState {
  public:
    PureState(SystemShape shape, CVector amplitudes);

    /// Rescales `amplitudes` to unit norm; throws on a zero vector.
    static PureState normalized(SystemShape shape, CVector amplitudes);

    [[nodiscard]] const SystemShape& shape() const { return shape_; }
    [[nodiscard]] const CVector& amplitudes() const { return amplitudes_; }
    [[nodiscard]] cplx amplitude(const std::vector<int>& labels) const {
        return amplitudes_(static_cast<Eigen::Index>(shape_.index(labels)));
    }

  private:
    SystemShape shape_;
    CVector amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace matrix over a subset of the
/// factors of a parent shape.
class DensityMatrix {
  public:
    /// Validates hermiticity, trace and spectrum against the module tolerances.
    DensityMatrix(std::vector<int> factors, SystemShape shape, CMatrix matrix);
    /// Standalone density matrix; factors are numbered 0..k-1.
    DensityMatrix(SystemShape shape, CMatrix matrix);

    static DensityMatrix projector(const PureState& state);

    [[nodiscard]] const std::vector<int>& factors() const { return factors_; }
    [[nodiscard]] const SystemShape& shape() const { return shape_; }
    [[nodiscard]] const CMatrix& matrix() const { return matrix_; }
    [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }

    /// Construction without the spectral check; used for marginals that are
    /// positive by construction.
    struct Trusted {};
    DensityMatrix(Trusted, std::vector<int> factors, SystemShape shape, CMatrix matrix);

  private:
    std::vector<int> factors_;
    SystemShape shape_;
    CMatrix matrix_;
};

/// Bipartition of a set of factors.
struct Cut {
    std::vector<int> side_a;
    std::vector<int> side_b;

    /// Checks disjointness, non-emptiness and that the union is 0..factor_count-1.
    void validate(std::size_t factor_count) const;
};

/// Kronecker product of single-factor states, first argument slowest.
PureState tensor_product(const std::vector<CVector>& factors);
PureState tensor_product(const std::vector<CVector>& factors, const SystemShape& declared);

/// Reshapes a pure state into a (dim(rows) x dim(rest)) matrix; the row and
/// column multi-indices are lexicographic in ascending factor order.
CMatrix bipartite_matrix(const PureState& state, const std::vector<int>& row_factors);

DensityMatrix partial_trace(const PureState& state, const std::vector<int>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

double purity(const DensityMatrix& rho);
double purity(const CMatrix& rho);

/// Number of eigenvalues strictly above `tol`.
int effective_rank(const DensityMatrix& rho, double tol);
int effective_rank(const CMatrix& hermitian, double tol);

/// Ascending eigenvalues of a Hermitian matrix.
RVector hermitian_eigenvalues(const CMatrix& m);

/// Gram matrix of the smaller side of a pure-state bipartition. Its spectrum
/// equals the nonzero spectrum of either marginal.
CMatrix reduced_gram(const PureState& state, const std::vector<int>& side);

}  // namespace tcm
