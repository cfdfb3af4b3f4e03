#include "tcm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tcm {

SystemShape::SystemShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("SystemShape: no factors");
    total_ = 1;
    for (int d : dims_) {
        if (d < 1) throw DimensionError("SystemShape: factor dimension < 1");
        total_ *= static_cast<std::size_t>(d);
    }
}

std::size_t SystemShape::index(const std::vector<int>& labels) const {
    if (labels.size() != dims_.size()) throw DimensionError("SystemShape::index: label count mismatch");
    std::size_t idx = 0;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
        if (labels[f] < 0 || labels[f] >= dims_[f]) throw DimensionError("SystemShape::index: label out of range");
        idx = idx * static_cast<std::size_t>(dims_[f]) + static_cast<std::size_t>(labels[f]);
    }
    return idx;
}

std::vector<int> SystemShape::labels(std::size_t index) const {
    std::vector<int> out(dims_.size());
    for (std::size_t f = dims_.size(); f-- > 0;) {
        out[f] = static_cast<int>(index % static_cast<std::size_t>(dims_[f]));
        index /= static_cast<std::size_t>(dims_[f]);
    }
    return out;
}

SystemShape SystemShape::subshape(const std::vector<int>& factors) const {
    std::vector<int> dims;
    dims.reserve(factors.size());
    for (int f : factors) dims.push_back(dim(static_cast<std::size_t>(f)));
    return SystemShape(std::move(dims));
}

PureState::PureState(SystemShape shape, CVector amplitudes)
    : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != shape_.total())
        throw DimensionError("PureState: amplitude count does not match shape");
    if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance)
        throw std::invalid_argument("PureState: amplitudes not normalized");
}

PureState PureState::normalized(SystemShape shape, CVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0)) throw std::invalid_argument("PureState: zero vector");
    amplitudes /= n;
    return PureState(std::move(shape), std::move(amplitudes));
}

namespace {

std::vector<int> iota_factors(std::size_t n) {
    std::vector<int> f(n);
    std::iota(f.begin(), f.end(), 0);
    return f;
}

void check_density(const CMatrix& m, bool spectral) {
    if (m.rows() != m.cols()) throw DimensionError("DensityMatrix: not square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > kTraceTolerance)
        throw std::invalid_argument("DensityMatrix: trace differs from one");
    if (spectral && hermitian_eigenvalues(m)(0) < -kNegativityTolerance)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

}  // namespace

DensityMatrix::DensityMatrix(std::vector<int> factors, SystemShape shape, CMatrix matrix)
    : factors_(std::move(factors)), shape_(std::move(shape)), matrix_(std::move(matrix)) {
    if (factors_.size() != shape_.factor_count()) throw DimensionError("DensityMatrix: factor list does not match shape");
    if (static_cast<std::size_t>(matrix_.rows()) != shape_.total())
        throw DimensionError("DensityMatrix: matrix size does not match shape");
    check_density(matrix_, true);
}

DensityMatrix::DensityMatrix(SystemShape shape, CMatrix matrix)
    : DensityMatrix(iota_factors(shape.factor_count()), shape, std::move(matrix)) {}

DensityMatrix::DensityMatrix(Trusted, std::vector<int> factors, SystemShape shape, CMatrix matrix)
    : factors_(std::move(factors)), shape_(std::move(shape)), matrix_(std::move(matrix)) {}

DensityMatrix DensityMatrix::projector(const PureState& state) {
    const CVector& a = state.amplitudes();
    return DensityMatrix(Trusted{}, iota_factors(state.shape().factor_count()), state.shape(), a * a.adjoint());
}

void Cut::validate(std::size_t factor_count) const {
    if (side_a.empty() || side_b.empty()) throw std::invalid_argument("Cut: empty side");
    std::vector<int> all(side_a);
    all.insert(all.end(), side_b.begin(), side_b.end());
    std::sort(all.begin(), all.end());
    if (all != iota_factors(factor_count)) throw std::invalid_argument("Cut: sides must partition the factors");
}

PureState tensor_product(const std::vector<CVector>& factors) {
    if (factors.empty()) throw DimensionError("tensor_product: no factors");
    std::vector<int> dims;
    CVector out = CVector::Ones(1);
    for (const auto& f : factors) {
        if (std::abs(f.norm() - 1.0) > kNormTolerance) throw std::invalid_argument("tensor_product: factor not normalized");
        dims.push_back(static_cast<int>(f.size()));
        CVector next(out.size() * f.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out(i) * f;
        out = std::move(next);
    }
    return PureState::normalized(SystemShape(std::move(dims)), std::move(out));
}

PureState tensor_product(const std::vector<CVector>& factors, const SystemShape& declared) {
    if (factors.size() != declared.factor_count()) throw DimensionError("tensor_product: factor count mismatch");
    for (std::size_t f = 0; f < factors.size(); ++f)
        if (factors[f].size() != declared.dim(f)) throw DimensionError("tensor_product: factor dimension mismatch");
    return tensor_product(factors);
}

namespace {

// Splits factor positions into sorted `rows` and the complementary `cols`.
void split_factors(std::size_t count, std::vector<int> rows, std::vector<int>& sorted_rows,
                   std::vector<int>& cols) {
    std::sort(rows.begin(), rows.end());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
        throw std::invalid_argument("duplicate factor in selection");
    for (int r : rows)
        if (r < 0 || static_cast<std::size_t>(r) >= count) throw std::invalid_argument("factor index out of range");
    cols.clear();
    for (int f = 0; f < static_cast<int>(count); ++f)
        if (!std::binary_search(rows.begin(), rows.end(), f)) cols.push_back(f);
    sorted_rows = std::move(rows);
}

// Map from flat index to (row, col) of the bipartite reshaping.
struct SplitIndex {
    std::vector<Eigen::Index> row;
    std::vector<Eigen::Index> col;
    Eigen::Index rows = 1;
    Eigen::Index cols = 1;
};

SplitIndex make_split(const SystemShape& shape, const std::vector<int>& rows, const std::vector<int>& cols) {
    SplitIndex s;
    for (int f : rows) s.rows *= shape.dim(static_cast<std::size_t>(f));
    for (int f : cols) s.cols *= shape.dim(static_cast<std::size_t>(f));
    s.row.resize(shape.total());
    s.col.resize(shape.total());
    for (std::size_t i = 0; i < shape.total(); ++i) {
        const auto lab = shape.labels(i);
        Eigen::Index r = 0;
        Eigen::Index c = 0;
        for (int f : rows) r = r * shape.dim(static_cast<std::size_t>(f)) + lab[static_cast<std::size_t>(f)];
        for (int f : cols) c = c * shape.dim(static_cast<std::size_t>(f)) + lab[static_cast<std::size_t>(f)];
        s.row[i] = r;
        s.col[i] = c;
    }
    return s;
}

}  // namespace

CMatrix bipartite_matrix(const PureState& state, const std::vector<int>& row_factors) {
    const auto& shape = state.shape();
    std::vector<int> rows;
    std::vector<int> cols;
    split_factors(shape.factor_count(), row_factors, rows, cols);
    // Fast path: a leading block of factors is a plain column-major transpose.
    bool leading = true;
    for (std::size_t k = 0; k < rows.size(); ++k) leading = leading && rows[k] == static_cast<int>(k);
    Eigen::Index nr = 1;
    for (int f : rows) nr *= shape.dim(static_cast<std::size_t>(f));
    const Eigen::Index nc = static_cast<Eigen::Index>(shape.total()) / nr;
    if (leading) {
        // amplitudes are row-major in (rows, cols)
        return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            state.amplitudes().data(), nr, nc);
    }
    const SplitIndex s = make_split(shape, rows, cols);
    CMatrix m = CMatrix::Zero(nr, nc);
    const CVector& a = state.amplitudes();
    for (std::size_t i = 0; i < shape.total(); ++i) m(s.row[i], s.col[i]) = a(static_cast<Eigen::Index>(i));
    return m;
}

DensityMatrix partial_trace(const PureState& state, const std::vector<int>& keep) {
    const auto n = state.shape().factor_count();
    if (keep.empty() || keep.size() >= n) throw std::invalid_argument("partial_trace: keep must be a nonempty strict subset");
    std::vector<int> rows;
    std::vector<int> cols;
    split_factors(n, keep, rows, cols);
    const CMatrix psi = bipartite_matrix(state, rows);
    CMatrix rho = psi * psi.adjoint();
    SystemShape sub = state.shape().subshape(rows);
    return DensityMatrix(DensityMatrix::Trusted{}, rows, std::move(sub), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const auto& factors = rho.factors();
    const auto n = factors.size();
    if (keep.empty() || keep.size() >= n) throw std::invalid_argument("partial_trace: keep must be a nonempty strict subset");
    // translate parent factor ids to local positions
    std::vector<int> local;
    for (int k : keep) {
        auto it = std::find(factors.begin(), factors.end(), k);
        if (it == factors.end()) throw std::invalid_argument("partial_trace: factor not present");
        local.push_back(static_cast<int>(it - factors.begin()));
    }
    std::vector<int> rows;
    std::vector<int> cols;
    split_factors(n, local, rows, cols);
    const SplitIndex s = make_split(rho.shape(), rows, cols);
    CMatrix out = CMatrix::Zero(s.rows, s.rows);
    const auto total = rho.shape().total();
    const CMatrix& m = rho.matrix();
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = 0; j < total; ++j)
            if (s.col[i] == s.col[j])
                out(s.row[i], s.row[j]) += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    std::vector<int> kept;
    for (int r : rows) kept.push_back(factors[static_cast<std::size_t>(r)]);
    return DensityMatrix(DensityMatrix::Trusted{}, kept, rho.shape().subshape(rows), std::move(out));
}

double purity(const CMatrix& rho) { return rho.squaredNorm(); }

double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

RVector hermitian_eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

int effective_rank(const CMatrix& hermitian, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("effective_rank: tol must be positive");
    const RVector ev = hermitian_eigenvalues(hermitian);
    return static_cast<int>((ev.array() > tol).count());
}

int effective_rank(const DensityMatrix& rho, double tol) { return effective_rank(rho.matrix(), tol); }

CMatrix reduced_gram(const PureState& state, const std::vector<int>& side) {
    const CMatrix psi = bipartite_matrix(state, side);
    if (psi.rows() <= psi.cols()) return psi * psi.adjoint();
    return psi.adjoint() * psi;  // transpose of the complementary marginal, same spectrum
}

}  // namespace tcm
