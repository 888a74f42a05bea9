#include "dce/hilbert.hpp"

#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "dce/errors.hpp"

namespace dce {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDimension: return "invalid dimension";
        case ErrorKind::DimensionMismatch: return "dimension mismatch";
        case ErrorKind::Instability: return "instability";
        case ErrorKind::InvalidSqueeze: return "invalid squeeze";
        case ErrorKind::UnsupportedRegime: return "unsupported regime";
        case ErrorKind::NonUniqueSteadyState: return "non-unique steady state";
        case ErrorKind::TruncationTooSmall: return "truncation too small";
        case ErrorKind::Stiffness: return "stiffness";
        case ErrorKind::UndefinedCorrelation: return "undefined correlation";
        case ErrorKind::UndefinedThreshold: return "undefined threshold";
        case ErrorKind::DegenerateCubic: return "degenerate cubic";
        case ErrorKind::Precondition: return "precondition violated";
        case ErrorKind::Config: return "config error";
    }
    return "error";
}

SpaceLayout::SpaceLayout(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw Error(ErrorKind::InvalidDimension, "layout needs at least one mode");
    total_ = 1;
    for (int d : dims_) {
        if (d < 2) throw Error(ErrorKind::InvalidDimension, "every mode needs >= 2 Fock levels, got " + std::to_string(d));
        total_ *= d;
    }
}

int SpaceLayout::index(const std::vector<int>& occupations) const {
    if (occupations.size() != dims_.size()) throw Error(ErrorKind::DimensionMismatch, "occupation list length");
    int idx = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (occupations[k] < 0 || occupations[k] >= dims_[k])
            throw Error(ErrorKind::InvalidDimension, "occupation outside truncation");
        idx = idx * dims_[k] + occupations[k];
    }
    return idx;
}

SpaceLayout SpaceLayout::concat(const SpaceLayout& other) const {
    std::vector<int> d = dims_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    return SpaceLayout(std::move(d));
}

OperatorMatrix::OperatorMatrix(SpaceLayout layout, SparseMat matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != layout_.total() || matrix_.cols() != layout_.total())
        throw Error(ErrorKind::DimensionMismatch, "operator size does not match layout");
    matrix_.makeCompressed();
}

OperatorMatrix OperatorMatrix::identity(const SpaceLayout& layout) {
    SparseMat id(layout.total(), layout.total());
    id.setIdentity();
    return OperatorMatrix(layout, std::move(id));
}

OperatorMatrix OperatorMatrix::zero(const SpaceLayout& layout) {
    return OperatorMatrix(layout, SparseMat(layout.total(), layout.total()));
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(layout_, SparseMat(matrix_.adjoint()));
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
    if (layout_ != rhs.layout_) throw Error(ErrorKind::DimensionMismatch, "operator sum");
    matrix_ = matrix_ + rhs.matrix_;
    return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
    if (layout_ != rhs.layout_) throw Error(ErrorKind::DimensionMismatch, "operator difference");
    matrix_ = matrix_ - rhs.matrix_;
    return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx s) {
    matrix_ *= s;
    return *this;
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    if (lhs.layout_ != rhs.layout_) throw Error(ErrorKind::DimensionMismatch, "operator product");
    return OperatorMatrix(lhs.layout_, SparseMat(lhs.matrix_ * rhs.matrix_));
}

double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.layout() != b.layout()) throw Error(ErrorKind::DimensionMismatch, "max_abs_diff");
    SparseMat diff = a.matrix() - b.matrix();
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMat::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double hermiticity_error(const OperatorMatrix& op) { return max_abs_diff(op, op.adjoint()); }

OperatorMatrix annihilation(int dim) {
    if (dim < 2) throw Error(ErrorKind::InvalidDimension, "annihilation needs dim >= 2");
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(dim - 1));
    for (int n = 1; n < dim; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    SparseMat m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return OperatorMatrix(SpaceLayout({dim}), std::move(m));
}

OperatorMatrix number_operator(int dim) {
    OperatorMatrix a = annihilation(dim);
    return a.adjoint() * a;
}

OperatorMatrix identity(int dim) { return OperatorMatrix::identity(SpaceLayout({dim})); }

OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
    SparseMat k = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
    return OperatorMatrix(a.layout().concat(b.layout()), std::move(k));
}

OperatorMatrix embed(const OperatorMatrix& single, const SpaceLayout& layout, int mode) {
    if (single.layout().modes() != 1 || single.layout().dim(0) != layout.dim(mode))
        throw Error(ErrorKind::DimensionMismatch, "embed: single-mode operator does not fit mode");
    OperatorMatrix out = mode == 0 ? single : identity(layout.dim(0));
    for (int k = 1; k < layout.modes(); ++k) out = tensor(out, k == mode ? single : identity(layout.dim(k)));
    return out;
}

OperatorMatrix squeeze_unitary(int dim, double r) {
    const DenseMat a = annihilation(dim).dense();
    const DenseMat gen = (r / 2.0) * (a * a - a.adjoint() * a.adjoint());
    const DenseMat u = gen.exp();
    return OperatorMatrix(SpaceLayout({dim}), u.sparseView(0.0, 0.0));
}

DensityMatrix::DensityMatrix(SpaceLayout layout, DenseMat rho) : layout_(std::move(layout)), rho_(std::move(rho)) {
    if (rho_.rows() != layout_.total() || rho_.cols() != layout_.total())
        throw Error(ErrorKind::DimensionMismatch, "density matrix size does not match layout");
}

DensityMatrix DensityMatrix::pure(const SpaceLayout& layout, const Vec& psi) {
    return DensityMatrix(layout, psi * psi.adjoint());
}

DensityMatrix DensityMatrix::fock(const SpaceLayout& layout, const std::vector<int>& occupations) {
    DenseMat rho = DenseMat::Zero(layout.total(), layout.total());
    const int i = layout.index(occupations);
    rho(i, i) = 1.0;
    return DensityMatrix(layout, std::move(rho));
}

DensityCheck DensityMatrix::check() const {
    DensityCheck c;
    c.hermiticity = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho_.trace() - cplx(1.0, 0.0));
    const DenseMat herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMat> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

void DensityMatrix::validate(const DensityTolerance& tol) const {
    const DensityCheck c = check();
    if (c.hermiticity > tol.hermiticity)
        throw Error(ErrorKind::Precondition, "density matrix not Hermitian: " + std::to_string(c.hermiticity));
    if (c.trace_error > tol.trace)
        throw Error(ErrorKind::Precondition, "density matrix trace off by " + std::to_string(c.trace_error));
    if (c.min_eigenvalue < -tol.positivity)
        throw Error(ErrorKind::TruncationTooSmall, "negative eigenvalue " + std::to_string(c.min_eigenvalue));
}

DensityMatrix DensityMatrix::partial_trace_keep(int mode) const {
    if (layout_.modes() != 2) throw Error(ErrorKind::DimensionMismatch, "partial trace implemented for two modes");
    const int d0 = layout_.dim(0), d1 = layout_.dim(1);
    const int keep_dim = mode == 0 ? d0 : d1;
    DenseMat red = DenseMat::Zero(keep_dim, keep_dim);
    for (int i = 0; i < keep_dim; ++i)
        for (int j = 0; j < keep_dim; ++j) {
            cplx s = 0.0;
            if (mode == 0)
                for (int k = 0; k < d1; ++k) s += rho_(i * d1 + k, j * d1 + k);
            else
                for (int k = 0; k < d0; ++k) s += rho_(k * d1 + i, k * d1 + j);
            red(i, j) = s;
        }
    return DensityMatrix(SpaceLayout({keep_dim}), std::move(red));
}

cplx expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
    if (rho.layout() != op.layout()) throw Error(ErrorKind::DimensionMismatch, "expectation layouts differ");
    // tr(rho O) = sum_{ij} rho_ji O_ij
    cplx s = 0.0;
    const SparseMat& m = op.matrix();
    for (int col = 0; col < m.outerSize(); ++col)
        for (SparseMat::InnerIterator it(m, col); it; ++it) s += rho.element(col, static_cast<int>(it.row())) * it.value();
    return s;
}

DensityMatrix thermal_state(int dim, double nbar) {
    DenseMat rho = DenseMat::Zero(dim, dim);
    const double q = nbar / (1.0 + nbar);
    double w = 1.0, norm = 0.0;
    for (int n = 0; n < dim; ++n, w *= q) {
        rho(n, n) = w;
        norm += w;
    }
    rho /= norm;
    return DensityMatrix(SpaceLayout({dim}), std::move(rho));
}

Vec coherent_vector(int dim, cplx alpha) {
    Vec psi(dim);
    cplx c = 1.0;
    for (int n = 0; n < dim; ++n) {
        psi(n) = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    psi.normalize();
    return psi;
}

}  // namespace dce
