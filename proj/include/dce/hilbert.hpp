#pragma once

// Truncated bosonic Fock-space operator algebra.
//
// Composite spaces are ordered with mode 0 varying slowest, so the basis
// state |n0, n1> sits at index n0 * dims[1] + n1. Mode 0 is the (squeezed)
// cavity, mode 1 the mechanics.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dce {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx>;
using DenseMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

class SpaceLayout {
public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int modes() const { return static_cast<int>(dims_.size()); }
    int dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
    int total() const { return total_; }

    /// Flat index of a product Fock state.
    int index(const std::vector<int>& occupations) const;

    SpaceLayout concat(const SpaceLayout& other) const;

    bool operator==(const SpaceLayout& other) const { return dims_ == other.dims_; }
    bool operator!=(const SpaceLayout& other) const { return !(*this == other); }

private:
    std::vector<int> dims_;
    int total_ = 0;
};

/// Square operator on a SpaceLayout. Always stored sparse; dense() converts.
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(SpaceLayout layout, SparseMat matrix);

    static OperatorMatrix identity(const SpaceLayout& layout);
    static OperatorMatrix zero(const SpaceLayout& layout);

    const SpaceLayout& layout() const { return layout_; }
    const SparseMat& matrix() const { return matrix_; }
    DenseMat dense() const { return DenseMat(matrix_); }
    int size() const { return layout_.total(); }

    OperatorMatrix adjoint() const;
    cplx coeff(int row, int col) const { return matrix_.coeff(row, col); }

    OperatorMatrix& operator+=(const OperatorMatrix& rhs);
    OperatorMatrix& operator-=(const OperatorMatrix& rhs);
    OperatorMatrix& operator*=(cplx s);

    friend OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs += rhs; }
    friend OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs -= rhs; }
    friend OperatorMatrix operator*(OperatorMatrix op, cplx s) { return op *= s; }
    friend OperatorMatrix operator*(cplx s, OperatorMatrix op) { return op *= s; }
    friend OperatorMatrix operator*(double s, OperatorMatrix op) { return op *= cplx(s, 0.0); }
    friend OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

private:
    SpaceLayout layout_;
    SparseMat matrix_;
};

/// Entrywise max |A - B|.
double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b);
/// Entrywise max |A - A^dagger|.
double hermiticity_error(const OperatorMatrix& op);

OperatorMatrix annihilation(int dim);
OperatorMatrix number_operator(int dim);
OperatorMatrix identity(int dim);
OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b);

/// Lift a single-mode operator into `layout` acting on `mode`.
OperatorMatrix embed(const OperatorMatrix& single, const SpaceLayout& layout, int mode);

/// exp((r/2)(a^2 - a^dagger^2)) on a single truncated mode. Verification only.
OperatorMatrix squeeze_unitary(int dim, double r);

struct DensityCheck {
    double hermiticity = 0.0;  // max |rho - rho^dagger|
    double trace_error = 0.0;  // |tr rho - 1|
    double min_eigenvalue = 0.0;
};

struct DensityTolerance {
    double hermiticity = 1e-10;
    double trace = 1e-8;
    double positivity = 1e-8;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    /// Wraps `rho` without validation; call check() / validate() as needed.
    DensityMatrix(SpaceLayout layout, DenseMat rho);

    static DensityMatrix pure(const SpaceLayout& layout, const Vec& psi);
    static DensityMatrix fock(const SpaceLayout& layout, const std::vector<int>& occupations);

    const SpaceLayout& layout() const { return layout_; }
    const DenseMat& matrix() const { return rho_; }
    cplx element(int row, int col) const { return rho_(row, col); }

    DensityCheck check() const;
    /// Throws TruncationTooSmall / Precondition when a tolerance is violated.
    void validate(const DensityTolerance& tol = {}) const;

    /// Reduced state on one mode of a two-mode layout.
    DensityMatrix partial_trace_keep(int mode) const;

private:
    SpaceLayout layout_;
    DenseMat rho_;
};

cplx expectation(const DensityMatrix& rho, const OperatorMatrix& op);

/// Thermal state sum_n (1-q) q^n |n><n|, q = nbar/(1+nbar), renormalised on the truncation.
DensityMatrix thermal_state(int dim, double nbar);
/// Coherent state |alpha>, renormalised on the truncation.
Vec coherent_vector(int dim, cplx alpha);

}  // namespace dce
