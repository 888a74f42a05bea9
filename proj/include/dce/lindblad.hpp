#pragma once

// Liouvillian superoperators on column-stacked density matrices, steady
// states, time propagation and the displaced-mechanics frame.
//
// Column stacking: vec(A rho B) = (B^T kron A) vec(rho), so the element
// rho(i, j) of a d x d matrix sits at index j * d + i.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dce/hilbert.hpp"
#include "dce/model.hpp"

namespace dce {

/// One bath channel. With o = op, rate = k, occupation = N and anomalous = M
/// the contribution to d rho/dt is
///   -(k/2)(N+1) L(o) - (k/2) N L(o^dag) + (k/2) M L'(o) + (k/2) M^* L'(o^dag)
/// where L(o) rho = o^dag o rho - 2 o rho o^dag + rho o^dag o and
///       L'(o) rho = o o rho - 2 o rho o + rho o o.
struct DissipatorSpec {
    OperatorMatrix op;
    double rate = 0.0;
    double thermal_occupation = 0.0;
    cplx anomalous = 0.0;

    /// Throws Precondition on negative rate / occupation or on
    /// |M|^2 > N (N + 1) beyond rounding.
    void validate() const;
};

struct Liouvillian {
    SpaceLayout layout;
    SparseMat matrix;

    int hilbert_dim() const { return layout.total(); }
    Vec apply(const Vec& rho_vec) const { return matrix * rho_vec; }
};

Liouvillian build_liouvillian(const OperatorMatrix& H, const std::vector<DissipatorSpec>& dissipators);

/// i[rho, H] as a superoperator.
SparseMat hamiltonian_superoperator(const OperatorMatrix& H);
/// The channel contribution described at DissipatorSpec.
SparseMat dissipator_superoperator(const DissipatorSpec& spec);

Vec vectorize(const DenseMat& rho);
DenseMat unvectorize(const Vec& v, int dim);

/// max_j |sum_i L(ii, j)|: zero when every output is traceless.
double trace_annihilation_error(const Liouvillian& L);

struct SteadyStateOptions {
    double residual_tol = 1e-8;
    DensityTolerance density{};
    bool validate = true;
};

struct SteadyState {
    DensityMatrix rho;
    double residual = 0.0;  // ||L rho|| / ||rho||
    DensityCheck check{};
    bool used_fallback = false;
};

/// Solves L rho = 0 with tr rho = 1 by replacing the first row of L with the
/// trace functional and factoring with UMFPACK. Only the block of L coupled to
/// the populations is factored. Falls back to shifted inverse iteration.
/// Throws NonUniqueSteadyState when the kernel is not one-dimensional and
/// TruncationTooSmall when the result is not positive within tolerance.
SteadyState steady_state(const Liouvillian& L, const SteadyStateOptions& opts = {});

/// Generator of the form L0 + sum_k c_k(t) L_k.
struct TimeDependentLiouvillian {
    SpaceLayout layout;
    SparseMat base;
    std::vector<SparseMat> terms;
    std::function<std::vector<cplx>(double)> coefficients;
};

using ObservableList = std::vector<std::pair<std::string, OperatorMatrix>>;

struct EvolveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double initial_dt = 1e-5;
    double min_dt = 1e-13;
    long max_steps = 50'000'000;
    bool store_states = false;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::map<std::string, cplx>> records;
    std::vector<DensityMatrix> states;  // filled when store_states is set
    double max_trace_drift = 0.0;       // max |tr rho - 1| over accepted steps
    long steps = 0;

    std::vector<cplx> series(const std::string& name) const;
};

/// Adaptive Dormand-Prince integration of d rho/dt = L rho. `times` must be
/// strictly increasing and start at or after 0 (rho0 is taken at t = 0).
/// Throws Stiffness when the step size underflows.
Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& L, const std::vector<double>& times,
                  const ObservableList& observables, const EvolveOptions& opts = {});
Trajectory evolve(const DensityMatrix& rho0, const TimeDependentLiouvillian& L, const std::vector<double>& times,
                  const ObservableList& observables, const EvolveOptions& opts = {});

enum class HamiltonianKind { Eff, EffTilde, EffPlusTA };
enum class BathModel { Vacuum, Squeezed };

/// Hamiltonian and channels of the squeezed-frame master equation with the
/// mechanics displaced by beta (b = b' + beta). Operators in `modes` act on
/// the displaced basis, and modes.b already includes beta, so expectation
/// values of modes.b are original-frame values.
struct FrameModel {
    Modes modes;
    OperatorMatrix H;
    std::vector<DissipatorSpec> dissipators;
};

FrameModel displaced_frame(const DerivedParams& d, const SpaceLayout& layout, cplx beta,
                           HamiltonianKind kind = HamiltonianKind::Eff, BathModel bath = BathModel::Vacuum);

/// Population of |2_s, 0> starting from |0_s, 1> under H_eff with vacuum
/// baths. Requires F = 0. Records "fidelity", "n_s" and "n_b".
Trajectory conversion_fidelity(const SystemParams& params, const std::vector<double>& times,
                               const SpaceLayout& layout = SpaceLayout({5, 3}), const EvolveOptions& opts = {});

}  // namespace dce
