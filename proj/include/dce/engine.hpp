#pragma once

// Full quantum steady states and trajectories of the squeezed-frame master
// equation, with truncation-doubling convergence checks.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "dce/lindblad.hpp"
#include "dce/model.hpp"

namespace dce {

enum class BetaMode { Zero, Semiclassical, Given };

struct QuantumOptions {
    std::array<int, 2> dims{6, 8};  // (cavity, displaced mechanics)
    bool doubling = true;           // re-solve at 2 x dims and report the drift
    double drift_tol = 0.01;
    HamiltonianKind hamiltonian = HamiltonianKind::Eff;
    BathModel bath = BathModel::Vacuum;
    BetaMode beta_mode = BetaMode::Semiclassical;
    cplx beta = 0.0;  // used with BetaMode::Given
    SteadyStateOptions steady{};
};

/// Observables of one steady-state solve; b_mean is in the undisplaced frame.
struct QuantumPoint {
    std::array<int, 2> dims{};
    double n_s = 0.0;
    cplx as2 = 0.0;
    cplx b_mean = 0.0;
    double a2a2 = 0.0;  // <a_s^dag2 a_s^2>
    double residual = 0.0;
    DensityCheck check{};
    bool used_fallback = false;
};

struct QuantumResult {
    cplx beta = 0.0;  // displacement used for the mechanics
    QuantumPoint base;
    std::optional<QuantumPoint> refined;
    DensityMatrix rho;   // state of the reported (finest) solve
    double drift = 0.0;  // max relative change of n_s and <a_s^2> under doubling
    bool converged = true;

    const QuantumPoint& best() const { return refined ? *refined : base; }
    /// g2 of the reported state; nullopt when the cavity is empty.
    std::optional<double> g2() const;
};

/// Mechanical displacement for BetaMode::Semiclassical: <b> of the principal
/// mean-field branch.
cplx semiclassical_beta(const DerivedParams& d);

QuantumPoint solve_quantum_at(const DerivedParams& d, const SpaceLayout& layout, cplx beta, HamiltonianKind kind,
                              BathModel bath, const SteadyStateOptions& steady, DensityMatrix* rho_out = nullptr);

QuantumResult solve_quantum(const DerivedParams& d, const QuantumOptions& opts = {});

/// Time-dependent mechanical displacement beta(t) with its derivative.
struct FramePath {
    std::function<cplx(double)> beta;
    std::function<cplx(double)> beta_dot;
};

/// beta(t) from the mean-field equations started in vacuum, sampled every
/// `dt` on [0, t_end] and interpolated by cubic Hermite polynomials.
FramePath semiclassical_path(const DerivedParams& d, double t_end, double dt = 1e-3);
FramePath constant_path(cplx beta);

/// Master-equation evolution in the frame b = b' + beta(t). `rho0` is given
/// in that frame at t = 0. Records "n_s", "as2", "b" (undisplaced <b>, with
/// beta(t) added back) and "b_prime".
Trajectory evolve_moving_frame(const DerivedParams& d, const SpaceLayout& layout, const DensityMatrix& rho0,
                               const FramePath& path, const std::vector<double>& times,
                               HamiltonianKind kind = HamiltonianKind::Eff, BathModel bath = BathModel::Vacuum,
                               const EvolveOptions& opts = {});

}  // namespace dce
