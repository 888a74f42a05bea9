#pragma once

// Closed-form weak-drive moments at full resonance, obtained from the
// lowest-order moment hierarchy with higher correlations dropped.

#include "dce/model.hpp"
#include "dce/observables.hpp"

namespace dce {

struct WeakDriveSolution {
    double n_s = 0.0;
    cplx as2 = 0.0;
    cplx b_mean = 0.0;
    FluxBreakdown flux;
    double g2 = 0.0;  // 1 / (2 n_s); +inf when n_s = 0
};

/// Requires Delta_s = Delta_m = 0 (UnsupportedRegime otherwise). The
/// denominators use 2 g_DCE^2 + gamma_0^2.
WeakDriveSolution solve_weak(const DerivedParams& d, double n_th);

/// Largest absolute residual of the truncated steady-state relations
///   0 = -4 g Im Y - kappa n
///   0 = -2 i g beta - kappa alpha
///   0 = -i (g alpha + F/2) - (gamma_m / 2) beta
///   0 = 2 g Im Y - F Im beta - gamma_m N_b + gamma_m n_th
///   0 = -2 i g N_b - kappa Y
/// with Y = <a_s^2 b^dag> and N_b = <b^dag b> eliminated through the first
/// and last relation. These are the relations the closed form solves exactly.
double closed_set_residual(const WeakDriveSolution& sol, const DerivedParams& d, double n_th);

/// The full six-relation truncated set, keeping <a_s^dag a_s b> in the
/// <a_s^2> relation, (F/2)<a_s^2> in the <a_s^2 b^dag> relation and the
/// kappa + gamma_m/2 decay of the mixed moments. Solved as a linear system.
struct ClosedSetMoments {
    double n_s = 0.0;
    cplx as2 = 0.0;
    cplx b_mean = 0.0;
    double n_b = 0.0;
    cplx a2_bdag = 0.0;  // <a_s^2 b^dag>
    cplx n_b_mixed = 0.0;  // <a_s^dag a_s b>
};

ClosedSetMoments solve_closed_set(const DerivedParams& d, double n_th);

}  // namespace dce
