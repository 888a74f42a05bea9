#pragma once

// Mean-field treatment: factorised moment equations for <a_s^dag a_s>,
// <a_s^2> and <b>, their cubic steady-state condition in x = 2 n_s + 1,
// root classification and linear stability.

#include <array>
#include <complex>
#include <vector>

#include "dce/model.hpp"

namespace dce {

struct SemiclassicalState {
    double n_s = 0.0;
    cplx as2 = 0.0;
    cplx beta = 0.0;
};

/// Time derivative of the factorised moments (returned in the same layout).
SemiclassicalState rhs(const SemiclassicalState& s, const DerivedParams& d);
/// Derivative with explicit detunings, used by the regime-specific routines.
SemiclassicalState rhs(const SemiclassicalState& s, const DerivedParams& d, double Delta_s, double Delta_m);
double rhs_norm(const SemiclassicalState& s, const DerivedParams& d, double Delta_s, double Delta_m);

/// ResonantDrive: Delta_m = 0. ResonantCoupling: Delta_m = 2 Delta_s.
/// General: the detunings stored in DerivedParams.
enum class Regime { ResonantDrive, ResonantCoupling, General };
const char* to_string(Regime r);

/// Detuning pair (Delta_s, Delta_m) a regime assigns to `d`.
std::array<double, 2> regime_detunings(const DerivedParams& d, Regime regime);

/// c[0] x^3 + c[1] x^2 + c[2] x + c[3].
struct Cubic {
    std::array<double, 4> c{};

    double operator()(double x) const { return ((c[0] * x + c[1]) * x + c[2]) * x + c[3]; }
    double derivative(double x) const { return (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]; }
    /// max(1, max_i |c_i|), the scale of the residual bound.
    double scale() const;
    /// 18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2; > 0 means three distinct real roots.
    double discriminant() const;
};

/// Steady-state cubic for omega_m = omega_d at detuning Delta_s.
Cubic cubic_resonant_drive(const DerivedParams& d, double Delta_s);
/// Steady-state cubic for omega_m = 2 omega_s with Delta = Delta_m = 2 Delta_s.
Cubic cubic_resonant_coupling(const DerivedParams& d, double Delta);
/// Cubic for arbitrary (Delta_s, Delta_m); both regime formulas are special cases.
Cubic cubic_general(const DerivedParams& d, double Delta_s, double Delta_m);

struct CubicRoot {
    double x = 0.0;
    double residual = 0.0;  // |p(x)| / scale()
};

/// All real roots in ascending order (Newton-polished). Throws DegenerateCubic
/// when the leading coefficient vanishes relative to the others.
std::vector<CubicRoot> real_roots(const Cubic& p);
/// Real roots with x >= 1.
std::vector<CubicRoot> solve_cubic(const Cubic& p);
/// Roots x >= 1 of the polynomial with its leading coefficient dropped
/// (quadratic or linear), for the g_DCE = 0 limit.
std::vector<CubicRoot> solve_reduced(const Cubic& p);

/// as2 and beta from a root x at the regime's detunings; n_s = (x - 1) / 2.
SemiclassicalState back_substitute(double x, const DerivedParams& d, Regime regime);

struct StabilityReport {
    std::array<cplx, 6> eigenvalues{};  // eigenvalues of the matrix M (convention: e^{-i w t})
    bool stable = false;                // all Im < -1e-12
    std::array<cplx, 6> jacobian_eigenvalues{};  // real-form Jacobian, n treated as complex
    bool jacobian_stable = false;                // all Re < -1e-12
};

/// Throws Precondition if `s` is not a fixed point (scaled rhs norm > 1e-6).
StabilityReport stability(const SemiclassicalState& s, const DerivedParams& d, Regime regime);

struct Branch {
    double x = 1.0;
    double residual = 0.0;
    SemiclassicalState state;
    bool stable = false;
};

struct BranchSet {
    Regime regime = Regime::General;
    std::vector<Branch> roots;  // ascending in x
};

BranchSet branches(const DerivedParams& d, Regime regime);

/// Root continuously connected to x = 1 at F = 0 (homotopy in F); when that
/// branch ends at a fold, the lowest stable root.
Branch principal_branch(const DerivedParams& d, Regime regime = Regime::General, int homotopy_steps = 200);

enum class Limit { WeakDrive, StrongDrive };

struct LimitValues {
    SemiclassicalState state;
    double phi_dce = 0.0;
};

/// Asymptotic closed forms at full resonance. Throws UnsupportedRegime off resonance.
LimitValues limits(const DerivedParams& d, Limit which);

/// |as2|^2 / n_s^2. Throws UndefinedCorrelation when n_s = 0.
double g2_semiclassical(const SemiclassicalState& s);

/// F_th = g_DCE + kappa gamma_m / (4 g_DCE). Throws UndefinedThreshold at g_DCE = 0.
double threshold_F(const DerivedParams& d);

/// Samples of the moment equations integrated from `s0` at t = 0.
std::vector<SemiclassicalState> integrate_moments(const SemiclassicalState& s0, const DerivedParams& d,
                                                  const std::vector<double>& times, Regime regime = Regime::General);

}  // namespace dce
