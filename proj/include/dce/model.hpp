#pragma once

// Physical parameters, derived squeezed-frame quantities and the Hamiltonian
// variants. All rates are in units of the mechanical loss rate gamma_m.

#include <numbers>

#include "dce/hilbert.hpp"

namespace dce {

/// The two-photon drive is specified either by its amplitude Omega or by the
/// target squeezing sinh^2(r); derive() stores Omega canonically.
struct SqueezeInput {
    enum class Kind { Omega, Sinh2R };
    Kind kind = Kind::Omega;
    double value = 0.0;

    static SqueezeInput omega(double v) { return {Kind::Omega, v}; }
    static SqueezeInput sinh2_r(double v) { return {Kind::Sinh2R, v}; }
};

struct SystemParams {
    double gamma_m = 1.0;
    double kappa = 500.0;
    double g0 = 10.0;
    double F = 15.0;
    double omega_m = 1e4;
    double omega_d = 1e4;
    double Delta = 1e4;  // omega_c - omega_L / 2
    SqueezeInput squeeze = SqueezeInput::sinh2_r(0.5);
    double n_th = 0.0;
    double r_e = 0.0;  // bath squeezing; r_e = r, theta_e = pi gives a vacuum-equivalent bath
    double theta_e = std::numbers::pi;
    bool bath_matched = true;  // set r_e = r at derive() time
};

struct BathCoefficients {
    double N = 0.0;  // thermal noise
    cplx M = 0.0;    // two-photon correlation
};

struct DerivedParams {
    // copied inputs
    double gamma_m = 1.0, kappa = 0.0, g0 = 0.0, F = 0.0;
    double omega_m = 0.0, omega_d = 0.0, Delta = 0.0, Omega = 0.0;
    double n_th = 0.0, r_e = 0.0, theta_e = 0.0;
    // derived
    double r = 0.0;
    double omega_s = 0.0;
    double g_OM = 0.0;
    double g_DCE = 0.0;
    double Delta_s = 0.0;  // omega_s - omega_d / 2
    double Delta_m = 0.0;  // omega_m - omega_d
    double gamma_0 = 0.0;  // sqrt(kappa gamma_m / 2)
    double gamma_1 = 0.0;  // kappa + gamma_m / 2
    BathCoefficients bath;
    double F_th = 0.0;
};

DerivedParams derive(const SystemParams& params);

/// Omega from Delta and sinh^2(r): Omega = Delta tanh(2r).
double omega_from_sinh2_r(double Delta, double sinh2_r);
double squeezing_parameter(double Delta, double Omega);

BathCoefficients bath_noise_NM(double r, double r_e, double theta_e);

/// Cavity and mechanical annihilation operators on a two-mode layout. The
/// mechanical operator can be displaced, b -> b' + beta, which turns every
/// builder below into its exactly transformed counterpart.
struct Modes {
    OperatorMatrix a;
    OperatorMatrix b;
    cplx beta = 0.0;

    const SpaceLayout& layout() const { return a.layout(); }
};

Modes mode_operators(const SpaceLayout& layout, cplx beta = 0.0);

/// Delta_s a^dag a + Delta_m b^dag b + g_DCE (a^2 b^dag + h.c.) + (F/2)(b + b^dag)
OperatorMatrix build_H_eff(const DerivedParams& d, const Modes& modes);
OperatorMatrix build_H_eff(const DerivedParams& d, const SpaceLayout& layout);

/// Weak-squeezing model in the bare cavity mode. In the frame co-rotating
/// with the mechanical drive the b^dag b coefficient is the mechanical
/// detuning, so this shares the operator structure of build_H_eff.
OperatorMatrix build_H_eff_tilde(const DerivedParams& d, const Modes& modes);
OperatorMatrix build_H_eff_tilde(const DerivedParams& d, const SpaceLayout& layout);

/// Squeezed-frame Hamiltonian before the rotating-wave approximation.
OperatorMatrix build_H_full_squeezed(const DerivedParams& d, const Modes& modes, double t);
OperatorMatrix build_H_full_squeezed(const DerivedParams& d, const SpaceLayout& layout, double t);

/// Time-averaged correction of the counter-rotating terms, valid at
/// Delta_s = Delta_m = 0 only. Includes the constant term of the formula.
OperatorMatrix build_H_TA(const DerivedParams& d, const Modes& modes);
OperatorMatrix build_H_TA(const DerivedParams& d, const SpaceLayout& layout);

bool at_full_resonance(const DerivedParams& d);

}  // namespace dce
