#include "dce/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

#include "dce/errors.hpp"

namespace dce {

namespace {

void require_two_modes(const Modes& m) {
    if (m.layout().modes() != 2) throw Error(ErrorKind::DimensionMismatch, "Hamiltonians need a (cavity, mechanics) layout");
}

}  // namespace

double squeezing_parameter(double Delta, double Omega) {
    return 0.25 * std::log((Delta + Omega) / (Delta - Omega));
}

double omega_from_sinh2_r(double Delta, double sinh2_r) {
    if (!(sinh2_r >= 0.0) || !std::isfinite(sinh2_r))
        throw Error(ErrorKind::InvalidSqueeze, "sinh^2(r) must be finite and >= 0");
    if (sinh2_r > 0.0 && !(Delta > 0.0))
        throw Error(ErrorKind::InvalidSqueeze, "Omega = Delta tanh(2r) needs Delta > 0");
    const double r = std::asinh(std::sqrt(sinh2_r));
    return Delta * std::tanh(2.0 * r);
}

BathCoefficients bath_noise_NM(double r, double r_e, double theta_e) {
    // N = |u|^2 and M = u v expand to the standard squeezed-bath expressions
    // while keeping the r_e = r, theta_e = pi cancellation exact.
    const double sr = std::sinh(r), cr = std::cosh(r);
    const double se = std::sinh(r_e), ce = std::cosh(r_e);
    const cplx u = sr * ce + std::polar(1.0, -theta_e) * (cr * se);
    const cplx v = cr * ce + std::polar(1.0, theta_e) * (sr * se);
    return {std::norm(u), u * v};
}

DerivedParams derive(const SystemParams& p) {
    if (p.gamma_m < 0 || p.kappa < 0 || p.g0 < 0 || p.F < 0 || p.n_th < 0)
        throw Error(ErrorKind::Precondition, "rates, drive and n_th must be >= 0");

    DerivedParams d;
    d.gamma_m = p.gamma_m;
    d.kappa = p.kappa;
    d.g0 = p.g0;
    d.F = p.F;
    d.omega_m = p.omega_m;
    d.omega_d = p.omega_d;
    d.Delta = p.Delta;
    d.n_th = p.n_th;
    d.theta_e = p.theta_e;

    if (p.squeeze.kind == SqueezeInput::Kind::Sinh2R) {
        d.Omega = omega_from_sinh2_r(p.Delta, p.squeeze.value);
    } else {
        if (p.squeeze.value < 0.0) throw Error(ErrorKind::InvalidSqueeze, "Omega must be >= 0");
        d.Omega = p.squeeze.value;
    }
    if (!(p.Delta > d.Omega))
        throw Error(ErrorKind::Instability, "the squeezing frame needs Delta > Omega (Delta=" + std::to_string(p.Delta) +
                                                ", Omega=" + std::to_string(d.Omega) + ")");

    d.r = squeezing_parameter(d.Delta, d.Omega);
    d.omega_s = std::sqrt((d.Delta - d.Omega) * (d.Delta + d.Omega));
    d.g_OM = d.g0 * std::cosh(2.0 * d.r);
    d.g_DCE = d.g0 * std::sinh(2.0 * d.r) / 2.0;
    d.Delta_s = d.omega_s - d.omega_d / 2.0;
    d.Delta_m = d.omega_m - d.omega_d;
    d.gamma_0 = std::sqrt(d.kappa * d.gamma_m / 2.0);
    d.gamma_1 = d.kappa + d.gamma_m / 2.0;
    d.r_e = p.bath_matched ? d.r : p.r_e;
    d.bath = bath_noise_NM(d.r, d.r_e, d.theta_e);
    d.F_th = d.g_DCE > 0.0 ? d.g_DCE + d.kappa * d.gamma_m / (4.0 * d.g_DCE) : std::numeric_limits<double>::infinity();
    return d;
}

bool at_full_resonance(const DerivedParams& d) {
    const double tol = 1e-9 * std::max({1.0, std::abs(d.omega_m), std::abs(d.omega_s)});
    return std::abs(d.Delta_s) <= tol && std::abs(d.Delta_m) <= tol;
}

Modes mode_operators(const SpaceLayout& layout, cplx beta) {
    if (layout.modes() != 2) throw Error(ErrorKind::DimensionMismatch, "mode_operators needs two modes");
    Modes m;
    m.a = embed(annihilation(layout.dim(0)), layout, 0);
    m.b = embed(annihilation(layout.dim(1)), layout, 1);
    if (beta != cplx(0.0)) m.b += beta * OperatorMatrix::identity(layout);
    m.beta = beta;
    return m;
}

OperatorMatrix build_H_eff(const DerivedParams& d, const Modes& m) {
    require_two_modes(m);
    const OperatorMatrix ad = m.a.adjoint(), bd = m.b.adjoint();
    const OperatorMatrix a2 = m.a * m.a;
    OperatorMatrix pair = a2 * bd;
    OperatorMatrix H = d.Delta_s * (ad * m.a) + d.Delta_m * (bd * m.b);
    H += d.g_DCE * (pair + pair.adjoint());
    H += (d.F / 2.0) * (m.b + bd);
    return H;
}

OperatorMatrix build_H_eff(const DerivedParams& d, const SpaceLayout& layout) {
    return build_H_eff(d, mode_operators(layout));
}

OperatorMatrix build_H_eff_tilde(const DerivedParams& d, const Modes& m) {
    // Same operator content as build_H_eff with a_s replaced by the bare mode a.
    return build_H_eff(d, m);
}

OperatorMatrix build_H_eff_tilde(const DerivedParams& d, const SpaceLayout& layout) {
    return build_H_eff_tilde(d, mode_operators(layout));
}

OperatorMatrix build_H_full_squeezed(const DerivedParams& d, const Modes& m, double t) {
    require_two_modes(m);
    const OperatorMatrix ad = m.a.adjoint(), bd = m.b.adjoint();
    const OperatorMatrix n = ad * m.a;
    const OperatorMatrix x = m.b + bd;
    OperatorMatrix H = d.omega_s * n + d.omega_m * (bd * m.b);
    H -= d.g_OM * (n * x);
    H += d.g_DCE * ((m.a * m.a + ad * ad) * x);
    const cplx phase = std::polar(1.0, d.omega_d * t);
    H += (d.F / 2.0) * (phase * m.b + std::conj(phase) * bd);
    return H;
}

OperatorMatrix build_H_full_squeezed(const DerivedParams& d, const SpaceLayout& layout, double t) {
    return build_H_full_squeezed(d, mode_operators(layout), t);
}

OperatorMatrix build_H_TA(const DerivedParams& d, const Modes& m) {
    require_two_modes(m);
    if (!at_full_resonance(d))
        throw Error(ErrorKind::UnsupportedRegime, "the time-averaged correction is only defined at Delta_s = Delta_m = 0");
    const OperatorMatrix ad = m.a.adjoint(), bd = m.b.adjoint();
    const OperatorMatrix id = OperatorMatrix::identity(m.layout());
    const OperatorMatrix n = ad * m.a;
    const OperatorMatrix two_n_plus_1 = 2.0 * n + id;
    OperatorMatrix bracket = (ad * ad) * (m.a * m.a);
    bracket += 2.0 * (two_n_plus_1 * (bd * m.b));
    bracket += 2.0 * two_n_plus_1;  // constant-in-b term, shifts energies only
    OperatorMatrix H = (-d.g_OM * d.g_OM / d.omega_m) * (n * n);
    H -= (d.g_DCE * d.g_DCE / (2.0 * d.omega_m)) * bracket;
    return H;
}

OperatorMatrix build_H_TA(const DerivedParams& d, const SpaceLayout& layout) {
    return build_H_TA(d, mode_operators(layout));
}

}  // namespace dce
