#include "dce/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "dce/errors.hpp"

namespace dce {

namespace {

const cplx I(0.0, 1.0);

cplx denominator(double x, const DerivedParams& d, double Ds, double Dm) {
    const double g = d.g_DCE;
    return 2.0 * g * g * x + d.gamma_0 * d.gamma_0 - 2.0 * Dm * Ds + I * (d.gamma_m * Ds + d.kappa * Dm);
}

double polish(const Cubic& p, double x) {
    double best = x, best_r = std::abs(p(x));
    for (int k = 0; k < 3; ++k) {
        const double dp = p.derivative(best);
        if (dp == 0.0) break;
        const double next = best - p(best) / dp;
        const double r = std::abs(p(next));
        if (!(r < best_r)) break;
        best = next;
        best_r = r;
    }
    return best;
}

std::vector<CubicRoot> finish(const Cubic& p, std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<CubicRoot> out;
    for (double x : xs) out.push_back({x, std::abs(p(x)) / p.scale()});
    return out;
}

std::vector<CubicRoot> physical(std::vector<CubicRoot> roots) {
    std::vector<CubicRoot> out;
    for (auto r : roots) {
        if (r.x >= 1.0 - 1e-9) {
            r.x = std::max(r.x, 1.0);
            out.push_back(r);
        }
    }
    return out;
}

DerivedParams with_drive(DerivedParams d, double F) {
    d.F = F;
    return d;
}

Cubic regime_cubic(const DerivedParams& d, Regime regime) {
    switch (regime) {
        case Regime::ResonantDrive: return cubic_resonant_drive(d, d.Delta_s);
        case Regime::ResonantCoupling: return cubic_resonant_coupling(d, 2.0 * d.Delta_s);
        case Regime::General: break;
    }
    return cubic_general(d, d.Delta_s, d.Delta_m);
}

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::ResonantDrive: return "resonant_drive";
        case Regime::ResonantCoupling: return "resonant_coupling";
        case Regime::General: return "general";
    }
    return "general";
}

std::array<double, 2> regime_detunings(const DerivedParams& d, Regime regime) {
    switch (regime) {
        case Regime::ResonantDrive: return {d.Delta_s, 0.0};
        case Regime::ResonantCoupling: return {d.Delta_s, 2.0 * d.Delta_s};
        case Regime::General: break;
    }
    return {d.Delta_s, d.Delta_m};
}

SemiclassicalState rhs(const SemiclassicalState& s, const DerivedParams& d, double Ds, double Dm) {
    const double g = d.g_DCE;
    SemiclassicalState r;
    r.n_s = -4.0 * g * std::imag(s.as2 * std::conj(s.beta)) - d.kappa * s.n_s;
    r.as2 = -I * 2.0 * Ds * s.as2 - I * 2.0 * g * (2.0 * s.n_s + 1.0) * s.beta - d.kappa * s.as2;
    r.beta = -I * (Dm * s.beta + g * s.as2 + d.F / 2.0) - (d.gamma_m / 2.0) * s.beta;
    return r;
}

SemiclassicalState rhs(const SemiclassicalState& s, const DerivedParams& d) {
    return rhs(s, d, d.Delta_s, d.Delta_m);
}

double rhs_norm(const SemiclassicalState& s, const DerivedParams& d, double Ds, double Dm) {
    const SemiclassicalState r = rhs(s, d, Ds, Dm);
    return std::sqrt(r.n_s * r.n_s + std::norm(r.as2) + std::norm(r.beta));
}

double Cubic::scale() const {
    double m = 1.0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

double Cubic::discriminant() const {
    const double a = c[0], b = c[1], cc = c[2], dd = c[3];
    return 18.0 * a * b * cc * dd - 4.0 * b * b * b * dd + b * b * cc * cc - 4.0 * a * cc * cc * cc - 27.0 * a * a * dd * dd;
}

Cubic cubic_resonant_drive(const DerivedParams& d, double Ds) {
    const double g2 = d.g_DCE * d.g_DCE;
    const double y2 = d.gamma_0 * d.gamma_0;
    const double q = 0.25 * (Ds * Ds * d.gamma_m * d.gamma_m + y2 * y2);
    return {{g2 * g2, -g2 * (g2 - y2), q - g2 * (d.F * d.F + y2), -q}};
}

Cubic cubic_resonant_coupling(const DerivedParams& d, double Delta) {
    const double g2 = d.g_DCE * d.g_DCE;
    const double y2 = d.gamma_0 * d.gamma_0;
    const double D2 = Delta * Delta;
    const double q = 0.25 * ((D2 - y2) * (D2 - y2) + D2 * d.gamma_1 * d.gamma_1);
    return {{g2 * g2, -g2 * (g2 + D2 - y2), q + g2 * (D2 - y2 - d.F * d.F), -q}};
}

Cubic cubic_general(const DerivedParams& d, double Ds, double Dm) {
    const double g2 = d.g_DCE * d.g_DCE;
    const double c0 = d.gamma_0 * d.gamma_0 - 2.0 * Dm * Ds;
    const double e = d.gamma_m * Ds + d.kappa * Dm;
    const double q = 0.25 * (c0 * c0 + e * e);
    return {{g2 * g2, -g2 * (g2 - c0), q - g2 * (c0 + d.F * d.F), -q}};
}

std::vector<CubicRoot> real_roots(const Cubic& p) {
    const double lead = p.c[0];
    const double rest = std::max({std::abs(p.c[1]), std::abs(p.c[2]), std::abs(p.c[3])});
    if (!(std::abs(lead) > 1e-14 * rest)) throw Error(ErrorKind::DegenerateCubic, "leading coefficient vanishes");

    const double a = p.c[1] / lead, b = p.c[2] / lead, c = p.c[3] / lead;
    // x = t - a/3 gives t^3 + P t + Q = 0
    const double P = b - a * a / 3.0;
    const double Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double D = Q * Q / 4.0 + P * P * P / 27.0;

    std::vector<double> xs;
    if (D < 0.0) {
        const double m = 2.0 * std::sqrt(-P / 3.0);
        const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) xs.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift);
    } else {
        const double s = std::sqrt(D);
        const double A = -std::copysign(std::cbrt(std::abs(Q) / 2.0 + s), Q);
        const double B = A != 0.0 ? -P / (3.0 * A) : 0.0;
        xs.push_back(A + B + shift);
        if (A != 0.0 && D <= 1e-14 * std::max(Q * Q / 4.0, 1e-300)) xs.push_back(-(A + B) / 2.0 + shift);
    }
    for (double& x : xs) x = polish(p, x);
    return finish(p, std::move(xs));
}

std::vector<CubicRoot> solve_cubic(const Cubic& p) { return physical(real_roots(p)); }

std::vector<CubicRoot> solve_reduced(const Cubic& p) {
    const double a = p.c[1], b = p.c[2], c = p.c[3];
    std::vector<double> xs;
    if (std::abs(a) > 1e-14 * std::max(std::abs(b), std::abs(c))) {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            if (q != 0.0) {
                xs.push_back(q / a);
                xs.push_back(c / q);
            }
        }
    } else if (b != 0.0) {
        xs.push_back(-c / b);
    } else {
        throw Error(ErrorKind::DegenerateCubic, "polynomial is constant");
    }
    return physical(finish(p, std::move(xs)));
}

SemiclassicalState back_substitute(double x, const DerivedParams& d, Regime regime) {
    if (x < 1.0) throw Error(ErrorKind::Precondition, "x = 2 n_s + 1 must be >= 1");
    const auto [Ds, Dm] = regime_detunings(d, regime);
    const cplx D = denominator(x, d, Ds, Dm);
    SemiclassicalState s;
    s.n_s = (x - 1.0) / 2.0;
    s.as2 = -d.g_DCE * d.F * x / D;
    s.beta = -(-2.0 * Ds + I * d.kappa) * d.F / (2.0 * D);
    return s;
}

StabilityReport stability(const SemiclassicalState& s, const DerivedParams& d, Regime regime) {
    const auto [Ds, Dm] = regime_detunings(d, regime);
    const double g = d.g_DCE;
    const double rate_scale = std::max({1.0, d.kappa, d.gamma_m, std::abs(Ds), std::abs(Dm), g});
    const double amp_scale = std::max({1.0, s.n_s, std::abs(s.as2), std::abs(s.beta)});
    if (rhs_norm(s, d, Ds, Dm) > 1e-6 * (rate_scale * amp_scale + d.F))
        throw Error(ErrorKind::Precondition, "stability analysis needs a fixed point");

    const cplx A = -I * 2.0 * g * s.beta;
    const cplx B = I * 2.0 * g * s.as2;
    const cplx C = -I * 2.0 * g * (2.0 * s.n_s + 1.0);
    const double k = d.kappa, gm = d.gamma_m;
    Eigen::Matrix<cplx, 6, 6> M;
    M << -k, 0, std::conj(A), A, std::conj(B), B,
        0, -k, std::conj(A), A, std::conj(B), B,
        2.0 * A, 0, -I * 2.0 * Ds - k, 0, C, 0,
        0, 2.0 * std::conj(A), 0, I * 2.0 * Ds - k, 0, std::conj(C),
        0, 0, -I * g, 0, -I * Dm - gm / 2.0, 0,
        0, 0, 0, I * g, 0, I * Dm - gm / 2.0;
    M *= I;

    StabilityReport rep;
    Eigen::ComplexEigenSolver<Eigen::Matrix<cplx, 6, 6>> es(M, false);
    rep.stable = true;
    for (int i = 0; i < 6; ++i) {
        rep.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        if (!(es.eigenvalues()(i).imag() < -1e-12)) rep.stable = false;
    }

    // Real form with n allowed complex: z = (Re n, Im n, Re a2, Im a2, Re b, Im b).
    // The flow is quadratic, so a unit central difference is exact.
    auto flow = [&](const Eigen::Matrix<double, 6, 1>& z) {
        const cplx n(z(0), z(1)), a2(z(2), z(3)), b(z(4), z(5));
        const cplx dn = 2.0 * I * g * (a2 * std::conj(b) - std::conj(a2) * b) - k * n;
        const cplx da = -I * 2.0 * Ds * a2 - I * 2.0 * g * (2.0 * n + 1.0) * b - k * a2;
        const cplx db = -I * (Dm * b + g * a2 + d.F / 2.0) - (gm / 2.0) * b;
        Eigen::Matrix<double, 6, 1> out;
        out << dn.real(), dn.imag(), da.real(), da.imag(), db.real(), db.imag();
        return out;
    };
    Eigen::Matrix<double, 6, 1> z0;
    z0 << s.n_s, 0.0, s.as2.real(), s.as2.imag(), s.beta.real(), s.beta.imag();
    Eigen::Matrix<double, 6, 6> J;
    for (int j = 0; j < 6; ++j) {
        Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
        e(j) = 1.0;
        J.col(j) = 0.5 * (flow(z0 + e) - flow(z0 - e));
    }
    Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> rs(J, false);
    rep.jacobian_stable = true;
    for (int i = 0; i < 6; ++i) {
        rep.jacobian_eigenvalues[static_cast<std::size_t>(i)] = rs.eigenvalues()(i);
        if (!(rs.eigenvalues()(i).real() < -1e-12)) rep.jacobian_stable = false;
    }
    return rep;
}

BranchSet branches(const DerivedParams& d, Regime regime) {
    BranchSet set;
    set.regime = regime;
    const Cubic p = regime_cubic(d, regime);
    std::vector<CubicRoot> roots;
    try {
        roots = solve_cubic(p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateCubic) throw;
        roots = solve_reduced(p);
    }
    for (const auto& r : roots) {
        Branch b;
        b.x = r.x;
        b.residual = r.residual;
        b.state = back_substitute(r.x, d, regime);
        b.stable = stability(b.state, d, regime).stable;
        set.roots.push_back(b);
    }
    return set;
}

Branch principal_branch(const DerivedParams& d, Regime regime, int steps) {
    if (steps < 1) throw Error(ErrorKind::Precondition, "homotopy needs at least one step");
    double x = 1.0;
    bool lost = false;
    BranchSet last;
    for (int k = 1; k <= steps; ++k) {
        last = branches(with_drive(d, d.F * k / steps), regime);
        if (last.roots.empty()) throw Error(ErrorKind::Precondition, "no physical root");
        const auto nearest = std::min_element(last.roots.begin(), last.roots.end(), [x](const Branch& a, const Branch& b) {
            return std::abs(a.x - x) < std::abs(b.x - x);
        });
        if (std::abs(nearest->x - x) > 0.2 * x + 0.05) lost = true;
        x = nearest->x;
    }
    if (!lost) {
        for (const auto& b : last.roots)
            if (b.x == x && b.stable) return b;
    }
    for (const auto& b : last.roots)
        if (b.stable) return b;
    return last.roots.front();
}

LimitValues limits(const DerivedParams& d, Limit which) {
    if (!at_full_resonance(d)) throw Error(ErrorKind::UnsupportedRegime, "limits are derived at full resonance");
    const double g = d.g_DCE, F = d.F;
    LimitValues out;
    if (which == Limit::WeakDrive) {
        const double den = 2.0 * g * g + d.gamma_0 * d.gamma_0;
        out.state.n_s = 2.0 * g * g * F * F / (den * den);
        out.state.as2 = -g * F / den;
        out.state.beta = -I * d.kappa * F / (2.0 * den);
        out.phi_dce = out.state.n_s * std::cosh(2.0 * d.r) - out.state.as2.real() * std::sinh(2.0 * d.r);
    } else {
        if (g == 0.0) throw Error(ErrorKind::UnsupportedRegime, "strong-drive limit needs g_DCE > 0");
        out.state.n_s = F / (2.0 * g);
        out.state.as2 = -F / (2.0 * g);
        out.state.beta = -I * d.kappa / (4.0 * g);
        out.phi_dce = F / (2.0 * g) * std::exp(2.0 * d.r);
    }
    return out;
}

double g2_semiclassical(const SemiclassicalState& s) {
    if (!(s.n_s > 0.0)) throw Error(ErrorKind::UndefinedCorrelation, "g2 needs a nonzero photon number");
    return std::norm(s.as2) / (s.n_s * s.n_s);
}

double threshold_F(const DerivedParams& d) {
    if (!(d.g_DCE > 0.0)) throw Error(ErrorKind::UndefinedThreshold, "F_th needs g_DCE > 0");
    return d.g_DCE + d.kappa * d.gamma_m / (4.0 * d.g_DCE);
}

std::vector<SemiclassicalState> integrate_moments(const SemiclassicalState& s0, const DerivedParams& d,
                                                  const std::vector<double>& times, Regime regime) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 5>;
    const auto [Ds, Dm] = regime_detunings(d, regime);
    auto unpack = [](const State& z) { return SemiclassicalState{z[0], cplx(z[1], z[2]), cplx(z[3], z[4])}; };
    auto system = [&](const State& z, State& dz, double) {
        const SemiclassicalState r = rhs(unpack(z), d, Ds, Dm);
        dz = {r.n_s, r.as2.real(), r.as2.imag(), r.beta.real(), r.beta.imag()};
    };
    std::vector<SemiclassicalState> out;
    if (times.empty()) return out;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] < 0.0 || (k > 0 && !(times[k] > times[k - 1])))
            throw Error(ErrorKind::Precondition, "times must be >= 0 and strictly increasing");

    State z{s0.n_s, s0.as2.real(), s0.as2.imag(), s0.beta.real(), s0.beta.imag()};
    std::vector<double> grid;
    if (times.front() > 0.0) grid.push_back(0.0);
    grid.insert(grid.end(), times.begin(), times.end());
    const bool skip_first = times.front() > 0.0;
    std::size_t seen = 0;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-12, 1e-10);
    odeint::integrate_times(stepper, system, z, grid.begin(), grid.end(), 1e-4, [&](const State& s, double) {
        if (!(skip_first && seen == 0)) out.push_back(unpack(s));
        ++seen;
    });
    return out;
}

}  // namespace dce
