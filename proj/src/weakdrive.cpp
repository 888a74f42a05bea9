#include "dce/weakdrive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "dce/errors.hpp"

namespace dce {

namespace {

const cplx I(0.0, 1.0);

}  // namespace

WeakDriveSolution solve_weak(const DerivedParams& d, double n_th) {
    if (!at_full_resonance(d))
        throw Error(ErrorKind::UnsupportedRegime, "weak-drive closed form needs Delta_s = Delta_m = 0");
    if (n_th < 0.0) throw Error(ErrorKind::Precondition, "n_th must be >= 0");
    const double g = d.g_DCE, F = d.F, k = d.kappa, gm = d.gamma_m;
    const double den = 2.0 * g * g + d.gamma_0 * d.gamma_0;

    WeakDriveSolution s;
    s.n_s = 4.0 * gm * g * g / (k * den) * (k * F * F / (2.0 * gm * den) + n_th);
    s.as2 = -g * F / den;
    s.b_mean = -I * k * F / (2.0 * den);
    s.flux = lab_frame_breakdown(s.n_s, s.as2, d.r, k);
    s.g2 = s.n_s > 0.0 ? 1.0 / (2.0 * s.n_s) : std::numeric_limits<double>::infinity();
    return s;
}

double closed_set_residual(const WeakDriveSolution& sol, const DerivedParams& d, double n_th) {
    const double g = d.g_DCE, F = d.F, k = d.kappa, gm = d.gamma_m;
    const double n = sol.n_s;
    const cplx alpha = sol.as2, beta = sol.b_mean;

    double r = 0.0;
    auto take = [&r](cplx v) { r = std::max(r, std::abs(v)); };
    if (g != 0.0) {
        // Y from the photon-number relation (Y is purely imaginary by the last relation).
        const cplx Y = I * (-k * n / (4.0 * g));
        const double Nb = (I * k * Y / (2.0 * g)).real();
        take(-2.0 * I * g * beta - k * alpha);
        take(-I * (g * alpha + F / 2.0) - (gm / 2.0) * beta);
        take(2.0 * g * Y.imag() - F * beta.imag() - gm * Nb + gm * n_th);
    } else {
        take(-k * n);
        take(-k * alpha);
        take(-I * (F / 2.0) - (gm / 2.0) * beta);
    }
    return r;
}

ClosedSetMoments solve_closed_set(const DerivedParams& d, double n_th) {
    const double g = d.g_DCE, F = d.F, k = d.kappa, gm = d.gamma_m, g1 = d.gamma_1;
    // Unknowns: n, N_b, alpha, beta, Y = <a^2 b^dag>, Z = <a^dag a b> as 10 reals.
    using V = Eigen::Matrix<double, 10, 1>;
    auto residual = [&](const V& u) {
        const double n = u(0), Nb = u(1);
        const cplx alpha(u(2), u(3)), beta(u(4), u(5)), Y(u(6), u(7)), Z(u(8), u(9));
        const double e1 = -4.0 * g * Y.imag() - k * n;
        const cplx e2 = -2.0 * I * g * (2.0 * Z + beta) - k * alpha;
        const cplx e3 = -I * (g * alpha + F / 2.0) - (gm / 2.0) * beta;
        const double e4 = 2.0 * g * Y.imag() - F * beta.imag() - gm * Nb + gm * n_th;
        const cplx e5 = I * (F / 2.0 * alpha - 2.0 * g * Nb) - g1 * Y;
        const cplx e6 = -I * (F / 2.0) * n - g1 * Z;
        V out;
        out << e1, e2.real(), e2.imag(), e3.real(), e3.imag(), e4, e5.real(), e5.imag(), e6.real(), e6.imag();
        return out;
    };
    const V zero = V::Zero();
    const V b = -residual(zero);
    Eigen::Matrix<double, 10, 10> A;
    for (int j = 0; j < 10; ++j) {
        V e = V::Zero();
        e(j) = 1.0;
        A.col(j) = residual(e) + b;
    }
    const V u = A.fullPivLu().solve(b);
    ClosedSetMoments m;
    m.n_s = u(0);
    m.n_b = u(1);
    m.as2 = {u(2), u(3)};
    m.b_mean = {u(4), u(5)};
    m.a2_bdag = {u(6), u(7)};
    m.n_b_mixed = {u(8), u(9)};
    return m;
}

}  // namespace dce
