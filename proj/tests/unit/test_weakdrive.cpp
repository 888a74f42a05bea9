#include <doctest.h>

#include <cmath>
#include <random>

#include "dce/errors.hpp"
#include "dce/weakdrive.hpp"

using namespace dce;

namespace {

DerivedParams at(double F, double kappa = 500.0) {
    SystemParams p;
    p.F = F;
    p.kappa = kappa;
    return derive(p);
}

}  // namespace

TEST_CASE("reference-point values by hand") {
    // g = 5 sqrt 3, gamma_0^2 = 250, 2 g^2 + gamma_0^2 = 400.
    const WeakDriveSolution s = solve_weak(at(15.0), 0.0);
    CHECK(s.n_s == doctest::Approx(300.0 / (500.0 * 400.0) * (500.0 * 225.0 / 800.0)).epsilon(1e-12));
    CHECK(s.n_s == doctest::Approx(0.2109375).epsilon(1e-12));
    CHECK(s.as2.real() == doctest::Approx(-5.0 * std::sqrt(3.0) * 15.0 / 400.0).epsilon(1e-12));
    CHECK(std::abs(s.as2.imag()) < 1e-15);
    CHECK(s.b_mean.imag() == doctest::Approx(-500.0 * 15.0 / 800.0).epsilon(1e-12));
    CHECK(s.g2 * 2.0 * s.n_s == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("undriven cold limit is empty") {
    const WeakDriveSolution s = solve_weak(at(0.0), 0.0);
    CHECK(s.n_s == 0.0);
    CHECK(s.as2 == cplx(0.0));
    CHECK(std::isinf(s.g2));
}

TEST_CASE("scaling laws") {
    const WeakDriveSolution a = solve_weak(at(3.0), 0.0), b = solve_weak(at(6.0), 0.0);
    CHECK(b.n_s / a.n_s == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(b.as2.real() / a.as2.real() == doctest::Approx(2.0).epsilon(1e-13));
    const WeakDriveSolution hot = solve_weak(at(3.0), 3.0);
    CHECK(hot.as2 == a.as2);
    CHECK(hot.n_s > a.n_s);
    // thermal part alone: 4 gamma_m g^2 n_th / (kappa (2g^2 + gamma_0^2))
    CHECK(solve_weak(at(0.0), 3.0).n_s == doctest::Approx(4.0 * 75.0 * 3.0 / (500.0 * 400.0)).epsilon(1e-12));
}

TEST_CASE("closed-set residual") {
    const DerivedParams d = at(2.0);
    WeakDriveSolution s = solve_weak(d, 0.0);
    CHECK(closed_set_residual(s, d, 0.0) < 1e-10);
    s.n_s *= 1.1;
    CHECK(closed_set_residual(s, d, 0.0) > 1e-6);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        SystemParams p;
        p.F = 20.0 * u(rng);
        p.kappa = 50.0 + 950.0 * u(rng);
        p.g0 = 1.0 + 19.0 * u(rng);
        const double s2 = 0.1 + 2.0 * u(rng);
        p.squeeze = SqueezeInput::sinh2_r(s2);
        p.Delta = p.omega_m / 2.0 * (1.0 + 2.0 * s2);  // omega_s = omega_m / 2
        const double nth = 2.0 * u(rng);
        const DerivedParams dd = derive(p);
        CHECK(closed_set_residual(solve_weak(dd, nth), dd, nth) < 1e-9);
    }
}

TEST_CASE("full closed set stays close to the reduced solution at weak drive") {
    const DerivedParams d = at(2.0);
    const ClosedSetMoments m = solve_closed_set(d, 0.0);
    const WeakDriveSolution s = solve_weak(d, 0.0);
    CHECK(std::abs(m.n_s / s.n_s - 1.0) < 0.05);
    CHECK(std::abs(m.as2.real() / s.as2.real() - 1.0) < 0.05);
}

TEST_CASE("off-resonance is rejected") {
    SystemParams p;
    p.omega_d = p.omega_m - 1.0;
    CHECK_THROWS_AS(solve_weak(derive(p), 0.0), Error);
}
