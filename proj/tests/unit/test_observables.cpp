#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/errors.hpp"
#include "dce/observables.hpp"

using namespace dce;

TEST_CASE("unsqueezed breakdown") {
    const FluxBreakdown f = lab_frame_breakdown(0.3, cplx(-0.2, 0.1), 0.0, 7.0);
    CHECK(f.phi_bgn == 0.0);
    CHECK(f.phi_dce == doctest::Approx(0.3));
    CHECK(f.phi_out == doctest::Approx(2.1));
    CHECK(f.snr.kind == Snr::Kind::Infinite);
    CHECK(lab_frame_breakdown(0.0, 0.0, 0.0, 1.0).snr.kind == Snr::Kind::NotApplicable);
}

TEST_CASE("squeezed vacuum background in photons per second") {
    const double r = std::asinh(std::sqrt(0.5));
    const double kappa = 2.0 * std::numbers::pi * 2e6;
    const FluxBreakdown f = lab_frame_breakdown(0.0, 0.0, r, kappa);
    CHECK(f.phi_bgn == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.phi_out == doctest::Approx(6.283185307e6).epsilon(1e-9));
    CHECK(f.snr.is_finite());
    CHECK(f.snr.value == 0.0);
}

TEST_CASE("dce flux combines number and anomalous moment") {
    const double r = 0.4;
    const FluxBreakdown f = lab_frame_breakdown(0.2, cplx(-0.3, 0.5), r, 1.0);
    CHECK(f.phi_dce == doctest::Approx(0.2 * std::cosh(0.8) + 0.3 * std::sinh(0.8)).epsilon(1e-14));
    CHECK(f.snr.value == doctest::Approx(f.phi_dce / std::pow(std::sinh(r), 2)).epsilon(1e-14));
    CHECK_THROWS_AS(lab_frame_breakdown(-0.1, 0.0, r, 1.0), Error);
}

TEST_CASE("lab photon number agrees with the breakdown") {
    const SpaceLayout l({30, 2});
    const Vec psi = coherent_vector(30, cplx(0.7, -0.4));
    Vec full = Vec::Zero(60);
    for (int n = 0; n < 30; ++n) full(l.index({n, 0})) = psi(n);
    const DensityMatrix rho = DensityMatrix::pure(l, full);
    const OperatorMatrix a = embed(annihilation(30), l, 0);
    const double n = expectation(rho, a.adjoint() * a).real();
    const cplx as2 = expectation(rho, a * a);
    const double r = 0.5;
    CHECK(lab_photon_number(rho, r) == doctest::Approx(lab_frame_breakdown(n, as2, r, 1.0).phi_out).epsilon(1e-10));
}

TEST_CASE("g2 of reference states") {
    const SpaceLayout l({12, 2});
    CHECK(g2(DensityMatrix::fock(l, {2, 0})) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g2(DensityMatrix::fock(l, {1, 1})) == doctest::Approx(0.0));
    const SpaceLayout w({60, 2});
    Vec full = Vec::Zero(120);
    const Vec psi = coherent_vector(60, cplx(1.2, 0.3));
    for (int n = 0; n < 60; ++n) full(w.index({n, 0})) = psi(n);
    CHECK(g2(DensityMatrix::pure(w, full)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(g2(DensityMatrix::fock(l, {0, 1})), Error);
}

TEST_CASE("squeezed-frame signal-to-noise ratio") {
    CHECK(snr_squeezed_frame(0.3, 0.1).value == doctest::Approx(2.0));
    CHECK(snr_squeezed_frame(0.3, 0.0).kind == Snr::Kind::Infinite);
    CHECK(snr_squeezed_frame(0.0, 0.0).kind == Snr::Kind::Infinite);
    CHECK_THROWS_AS(snr_squeezed_frame(-1.0, 0.1), Error);
    CHECK(Snr::infinite().str() == "inf");
    CHECK(Snr::not_applicable().str() == "n/a");
    CHECK(Snr::finite(0.25).str() == "0.25");
}
