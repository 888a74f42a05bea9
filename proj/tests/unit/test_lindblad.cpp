#include <doctest.h>

#include <cmath>
#include <random>

#include "dce/engine.hpp"
#include "dce/errors.hpp"
#include "dce/lindblad.hpp"

using namespace dce;

namespace {

DenseMat random_density(int d, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    DenseMat A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = cplx(n(rng), n(rng));
    DenseMat rho = A * A.adjoint();
    return rho / rho.trace();
}

// d rho/dt evaluated with explicit matrix products.
DenseMat direct_rhs(const DenseMat& rho, const DenseMat& H, const DenseMat& o, double k, double N, cplx M) {
    const cplx i(0.0, 1.0);
    const DenseMat od = o.adjoint();
    auto L = [&](const DenseMat& x) { return DenseMat(x.adjoint() * x * rho - 2.0 * x * rho * x.adjoint() + rho * x.adjoint() * x); };
    auto Lp = [&](const DenseMat& x) { return DenseMat(x * x * rho - 2.0 * x * rho * x + rho * x * x); };
    DenseMat out = i * (rho * H - H * rho);
    out -= (k / 2.0) * (N + 1.0) * L(o);
    out -= (k / 2.0) * N * L(od);
    out += (k / 2.0) * M * Lp(o);
    out += (k / 2.0) * std::conj(M) * Lp(od);
    return out;
}

SystemParams reference() { return SystemParams{}; }

}  // namespace

TEST_CASE("superoperator action equals explicit matrix products") {
    std::mt19937 rng(11);
    const SpaceLayout l({3, 3});
    const DerivedParams d = derive(reference());
    const OperatorMatrix H = build_H_eff(d, l);
    const OperatorMatrix a = embed(annihilation(3), l, 0);
    const BathCoefficients c = bath_noise_NM(0.66, 0.726, 1.1 * std::numbers::pi);
    const DissipatorSpec spec{a, 3.5, c.N, c.M};
    const Liouvillian L = build_liouvillian(H, {spec});
    for (int k = 0; k < 5; ++k) {
        const DenseMat rho = random_density(9, rng);
        const DenseMat got = unvectorize(L.apply(vectorize(rho)), 9);
        const DenseMat want = direct_rhs(rho, H.dense(), a.dense(), 3.5, c.N, c.M);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("trace annihilation and Hermiticity preservation") {
    std::mt19937 rng(5);
    const SpaceLayout l({4, 3});
    SystemParams p = reference();
    p.n_th = 1.5;
    p.bath_matched = false;
    p.r_e = 0.5;
    const DerivedParams d = derive(p);
    const FrameModel f = displaced_frame(d, l, cplx(0.3, -1.1), HamiltonianKind::Eff, BathModel::Squeezed);
    const Liouvillian L = build_liouvillian(f.H, f.dissipators);
    CHECK(trace_annihilation_error(L) < 1e-10);
    for (int k = 0; k < 3; ++k) {
        const DenseMat rho = random_density(12, rng);
        const DenseMat out = unvectorize(L.apply(vectorize(rho)), 12);
        CHECK(std::abs(out.trace()) < 1e-10);
        CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + out.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("matched squeezed bath reduces to the vacuum bath") {
    const SpaceLayout l({4, 4});
    for (double s2 : {0.1, 0.5, 2.0}) {
        SystemParams p = reference();
        p.squeeze = SqueezeInput::sinh2_r(s2);
        const DerivedParams d = derive(p);
        const FrameModel vac = displaced_frame(d, l, 0.0, HamiltonianKind::Eff, BathModel::Vacuum);
        const FrameModel sq = displaced_frame(d, l, 0.0, HamiltonianKind::Eff, BathModel::Squeezed);
        const SparseMat diff = build_liouvillian(vac.H, vac.dissipators).matrix - build_liouvillian(sq.H, sq.dissipators).matrix;
        double worst = 0.0;
        for (int k = 0; k < diff.outerSize(); ++k)
            for (SparseMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("dissipator validation") {
    const OperatorMatrix a = annihilation(3);
    CHECK_THROWS_AS((DissipatorSpec{a, -1.0, 0.0, 0.0}.validate()), Error);
    CHECK_THROWS_AS((DissipatorSpec{a, 1.0, -0.1, 0.0}.validate()), Error);
    CHECK_THROWS_AS((DissipatorSpec{a, 1.0, 0.5, 1.0}.validate()), Error);
    CHECK_NOTHROW((DissipatorSpec{a, 1.0, 0.5, std::sqrt(0.75)}.validate()));
    CHECK_THROWS_AS(build_liouvillian(annihilation(3), {DissipatorSpec{annihilation(4), 1.0, 0.0, 0.0}}), Error);
}

TEST_CASE("amplitude damping") {
    const SpaceLayout l({2});
    const double kappa = 3.0;
    const Liouvillian L = build_liouvillian(OperatorMatrix::zero(l), {DissipatorSpec{annihilation(2), kappa, 0.0, 0.0}});
    const SteadyState ss = steady_state(L);
    CHECK(std::abs(ss.rho.element(0, 0) - 1.0) < 1e-12);

    const std::vector<double> times{0.1, 0.5, 1.0, 2.0};
    const Trajectory tr = evolve(DensityMatrix::fock(l, {1}), L, times, {{"n", number_operator(2)}});
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(std::abs(tr.records[k].at("n").real() - std::exp(-kappa * times[k])) < 1e-6);
    CHECK(tr.max_trace_drift < 1e-9);
}

TEST_CASE("undriven steady state is the vacuum") {
    SystemParams p = reference();
    p.F = 0.0;
    const DerivedParams d = derive(p);
    const SpaceLayout l({4, 4});
    const FrameModel f = displaced_frame(d, l, 0.0);
    const SteadyState ss = steady_state(build_liouvillian(f.H, f.dissipators));
    CHECK(std::abs(ss.rho.element(0, 0) - 1.0) < 1e-10);
    CHECK(ss.residual < 1e-8);
}

TEST_CASE("steady state rejects a degenerate kernel") {
    // Two decoupled undamped levels: every diagonal state is stationary.
    const SpaceLayout l({2});
    const Liouvillian L = build_liouvillian(number_operator(2), {});
    CHECK_THROWS_AS(steady_state(L), Error);
}

TEST_CASE("thermal mechanical bath gives a thermal phonon state") {
    SystemParams p = reference();
    p.F = 0.0;
    p.g0 = 0.0;
    p.n_th = 0.7;
    const DerivedParams d = derive(p);
    const SpaceLayout l({2, 25});
    const FrameModel f = displaced_frame(d, l, 0.0);
    const SteadyState ss = steady_state(build_liouvillian(f.H, f.dissipators));
    CHECK(std::abs(expectation(ss.rho, f.modes.b.adjoint() * f.modes.b) - 0.7) < 1e-5);
}

TEST_CASE("random generator keeps the trace") {
    std::mt19937 rng(8);
    const SpaceLayout l({3, 3});
    SystemParams p = reference();
    p.kappa = 5.0;
    p.F = 3.0;
    const DerivedParams d = derive(p);
    const FrameModel f = displaced_frame(d, l, 0.0);
    const Liouvillian L = build_liouvillian(f.H, f.dissipators);
    const Trajectory tr = evolve(DensityMatrix(l, random_density(9, rng)), L, {0.05, 0.1, 0.2}, {});
    CHECK(tr.max_trace_drift < 1e-9);
    CHECK_THROWS_AS(evolve(DensityMatrix::fock(l, {0, 0}), L, {0.2, 0.1}, {}), Error);
}

TEST_CASE("conversion fidelity") {
    SystemParams p = reference();
    p.g0 = 80.0;
    p.omega_m = p.omega_d = p.Delta = 8e4;
    p.kappa = 10.0;
    p.F = 0.0;
    const DerivedParams d = derive(p);
    const double t_peak = std::numbers::pi / (2.0 * std::sqrt(2.0) * d.g_DCE);
    std::vector<double> times;
    for (int k = 1; k <= 400; ++k) times.push_back(k * 4.0 * t_peak / 400.0);
    const Trajectory tr = conversion_fidelity(p, times);
    std::size_t best = 0;
    for (std::size_t k = 0; k < 150; ++k)
        if (tr.records[k].at("fidelity").real() > tr.records[best].at("fidelity").real()) best = k;
    CHECK(std::abs(times[best] - t_peak) < 0.1 * t_peak);
    CHECK(tr.records[best].at("fidelity").real() > 0.8);

    SystemParams q = p;
    q.squeeze = SqueezeInput::omega(0.0);
    const Trajectory flat = conversion_fidelity(q, {0.01, 0.02});
    CHECK(std::abs(flat.records[1].at("fidelity")) < 1e-14);

    q = p;
    q.F = 1.0;
    CHECK_THROWS_AS(conversion_fidelity(q, {0.01}), Error);
}

TEST_CASE("displaced frame: beta = 0 is the identity and observables are gauge invariant") {
    const SpaceLayout l({5, 5});
    SystemParams p = reference();
    p.F = 2.0;
    const DerivedParams d = derive(p);
    const FrameModel f0 = displaced_frame(d, l, 0.0);
    CHECK(max_abs_diff(f0.H, build_H_eff(d, l)) < 1e-15);

    const QuantumPoint q0 = solve_quantum_at(d, SpaceLayout({5, 10}), 0.0, HamiltonianKind::Eff, BathModel::Vacuum, {});
    const cplx beta = semiclassical_beta(d);
    const QuantumPoint q1 = solve_quantum_at(d, l, beta, HamiltonianKind::Eff, BathModel::Vacuum, {});
    CHECK(std::abs(q1.n_s / q0.n_s - 1.0) < 0.005);
    CHECK(std::abs(q1.b_mean - q0.b_mean) < 1e-3 * std::abs(q0.b_mean));
}

TEST_CASE("moving frame follows a driven damped oscillator") {
    // g_DCE = 0: <b>(t) = -i F / gamma_m (1 - e^{-gamma_m t / 2}) from the vacuum.
    SystemParams p = reference();
    p.squeeze = SqueezeInput::omega(0.0);
    p.Delta = 5000.0;
    p.g0 = 0.0;
    p.F = 3.0;
    const DerivedParams d = derive(p);
    const SpaceLayout l({2, 4});
    const std::vector<double> times{0.5, 1.0, 2.0, 4.0};
    auto exact = [&](double t) { return cplx(0.0, -p.F / p.gamma_m * (1.0 - std::exp(-p.gamma_m * t / 2.0))); };

    const FramePath path = semiclassical_path(d, 4.0);
    const Trajectory tr = evolve_moving_frame(d, l, DensityMatrix::fock(l, {0, 0}), path, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(std::abs(tr.records[k].at("b") - exact(times[k])) < 1e-5);
        CHECK(std::abs(tr.records[k].at("b_prime")) < 1e-5);
    }

    // A frame that does not follow the motion must give the same physics.
    const FramePath half{[&](double t) { return 0.5 * exact(t); },
                         [&](double t) { return cplx(0.0, -0.25 * p.F * std::exp(-p.gamma_m * t / 2.0)); }};
    const SpaceLayout wide({2, 12});
    const Trajectory th = evolve_moving_frame(d, wide, DensityMatrix::fock(wide, {0, 0}), half, times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(std::abs(th.records[k].at("b") - exact(times[k])) < 1e-4);
}
