#include "dce/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "dce/errors.hpp"
#include "dce/observables.hpp"
#include "dce/semiclassical.hpp"

namespace dce {

namespace {

double relative_change(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-8); }

}  // namespace

std::optional<double> QuantumResult::g2() const {
    const QuantumPoint& p = best();
    if (!(p.n_s > 1e-14)) return std::nullopt;
    return p.a2a2 / (p.n_s * p.n_s);
}

cplx semiclassical_beta(const DerivedParams& d) { return principal_branch(d, Regime::General).state.beta; }

QuantumPoint solve_quantum_at(const DerivedParams& d, const SpaceLayout& layout, cplx beta, HamiltonianKind kind,
                              BathModel bath, const SteadyStateOptions& steady, DensityMatrix* rho_out) {
    const FrameModel f = displaced_frame(d, layout, beta, kind, bath);
    const Liouvillian L = build_liouvillian(f.H, f.dissipators);
    const SteadyState ss = steady_state(L, steady);

    const OperatorMatrix& a = f.modes.a;
    const OperatorMatrix ad = a.adjoint();
    QuantumPoint p;
    p.dims = {layout.dim(0), layout.dim(1)};
    p.n_s = expectation(ss.rho, ad * a).real();
    p.as2 = expectation(ss.rho, a * a);
    p.b_mean = expectation(ss.rho, f.modes.b);
    p.a2a2 = expectation(ss.rho, (ad * ad) * (a * a)).real();
    p.residual = ss.residual;
    p.check = ss.check;
    p.used_fallback = ss.used_fallback;
    if (rho_out) *rho_out = ss.rho;
    return p;
}

QuantumResult solve_quantum(const DerivedParams& d, const QuantumOptions& opts) {
    QuantumResult res;
    switch (opts.beta_mode) {
        case BetaMode::Zero: res.beta = 0.0; break;
        case BetaMode::Semiclassical: res.beta = semiclassical_beta(d); break;
        case BetaMode::Given: res.beta = opts.beta; break;
    }
    const SpaceLayout base({opts.dims[0], opts.dims[1]});
    res.base = solve_quantum_at(d, base, res.beta, opts.hamiltonian, opts.bath, opts.steady, &res.rho);
    if (opts.doubling) {
        const SpaceLayout fine({2 * opts.dims[0], 2 * opts.dims[1]});
        res.refined = solve_quantum_at(d, fine, res.beta, opts.hamiltonian, opts.bath, opts.steady, &res.rho);
        res.drift = std::max(relative_change(res.base.n_s, res.refined->n_s), relative_change(res.base.as2, res.refined->as2));
        res.converged = res.drift < opts.drift_tol;
    }
    return res;
}

FramePath constant_path(cplx beta) {
    return {[beta](double) { return beta; }, [](double) { return cplx(0.0); }};
}

FramePath semiclassical_path(const DerivedParams& d, double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw Error(ErrorKind::Precondition, "path needs t_end > 0 and dt > 0");
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt)) + 1;
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = static_cast<double>(k) * dt;
    const std::vector<SemiclassicalState> states = integrate_moments({}, d, times);

    auto nodes = std::make_shared<std::vector<std::pair<cplx, cplx>>>();
    nodes->reserve(n);
    for (const auto& s : states) nodes->emplace_back(s.beta, rhs(s, d).beta);

    auto locate = [nodes, dt](double t, double& s) {
        const double u = std::max(t, 0.0) / dt;
        std::size_t k = static_cast<std::size_t>(u);
        if (k + 1 >= nodes->size()) {
            k = nodes->size() - 2;
            s = 1.0;
            return k;
        }
        s = u - static_cast<double>(k);
        return k;
    };
    FramePath path;
    path.beta = [nodes, dt, locate](double t) {
        double s;
        const std::size_t k = locate(t, s);
        const auto& [y0, m0] = (*nodes)[k];
        const auto& [y1, m1] = (*nodes)[k + 1];
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * dt * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * dt * m1;
    };
    path.beta_dot = [nodes, dt, locate](double t) {
        double s;
        const std::size_t k = locate(t, s);
        const auto& [y0, m0] = (*nodes)[k];
        const auto& [y1, m1] = (*nodes)[k + 1];
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * dt * m0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * dt * m1) / dt;
    };
    return path;
}

Trajectory evolve_moving_frame(const DerivedParams& d, const SpaceLayout& layout, const DensityMatrix& rho0,
                               const FramePath& path, const std::vector<double>& times, HamiltonianKind kind,
                               BathModel bath, const EvolveOptions& opts) {
    // The generator is affine in (Re beta, Im beta): the |beta|^2 pieces cancel.
    auto generator = [&](cplx beta) {
        const FrameModel f = displaced_frame(d, layout, beta, kind, bath);
        return build_liouvillian(f.H, f.dissipators).matrix;
    };
    const SparseMat L0 = generator(0.0);
    TimeDependentLiouvillian L;
    L.layout = layout;
    L.base = L0;
    L.terms.push_back(SparseMat(generator(1.0) - L0));
    L.terms.push_back(SparseMat(generator(cplx(0.0, 1.0)) - L0));

    // Moving the frame adds H_move = -i (beta_dot b'^dag - beta_dot^* b').
    const Modes bare = mode_operators(layout);
    const cplx i(0.0, 1.0);
    const OperatorMatrix bd = bare.b.adjoint();
    L.terms.push_back(hamiltonian_superoperator((-i) * bd + i * bare.b));
    L.terms.push_back(hamiltonian_superoperator(bare.b + bd));
    for (auto& t : L.terms) t.prune(cplx(0.0), 0.0);

    L.coefficients = [&path](double t) {
        const cplx b = path.beta(t), bdot = path.beta_dot(t);
        return std::vector<cplx>{b.real(), b.imag(), bdot.real(), bdot.imag()};
    };

    const ObservableList obs{{"n_s", bare.a.adjoint() * bare.a}, {"as2", bare.a * bare.a}, {"b_prime", bare.b}};
    Trajectory traj = evolve(rho0, L, times, obs, opts);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        traj.records[k]["b"] = traj.records[k]["b_prime"] + path.beta(traj.times[k]);
    return traj;
}

}  // namespace dce
