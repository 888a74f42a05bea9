#include "dce/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "dce/errors.hpp"

namespace dce {

namespace {

const cplx I(0.0, 1.0);

SparseMat kron(const SparseMat& a, const SparseMat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

SparseMat sparse_identity(int n) {
    SparseMat id(n, n);
    id.setIdentity();
    return id;
}

// o^dag o rho - 2 o rho o^dag + rho o^dag o
SparseMat lindblad_form(const SparseMat& o) {
    const int n = static_cast<int>(o.rows());
    const SparseMat id = sparse_identity(n);
    const SparseMat od = o.adjoint();
    const SparseMat p = od * o;
    const SparseMat pt = p.transpose();
    const SparseMat oc = o.conjugate();
    return SparseMat(kron(id, p) - 2.0 * kron(oc, o) + kron(pt, id));
}

// o o rho - 2 o rho o + rho o o
SparseMat anomalous_form(const SparseMat& o) {
    const int n = static_cast<int>(o.rows());
    const SparseMat id = sparse_identity(n);
    const SparseMat q = o * o;
    const SparseMat qt = q.transpose();
    const SparseMat ot = o.transpose();
    return SparseMat(kron(id, q) - 2.0 * kron(ot, o) + kron(qt, id));
}

double vec_norm(const Vec& v) { return v.norm(); }

cplx vec_trace(const Vec& v, int d) {
    cplx t = 0.0;
    for (int i = 0; i < d; ++i) t += v(static_cast<Eigen::Index>(i) * d + i);
    return t;
}

using LU = Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>>;

double residual_of(const SparseMat& L, const Vec& v) {
    const double n = vec_norm(v);
    return n > 0.0 ? vec_norm(L * v) / n : std::numeric_limits<double>::infinity();
}

// Indices of the connected components of the coupling graph of L that touch
// a diagonal element. The steady state is supported there; the remaining
// blocks (e.g. odd cavity-parity coherences) decouple and stay zero.
std::vector<int> diagonal_sector(const SparseMat& L, int d) {
    const int n = static_cast<int>(L.rows());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int col = 0; col < L.outerSize(); ++col)
        for (SparseMat::InnerIterator it(L, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (row == col) continue;
            adj[static_cast<std::size_t>(row)].push_back(col);
            adj[static_cast<std::size_t>(col)].push_back(row);
        }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    for (int i = 0; i < d; ++i) {
        const int k = i * d + i;
        if (!seen[static_cast<std::size_t>(k)]) {
            seen[static_cast<std::size_t>(k)] = 1;
            stack.push_back(k);
        }
    }
    while (!stack.empty()) {
        const int k = stack.back();
        stack.pop_back();
        for (int j : adj[static_cast<std::size_t>(k)])
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                stack.push_back(j);
            }
    }
    std::vector<int> idx;
    for (int k = 0; k < n; ++k)
        if (seen[static_cast<std::size_t>(k)]) idx.push_back(k);
    return idx;
}

// Direct solve of L v = 0, Tr v = 1 restricted to the diagonal sector.
bool direct_kernel(const SparseMat& L, int d, double tol, Vec& v) {
    const std::vector<int> idx = diagonal_sector(L, d);
    const int m = static_cast<int>(idx.size());
    std::vector<int> pos(static_cast<std::size_t>(L.rows()), -1);
    for (int k = 0; k < m; ++k) pos[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = k;

    // Row 0 of the reduced system (vec index 0, i.e. rho_00) becomes the trace.
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(L.nonZeros()));
    for (int k = 0; k < m; ++k)
        for (SparseMat::InnerIterator it(L, idx[static_cast<std::size_t>(k)]); it; ++it) {
            const int r = pos[static_cast<std::size_t>(it.row())];
            if (r > 0) t.emplace_back(r, k, it.value());
        }
    for (int i = 0; i < d; ++i) t.emplace_back(0, pos[static_cast<std::size_t>(i * d + i)], 1.0);
    SparseMat A(m, m);
    A.setFromTriplets(t.begin(), t.end());

    Eigen::UmfPackLU<SparseMat> lu;  // keeps a reference to A
    lu.compute(A);
    if (lu.info() != Eigen::Success) return false;
    Vec rhs = Vec::Zero(m);
    rhs(0) = 1.0;
    const Vec u = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !u.allFinite()) return false;
    v = Vec::Zero(L.rows());
    for (int k = 0; k < m; ++k) v(idx[static_cast<std::size_t>(k)]) = u(k);
    return residual_of(L, v) < tol;
}

// Shifted inverse iteration towards the eigenvalue closest to zero.
Vec inverse_iteration(const LU& lu, Vec v, int iterations) {
    for (int k = 0; k < iterations; ++k) {
        v = lu.solve(v);
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) break;
        v /= n;
    }
    return v;
}

Vec normalise_trace(Vec v, int d) {
    const cplx tr = vec_trace(v, d);
    if (std::abs(tr) < 1e-300) throw Error(ErrorKind::NonUniqueSteadyState, "kernel vector is traceless");
    return v / tr;
}

Vec fallback_kernel(const SparseMat& L, int d) {
    const Eigen::Index n = L.rows();
    double scale = 0.0;
    for (int col = 0; col < L.outerSize(); ++col)
        for (SparseMat::InnerIterator it(L, col); it; ++it) scale = std::max(scale, std::abs(it.value()));
    const double shift = 1e-9 * std::max(scale, 1.0);
    SparseMat shifted = L - shift * sparse_identity(static_cast<int>(n));
    LU lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::NonUniqueSteadyState, "shifted Liouvillian is singular");

    // Two different starting vectors land on the same ray only if the kernel is one-dimensional.
    Vec start1 = vectorize(DenseMat::Identity(d, d) / static_cast<double>(d));
    Vec start2 = Vec::Zero(n);
    start2(0) = 1.0;
    const Vec v1 = normalise_trace(inverse_iteration(lu, start1, 8), d);
    const Vec v2 = normalise_trace(inverse_iteration(lu, start2, 8), d);
    if ((v1 - v2).norm() > 1e-6 * std::max(1.0, v1.norm()))
        throw Error(ErrorKind::NonUniqueSteadyState, "steady state depends on the starting vector");
    return v1;
}

}  // namespace

void DissipatorSpec::validate() const {
    if (rate < 0.0) throw Error(ErrorKind::Precondition, "dissipator rate must be >= 0");
    if (thermal_occupation < 0.0) throw Error(ErrorKind::Precondition, "thermal occupation must be >= 0");
    const double bound = thermal_occupation * (thermal_occupation + 1.0);
    if (std::norm(anomalous) > bound * (1.0 + 1e-10) + 1e-14)
        throw Error(ErrorKind::Precondition, "unphysical bath: |M|^2 > N (N + 1)");
}

SparseMat hamiltonian_superoperator(const OperatorMatrix& H) {
    const SparseMat id = sparse_identity(H.size());
    const SparseMat ht = H.matrix().transpose();
    return SparseMat(I * kron(ht, id) - I * kron(id, H.matrix()));
}

SparseMat dissipator_superoperator(const DissipatorSpec& s) {
    s.validate();
    const int n = s.op.size();
    SparseMat out(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(n) * n);
    if (s.rate == 0.0) return out;
    const double c = s.rate / 2.0;
    const SparseMat& o = s.op.matrix();
    const SparseMat od = o.adjoint();
    out = -(c * (s.thermal_occupation + 1.0)) * lindblad_form(o);
    if (s.thermal_occupation != 0.0) out = out - (c * s.thermal_occupation) * lindblad_form(od);
    if (s.anomalous != cplx(0.0)) {
        out = out + (c * s.anomalous) * anomalous_form(o);
        out = out + (c * std::conj(s.anomalous)) * anomalous_form(od);
    }
    return out;
}

Liouvillian build_liouvillian(const OperatorMatrix& H, const std::vector<DissipatorSpec>& dissipators) {
    Liouvillian L{H.layout(), hamiltonian_superoperator(H)};
    for (const auto& d : dissipators) {
        if (d.op.layout() != H.layout()) throw Error(ErrorKind::DimensionMismatch, "dissipator layout differs from H");
        L.matrix = L.matrix + dissipator_superoperator(d);
    }
    L.matrix.makeCompressed();
    return L;
}

Vec vectorize(const DenseMat& rho) { return Eigen::Map<const Vec>(rho.data(), rho.size()); }

DenseMat unvectorize(const Vec& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw Error(ErrorKind::DimensionMismatch, "unvectorize");
    return Eigen::Map<const DenseMat>(v.data(), dim, dim);
}

double trace_annihilation_error(const Liouvillian& L) {
    const int d = L.hilbert_dim();
    double worst = 0.0;
    for (int col = 0; col < L.matrix.outerSize(); ++col) {
        cplx s = 0.0;
        for (SparseMat::InnerIterator it(L.matrix, col); it; ++it)
            if (it.row() % (d + 1) == 0) s += it.value();
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

SteadyState steady_state(const Liouvillian& L, const SteadyStateOptions& opts) {
    const int d = L.hilbert_dim();
    SteadyState out;

    Vec v;
    const bool ok = direct_kernel(L.matrix, d, opts.residual_tol, v);
    if (!ok) {
        v = fallback_kernel(L.matrix, d);
        out.used_fallback = true;
    }

    DenseMat rho = unvectorize(v, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    const Vec vh = vectorize(rho);
    out.residual = residual_of(L.matrix, vh);
    if (!(out.residual < opts.residual_tol))
        throw Error(ErrorKind::NonUniqueSteadyState,
                    "steady-state residual " + std::to_string(out.residual) + " above tolerance");
    out.rho = DensityMatrix(L.layout, std::move(rho));
    out.check = out.rho.check();
    if (opts.validate) out.rho.validate(opts.density);
    return out;
}

std::vector<cplx> Trajectory::series(const std::string& name) const {
    std::vector<cplx> s;
    s.reserve(records.size());
    for (const auto& r : records) {
        auto it = r.find(name);
        if (it == r.end()) throw Error(ErrorKind::Precondition, "no observable named " + name);
        s.push_back(it->second);
    }
    return s;
}

namespace {

using State = std::vector<cplx>;

template <class System>
Trajectory integrate(const DensityMatrix& rho0, System system, const std::vector<double>& times,
                     const ObservableList& observables, const EvolveOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    const int d = rho0.layout().total();
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0 || (k > 0 && !(times[k] > times[k - 1])))
            throw Error(ErrorKind::Precondition, "evolve times must be >= 0 and strictly increasing");
    }
    for (const auto& [name, op] : observables)
        if (op.layout() != rho0.layout()) throw Error(ErrorKind::DimensionMismatch, "observable " + name);

    State x(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    {
        const Vec v = vectorize(rho0.matrix());
        std::copy(v.data(), v.data() + v.size(), x.begin());
    }

    Trajectory traj;
    auto record = [&](double t) {
        const Eigen::Map<const DenseMat> m(x.data(), d, d);
        DensityMatrix rho(rho0.layout(), DenseMat(m));
        std::map<std::string, cplx> rec;
        for (const auto& [name, op] : observables) rec[name] = expectation(rho, op);
        traj.times.push_back(t);
        traj.records.push_back(std::move(rec));
        if (opts.store_states) traj.states.push_back(std::move(rho));
    };
    auto trace_drift = [&]() {
        cplx tr = 0.0;
        for (int i = 0; i < d; ++i) tr += x[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + i];
        return std::abs(tr - 1.0);
    };

    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(opts.abs_tol, opts.rel_tol);
    double t = 0.0;
    double dt = opts.initial_dt;
    traj.max_trace_drift = trace_drift();
    for (double target : times) {
        while (t < target) {
            const double remaining = target - t;
            const bool clamped = remaining <= dt;
            double trial = clamped ? remaining : dt;
            const double t_before = t;
            const auto res = stepper.try_step(system, x, t, trial);
            if (res == odeint::success) {
                if (clamped) t = target;
                else dt = trial;
                ++traj.steps;
                traj.max_trace_drift = std::max(traj.max_trace_drift, trace_drift());
                if (traj.steps > opts.max_steps) throw Error(ErrorKind::Stiffness, "step budget exhausted");
            } else {
                t = t_before;
                dt = trial;
                if (dt < opts.min_dt * std::max(1.0, std::abs(t)))
                    throw Error(ErrorKind::Stiffness, "step size underflow at t = " + std::to_string(t));
            }
        }
        record(target);
    }
    return traj;
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& L, const std::vector<double>& times,
                  const ObservableList& observables, const EvolveOptions& opts) {
    if (rho0.layout() != L.layout) throw Error(ErrorKind::DimensionMismatch, "evolve: layouts differ");
    const SparseMat& M = L.matrix;
    auto system = [&M](const State& x, State& dxdt, double) {
        dxdt.resize(x.size());
        const Eigen::Map<const Vec> in(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Vec> out(dxdt.data(), static_cast<Eigen::Index>(dxdt.size()));
        out.noalias() = M * in;
    };
    return integrate(rho0, system, times, observables, opts);
}

Trajectory evolve(const DensityMatrix& rho0, const TimeDependentLiouvillian& L, const std::vector<double>& times,
                  const ObservableList& observables, const EvolveOptions& opts) {
    if (rho0.layout() != L.layout) throw Error(ErrorKind::DimensionMismatch, "evolve: layouts differ");
    auto system = [&L](const State& x, State& dxdt, double t) {
        dxdt.resize(x.size());
        const Eigen::Map<const Vec> in(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Vec> out(dxdt.data(), static_cast<Eigen::Index>(dxdt.size()));
        out.noalias() = L.base * in;
        const std::vector<cplx> c = L.coefficients(t);
        if (c.size() != L.terms.size()) throw Error(ErrorKind::DimensionMismatch, "coefficient count");
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != cplx(0.0)) out.noalias() += c[k] * (L.terms[k] * in);
    };
    return integrate(rho0, system, times, observables, opts);
}

FrameModel displaced_frame(const DerivedParams& d, const SpaceLayout& layout, cplx beta, HamiltonianKind kind,
                           BathModel bath) {
    FrameModel f;
    f.modes = mode_operators(layout, beta);
    switch (kind) {
        case HamiltonianKind::Eff: f.H = build_H_eff(d, f.modes); break;
        case HamiltonianKind::EffTilde: f.H = build_H_eff_tilde(d, f.modes); break;
        case HamiltonianKind::EffPlusTA: f.H = build_H_eff(d, f.modes) + build_H_TA(d, f.modes); break;
    }
    const BathCoefficients c = bath == BathModel::Squeezed ? d.bath : BathCoefficients{};
    f.dissipators.push_back({f.modes.a, d.kappa, c.N, c.M});
    f.dissipators.push_back({f.modes.b, d.gamma_m, d.n_th, 0.0});
    return f;
}

Trajectory conversion_fidelity(const SystemParams& params, const std::vector<double>& times, const SpaceLayout& layout,
                               const EvolveOptions& opts) {
    if (params.F != 0.0) throw Error(ErrorKind::Precondition, "conversion fidelity is defined for F = 0");
    if (layout.modes() != 2 || layout.dim(0) < 3)
        throw Error(ErrorKind::InvalidDimension, "fidelity needs a two-mode layout with cavity dim >= 3");
    const DerivedParams d = derive(params);
    const FrameModel f = displaced_frame(d, layout, 0.0);
    const Liouvillian L = build_liouvillian(f.H, f.dissipators);

    const int target = layout.index({2, 0});
    SparseMat proj(layout.total(), layout.total());
    proj.insert(target, target) = 1.0;
    const ObservableList obs{{"fidelity", OperatorMatrix(layout, proj)},
                             {"n_s", f.modes.a.adjoint() * f.modes.a},
                             {"n_b", f.modes.b.adjoint() * f.modes.b}};
    return evolve(DensityMatrix::fock(layout, {0, 1}), L, times, obs, opts);
}

}  // namespace dce
