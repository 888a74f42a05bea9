#include "dce/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <thread>

#include "dce/engine.hpp"
#include "dce/errors.hpp"
#include "dce/semiclassical.hpp"
#include "dce/weakdrive.hpp"

namespace dce {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// The bare-mode model reports lab-frame quantities with no squeezing transform.
double report_r(const RunConfig& cfg, const DerivedParams& d) {
    return cfg.hamiltonian == HamiltonianKind::EffTilde ? 0.0 : d.r;
}

PointResult failed_row(const RunConfig& cfg, double x, EngineKind e, const std::string& what) {
    PointResult p;
    p.sweep_value = x;
    p.delta_s = cfg.sweep.variable == SweepVariable::Delta_s ? x : cfg.delta_s;
    p.F = cfg.sweep.variable == SweepVariable::F ? x : cfg.params.F;
    p.n_s = kNaN;
    p.as2 = {kNaN, kNaN};
    p.flux = {kNaN, kNaN, kNaN, Snr::not_applicable()};
    p.snr = Snr::not_applicable();
    p.beta = {kNaN, kNaN};
    p.engine = e;
    p.converged = false;
    p.error = what;
    return p;
}

PointResult base_row(double x, EngineKind e, const DerivedParams& d) {
    PointResult p;
    p.sweep_value = x;
    p.delta_s = d.Delta_s;
    p.F = d.F;
    p.engine = e;
    return p;
}

void fill_flux(PointResult& p, const RunConfig& cfg, const DerivedParams& d) {
    p.flux = lab_frame_breakdown(std::max(p.n_s, 0.0), p.as2, report_r(cfg, d), d.kappa);
    p.snr = p.flux.snr;
}

QuantumOptions quantum_options(const RunConfig& cfg) {
    QuantumOptions o;
    o.dims = cfg.truncation.dims;
    o.doubling = cfg.truncation.doubling;
    o.drift_tol = cfg.truncation.drift_tol;
    o.hamiltonian = cfg.hamiltonian;
    o.bath = BathModel::Squeezed;
    return o;
}

std::vector<PointResult> quantum_rows(const RunConfig& cfg, double x, const DerivedParams& d) {
    PointResult p = base_row(x, EngineKind::Quantum, d);
    const Branch br = principal_branch(d);
    QuantumOptions o = quantum_options(cfg);
    o.beta_mode = BetaMode::Given;
    o.beta = br.state.beta;
    const QuantumResult q = solve_quantum(d, o);
    p.n_s = q.best().n_s;
    p.as2 = q.best().as2;
    p.g2 = q.g2();
    p.beta = q.best().b_mean;
    p.stable = br.stable;
    p.converged = q.converged;
    fill_flux(p, cfg, d);
    if (!cfg.params.bath_matched) {
        // Squeezed-frame SNR against the driveless photon number.
        DerivedParams d0 = d;
        d0.F = 0.0;
        QuantumOptions o0 = quantum_options(cfg);
        o0.beta_mode = BetaMode::Zero;
        const QuantumResult q0 = solve_quantum(d0, o0);
        p.snr = snr_squeezed_frame(p.n_s, q0.best().n_s);
        p.converged = p.converged && q0.converged;
    }
    return {p};
}

std::vector<PointResult> weak_rows(const RunConfig& cfg, double x, const DerivedParams& d) {
    PointResult p = base_row(x, EngineKind::WeakDrive, d);
    const WeakDriveSolution w = solve_weak(d, d.n_th);
    p.n_s = w.n_s;
    p.as2 = w.as2;
    p.g2 = w.g2;
    p.beta = w.b_mean;
    fill_flux(p, cfg, d);
    return {p};
}

std::vector<PointResult> semiclassical_rows(const RunConfig& cfg, double x, const DerivedParams& d, bool all) {
    auto row = [&](const Branch& b, int index) {
        PointResult p = base_row(x, EngineKind::Semiclassical, d);
        p.n_s = b.state.n_s;
        p.as2 = b.state.as2;
        if (b.state.n_s > 0.0) p.g2 = g2_semiclassical(b.state);
        p.beta = b.state.beta;
        p.stable = b.stable;
        p.branch = index;
        fill_flux(p, cfg, d);
        return p;
    };
    if (!all) return {row(principal_branch(d), -1)};
    const BranchSet set = branches(d, Regime::General);
    std::vector<PointResult> out;
    for (std::size_t k = 0; k < set.roots.size(); ++k) out.push_back(row(set.roots[k], static_cast<int>(k)));
    return out;
}

std::string joined(const Table& t, std::size_t k) {
    std::string s;
    for (std::size_t j = 0; j < t.rows[k].size(); ++j) s += (j ? "," : "") + num(t.rows[k][j]);
    return s;
}

std::vector<double> time_grid(const RunConfig& cfg) {
    std::vector<double> t(static_cast<std::size_t>(cfg.samples));
    for (int k = 0; k < cfg.samples; ++k) t[static_cast<std::size_t>(k)] = cfg.t_end * k / (cfg.samples - 1);
    return t;
}

}  // namespace

std::vector<PointResult> run_point(const RunConfig& cfg, double x, EngineKind engine, bool all_branches) {
    if (engine == EngineKind::All) throw Error(ErrorKind::Precondition, "run_point needs a single engine");
    try {
        const DerivedParams d = derive(point_params(cfg, x));
        if (!cfg.params.bath_matched && engine != EngineKind::Quantum)
            throw Error(ErrorKind::UnsupportedRegime, "a mismatched bath needs the quantum engine");
        switch (engine) {
            case EngineKind::Quantum: return quantum_rows(cfg, x, d);
            case EngineKind::WeakDrive: return weak_rows(cfg, x, d);
            case EngineKind::Semiclassical: return semiclassical_rows(cfg, x, d, all_branches);
            case EngineKind::All: break;
        }
    } catch (const std::exception& e) {
        return {failed_row(cfg, x, engine, e.what())};
    }
    return {};
}

SweepOutput run_sweep(const RunConfig& cfg, EngineKind engine, bool all_branches) {
    const std::vector<double>& grid = cfg.sweep.grid;
    std::vector<std::vector<PointResult>> slots(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < grid.size(); k = next++) slots[k] = run_point(cfg, grid[k], engine, all_branches);
    };
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), grid.size());
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    SweepOutput out;
    out.engine = engine;
    out.all_branches = all_branches;
    for (auto& s : slots)
        for (auto& r : s) {
            if (r.failed()) ++out.failures;
            out.rows.push_back(std::move(r));
        }
    return out;
}

void write_sweep_csv(std::ostream& out, const RunConfig& cfg, const SweepOutput& sweep) {
    const SweepVariable v = cfg.sweep.variable;
    const bool extra_var = v != SweepVariable::Delta_s && v != SweepVariable::F;
    out << "delta_s,F,n_s,re_as2,im_as2,phi_bgn,phi_dce,phi_out,snr,g2,beta_re,beta_im,stable,engine,converged";
    if (extra_var) out << ',' << to_string(v);
    if (sweep.all_branches) out << ",branch";
    if (cfg.kappa_hz) out << ",phi_bgn_per_s,phi_out_per_s";
    out << '\n';
    for (const PointResult& p : sweep.rows) {
        out << num(p.delta_s) << ',' << num(p.F) << ',' << num(p.n_s) << ',' << num(p.as2.real()) << ','
            << num(p.as2.imag()) << ',' << num(p.flux.phi_bgn) << ',' << num(p.flux.phi_dce) << ','
            << num(p.flux.phi_out) << ',' << p.snr.str() << ',' << (p.g2 ? num(*p.g2) : "nan") << ','
            << num(p.beta.real()) << ',' << num(p.beta.imag()) << ',' << (p.stable ? (*p.stable ? "1" : "0") : "")
            << ',' << to_string(p.engine) << ',' << (p.converged ? 1 : 0);
        if (extra_var) out << ',' << num(p.sweep_value);
        if (sweep.all_branches) out << ',' << p.branch;
        if (cfg.kappa_hz) {
            // phi_out is kappa (phi_bgn + phi_dce) in gamma_m units.
            const double k = 2.0 * std::numbers::pi * *cfg.kappa_hz;
            out << ',' << num(k * p.flux.phi_bgn) << ',' << num(k * (p.flux.phi_bgn + p.flux.phi_dce));
        }
        out << '\n';
    }
}

void write_table_csv(std::ostream& out, const Table& t) {
    for (std::size_t j = 0; j < t.header.size(); ++j) out << (j ? "," : "") << t.header[j];
    out << '\n';
    for (std::size_t k = 0; k < t.rows.size(); ++k) out << joined(t, k) << '\n';
}

Table run_timeevo(const RunConfig& cfg) {
    Table t{{"t", "F", "n_s", "re_as2", "im_as2", "b_re", "b_im", "phi_out"}, {}};
    const std::vector<double> times = time_grid(cfg);
    for (double x : cfg.sweep.grid) {
        const DerivedParams d = derive(point_params(cfg, x));
        const SpaceLayout layout({cfg.truncation.dims[0], cfg.truncation.dims[1]});
        const FramePath path = semiclassical_path(d, cfg.t_end);
        const Trajectory tr = evolve_moving_frame(d, layout, DensityMatrix::fock(layout, {0, 0}), path, times,
                                                  cfg.hamiltonian, BathModel::Squeezed);
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            const auto& r = tr.records[k];
            const double n = r.at("n_s").real();
            const cplx as2 = r.at("as2"), b = r.at("b");
            const FluxBreakdown f = lab_frame_breakdown(std::max(n, 0.0), as2, report_r(cfg, d), d.kappa);
            t.rows.push_back({tr.times[k], d.F, n, as2.real(), as2.imag(), b.real(), b.imag(), f.phi_out});
        }
    }
    return t;
}

Table run_fidelity(const RunConfig& cfg) {
    Table t{{"t", "fidelity", "n_s", "n_b"}, {}};
    SystemParams p = point_params(cfg, cfg.sweep.grid.front());
    p.F = 0.0;
    const SpaceLayout layout({cfg.truncation.dims[0], cfg.truncation.dims[1]});
    const Trajectory tr = conversion_fidelity(p, time_grid(cfg), layout);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const auto& r = tr.records[k];
        t.rows.push_back({tr.times[k], r.at("fidelity").real(), r.at("n_s").real(), r.at("n_b").real()});
    }
    return t;
}

bool ValidationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

ValidationReport validate(double s) {
    ValidationReport rep;
    auto add = [&](const std::string& name, double measured, double tol) {
        rep.checks.push_back({name, measured, tol * s, measured <= tol * s});
    };
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

    SystemParams base;  // resonant reference point: g0 = 10, kappa = 500, sinh^2 r = 0.5
    auto at_F = [&](double F) {
        SystemParams p = base;
        p.F = F;
        return derive(p);
    };

    {
        const DerivedParams d = at_F(2.0);
        const WeakDriveSolution w = solve_weak(d, 0.0);
        QuantumOptions o;
        o.dims = {4, 6};
        const QuantumResult q = solve_quantum(d, o);
        add("weakdrive vs quantum n_s rel. error (F=2)", rel(q.best().n_s, w.n_s), 0.05);
        add("weakdrive vs quantum Re<a_s^2> rel. error (F=2)", rel(q.best().as2.real(), w.as2.real()), 0.05);
        add("quantum truncation drift (F=2)", q.drift, 0.01);
    }
    {
        double worst = 0.0;
        for (double F : {1.0, 2.0, 5.0}) {
            const DerivedParams d = at_F(F);
            worst = std::max(worst, closed_set_residual(solve_weak(d, 0.0), d, 0.0));
        }
        add("weakdrive closed-set residual", worst, 1e-10);
    }
    {
        const DerivedParams d = at_F(0.05);
        const Branch b = principal_branch(d);
        add("semiclassical weak-drive limit n_s rel. error (F=0.05)", rel(b.state.n_s, limits(d, Limit::WeakDrive).state.n_s), 1e-3);
        const DerivedParams ds = at_F(1e5);
        const Branch bs = principal_branch(ds);
        add("semiclassical strong-drive limit n_s rel. error (F=1e5)", rel(bs.state.n_s, limits(ds, Limit::StrongDrive).state.n_s), 1e-2);
    }
    {
        double worst = 0.0;
        for (int k = 0; k <= 40; ++k) {
            const double r = 0.05 * k;
            const BathCoefficients c = bath_noise_NM(r, r, std::numbers::pi);
            worst = std::max({worst, std::abs(c.N), std::abs(c.M)});
        }
        add("bath N, M cancellation at r_e = r, theta_e = pi", worst, 1e-14);
    }
    {
        // The truncated exponential is accurate only well below the cutoff.
        const double r = 0.66;
        const int dim = 120, keep = 20;
        const OperatorMatrix S = squeeze_unitary(dim, r);
        const OperatorMatrix a = annihilation(dim);
        const DenseMat lhs = DenseMat(S.matrix() * a.matrix() * S.adjoint().matrix());
        const DenseMat rhs = DenseMat(std::cosh(r) * a.matrix() + std::sinh(r) * a.adjoint().matrix());
        add("Bogoliubov transform S a S^dag, r=0.66, lowest 20 of 120 levels",
            (lhs - rhs).topLeftCorner(keep, keep).cwiseAbs().maxCoeff(), 1e-6);
    }
    return rep;
}

void print_report(std::ostream& out, const ValidationReport& r) {
    for (const auto& c : r.checks) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e (tol %.1e)", c.measured, c.tolerance);
        out << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": " << buf << '\n';
    }
    out << (r.all_pass() ? "all checks passed" : "some checks failed") << '\n';
}

int run(const RunConfig& cfg, bool all_branches, std::ostream& log) {
    cfg.validate();
    std::vector<EngineKind> engines;
    if (cfg.engine == EngineKind::All)
        engines = {EngineKind::Quantum, EngineKind::WeakDrive, EngineKind::Semiclassical};
    else
        engines = {cfg.engine};

    int failures = 0;
    for (EngineKind e : engines) {
        const SweepOutput sweep = run_sweep(cfg, e, all_branches);
        for (const auto& row : sweep.rows)
            if (row.failed())
                log << "point " << to_string(cfg.sweep.variable) << "=" << num(row.sweep_value) << " ("
                    << to_string(e) << "): " << row.error << '\n';
        failures += sweep.failures;

        std::string path = cfg.output;
        if (!path.empty() && engines.size() > 1) {
            const auto dot = path.rfind('.');
            const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
            const std::string ext = dot == std::string::npos ? ".csv" : path.substr(dot);
            path = stem + "_" + to_string(e) + ext;
        }
        if (path.empty()) {
            write_sweep_csv(std::cout, cfg, sweep);
        } else {
            std::ofstream f(path);
            if (!f) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
            write_sweep_csv(f, cfg, sweep);
            log << "wrote " << path << " (" << sweep.rows.size() << " rows)\n";
        }
    }
    return failures == 0 ? 0 : 3;
}

}  // namespace dce
