#pragma once

// Sweep orchestration over the three engines and CSV emission.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dce/config.hpp"
#include "dce/observables.hpp"

namespace dce {

/// One CSV row. A failed point keeps its coordinates and carries `error`.
struct PointResult {
    double sweep_value = 0.0;
    double delta_s = 0.0;
    double F = 0.0;
    double n_s = 0.0;
    cplx as2 = 0.0;
    FluxBreakdown flux{};
    Snr snr{};
    std::optional<double> g2;
    cplx beta = 0.0;
    std::optional<bool> stable;
    EngineKind engine = EngineKind::Quantum;
    bool converged = true;
    int branch = -1;  // root index for all-branch output
    std::string error;

    bool failed() const { return !error.empty(); }
};

struct SweepOutput {
    EngineKind engine = EngineKind::Quantum;
    bool all_branches = false;
    std::vector<PointResult> rows;  // grid order
    int failures = 0;
};

/// Solves every grid point with `engine` (not All) on cfg.jobs workers.
/// With `all_branches` the semiclassical engine emits one row per root.
SweepOutput run_sweep(const RunConfig& cfg, EngineKind engine, bool all_branches = false);

/// Rows for a single sweep value; errors are captured in the rows.
std::vector<PointResult> run_point(const RunConfig& cfg, double x, EngineKind engine, bool all_branches = false);

/// Header: delta_s,F,n_s,re_as2,im_as2,phi_bgn,phi_dce,phi_out,snr,g2,beta_re,
/// beta_im,stable,engine,converged; then the sweep variable when it is not
/// Delta_s or F, "branch" for all-branch output, and photons/s columns when
/// kappa_hz is set.
void write_sweep_csv(std::ostream& out, const RunConfig& cfg, const SweepOutput& sweep);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
void write_table_csv(std::ostream& out, const Table& t);

/// Master-equation trajectories from |0_s, 0> for every F in the sweep grid,
/// in a frame following the mean-field mechanical amplitude.
Table run_timeevo(const RunConfig& cfg);
/// Conversion fidelity |0_s,1> -> |2_s,0> at the first grid point.
Table run_fidelity(const RunConfig& cfg);

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};
struct ValidationReport {
    std::vector<Check> checks;
    bool all_pass() const;
};

/// Cross-engine oracle suite. Tolerances are multiplied by `tolerance_scale`.
ValidationReport validate(double tolerance_scale = 1.0);
void print_report(std::ostream& out, const ValidationReport& r);

/// Runs a sweep subcommand and writes one CSV per engine. Returns 0 when
/// every point succeeded and 3 when some points failed.
int run(const RunConfig& cfg, bool all_branches, std::ostream& log);

}  // namespace dce
