// Command-line front end: sweeps, time evolution and the validation suite.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dce/config.hpp"
#include "dce/errors.hpp"
#include "dce/runner.hpp"

namespace {

struct Common {
    std::string config, preset, out, engine, dims, sweep;
    int jobs = 0;
    double kappa = -1.0, F = -1.0, kappa_hz = -1.0;
    bool no_doubling = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "key=value config file");
    sub->add_option("--preset", c.preset, "named parameter set (see 'presets')");
    sub->add_option("--out", c.out, "output CSV (default: stdout)");
    sub->add_option("--engine", c.engine, "quantum | weakdrive | semiclassical | all");
    sub->add_option("--dims", c.dims, "displaced-frame truncation '<cavity>,<mechanics>'");
    sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--kappa", c.kappa, "cavity loss rate in gamma_m units");
    sub->add_option("--F", c.F, "mechanical drive in gamma_m units");
    sub->add_option("--kappa-hz", c.kappa_hz, "kappa / 2 pi in Hz; adds photons/s columns");
    sub->add_option("--sweep", c.sweep, "'<variable> <grid>', grid as 'lo..hi:n' or 'a,b,c'");
    sub->add_option("--set", c.sets, "extra key=value overrides")->take_all();
    sub->add_flag("--no-doubling", c.no_doubling, "skip the truncation-doubling check");
}

dce::RunConfig build_config(const Common& c, const std::string& default_preset, dce::EngineKind default_engine) {
    if (!c.config.empty() && !c.preset.empty()) throw dce::Error(dce::ErrorKind::Config, "use either --config or --preset");
    dce::RunConfig cfg;
    if (!c.config.empty()) {
        cfg = dce::load_config(c.config);
    } else {
        cfg = dce::preset(c.preset.empty() ? default_preset : c.preset);
        if (c.engine.empty() && c.preset.empty()) cfg.engine = default_engine;
    }
    if (!c.engine.empty()) cfg.engine = dce::parse_engine(c.engine);
    if (!c.dims.empty()) cfg.truncation.dims = dce::parse_dims(c.dims);
    if (c.jobs > 0) cfg.jobs = c.jobs;
    if (c.kappa >= 0.0) cfg.params.kappa = c.kappa;
    if (c.F >= 0.0) {
        cfg.params.F = c.F;
        if (cfg.sweep.variable == dce::SweepVariable::F) cfg.sweep.grid = {c.F};
    }
    if (c.kappa_hz > 0.0) cfg.kappa_hz = c.kappa_hz;
    if (c.no_doubling) cfg.truncation.doubling = false;
    if (!c.sweep.empty()) {
        const auto sp = c.sweep.find(' ');
        if (sp == std::string::npos) throw dce::Error(dce::ErrorKind::Config, "--sweep needs '<variable> <grid>'");
        cfg.sweep.variable = dce::parse_sweep_variable(c.sweep.substr(0, sp));
        cfg.sweep.grid = dce::parse_grid(c.sweep.substr(sp + 1));
    }
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw dce::Error(dce::ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
        dce::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.out.empty()) cfg.output = c.out;
    cfg.validate();
    return cfg;
}

void emit_table(const dce::RunConfig& cfg, const dce::Table& t) {
    if (cfg.output.empty()) {
        dce::write_table_csv(std::cout, t);
        return;
    }
    std::ofstream f(cfg.output);
    if (!f) throw dce::Error(dce::ErrorKind::Config, "cannot write '" + cfg.output + "'");
    dce::write_table_csv(f, t);
    std::cerr << "wrote " << cfg.output << " (" << t.rows.size() << " rows)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Squeezed-frame dynamical Casimir effect simulator"};
    app.require_subcommand(1);

    struct SweepCommand {
        const char* name;
        const char* help;
        const char* preset;
        dce::EngineKind engine;
        bool all_branches;
    };
    const std::vector<SweepCommand> sweeps = {
        {"spectrum", "photon number and flux versus Delta_s", "fig2a", dce::EngineKind::Quantum, false},
        {"flux", "output flux versus the drive", "fig3a", dce::EngineKind::Quantum, false},
        {"snr", "signal-to-noise ratio versus the drive", "fig3a", dce::EngineKind::Quantum, false},
        {"g2", "equal-time correlation versus the drive", "fig3b", dce::EngineKind::Quantum, false},
        {"semiclassical", "mean-field principal branch", "figC4a", dce::EngineKind::Semiclassical, false},
        {"stability", "all mean-field roots with stability flags", "figA9", dce::EngineKind::Semiclassical, true},
    };
    std::map<std::string, Common> opts;
    std::map<std::string, CLI::App*> subs;
    for (const auto& s : sweeps) {
        subs[s.name] = app.add_subcommand(s.name, s.help);
        add_common(subs[s.name], opts[s.name]);
    }
    subs["timeevo"] = app.add_subcommand("timeevo", "master-equation trajectories from vacuum");
    add_common(subs["timeevo"], opts["timeevo"]);
    subs["fidelity"] = app.add_subcommand("fidelity", "phonon to photon-pair conversion fidelity");
    add_common(subs["fidelity"], opts["fidelity"]);

    double tol_scale = 1.0;
    auto* val = app.add_subcommand("validate", "cross-engine oracle suite");
    val->add_option("--tol-scale", tol_scale, "multiply every tolerance");
    app.add_subcommand("presets", "list preset names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("presets")) {
            for (const auto& n : dce::preset_names()) std::cout << n << '\n';
            return 0;
        }
        if (app.got_subcommand("validate")) {
            const dce::ValidationReport r = dce::validate(tol_scale);
            dce::print_report(std::cout, r);
            return r.all_pass() ? 0 : 1;
        }
        if (app.got_subcommand("timeevo")) {
            dce::RunConfig cfg = build_config(opts["timeevo"], "figA3", dce::EngineKind::Quantum);
            emit_table(cfg, dce::run_timeevo(cfg));
            return 0;
        }
        if (app.got_subcommand("fidelity")) {
            dce::RunConfig cfg = build_config(opts["fidelity"], "figA2b", dce::EngineKind::Quantum);
            emit_table(cfg, dce::run_fidelity(cfg));
            return 0;
        }
        for (const auto& s : sweeps) {
            if (!app.got_subcommand(s.name)) continue;
            const dce::RunConfig cfg = build_config(opts[s.name], s.preset, s.engine);
            return dce::run(cfg, s.all_branches, std::cerr);
        }
    } catch (const dce::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
