#include "dce/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dce/errors.hpp"

namespace dce {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(v.substr(used)).size() != 0)
        throw Error(ErrorKind::Config, "field '" + key + "': expected a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw Error(ErrorKind::Config, "field '" + key + "': expected an integer");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string s = lower(v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw Error(ErrorKind::Config, "field '" + key + "': expected a boolean, got '" + v + "'");
}

HamiltonianKind parse_hamiltonian(const std::string& s) {
    const std::string v = lower(s);
    if (v == "eff") return HamiltonianKind::Eff;
    if (v == "eff_tilde") return HamiltonianKind::EffTilde;
    if (v == "eff_ta" || v == "eff+ta") return HamiltonianKind::EffPlusTA;
    throw Error(ErrorKind::Config, "unknown hamiltonian '" + s + "' (eff, eff_tilde, eff_ta)");
}

// Strips an optional "section." prefix so both "[params] kappa" and
// "params.kappa" reach the same setter.
std::string base_key(const std::string& key) {
    static const char* sections[] = {"params.", "engine.", "truncation.", "sweep.", "output.", "physical.", "time."};
    for (const char* s : sections) {
        const std::string p(s);
        if (key.rfind(p, 0) == 0) return key.substr(p.size());
    }
    return key;
}

}  // namespace

const char* to_string(EngineKind e) {
    switch (e) {
        case EngineKind::Quantum: return "quantum";
        case EngineKind::WeakDrive: return "weakdrive";
        case EngineKind::Semiclassical: return "semiclassical";
        case EngineKind::All: return "all";
    }
    return "?";
}

const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::Delta_s: return "Delta_s";
        case SweepVariable::F: return "F";
        case SweepVariable::theta_e: return "theta_e";
        case SweepVariable::r_e: return "r_e";
        case SweepVariable::Omega_over_Delta: return "Omega_over_Delta";
    }
    return "?";
}

const char* to_string(ResonanceMode m) {
    switch (m) {
        case ResonanceMode::OmegaMEqOmegaD: return "omega_m_eq_omega_d";
        case ResonanceMode::OmegaMEq2OmegaS: return "omega_m_eq_2omega_s";
        case ResonanceMode::FullResonance: return "full_resonance";
        case ResonanceMode::Detuned: return "detuned";
    }
    return "?";
}

EngineKind parse_engine(const std::string& s) {
    const std::string v = lower(s);
    for (EngineKind e : {EngineKind::Quantum, EngineKind::WeakDrive, EngineKind::Semiclassical, EngineKind::All})
        if (v == to_string(e)) return e;
    throw Error(ErrorKind::Config, "unknown engine '" + s + "' (quantum, weakdrive, semiclassical, all)");
}

SweepVariable parse_sweep_variable(const std::string& s) {
    for (SweepVariable v : {SweepVariable::Delta_s, SweepVariable::F, SweepVariable::theta_e, SweepVariable::r_e,
                            SweepVariable::Omega_over_Delta})
        if (s == to_string(v)) return v;
    throw Error(ErrorKind::Config, "unknown sweep variable '" + s + "' (Delta_s, F, theta_e, r_e, Omega_over_Delta)");
}

ResonanceMode parse_resonance_mode(const std::string& s) {
    for (ResonanceMode m : {ResonanceMode::OmegaMEqOmegaD, ResonanceMode::OmegaMEq2OmegaS,
                            ResonanceMode::FullResonance, ResonanceMode::Detuned})
        if (lower(s) == to_string(m)) return m;
    throw Error(ErrorKind::Config, "unknown resonance mode '" + s + "'");
}

std::vector<double> parse_grid(const std::string& text) {
    const std::string t = trim(text);
    std::vector<double> g;
    const auto dots = t.find("..");
    if (dots != std::string::npos) {
        const auto colon = t.find(':', dots);
        const double lo = to_double("grid", t.substr(0, dots));
        const double hi = to_double("grid", t.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
        const int n = colon == std::string::npos ? 41 : to_int("grid", t.substr(colon + 1));
        if (n < 1) throw Error(ErrorKind::Config, "grid needs at least one point");
        if (n == 1) return {lo};
        for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
        return g;
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) g.push_back(to_double("grid", trim(item)));
    return g;
}

std::array<int, 2> parse_dims(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Config, "dims must be '<cavity>,<mechanics>'");
    return {to_int("dims", trim(text.substr(0, comma))), to_int("dims", trim(text.substr(comma + 1)))};
}

void set_config_value(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
    const std::string key = base_key(trim(raw_key));
    const std::string v = trim(value);
    SystemParams& p = cfg.params;
    if (key == "name") cfg.name = v;
    else if (key == "gamma_m") p.gamma_m = to_double(key, v);
    else if (key == "kappa") p.kappa = to_double(key, v);
    else if (key == "g0") p.g0 = to_double(key, v);
    else if (key == "F") p.F = to_double(key, v);
    else if (key == "omega_m") p.omega_m = to_double(key, v);
    else if (key == "n_th") p.n_th = to_double(key, v);
    else if (key == "sinh2_r") cfg.sinh2_r = to_double(key, v);
    else if (key == "r_e") {
        p.r_e = to_double(key, v);
        p.bath_matched = false;
    } else if (key == "theta_e") p.theta_e = to_double(key, v);
    else if (key == "theta_e_over_pi") p.theta_e = to_double(key, v) * std::numbers::pi;
    else if (key == "bath_matched") p.bath_matched = to_bool(key, v);
    else if (key == "delta_s") cfg.delta_s = to_double(key, v);
    else if (key == "delta_m") cfg.delta_m = to_double(key, v);
    else if (key == "engine") cfg.engine = parse_engine(v);
    else if (key == "hamiltonian") cfg.hamiltonian = parse_hamiltonian(v);
    else if (key == "dims") cfg.truncation.dims = parse_dims(v);
    else if (key == "doubling") cfg.truncation.doubling = to_bool(key, v);
    else if (key == "drift_tol") cfg.truncation.drift_tol = to_double(key, v);
    else if (key == "variable") cfg.sweep.variable = parse_sweep_variable(v);
    else if (key == "grid") cfg.sweep.grid = parse_grid(v);
    else if (key == "mode") cfg.sweep.mode = parse_resonance_mode(v);
    else if (key == "path") cfg.output = v;
    else if (key == "kappa_hz") cfg.kappa_hz = to_double(key, v);
    else if (key == "t_end") cfg.t_end = to_double(key, v);
    else if (key == "samples") cfg.samples = to_int(key, v);
    else if (key == "jobs") cfg.jobs = to_int(key, v);
    else throw Error(ErrorKind::Config, "unknown field '" + raw_key + "'");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (body.front() == '[') {
            if (body.back() != ']') throw Error(ErrorKind::Config, where + "unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Config, where + "expected key = value");
        std::string key = trim(body.substr(0, eq));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        try {
            if (key == "preset" || key.ends_with(".preset")) {
                const std::string out = cfg.output;
                cfg = preset(trim(body.substr(eq + 1)));
                if (!out.empty()) cfg.output = out;
            } else {
                set_config_value(cfg, key, body.substr(eq + 1));
            }
        } catch (const Error& e) {
            throw Error(ErrorKind::Config, where + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, source + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config '" + path + "'");
    return parse_config(in, path);
}

void RunConfig::validate() const {
    if (sweep.grid.empty()) throw Error(ErrorKind::Config, "sweep grid is empty");
    for (double x : sweep.grid)
        if (!std::isfinite(x)) throw Error(ErrorKind::Config, "sweep grid has a non-finite value");
    if (sweep.grid.size() > 1) {
        const bool up = sweep.grid[1] > sweep.grid[0];
        for (std::size_t k = 1; k < sweep.grid.size(); ++k)
            if (up ? !(sweep.grid[k] > sweep.grid[k - 1]) : !(sweep.grid[k] < sweep.grid[k - 1]))
                throw Error(ErrorKind::Config, "sweep grid must be strictly monotone");
    }
    if (truncation.dims[0] < 2 || truncation.dims[1] < 2)
        throw Error(ErrorKind::Config, "dims must be >= 2 per mode");
    if (!(truncation.drift_tol >= 0.0)) throw Error(ErrorKind::Config, "drift_tol must be >= 0");
    if (!(sinh2_r >= 0.0)) throw Error(ErrorKind::Config, "sinh2_r must be >= 0");
    if (!(params.omega_m > 0.0)) throw Error(ErrorKind::Config, "omega_m must be > 0");
    if (jobs < 1) throw Error(ErrorKind::Config, "jobs must be >= 1");
    if (samples < 2 || !(t_end > 0.0)) throw Error(ErrorKind::Config, "time grid needs samples >= 2 and t_end > 0");
    if (kappa_hz && !(*kappa_hz > 0.0)) throw Error(ErrorKind::Config, "kappa_hz must be > 0");
    if (sweep.variable == SweepVariable::Omega_over_Delta)
        for (double x : sweep.grid)
            if (!(x >= 0.0 && x < 1.0)) throw Error(ErrorKind::Config, "Omega_over_Delta must lie in [0, 1)");
}

SystemParams point_params(const RunConfig& cfg, double x) {
    SystemParams p = cfg.params;
    double s2 = cfg.sinh2_r, ds = cfg.delta_s;
    double r = std::asinh(std::sqrt(std::max(s2, 0.0)));
    switch (cfg.sweep.variable) {
        case SweepVariable::Delta_s: ds = x; break;
        case SweepVariable::F: p.F = x; break;
        case SweepVariable::theta_e: p.theta_e = x; break;
        case SweepVariable::r_e:
            p.r_e = x;
            p.bath_matched = false;
            break;
        case SweepVariable::Omega_over_Delta: r = 0.25 * std::log((1.0 + x) / (1.0 - x)); break;
    }

    // Keep r fixed and place omega_s where the resonance family wants it;
    // then Delta = omega_s cosh 2r and Omega = omega_s sinh 2r.
    double omega_s = 0.0;
    switch (cfg.sweep.mode) {
        case ResonanceMode::FullResonance:
            p.omega_d = p.omega_m;
            omega_s = p.omega_m / 2.0 + ds;
            break;
        case ResonanceMode::OmegaMEqOmegaD:
            p.omega_d = p.omega_m;
            omega_s = p.omega_d / 2.0 + ds;
            break;
        case ResonanceMode::OmegaMEq2OmegaS:
            omega_s = p.omega_m / 2.0;
            p.omega_d = 2.0 * (omega_s - ds);
            break;
        case ResonanceMode::Detuned:
            p.omega_d = p.omega_m - cfg.delta_m;
            omega_s = p.omega_d / 2.0 + ds;
            break;
    }
    if (!(omega_s > 0.0)) throw Error(ErrorKind::Precondition, "sweep point puts omega_s <= 0");
    p.Delta = omega_s * std::cosh(2.0 * r);
    p.squeeze = SqueezeInput::omega(omega_s * std::sinh(2.0 * r));
    return p;
}

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "figA1a", "figA1b", "figA2b", "figA3",
            "figA5",  "figA6", "figB1", "figB2", "figB3", "figC1", "figC2", "figC3a", "figC3b",
            "figC4a", "figC4b", "figA9", "simplified"};
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.name = name;
    auto spectrum = [&c](ResonanceMode mode, double F, const std::string& grid) {
        c.params.F = F;
        c.sweep = {SweepVariable::Delta_s, parse_grid(grid), mode};
    };
    auto drive = [&c](const std::string& grid) { c.sweep = {SweepVariable::F, parse_grid(grid), ResonanceMode::FullResonance}; };

    if (name == "fig2a" || name == "fig2c") spectrum(ResonanceMode::OmegaMEqOmegaD, 15.0, "-100..100:41");
    else if (name == "fig2b" || name == "fig2d") spectrum(ResonanceMode::OmegaMEq2OmegaS, 15.0, "-100..100:41");
    else if (name == "fig3a" || name == "fig3b") drive("0..40:41");
    else if (name == "figA1a") {
        // r_e swept around r at theta_e = 1.1 pi
        const double r = std::asinh(std::sqrt(c.sinh2_r));
        c.params.theta_e = 1.1 * std::numbers::pi;
        c.sweep = {SweepVariable::r_e, parse_grid(std::to_string(r - 0.1) + ".." + std::to_string(r + 0.1) + ":21"),
                   ResonanceMode::FullResonance};
    } else if (name == "figA1b") {
        c.params.r_e = 1.1 * std::asinh(std::sqrt(c.sinh2_r));
        c.params.bath_matched = false;
        c.sweep = {SweepVariable::theta_e, parse_grid(std::to_string(0.9 * std::numbers::pi) + ".." +
                                                      std::to_string(1.1 * std::numbers::pi) + ":21"),
                   ResonanceMode::FullResonance};
    } else if (name == "figA2b") {
        c.params.g0 = 80.0;
        c.params.omega_m = 1e3 * 80.0;
        c.params.kappa = 10.0;
        c.params.F = 0.0;
        c.truncation.dims = {5, 3};
        c.t_end = 0.1;
        c.samples = 401;
        drive("0");
    } else if (name == "figA3") {
        c.t_end = 8.0;
        c.samples = 161;
        drive("10,15,20");
    } else if (name == "figA5") {
        c.hamiltonian = HamiltonianKind::EffPlusTA;
        drive("10,15,20");
    } else if (name == "figA6") {
        c.delta_m = 0.2;
        c.sweep = {SweepVariable::Delta_s, parse_grid("-100..100:41"), ResonanceMode::Detuned};
    } else if (name == "figB1" || name == "figB2" || name == "figB3") {
        c.engine = EngineKind::All;
        drive("1..30:30");
    } else if (name == "figC1") spectrum(ResonanceMode::OmegaMEqOmegaD, 50.0, "-100..100:81");
    else if (name == "figC2") spectrum(ResonanceMode::OmegaMEq2OmegaS, 50.0, "-100..100:81");
    else if (name == "figC3a") {
        c.engine = EngineKind::Semiclassical;
        spectrum(ResonanceMode::OmegaMEqOmegaD, 50.0, "-100..100:81");
    } else if (name == "figC3b") {
        c.engine = EngineKind::Semiclassical;
        spectrum(ResonanceMode::OmegaMEq2OmegaS, 50.0, "-100..100:81");
    } else if (name == "figC4a" || name == "figC4b") {
        c.engine = EngineKind::Semiclassical;
        drive("1..500:100");
    } else if (name == "figA9") {
        c.engine = EngineKind::Semiclassical;
        c.params.kappa = 20.0;
        spectrum(ResonanceMode::OmegaMEq2OmegaS, 50.0, "-60..60:121");
    } else if (name == "simplified") {
        c.hamiltonian = HamiltonianKind::EffTilde;
        c.sweep = {SweepVariable::Omega_over_Delta, {0.1}, ResonanceMode::FullResonance};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += " " + n;
        throw Error(ErrorKind::Config, "unknown preset '" + name + "'; known:" + known);
    }
    c.validate();
    return c;
}

}  // namespace dce
