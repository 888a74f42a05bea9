#pragma once

// Run configuration: flat key=value files with [section] headers, named
// presets, and the mapping from a sweep value to a full parameter set.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dce/lindblad.hpp"
#include "dce/model.hpp"

namespace dce {

enum class EngineKind { Quantum, WeakDrive, Semiclassical, All };
enum class SweepVariable { Delta_s, F, theta_e, r_e, Omega_over_Delta };

/// How the frequencies follow the sweep. The first three are the resonance
/// families; Detuned holds Delta_m fixed and moves omega_s with Delta_s.
enum class ResonanceMode { OmegaMEqOmegaD, OmegaMEq2OmegaS, FullResonance, Detuned };

const char* to_string(EngineKind e);
const char* to_string(SweepVariable v);
const char* to_string(ResonanceMode m);
EngineKind parse_engine(const std::string& s);
SweepVariable parse_sweep_variable(const std::string& s);
ResonanceMode parse_resonance_mode(const std::string& s);

struct SweepSpec {
    SweepVariable variable = SweepVariable::F;
    std::vector<double> grid{15.0};
    ResonanceMode mode = ResonanceMode::FullResonance;
};

struct Truncation {
    std::array<int, 2> dims{6, 8};
    bool doubling = true;
    double drift_tol = 0.01;
};

struct RunConfig {
    std::string name = "custom";
    SystemParams params{};
    double sinh2_r = 0.5;   // squeezing held fixed along the sweep
    double delta_s = 0.0;   // used when Delta_s is not the sweep variable
    double delta_m = 0.0;   // Detuned mode only
    EngineKind engine = EngineKind::Quantum;
    HamiltonianKind hamiltonian = HamiltonianKind::Eff;
    Truncation truncation{};
    SweepSpec sweep{};
    std::string output;               // empty: standard output
    std::optional<double> kappa_hz;   // kappa / 2 pi in Hz, enables photons/s columns
    // time-domain subcommands
    double t_end = 5.0;
    int samples = 101;
    int jobs = 1;

    /// Throws Error(Config) on an invalid combination.
    void validate() const;
};

/// Parses "a,b,c" or "lo..hi:n" (n evenly spaced points, endpoints included).
std::vector<double> parse_grid(const std::string& text);
std::array<int, 2> parse_dims(const std::string& text);

/// Reads a config; errors carry "<source>:<line>: " prefixes.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Applies one key (e.g. "params.kappa" or "kappa") to `cfg`.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Physical parameters at sweep value `x`.
SystemParams point_params(const RunConfig& cfg, double x);

}  // namespace dce
