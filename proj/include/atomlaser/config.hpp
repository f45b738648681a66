#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "atomlaser/gpe.hpp"
#include "atomlaser/params.hpp"

namespace atomlaser {

enum class RunMode { Analytic3D, Analytic1D, Gpe1D, Compare, Sweep, Chirp };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

struct SweepSpec {
    std::string parameter;           // section.key of the swept field
    std::vector<std::string> values; // quantity strings, units included
    std::string base_mode;           // mode each sweep point runs in
};

// Numeric-solver settings resolved from the [solver] section. Zeros mean
// "derive from the physics at run time" (grid from the TF radius, dt from
// mu(0), absorber from the output energy).
struct SolverSettings {
    int n_points = 4096;
    double domain_half_width = 0.0; // m; 0 = 8x TF radius
    double dt = 0.0;                // s; 0 = 0.05 hbar/mu(0)
    double t_max = 0.0;             // s; required for gpe modes
    int n_components = 2;
    bool absorber_on = true;
    double absorber_width = 0.0;    // m; 0 = span/16
    double absorber_strength = 0.0; // J; 0 = 0.3 (mu(0) - hbar Delta0)
    double detector_x = 0.0;        // m; 0 = midway condensate edge -> absorber
    GroundStateMethod ground_state = GroundStateMethod::ImaginaryTime;
    int gs_refine = 3;              // imaginary-time dtau halvings
    long record_every = 0;          // 0 = aim for ~2000 recorded rows
    std::vector<double> snapshot_times;
    bool dump_psi = false;
};

struct ExperimentConfig {
    PhysicalParams phys;
    TrapCoupling trap;
    RunMode mode = RunMode::Analytic3D;
    double n_atoms = 0.0;
    double u1 = 0.0;          // J m; 0 = matched to the 3D mu(N0)
    double t_max = 0.0;       // analytic grid; 0 = model default
    double dt = 0.0;
    long record_every = 1;    // analytic series thinning
    SolverSettings solver;
    SweepSpec sweep;
    std::string out_dir;      // empty = derived from config name + mode

    // Every key after defaults were applied, section.key -> value string;
    // written verbatim into the run manifest.
    std::map<std::string, std::string> resolved;
};

// Loads and validates a config. `.json` paths are treated as run manifests
// and rebuilt from their embedded resolved config. Parse errors carry the
// line number, validation errors the field name.
ExperimentConfig load_config(const std::filesystem::path& path);

// Builds a config from already-resolved key/value pairs (manifest reruns,
// sweep overrides).
ExperimentConfig config_from_map(std::map<std::string, std::string> kv);

// Built-in preset name -> config text (also shipped under presets/).
const std::map<std::string, std::string>& builtin_presets();
ExperimentConfig load_preset(const std::string& name);

} // namespace atomlaser
