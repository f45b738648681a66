#include "atomlaser/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "atomlaser/errors.hpp"
#include "presets_data.hpp"

namespace atomlaser {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// The full key vocabulary; anything else is rejected.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "species.mass",
        "species.scattering_length",
        "trap.frequency",
        "coupling.detuning0",
        "coupling.rf_frequency",
        "coupling.potential_offset",
        "coupling.rabi",
        "coupling.b_field",
        "coupling.g_factor",
        "condensate.n_atoms",
        "condensate.u1",
        "run.mode",
        "run.t_max",
        "run.dt",
        "run.record_every",
        "run.out_dir",
        "solver.n_points",
        "solver.domain_half_width",
        "solver.dt",
        "solver.t_max",
        "solver.components",
        "solver.absorber",
        "solver.absorber_width",
        "solver.absorber_strength",
        "solver.detector_x",
        "solver.ground_state",
        "solver.gs_refine",
        "solver.record_every",
        "solver.snapshot_times",
        "solver.dump_psi",
        "sweep.parameter",
        "sweep.values",
        "sweep.base_mode",
    };
    return keys;
}

std::map<std::string, std::string> parse_ini(std::istream& in, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        std::string key = lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key or value");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key outside of any [section]");
        std::string full = section + "." + key;
        if (!known_keys().count(full))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + full +
                              "'");
        if (kv.count(full))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                              full + "'");
        kv[full] = value;
    }
    return kv;
}

struct NumberUnit {
    double value = 0.0;
    std::string unit;
};

NumberUnit split_number_unit(const std::string& s, const std::string& field) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin)
        throw ConfigError("field '" + field + "': cannot parse a number from '" + s + "'");
    return {v, trim(std::string(end))};
}

double parse_plain(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    if (!nu.unit.empty())
        throw ConfigError("field '" + field + "': expected a plain number, got unit '" + nu.unit +
                          "'");
    return nu.value;
}

long parse_integer(const std::string& s, const std::string& field) {
    double v = parse_plain(s, field);
    long l = std::lround(v);
    if (std::fabs(v - double(l)) > 1e-9)
        throw ConfigError("field '" + field + "': expected an integer");
    return l;
}

// Angular frequencies demand an explicit unit: Hz multiplies by 2 pi,
// rad/s (or 1/s, s^-1) passes through.
double parse_angular_frequency(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    std::string u = nu.unit;
    if (u == "Hz" || u == "hz") return two_pi * nu.value;
    if (u == "rad/s" || u == "1/s" || u == "s^-1" || u == "s-1") return nu.value;
    throw ConfigError("field '" + field +
                      "': angular frequency needs an explicit unit, Hz or rad/s (got '" + u +
                      "')");
}

double parse_mass(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    if (nu.unit == "u") return nu.value * constants::atomic_mass_unit;
    if (nu.unit == "kg") return nu.value;
    throw ConfigError("field '" + field + "': mass needs unit u or kg (got '" + nu.unit + "')");
}

double parse_length(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    if (nu.unit == "a0") return nu.value * constants::bohr_radius;
    if (nu.unit == "m") return nu.value;
    if (nu.unit == "mm") return nu.value * 1e-3;
    if (nu.unit == "um") return nu.value * 1e-6;
    if (nu.unit == "nm") return nu.value * 1e-9;
    throw ConfigError("field '" + field + "': length needs unit a0, m, mm, um or nm (got '" +
                      nu.unit + "')");
}

double parse_time(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    if (nu.unit == "s") return nu.value;
    if (nu.unit == "ms") return nu.value * 1e-3;
    if (nu.unit == "us") return nu.value * 1e-6;
    if (nu.unit == "ns") return nu.value * 1e-9;
    throw ConfigError("field '" + field + "': time needs unit s, ms, us or ns (got '" + nu.unit +
                      "')");
}

double parse_energy(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    if (nu.unit == "J") return nu.value;
    throw ConfigError("field '" + field + "': energy needs unit J (got '" + nu.unit + "')");
}

double parse_b_field(const std::string& s, const std::string& field) {
    NumberUnit nu = split_number_unit(s, field);
    if (nu.unit == "T") return nu.value;
    if (nu.unit == "mG") return nu.value * 1e-7;
    if (nu.unit == "G") return nu.value * 1e-4;
    throw ConfigError("field '" + field + "': magnetic field needs unit T, G or mG (got '" +
                      nu.unit + "')");
}

bool parse_switch(const std::string& s, const std::string& field) {
    std::string v = lower(s);
    if (v == "on" || v == "true" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "no") return false;
    throw ConfigError("field '" + field + "': expected on/off");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Analytic3D: return "analytic-3d";
    case RunMode::Analytic1D: return "analytic-1d";
    case RunMode::Gpe1D: return "gpe-1d";
    case RunMode::Compare: return "compare";
    case RunMode::Sweep: return "sweep";
    case RunMode::Chirp: return "chirp";
    }
    return "?";
}

RunMode run_mode_from_string(const std::string& s) {
    std::string v = lower(trim(s));
    if (v == "analytic-3d") return RunMode::Analytic3D;
    if (v == "analytic-1d") return RunMode::Analytic1D;
    if (v == "gpe-1d") return RunMode::Gpe1D;
    if (v == "compare") return RunMode::Compare;
    if (v == "sweep") return RunMode::Sweep;
    if (v == "chirp") return RunMode::Chirp;
    throw ConfigError("field 'run.mode': unknown mode '" + s +
                      "' (analytic-3d, analytic-1d, gpe-1d, compare, sweep, chirp)");
}

ExperimentConfig config_from_map(std::map<std::string, std::string> kv) {
    // defaults
    auto put_default = [&kv](const char* key, const char* value) {
        if (!kv.count(key)) kv[key] = value;
    };
    put_default("species.mass", "23 u");
    put_default("species.scattering_length", "53 a0");

    std::vector<std::string> missing;
    auto require = [&](const char* key) {
        if (!kv.count(key)) missing.push_back(key);
    };
    require("trap.frequency");
    require("condensate.n_atoms");
    require("run.mode");
    if (!kv.count("coupling.detuning0") &&
        !(kv.count("coupling.rf_frequency") && kv.count("coupling.potential_offset")))
        missing.push_back("coupling.detuning0 (or coupling.rf_frequency + coupling.potential_offset)");
    if (!kv.count("coupling.rabi") &&
        !(kv.count("coupling.b_field") && kv.count("coupling.g_factor")))
        missing.push_back("coupling.rabi (or coupling.b_field + coupling.g_factor)");
    if (!missing.empty()) {
        std::string msg = "missing required fields:";
        for (const auto& m : missing)
            msg += " " + m + ";";
        msg.pop_back();
        throw ConfigError(msg);
    }

    ExperimentConfig cfg;
    cfg.mode = run_mode_from_string(kv.at("run.mode"));

    double mass = parse_mass(kv.at("species.mass"), "species.mass");
    double abar = parse_length(kv.at("species.scattering_length"), "species.scattering_length");
    try {
        cfg.phys = PhysicalParams::make(mass, abar);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("field 'species.*': ") + e.what());
    }

    double omega_T = parse_angular_frequency(kv.at("trap.frequency"), "trap.frequency");
    if (omega_T <= 0.0)
        throw ConfigError("field 'trap.frequency': must be positive");

    double rabi;
    if (kv.count("coupling.rabi")) {
        rabi = parse_angular_frequency(kv.at("coupling.rabi"), "coupling.rabi");
    } else {
        double b = parse_b_field(kv.at("coupling.b_field"), "coupling.b_field");
        double g = parse_plain(kv.at("coupling.g_factor"), "coupling.g_factor");
        rabi = g * constants::bohr_magneton * b / (std::sqrt(2.0) * constants::hbar);
    }
    if (rabi < 0.0)
        throw ConfigError("field 'coupling.rabi': must be >= 0");

    try {
        if (kv.count("coupling.detuning0")) {
            double d0 = parse_angular_frequency(kv.at("coupling.detuning0"), "coupling.detuning0");
            cfg.trap = TrapCoupling::make(omega_T, d0, rabi);
        } else {
            double rf = parse_angular_frequency(kv.at("coupling.rf_frequency"),
                                                "coupling.rf_frequency");
            double voff =
                parse_energy(kv.at("coupling.potential_offset"), "coupling.potential_offset");
            cfg.trap = TrapCoupling::from_rf(omega_T, rf, voff, rabi);
        }
        if (kv.count("coupling.b_field")) {
            cfg.trap.b_field_amp = parse_b_field(kv.at("coupling.b_field"), "coupling.b_field");
            if (kv.count("coupling.g_factor"))
                cfg.trap.g_factor = parse_plain(kv.at("coupling.g_factor"), "coupling.g_factor");
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("field 'trap/coupling': ") + e.what());
    }

    cfg.n_atoms = parse_plain(kv.at("condensate.n_atoms"), "condensate.n_atoms");
    if (cfg.n_atoms <= 0.0)
        throw ConfigError("field 'condensate.n_atoms': must be positive");

    if (kv.count("condensate.u1") && lower(kv.at("condensate.u1")) != "auto") {
        NumberUnit nu = split_number_unit(kv.at("condensate.u1"), "condensate.u1");
        std::string u = nu.unit;
        u.erase(std::remove_if(u.begin(), u.end(), [](unsigned char c) { return c == ' ' || c == '*'; }),
                u.end());
        if (u != "Jm")
            throw ConfigError("field 'condensate.u1': unit must be 'J m' or the value 'auto'");
        if (nu.value <= 0.0)
            throw ConfigError("field 'condensate.u1': must be positive");
        cfg.u1 = nu.value;
    } else {
        put_default("condensate.u1", "auto");
    }

    if (kv.count("run.t_max")) cfg.t_max = parse_time(kv.at("run.t_max"), "run.t_max");
    if (kv.count("run.dt")) cfg.dt = parse_time(kv.at("run.dt"), "run.dt");
    if (cfg.t_max < 0.0 || cfg.dt < 0.0)
        throw ConfigError("field 'run.t_max/run.dt': must be positive");
    if (kv.count("run.record_every")) {
        cfg.record_every = parse_integer(kv.at("run.record_every"), "run.record_every");
        if (cfg.record_every < 1)
            throw ConfigError("field 'run.record_every': must be >= 1");
    }
    if (kv.count("run.out_dir")) cfg.out_dir = kv.at("run.out_dir");

    // solver section
    SolverSettings& sv = cfg.solver;
    auto opt_auto = [&](const char* key) {
        return kv.count(key) && lower(kv.at(key)) != "auto";
    };
    if (opt_auto("solver.n_points")) {
        long n = parse_integer(kv.at("solver.n_points"), "solver.n_points");
        if (n < 8 || (n & (n - 1)) != 0)
            throw ConfigError("field 'solver.n_points': must be a power of two >= 8");
        sv.n_points = int(n);
    } else {
        put_default("solver.n_points", "4096");
    }
    if (opt_auto("solver.domain_half_width"))
        sv.domain_half_width =
            parse_length(kv.at("solver.domain_half_width"), "solver.domain_half_width");
    if (opt_auto("solver.dt")) sv.dt = parse_time(kv.at("solver.dt"), "solver.dt");
    if (kv.count("solver.t_max")) sv.t_max = parse_time(kv.at("solver.t_max"), "solver.t_max");
    if (opt_auto("solver.components")) {
        std::string c = lower(kv.at("solver.components"));
        if (c == "two" || c == "2")
            sv.n_components = 2;
        else if (c == "three" || c == "3")
            sv.n_components = 3;
        else
            throw ConfigError("field 'solver.components': expected two or three");
    }
    if (kv.count("solver.absorber"))
        sv.absorber_on = parse_switch(kv.at("solver.absorber"), "solver.absorber");
    if (opt_auto("solver.absorber_width"))
        sv.absorber_width = parse_length(kv.at("solver.absorber_width"), "solver.absorber_width");
    if (opt_auto("solver.absorber_strength"))
        sv.absorber_strength =
            parse_energy(kv.at("solver.absorber_strength"), "solver.absorber_strength");
    if (opt_auto("solver.detector_x"))
        sv.detector_x = parse_length(kv.at("solver.detector_x"), "solver.detector_x");
    if (kv.count("solver.ground_state")) {
        std::string g = lower(kv.at("solver.ground_state"));
        if (g == "tf-profile" || g == "tf")
            sv.ground_state = GroundStateMethod::TfProfile;
        else if (g == "imaginary-time")
            sv.ground_state = GroundStateMethod::ImaginaryTime;
        else
            throw ConfigError("field 'solver.ground_state': expected tf-profile or imaginary-time");
    }
    if (kv.count("solver.gs_refine")) {
        long r = parse_integer(kv.at("solver.gs_refine"), "solver.gs_refine");
        if (r < 0 || r > 10)
            throw ConfigError("field 'solver.gs_refine': expected 0..10");
        sv.gs_refine = int(r);
    }
    if (kv.count("solver.record_every")) {
        sv.record_every = parse_integer(kv.at("solver.record_every"), "solver.record_every");
        if (sv.record_every < 1)
            throw ConfigError("field 'solver.record_every': must be >= 1");
    }
    if (kv.count("solver.snapshot_times"))
        for (const auto& item : split_list(kv.at("solver.snapshot_times")))
            sv.snapshot_times.push_back(parse_time(item, "solver.snapshot_times"));
    if (kv.count("solver.dump_psi"))
        sv.dump_psi = parse_switch(kv.at("solver.dump_psi"), "solver.dump_psi");

    // sweep section
    if (cfg.mode == RunMode::Sweep) {
        for (const char* key : {"sweep.parameter", "sweep.values", "sweep.base_mode"})
            if (!kv.count(key))
                throw ConfigError(std::string("field '") + key + "': required in sweep mode");
        cfg.sweep.parameter = lower(trim(kv.at("sweep.parameter")));
        if (!known_keys().count(cfg.sweep.parameter) || cfg.sweep.parameter.starts_with("sweep.") ||
            cfg.sweep.parameter == "run.mode")
            throw ConfigError("field 'sweep.parameter': not a sweepable key");
        cfg.sweep.values = split_list(kv.at("sweep.values"));
        if (cfg.sweep.values.empty())
            throw ConfigError("field 'sweep.values': need at least one value");
        cfg.sweep.base_mode = lower(trim(kv.at("sweep.base_mode")));
        RunMode base = run_mode_from_string(cfg.sweep.base_mode);
        if (base == RunMode::Sweep)
            throw ConfigError("field 'sweep.base_mode': nested sweeps are not supported");
    }

    // mode-specific requirements
    bool needs_solver = cfg.mode == RunMode::Gpe1D || cfg.mode == RunMode::Compare ||
                        (cfg.mode == RunMode::Sweep &&
                         (cfg.sweep.base_mode == "gpe-1d" || cfg.sweep.base_mode == "compare"));
    if (needs_solver && !(sv.t_max > 0.0))
        throw ConfigError("field 'solver.t_max': required for gpe-1d and compare runs");

    cfg.resolved = std::move(kv);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file: " + path.string());
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("manifest " + path.string() + ": " + e.what());
        }
        if (!j.contains("config") || !j["config"].is_object())
            throw ConfigError("manifest " + path.string() + ": no 'config' object");
        std::map<std::string, std::string> kv;
        for (auto& [key, value] : j["config"].items()) {
            if (!known_keys().count(key))
                throw ConfigError("manifest " + path.string() + ": unknown key '" + key + "'");
            kv[key] = value.get<std::string>();
        }
        return config_from_map(std::move(kv));
    }
    auto kv = parse_ini(in, path.string());
    return config_from_map(std::move(kv));
}

const std::map<std::string, std::string>& builtin_presets() {
    static const std::map<std::string, std::string> presets = {
        {"fig1", detail::preset_fig1},
        {"fig2", detail::preset_fig2},
        {"compare_fast", detail::preset_compare_fast},
        {"compare_paper", detail::preset_compare_paper},
        {"fig2_chirp", detail::preset_fig2_chirp},
    };
    return presets;
}

ExperimentConfig load_preset(const std::string& name) {
    auto it = builtin_presets().find(name);
    if (it == builtin_presets().end()) {
        std::string msg = "unknown preset '" + name + "'; available:";
        for (const auto& [k, v] : builtin_presets())
            msg += " " + k;
        throw ConfigError(msg);
    }
    std::istringstream in(it->second);
    auto kv = parse_ini(in, "preset:" + name);
    return config_from_map(std::move(kv));
}

} // namespace atomlaser
