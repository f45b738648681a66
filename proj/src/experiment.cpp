#include "atomlaser/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <future>
#include <iterator>
#include <numbers>
#include <sstream>

#include "atomlaser/analytic.hpp"
#include "atomlaser/errors.hpp"
#include "atomlaser/version.hpp"

namespace atomlaser {

namespace fs = std::filesystem;

namespace {

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string format_si(double v, const char* unit) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g %s", v, unit);
    return buf;
}

nlohmann::json make_manifest(const ExperimentConfig& cfg, const fs::path& out_dir) {
    nlohmann::json j;
    j["artifact"] = "atomlaser";
    j["version"] = version;
    j["timestamp"] = iso_timestamp();
    j["mode"] = to_string(cfg.mode);
    j["out_dir"] = out_dir.string();
    nlohmann::json conf = nlohmann::json::object();
    for (const auto& [k, v] : cfg.resolved)
        conf[k] = v;
    j["config"] = conf;
    return j;
}

double resolve_u1(const ExperimentConfig& cfg) {
    if (cfg.u1 > 0.0) return cfg.u1;
    return DecayModel::matched_u1(cfg.phys, cfg.trap, cfg.n_atoms);
}

std::vector<double> uniform_grid(double t_max, double dt) {
    std::size_t n = std::size_t(std::llround(std::ceil(t_max / dt - 1e-9)));
    n = std::max<std::size_t>(n, 1);
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = t_max * double(i) / double(n);
    return g;
}

std::vector<double> analytic_grid(const ExperimentConfig& cfg, const DecayModel& model,
                                  double mu0) {
    if (cfg.t_max > 0.0) {
        double dt = cfg.dt > 0.0 ? cfg.dt : cfg.t_max / 4000.0;
        return uniform_grid(cfg.t_max, dt);
    }
    return model.default_time_grid(mu0);
}

void add_rate_summary(nlohmann::json& s, const DecayModel& model, double mu0) {
    RateSet r = model.rates(mu0);
    s["mu0_J"] = mu0;
    s["mu0_over_hbar_rad_per_s"] = mu0 / model.phys().hbar;
    s["gamma"] = r.gamma;
    s["alpha"] = r.alpha;
    s["gamma_pop_per_s"] = r.gamma_pop;
    s["delta_E_J"] = r.delta_E;
    s["delta_E_over_hbar_rad_per_s"] = r.delta_E / model.phys().hbar;
    s["r_res_m"] = r.r_res;
    auto [mu_inf, n_inf] = model.steady_state();
    s["mu_inf_J"] = mu_inf;
    s["mu_inf_over_hbar_rad_per_s"] = mu_inf / model.phys().hbar;
    s["n_inf"] = n_inf;
}

RunReport run_analytic(const ExperimentConfig& cfg, const fs::path& out_dir,
                       DimensionMode dim_mode) {
    double u1 = dim_mode == DimensionMode::OneD ? resolve_u1(cfg) : 0.0;
    DecayModel model(cfg.phys, cfg.trap, dim_mode, u1);
    AnalyticState initial = model.initial_state(cfg.n_atoms);
    std::vector<double> grid = analytic_grid(cfg, model, initial.mu);
    DecayTrajectory traj = model.evolve(initial, grid, DecayMethod::ImplicitEq13);

    RunReport rep;
    rep.out_dir = out_dir;
    rep.series.columns = {"t", "mu", "N", "flux", "velocity"};
    rep.series.units = {"s", "J", "1", "1/s", "m/s"};
    rep.series.data.assign(5, {});
    auto push_row = [&](std::size_t i) {
        rep.series.data[0].push_back(traj.states[i].t);
        rep.series.data[1].push_back(traj.states[i].mu);
        rep.series.data[2].push_back(traj.states[i].n_atoms);
        rep.series.data[3].push_back(traj.flux[i]);
        rep.series.data[4].push_back(traj.velocity[i]);
    };
    const std::size_t stride = std::size_t(cfg.record_every);
    for (std::size_t i = 0; i < traj.size(); i += stride)
        push_row(i);
    if ((traj.size() - 1) % stride != 0)
        push_row(traj.size() - 1);

    nlohmann::json& s = rep.summary;
    s["mode"] = to_string(cfg.mode);
    s["n0"] = cfg.n_atoms;
    s["resonance_outside"] = traj.resonance_outside;
    if (dim_mode == DimensionMode::OneD) s["u1_Jm"] = u1;
    if (cfg.trap.detuning0 > 0.0) {
        add_rate_summary(s, model, initial.mu);
        s["flux0_per_s"] = traj.flux.front();
        s["density_at_resonance0_m" + std::string(dim_mode == DimensionMode::OneD ? "^-1" : "^-3")] =
            model.density_at_resonance(initial.mu);
        if (!traj.resonance_outside && cfg.trap.rabi > 0.0) {
            s["steady_state_time_s"] = model.flux_decay_time(initial.mu, 0.05);
            auto [v_mean, dv_rel] = velocity_width(traj, model.rates(initial.mu), cfg.phys);
            s["v_mean_m_per_s"] = v_mean;
            s["v_mean_cm_per_s"] = v_mean * 100.0;
            s["dv_over_v"] = dv_rel;
        } else {
            s["v_mean_m_per_s"] = 0.0;
            s["dv_over_v"] = nullptr;
        }
    }
    return rep;
}

RunReport run_chirp(const ExperimentConfig& cfg, const fs::path& out_dir) {
    DecayModel model(cfg.phys, cfg.trap, DimensionMode::ThreeD);
    AnalyticState initial = model.initial_state(cfg.n_atoms);
    if (!(cfg.t_max > 0.0))
        throw ConfigError("field 'run.t_max': required for chirp runs");
    double dt = cfg.dt > 0.0 ? cfg.dt : cfg.t_max / 4000.0;
    std::vector<double> grid = uniform_grid(cfg.t_max, dt);
    auto [traj, schedule] = chirp_compensation(initial, grid, model);

    RunReport rep;
    rep.out_dir = out_dir;
    rep.series.columns = {"t", "mu", "N", "flux", "velocity", "detuning0"};
    rep.series.units = {"s", "J", "1", "1/s", "m/s", "rad/s"};
    rep.series.data.assign(6, {});
    auto push_row = [&](std::size_t i) {
        rep.series.data[0].push_back(traj.states[i].t);
        rep.series.data[1].push_back(traj.states[i].mu);
        rep.series.data[2].push_back(traj.states[i].n_atoms);
        rep.series.data[3].push_back(traj.flux[i]);
        rep.series.data[4].push_back(traj.velocity[i]);
        rep.series.data[5].push_back(schedule.detuning[i]);
    };
    const std::size_t stride = std::size_t(cfg.record_every);
    for (std::size_t i = 0; i < traj.size(); i += stride)
        push_row(i);
    if ((traj.size() - 1) % stride != 0)
        push_row(traj.size() - 1);
    nlohmann::json& s = rep.summary;
    s["mode"] = "chirp";
    s["n0"] = cfg.n_atoms;
    add_rate_summary(s, model, initial.mu);
    s["v_const_m_per_s"] = traj.velocity.front();
    s["detuning_final_rad_per_s"] = schedule.detuning.back();
    s["detuning_budget_used"] =
        1.0 - schedule.detuning.back() / schedule.detuning.front();
    return rep;
}

// Numeric-run knobs derived from the physics when the config left them auto.
struct ResolvedGpe {
    Grid1D grid;
    SolverConfig solver_cfg;
    double u1 = 0.0;
    double mu0 = 0.0;
    double r_tf = 0.0;
};

ResolvedGpe resolve_gpe(const ExperimentConfig& cfg) {
    ResolvedGpe r;
    r.u1 = resolve_u1(cfg);
    DecayModel model(cfg.phys, cfg.trap, DimensionMode::OneD, r.u1);
    r.mu0 = model.mu_from_n(cfg.n_atoms);
    double mw2 = cfg.phys.mass * cfg.trap.omega_T * cfg.trap.omega_T;
    r.r_tf = std::sqrt(2.0 * r.mu0 / mw2);

    const SolverSettings& sv = cfg.solver;
    double half = sv.domain_half_width > 0.0 ? sv.domain_half_width : 8.0 * r.r_tf;
    r.grid = Grid1D::centered(sv.n_points, half);

    SolverConfig& sc = r.solver_cfg;
    sc.dt = sv.dt > 0.0
                ? sv.dt
                : std::min(0.05 * cfg.phys.hbar / r.mu0,
                           0.8 * kinetic_stability_dt(r.grid, cfg.phys));
    if (!(sv.t_max > 0.0))
        throw ConfigError("field 'solver.t_max': required for gpe runs");
    sc.n_steps = std::llround(std::ceil(sv.t_max / sc.dt));
    sc.n_components = sv.n_components;
    sc.absorber.enabled = sv.absorber_on;
    sc.absorber.width = sv.absorber_width > 0.0 ? sv.absorber_width : 2.0 * half / 16.0;
    double hd = cfg.phys.hbar * cfg.trap.detuning0;
    double e_out = std::max(r.mu0 - hd, cfg.phys.hbar * cfg.trap.omega_T);
    sc.absorber.strength =
        sv.absorber_strength > 0.0 ? sv.absorber_strength : 0.3 * e_out;
    sc.detector_x = sv.detector_x != 0.0
                        ? sv.detector_x
                        : 0.5 * (r.r_tf + (half - sc.absorber.width));
    sc.record_every = sv.record_every > 0
                          ? sv.record_every
                          : std::max<long>(1, sc.n_steps / 2000);
    sc.ground_state.halvings = sv.gs_refine;
    sc.snapshot_times = sv.snapshot_times;

    // the output de Broglie wavelength must stay resolved (>= 4 dx)
    if (r.mu0 > hd && cfg.trap.detuning0 > 0.0) {
        double v0 = std::sqrt(2.0 * (r.mu0 - hd) / cfg.phys.mass);
        double lambda = 2.0 * std::numbers::pi * cfg.phys.hbar / (cfg.phys.mass * v0);
        if (lambda < 4.0 * r.grid.dx) {
            std::ostringstream os;
            os << "solver grid too coarse: output wavelength " << lambda << " m needs dx <= "
               << lambda / 4.0 << " m (have " << r.grid.dx << "); raise solver.n_points";
            throw ConfigError(os.str());
        }
    }
    return r;
}

RunReport run_gpe(const ExperimentConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    ResolvedGpe r = resolve_gpe(cfg);
    GpeSolver solver(r.grid, cfg.phys, cfg.trap, r.u1, r.solver_cfg);
    WaveField field = solver.prepare_ground_state(cfg.n_atoms, cfg.solver.ground_state);
    double mu_prepared = solver.last_ground_state_mu();
    GpeSeries series = solver.run(field);

    RunReport rep;
    rep.out_dir = out_dir;
    rep.series.columns = {"t", "N_-1", "N_0", "N_+1", "flux", "v_out"};
    rep.series.units = {"s", "1", "1", "1", "1/s", "m/s"};
    rep.series.data.assign(6, {});
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        rep.series.data[0].push_back(series.t[i]);
        rep.series.data[1].push_back(series.n_atoms[0][i]);
        rep.series.data[2].push_back(series.n_atoms[1][i]);
        rep.series.data[3].push_back(series.n_atoms[2][i]);
        rep.series.data[4].push_back(series.flux_detector[i]);
        rep.series.data[5].push_back(series.v_out[i]);
    }

    // secondary diagnostics the fixed series schema has no room for
    SeriesTable diag;
    diag.columns = {"t", "mu_estimate", "norm_plus_ejected"};
    diag.units = {"s", "J", "1"};
    diag.data = {series.t, series.mu_estimate, series.bookkeeping};
    write_series_csv(out_dir / "diagnostics.csv", diag,
                     {"atomlaser " + std::string(version), "gpe-1d run diagnostics"});

    nlohmann::json& s = rep.summary;
    s["mode"] = "gpe-1d";
    s["n0"] = cfg.n_atoms;
    s["u1_Jm"] = r.u1;
    s["mu0_tf_J"] = r.mu0;
    s["mu_prepared_J"] = mu_prepared;
    s["mu_estimate0_J"] = series.mu_estimate.front();
    s["tf_radius_m"] = r.r_tf;
    s["grid_half_width_m"] = r.grid.half_width();
    s["dx_m"] = r.grid.dx;
    s["dt_s"] = r.solver_cfg.dt;
    s["n_steps"] = r.solver_cfg.n_steps;
    s["detector_x_m"] = r.solver_cfg.detector_x;
    s["absorber_width_m"] = r.solver_cfg.absorber.width;
    s["absorber_strength_J"] = r.solver_cfg.absorber.strength;
    s["n_minus_final"] = series.n_atoms[0].back();
    s["n_zero_final"] = series.n_atoms[1].back();
    s["n_plus_final"] = series.n_atoms[2].back();
    s["ejected_m0"] = field.ejected[1];
    s["ejected_total"] = field.ejected[0] + field.ejected[1] + field.ejected[2];
    s["bookkeeping_drift"] =
        std::fabs(series.bookkeeping.back() - series.bookkeeping.front()) / cfg.n_atoms;

    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t i = 0; i < series.snapshots.size(); ++i) {
        const EffPotSnapshot& sn = series.snapshots[i];
        nlohmann::json js;
        js["t_s"] = sn.t;
        js["interior_mean_J"] = sn.interior_mean;
        js["interior_std_J"] = sn.interior_std;
        js["flatness_std_over_mean"] =
            sn.interior_mean != 0.0 ? sn.interior_std / sn.interior_mean : 0.0;
        js["interior_half_width_m"] = sn.interior_half_width;
        js["file"] = "effpot_" + std::to_string(i) + ".csv";
        snaps.push_back(js);

        SeriesTable t;
        t.columns = {"x", "eff_pot"};
        t.units = {"m", "J"};
        t.data = {r.grid.x, sn.eff_pot};
        char meta[64];
        std::snprintf(meta, sizeof(meta), "effective potential at t = %.9g s", sn.t);
        write_series_csv(out_dir / ("effpot_" + std::to_string(i) + ".csv"), t,
                         {"atomlaser " + std::string(version), meta});
    }
    s["snapshots"] = snaps;

    if (cfg.solver.dump_psi) {
        nlohmann::json header;
        header["mass_kg"] = cfg.phys.mass;
        header["omega_T_rad_per_s"] = cfg.trap.omega_T;
        header["detuning0_rad_per_s"] = cfg.trap.detuning0;
        header["rabi_rad_per_s"] = cfg.trap.rabi;
        header["u1_Jm"] = r.u1;
        dump_wavefunction(out_dir / "psi_final.csv", field, header);
    }
    return rep;
}

void write_report_files(const ExperimentConfig& cfg, RunReport& rep) {
    fs::create_directories(rep.out_dir);
    rep.manifest = make_manifest(cfg, rep.out_dir);
    std::vector<std::string> meta = {"atomlaser " + std::string(version),
                                     "mode = " + to_string(cfg.mode)};
    if (!rep.series.columns.empty())
        write_series_csv(rep.out_dir / "series.csv", rep.series, meta);
    write_json(rep.out_dir / "manifest.json", rep.manifest);
    write_json(rep.out_dir / "summary.json", rep.summary);
}

ExperimentConfig derived_config(const ExperimentConfig& base, const std::string& mode,
                                std::map<std::string, std::string> overrides) {
    std::map<std::string, std::string> kv = base.resolved;
    kv["run.mode"] = mode;
    kv.erase("sweep.parameter");
    kv.erase("sweep.values");
    kv.erase("sweep.base_mode");
    kv.erase("run.out_dir");
    for (auto& [k, v] : overrides)
        kv[k] = v;
    return config_from_map(std::move(kv));
}

RunReport run_compare(const ExperimentConfig& cfg, const fs::path& out_dir) {
    // analytic trajectory sampled over the same horizon as the numeric run
    ExperimentConfig acfg = derived_config(
        cfg, "analytic-1d",
        {{"run.t_max", format_si(cfg.solver.t_max, "s")},
         {"run.dt", format_si(cfg.solver.t_max / 4000.0, "s")}});
    acfg.out_dir = (out_dir / "analytic").string();
    RunReport arep = run_experiment(acfg);

    ExperimentConfig gcfg = derived_config(cfg, "gpe-1d", {});
    gcfg.out_dir = (out_dir / "gpe").string();
    RunReport grep = run_experiment(gcfg);

    fs::create_directories(out_dir);
    CompareVerdict v = compare_runs(arep, grep, out_dir / "comparison.csv");

    RunReport rep;
    rep.out_dir = out_dir;
    nlohmann::json& s = rep.summary;
    s["mode"] = "compare";
    s["max_rel_dev"] = v.max_rel_dev;
    s["mean_rel_dev"] = v.mean_rel_dev;
    s["transient_cutoff_s"] = v.transient_cutoff;
    s["points_compared"] = v.points;
    s["pass_5pct"] = v.pass_5pct;
    s["analytic_dir"] = "analytic";
    s["gpe_dir"] = "gpe";
    return rep;
}

// Override one key of the resolved base config; the value keeps its unit.
RunReport run_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, int jobs) {
    const std::size_t n = cfg.sweep.values.size();
    std::vector<ExperimentConfig> members;
    members.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "run_%03zu", i);
        ExperimentConfig m = derived_config(cfg, cfg.sweep.base_mode,
                                            {{cfg.sweep.parameter, cfg.sweep.values[i]}});
        m.out_dir = (out_dir / name).string();
        members.push_back(std::move(m));
    }

    std::vector<RunReport> reports(n);
    jobs = std::max(1, jobs);
    std::size_t next = 0;
    while (next < n) {
        std::size_t batch = std::min<std::size_t>(std::size_t(jobs), n - next);
        std::vector<std::future<RunReport>> futs;
        for (std::size_t b = 0; b < batch; ++b) {
            const ExperimentConfig& m = members[next + b];
            futs.push_back(std::async(std::launch::async, [&m] { return run_experiment(m); }));
        }
        for (std::size_t b = 0; b < batch; ++b)
            reports[next + b] = futs[b].get();
        next += batch;
    }

    fs::create_directories(out_dir);
    // aggregate table over the scalar summary of every member
    static const char* scalar_keys[] = {"mu0_J",       "n_inf",        "gamma",
                                        "delta_E_J",   "gamma_pop_per_s", "v_mean_m_per_s",
                                        "dv_over_v",   "steady_state_time_s", "max_rel_dev"};
    SeriesTable agg;
    agg.columns = {"index", "value"};
    for (const char* k : scalar_keys)
        agg.columns.push_back(k);
    agg.data.assign(agg.columns.size(), {});
    for (std::size_t i = 0; i < n; ++i) {
        agg.data[0].push_back(double(i));
        char* end = nullptr;
        agg.data[1].push_back(std::strtod(cfg.sweep.values[i].c_str(), &end));
        for (std::size_t c = 0; c < std::size(scalar_keys); ++c) {
            const nlohmann::json& s = reports[i].summary;
            double v = std::nan("");
            if (s.contains(scalar_keys[c]) && s[scalar_keys[c]].is_number())
                v = s[scalar_keys[c]].get<double>();
            agg.data[c + 2].push_back(v);
        }
    }
    write_series_csv(out_dir / "aggregate.csv", agg,
                     {"atomlaser " + std::string(version),
                      "sweep over " + cfg.sweep.parameter + " (raw value column as written in "
                      "the config; see member manifests for units)"});

    RunReport rep;
    rep.out_dir = out_dir;
    rep.series = agg;
    nlohmann::json& s = rep.summary;
    s["mode"] = "sweep";
    s["parameter"] = cfg.sweep.parameter;
    s["base_mode"] = cfg.sweep.base_mode;
    s["members"] = n;
    return rep;
}

} // namespace

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg, const std::string& cli_out,
                                      const std::string& stem) {
    if (!cli_out.empty()) return cli_out;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    const char* root = std::getenv("ATOMLASER_OUT_ROOT");
    fs::path base = root && *root ? fs::path(root) : fs::path("runs");
    return base / (stem + "-" + to_string(cfg.mode));
}

RunReport run_experiment(const ExperimentConfig& cfg, int jobs) {
    fs::path out_dir = resolve_out_dir(cfg, "", "experiment");
    RunReport rep;
    switch (cfg.mode) {
    case RunMode::Analytic3D:
        rep = run_analytic(cfg, out_dir, DimensionMode::ThreeD);
        break;
    case RunMode::Analytic1D:
        rep = run_analytic(cfg, out_dir, DimensionMode::OneD);
        break;
    case RunMode::Gpe1D:
        rep = run_gpe(cfg, out_dir);
        break;
    case RunMode::Compare:
        rep = run_compare(cfg, out_dir);
        break;
    case RunMode::Sweep:
        rep = run_sweep(cfg, out_dir, jobs);
        break;
    case RunMode::Chirp:
        rep = run_chirp(cfg, out_dir);
        break;
    }
    write_report_files(cfg, rep);
    return rep;
}

CompareVerdict compare_runs(const RunReport& analytic_report, const RunReport& gpe_report,
                            const std::filesystem::path& csv_out) {
    // physics parameters must match between the two manifests
    static const char* physics_keys[] = {
        "species.mass",         "species.scattering_length", "trap.frequency",
        "coupling.detuning0",   "coupling.rabi",             "condensate.n_atoms",
        "condensate.u1",
    };
    std::vector<std::string> differing;
    const nlohmann::json& ca = analytic_report.manifest.value("config", nlohmann::json::object());
    const nlohmann::json& cg = gpe_report.manifest.value("config", nlohmann::json::object());
    for (const char* k : physics_keys) {
        std::string va = ca.value(k, std::string{});
        std::string vg = cg.value(k, std::string{});
        if (va != vg) differing.push_back(k);
    }
    if (!differing.empty()) {
        std::string msg = "compare_runs: parameter mismatch in:";
        for (const auto& d : differing)
            msg += " " + d;
        throw InvalidParameter(msg);
    }

    const std::vector<double>& ta = analytic_report.series.column("t");
    const std::vector<double>& na = analytic_report.series.column("N");
    const std::vector<double>& tg = gpe_report.series.column("t");
    const std::vector<double>& ng = gpe_report.series.column("N_-1");
    if (ta.size() < 2 || tg.size() < 2)
        throw InvalidParameter("compare_runs: series too short");

    double rabi = 0.0;
    if (cg.contains("coupling.rabi")) {
        // both manifests carry identical strings at this point
        const std::string& s = cg["coupling.rabi"].get_ref<const std::string&>();
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        std::string unit = end ? std::string(end) : std::string{};
        unit.erase(0, unit.find_first_not_of(' '));
        rabi = (unit == "Hz" || unit == "hz") ? 2.0 * std::numbers::pi * v : v;
    }
    double cutoff = rabi > 0.0 ? 2.0 * std::numbers::pi / rabi : 0.0;

    double lo = std::max({ta.front(), tg.front(), cutoff});
    double hi = std::min(ta.back(), tg.back());
    if (!(hi > lo))
        throw InvalidParameter("compare_runs: no overlap after transient exclusion");

    auto interp = [](const std::vector<double>& t, const std::vector<double>& y, double tq) {
        auto it = std::lower_bound(t.begin(), t.end(), tq);
        if (it == t.begin()) return y.front();
        if (it == t.end()) return y.back();
        std::size_t i = std::size_t(it - t.begin());
        double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
        return y[i - 1] + w * (y[i] - y[i - 1]);
    };

    const std::size_t n_common = 1001;
    SeriesTable cmp;
    cmp.columns = {"t", "N_analytic", "N_gpe", "rel_dev"};
    cmp.units = {"s", "1", "1", "1"};
    cmp.data.assign(4, {});
    CompareVerdict v;
    v.transient_cutoff = cutoff;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_common; ++i) {
        double t = lo + (hi - lo) * double(i) / double(n_common - 1);
        double a = interp(ta, na, t);
        double g = interp(tg, ng, t);
        double rel = a > 0.0 ? std::fabs(g - a) / a : 0.0;
        cmp.data[0].push_back(t);
        cmp.data[1].push_back(a);
        cmp.data[2].push_back(g);
        cmp.data[3].push_back(rel);
        v.max_rel_dev = std::max(v.max_rel_dev, rel);
        sum += rel;
    }
    v.points = n_common;
    v.mean_rel_dev = sum / double(n_common);
    v.pass_5pct = v.max_rel_dev < 0.05;

    write_series_csv(csv_out, cmp,
                     {"atomlaser " + std::string(version),
                      "N(t): analytic 1D vs numeric GPE, transients before 2pi/Omega excluded",
                      std::string("verdict = ") + (v.pass_5pct ? "PASS" : "FAIL") +
                          " (5% threshold)"});
    return v;
}

} // namespace atomlaser
