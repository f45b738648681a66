// Batch front end: loads an experiment config (file or built-in preset),
// dispatches the run and reports where the artifacts landed.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atomlaser/config.hpp"
#include "atomlaser/errors.hpp"
#include "atomlaser/experiment.hpp"
#include "atomlaser/version.hpp"

using namespace atomlaser;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out;
    std::string dimension;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_dimension = false,
                bool with_jobs = false) {
    auto* cfg = cmd->add_option("--config", opts.config_path, "experiment config file");
    auto* pre = cmd->add_option("--preset", opts.preset, "built-in preset name");
    cfg->excludes(pre);
    cmd->add_option("--out", opts.out, "output directory (default: $ATOMLASER_OUT_ROOT or ./runs)");
    if (with_dimension)
        cmd->add_option("--dimension", opts.dimension, "analytic model dimension: 1d or 3d")
            ->check(CLI::IsMember({"1d", "3d"}));
    if (with_jobs)
        cmd->add_option("--jobs", opts.jobs, "concurrent sweep members")
            ->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonOpts& opts, std::string& stem) {
    if (opts.config_path.empty() && opts.preset.empty())
        throw ConfigError("need --config <path> or --preset <name>");
    if (!opts.preset.empty()) {
        stem = opts.preset;
        return load_preset(opts.preset);
    }
    stem = std::filesystem::path(opts.config_path).stem().string();
    return load_config(opts.config_path);
}

ExperimentConfig with_mode(const ExperimentConfig& cfg, const std::string& mode) {
    if (to_string(cfg.mode) == mode) return cfg;
    auto kv = cfg.resolved;
    kv["run.mode"] = mode;
    return config_from_map(std::move(kv));
}

int run(const CommonOpts& opts, const std::string& family) {
    std::string stem;
    ExperimentConfig cfg = load(opts, stem);

    std::string mode = to_string(cfg.mode);
    if (family == "analytic") {
        if (!opts.dimension.empty())
            mode = "analytic-" + opts.dimension;
        else if (mode != "analytic-3d" && mode != "analytic-1d")
            mode = "analytic-3d";
        cfg = with_mode(cfg, mode);
    } else if (mode != family) {
        if ((family == "gpe" && mode == "gpe-1d"))
            ; // alias
        else if (family == "gpe")
            cfg = with_mode(cfg, "gpe-1d");
        else
            cfg = with_mode(cfg, family);
    }

    cfg.out_dir = resolve_out_dir(cfg, opts.out, stem).string();
    RunReport rep = run_experiment(cfg, opts.jobs);
    std::cout << "wrote " << rep.out_dir.string() << "\n";
    for (auto it = rep.summary.begin(); it != rep.summary.end(); ++it)
        std::cout << "  " << it.key() << " = " << it.value().dump() << "\n";
    return 0;
}

int run_compare_dirs(const std::string& analytic_dir, const std::string& gpe_dir,
                     const std::string& out) {
    RunReport a, g;
    a.manifest = read_json(std::filesystem::path(analytic_dir) / "manifest.json");
    a.series = read_series_csv(std::filesystem::path(analytic_dir) / "series.csv");
    g.manifest = read_json(std::filesystem::path(gpe_dir) / "manifest.json");
    g.series = read_series_csv(std::filesystem::path(gpe_dir) / "series.csv");
    std::filesystem::path out_csv = out.empty() ? "comparison.csv"
                                                : std::filesystem::path(out) / "comparison.csv";
    if (!out.empty()) std::filesystem::create_directories(out);
    CompareVerdict v = compare_runs(a, g, out_csv);
    std::printf("max_rel_dev = %.6g  mean_rel_dev = %.6g  verdict = %s\n", v.max_rel_dev,
                v.mean_rel_dev, v.pass_5pct ? "PASS" : "FAIL");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulsed atom laser: analytic Thomas-Fermi decay model and 1D GPE solver"};
    app.set_version_flag("--version", std::string("atomlaser ") + version);
    app.require_subcommand(1);

    CommonOpts analytic_opts, gpe_opts, compare_opts, sweep_opts, chirp_opts;
    std::string cmp_analytic_dir, cmp_gpe_dir;

    CLI::App* analytic = app.add_subcommand("analytic", "quasi-stationary decay trajectory");
    add_common(analytic, analytic_opts, /*with_dimension=*/true);

    CLI::App* gpe = app.add_subcommand("gpe", "1D multi-component GPE run");
    add_common(gpe, gpe_opts);

    CLI::App* compare =
        app.add_subcommand("compare", "run analytic + GPE at matched parameters and compare");
    add_common(compare, compare_opts);
    compare->add_option("--analytic", cmp_analytic_dir,
                        "existing analytic run directory (skips re-running)");
    compare->add_option("--gpe", cmp_gpe_dir, "existing gpe run directory (skips re-running)");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep of independent runs");
    add_common(sweep, sweep_opts, false, /*with_jobs=*/true);

    CLI::App* chirp = app.add_subcommand("chirp", "rf-chirp-compensated decay (constant velocity)");
    add_common(chirp, chirp_opts);

    CLI::App* presets = app.add_subcommand("presets", "list built-in presets");

    try {
        app.parse(argc, argv);
        if (analytic->parsed()) return run(analytic_opts, "analytic");
        if (gpe->parsed()) return run(gpe_opts, "gpe");
        if (compare->parsed()) {
            if (!cmp_analytic_dir.empty() || !cmp_gpe_dir.empty()) {
                if (cmp_analytic_dir.empty() || cmp_gpe_dir.empty())
                    throw ConfigError("compare needs both --analytic and --gpe directories");
                return run_compare_dirs(cmp_analytic_dir, cmp_gpe_dir, compare_opts.out);
            }
            return run(compare_opts, "compare");
        }
        if (sweep->parsed()) return run(sweep_opts, "sweep");
        if (chirp->parsed()) return run(chirp_opts, "chirp");
        if (presets->parsed()) {
            for (const auto& [name, text] : builtin_presets())
                std::cout << name << "\n";
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
