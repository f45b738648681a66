#pragma once

#include <filesystem>

#include "atomlaser/config.hpp"
#include "atomlaser/report.hpp"

namespace atomlaser {

// Runs one experiment (dispatching on cfg.mode), writes series.csv,
// manifest.json and summary.json (plus mode-specific files) into the
// resolved output directory and returns the in-memory report.
// `jobs` bounds the concurrency of sweep members.
RunReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

struct CompareVerdict {
    double max_rel_dev = 0.0;
    double mean_rel_dev = 0.0;
    double transient_cutoff = 0.0; // s
    std::size_t points = 0;
    bool pass_5pct = false;
};

// Interpolates the two N(t) series onto a common grid (transients before
// 2 pi/Omega excluded), writes comparison.csv and returns the verdict.
// Throws InvalidParameter listing the fields that differ when the two runs
// used different physics parameters.
CompareVerdict compare_runs(const RunReport& analytic_report, const RunReport& gpe_report,
                            const std::filesystem::path& csv_out);

// Output directory resolution: --out flag beats run.out_dir beats
// $ATOMLASER_OUT_ROOT/<stem>-<mode> beats ./runs/<stem>-<mode>.
std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg, const std::string& cli_out,
                                      const std::string& stem);

} // namespace atomlaser
