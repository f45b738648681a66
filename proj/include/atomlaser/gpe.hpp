#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "atomlaser/params.hpp"
#include "atomlaser/wavefield.hpp"

namespace atomlaser {

enum class GroundStateMethod { TfProfile, ImaginaryTime };

// Smooth imaginary potential at both grid edges: W(x) = strength *
// sin^2(pi xi / 2) with xi ramping 0 -> 1 across `width` from the inside out.
struct AbsorberConfig {
    double width = 0.0;    // m
    double strength = 0.0; // J
    bool enabled = true;
};

// Imaginary-time relaxation schedule: split-step stages with halving dtau,
// then a preconditioned gradient polish that removes the remaining Trotter
// bias. Every stage runs until the chemical-potential drift per step falls
// below drift_tol (relative).
struct GroundStateOptions {
    double dtau_start = 0.0;  // s; 0 = auto (0.05 hbar/mu_TF)
    int halvings = 2;         // dtau refinement stages
    double drift_tol = 1e-10; // relative mu drift per step
    double residual_tol = 3e-10; // stationary-GPE residual target of the polish
    long max_iter = 200000;   // per stage
};

struct SolverConfig {
    double dt = 0.0;           // s; 0 = auto (0.05 hbar/mu_TF)
    long n_steps = 0;
    int n_components = 2;      // two- or three-component evolution
    AbsorberConfig absorber;
    long record_every = 100;
    double detector_x = 0.0;   // m; 0 = auto (midway condensate edge -> absorber)
    GroundStateOptions ground_state;
    std::vector<double> snapshot_times; // effective-potential snapshots (s)
};

// Effective potential profile V_-1(x) - V_off + U1 |psi_-1|^2 at one time,
// with flatness statistics over the condensate interior (density >= 25% of
// the profile peak).
struct EffPotSnapshot {
    double t = 0.0;
    std::vector<double> eff_pot;  // J, full grid
    double interior_mean = 0.0;   // J
    double interior_std = 0.0;    // J
    double interior_half_width = 0.0; // m
};

// Time series recorded during a run.
struct GpeSeries {
    std::vector<double> t;
    std::array<std::vector<double>, 3> n_atoms; // per component
    std::vector<double> flux_detector;  // outward m=0 flux, atoms/s
    std::vector<double> v_out;          // m/s at the detector
    std::vector<double> mu_estimate;    // J, from the m=-1 energy functional
    std::vector<double> bookkeeping;    // total norm + ejected
    std::vector<EffPotSnapshot> snapshots;
    double detector_x = 0.0;
};

// 1D multi-component Gross-Pitaevskii solver with rotating-wave rf coupling.
// Strang splitting: half kinetic step in Fourier space, exact exponential of
// the per-point Hermitian potential+coupling matrix (density frozen during
// the substep), half kinetic step, then the absorbing boundary.
//
// Diagonal entries in the rotating frame (V_off drops out):
//   m=-1:  M w^2 x^2/2 - hbar Delta(0) + U1 n_tot
//   m= 0:                                U1 n_tot
//   m=+1:  hbar Delta(0) - M w^2 x^2/2 + U1 n_tot
// with hbar Omega on the adjacent-m off-diagonals.
class GpeSolver {
public:
    GpeSolver(const Grid1D& grid, const PhysicalParams& p, const TrapCoupling& tc,
              double u1, const SolverConfig& cfg);
    ~GpeSolver();
    GpeSolver(const GpeSolver&) = delete;
    GpeSolver& operator=(const GpeSolver&) = delete;

    const SolverConfig& config() const { return cfg_; }
    const Grid1D& grid() const { return grid_; }
    const PhysicalParams& phys() const { return phys_; }
    const TrapCoupling& trap() const { return trap_; }
    double u1() const { return u1_; }

    // Stationary m=-1 condensate with `n_atoms` atoms; no rf coupling in the
    // preparation. TfProfile fills sqrt(max[(mu - V)/U1, 0]); ImaginaryTime
    // relaxes that profile, renormalizing each step, until the chemical
    // potential drift per step falls below the configured tolerance.
    WaveField prepare_ground_state(double n_atoms, GroundStateMethod method) const;
    // Chemical potential of the prepared state measured in the preparation,
    // from the norm decay rate of the last imaginary-time step (TF value for
    // TfProfile).
    double last_ground_state_mu() const { return last_mu_; }

    // One split step of length cfg.dt (plus absorber, when enabled).
    void step(WaveField& field) const;
    // The absorbing boundary alone: multiplies by exp(-W(x) dt/hbar) and
    // accumulates the removed norm per component into field.ejected.
    void apply_absorber(WaveField& field) const;

    // n_steps of evolution with periodic recording.
    GpeSeries run(WaveField& field) const;

    // Diagnostics used by run() and the tests.
    double measure_mu(const WaveField& field) const;
    double probability_current(const WaveField& field, int component, double x) const;
    EffPotSnapshot effective_potential(const WaveField& field) const;
    std::vector<double> coupling_diagonal(const WaveField& field, int component) const;

    // Per-point coupling matrix (row-major n_c x n_c) at grid index i with
    // total density n_tot; exactly Hermitian (real symmetric).
    std::vector<double> coupling_matrix(double x, double n_tot) const;

    double trap_potential(double x) const; // M w^2 x^2 / 2

private:
    struct Fft;
    // exp(-i B dt/hbar) for the density-independent part of the coupling
    // matrix, tabulated per grid point (the U1 n_tot piece is a scalar
    // phase applied separately each step)
    struct Pot2 {
        cplx u00, u01, u11;
    };
    struct Pot3 {
        double v[3][3];
        cplx eig_phase[3];
    };

    Grid1D grid_;
    PhysicalParams phys_;
    TrapCoupling trap_;
    double u1_;
    SolverConfig cfg_;
    std::vector<double> trap_v_;            // M w^2 x^2/2 per point
    std::vector<double> absorber_w_;        // W(x) per point (J)
    std::vector<cplx> kinetic_half_factor_; // exp(-i hbar k^2 dt/(4M))
    std::vector<Pot2> pot2_;
    std::vector<Pot3> pot3_;
    std::unique_ptr<Fft> fft_;
    mutable double last_mu_ = 0.0;

    void precompute_coupling_exponentials();
    void half_kinetic(WaveField& field) const;
    void potential_step(WaveField& field) const;
    void check_finite(const WaveField& field, long step_index) const;
};

// Deviation of a numeric run from the matching analytic 1D trajectory,
// transients before 2 pi / Omega excluded.
struct DeviationSummary {
    double max_rel_n = 0.0;
    double mean_rel_n = 0.0;
    double max_rel_flux = 0.0;
    double transient_cutoff = 0.0; // s
    std::size_t points_compared = 0;
};

class DecayModel;
struct DecayTrajectory;

// Largest stable step of the nonlinear split-step scheme on this grid,
// 2 pi M / (hbar k_max^2).
double kinetic_stability_dt(const Grid1D& grid, const PhysicalParams& p);

// Compares N_-1(t) (and the detector flux) against the analytic model.
// Throws InvalidParameter listing the differing fields if the two sides
// were produced with different parameters.
DeviationSummary compare_to_analytic(const GpeSeries& series, const GpeSolver& solver,
                                     const DecayTrajectory& traj, const DecayModel& model);

} // namespace atomlaser
