#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "atomlaser/params.hpp"

namespace atomlaser {

enum class DimensionMode { OneD, ThreeD };

enum class DecayMethod {
    OdeRk4,       // integrate d mu/dt = -alpha (mu - hbar Delta0) / mu^p
    ImplicitEq13, // invert the closed-form bracket F(mu0) - F(mu) = alpha t
};

// One point of the quasi-stationary decay: time, chemical potential and the
// Thomas-Fermi atom number that belongs to it.
struct AnalyticState {
    double t = 0.0;       // s
    double mu = 0.0;      // J
    double n_atoms = 0.0; // dimensionless count
};

struct DecayTrajectory {
    std::vector<AnalyticState> states;
    std::vector<double> flux;     // atoms/s, >= 0
    std::vector<double> velocity; // m/s of the outcoupled atoms, >= 0
    DimensionMode dimension_mode = DimensionMode::ThreeD;
    // mu(0) <= hbar Delta(0): resonance shell outside the condensate, no
    // output; the trajectory is constant and this flag is set.
    bool resonance_outside = false;

    std::size_t size() const { return states.size(); }
};

// The rate constants of the weak-coupling theory for a given initial mu.
struct RateSet {
    double gamma = 0.0;     // transition rate Gamma; m^3/s in 3D, m/s in 1D
    double alpha = 0.0;     // decay ODE coefficient; J^{3/2}/s in 3D, J^{1/2}/s in 1D
    double gamma_pop = 0.0; // population decay rate, 1/s
    double delta_E = 0.0;   // natural energy width hbar*Gamma_pop, J
    double r_res = 0.0;     // resonance radius, m
};

// Thomas-Fermi density of the trapped component,
//   n(r) = max[(mu + V_off - V_-1(r)) / U, 0] = max[(mu - M w^2 r^2/2) / U, 0],
// zero beyond the TF radius sqrt(2 mu / (M w^2)).
double tf_density(double r, double mu, const PhysicalParams& p, const TrapCoupling& tc);

// Output density after coupling time t at radius r (two-level Rabi formula
// with local detuning Delta(r), seeded by the initial TF profile):
//   |psi_0|^2 = 4 W^2 sin^2[ sqrt(Delta^2(r) + 4 W^2) t / 2 ] / (Delta^2(r) + 4 W^2) * n_TF(r, mu0)
double rabi_output_density(double r, double t, const TrapCoupling& tc,
                           const PhysicalParams& p, double mu0);

// Quasi-stationary Thomas-Fermi decay model. In 3D every relation is the
// closed form of the theory; the 1D variant repeats the same construction
// for a line trap with two resonance points at +-x_res and a free coupling
// constant U1 (J m):
//
//             3D                                  1D
//   N(mu)     (4 pi/15U) (2 mu)^{5/2}/(M w^2)^{3/2}   (4/3U1) mu sqrt(2 mu/(M w^2))
//   Gamma     8 pi^2 hbar W^2 sqrt(2 hbar D)/(M w^2)^{3/2}   4 pi W^2 / Delta'(x_res)
//   ODE       mu' = -alpha (mu - hbar D)/mu^{3/2}    mu' = -alpha (mu - hbar D)/mu^{1/2}
//   alpha     3 Gamma (M w^2)^{3/2} 2^{-7/2}/pi      (Gamma/2) sqrt(M w^2/2)
//
// (W = Rabi frequency, D = Delta(0).) See docs/one_dimensional_model.md for
// the 1D derivation.
class DecayModel {
public:
    // 3D model; u1 is ignored.
    DecayModel(const PhysicalParams& p, const TrapCoupling& tc);
    // Mode-selected model; OneD requires u1 > 0 (J m).
    DecayModel(const PhysicalParams& p, const TrapCoupling& tc, DimensionMode mode,
               double u1 = 0.0);

    // The default 1D coupling: U1 such that the 1D mu(N0) equals the 3D
    // mu(N0) for the same atom number.
    static double matched_u1(const PhysicalParams& p, const TrapCoupling& tc, double n0_atoms);

    const PhysicalParams& phys() const { return phys_; }
    const TrapCoupling& trap() const { return trap_; }
    DimensionMode mode() const { return mode_; }

    // U (J m^3) in 3D, U1 (J m) in 1D.
    double interaction() const;

    // N(mu) and its closed-form inverse; round-trip exact to 1e-12.
    double n_from_mu(double mu) const;
    double mu_from_n(double n_atoms) const;

    // Resonance shell x_res = sqrt(2 hbar Delta(0)/(M w^2)) and the local
    // detuning gradient Delta'(x_res) = 2 Delta(0)/x_res. Requires Delta(0) > 0.
    double resonance_radius() const;
    double detuning_gradient() const;

    // Perturbative transition rate (t << pi/Omega); the prefactor of the
    // oscillating rate below, evaluated through the closed form.
    double gamma_perturbative() const;
    // Time-dependent rate Gamma(t) = [geometric prefactor] * J0(2 Omega t),
    // evaluated through the resonance-shell route. Agrees with
    // gamma_perturbative() at t = 0 to rounding.
    double gamma_of_t(double t) const;

    // Condensate density at the resonance shell, max[(mu - hbar Delta0)/U, 0].
    double density_at_resonance(double mu) const;
    // Outcoupled atom flux -dN/dt = Gamma * n(x_res).
    double flux(double mu) const;
    // Output velocity from M v^2/2 = mu - hbar Delta(0) (0 when clamped).
    double velocity(double mu) const;

    // Antiderivative F with F' = mu^{p}/(mu - hbar Delta0) so that
    // F(mu(0)) - F(mu(t)) = alpha t; the artanh term uses the real branch
    // (its constant imaginary offset cancels in the difference).
    double implicit_F(double mu) const;

    // ODE coefficient alpha and transition rate Gamma, optionally for a
    // detuning other than the configured one (used by the chirp compensation).
    double alpha() const;
    double alpha_at(double detuning0) const;
    double gamma_at(double detuning0) const;

    // All rate constants for a trajectory starting at mu0, including the
    // population rate Gamma_pop and natural energy width
    // delta_E = hbar Gamma_pop ~ (15/2) pi hbar^{5/2} W^2 sqrt(D)/mu0^{3/2} (3D).
    RateSet rates(double mu0) const;

    // State with mu and N consistent at time t.
    AnalyticState initial_state(double n0_atoms, double t = 0.0) const;

    // mu(infinity) = hbar Delta(0) and the atom number left behind.
    std::pair<double, double> steady_state() const;

    // Time at which the flux has fallen to `fraction` of its initial value
    // (closed form through F).
    double flux_decay_time(double mu0, double fraction = 0.05) const;

    // Uniform grid resolving the decay: dt = min(0.01/Gamma_pop, 10 ms),
    // horizon 1.5x the flux-5% time.
    std::vector<double> default_time_grid(double mu0) const;

    // Full trajectory mu(t), N(t), flux(t), v(t) on t_grid (strictly
    // increasing, starting at or after initial.t). A start below the
    // resonance energy yields the flagged constant trajectory.
    DecayTrajectory evolve(const AnalyticState& initial, std::span<const double> t_grid,
                           DecayMethod method) const;

private:
    PhysicalParams phys_;
    TrapCoupling trap_;
    DimensionMode mode_;
    double u1_ = 0.0;

    double mu_power() const; // exponent p in the decay ODE denominator
};

// evolve_decay on a model built from (p, tc): convenience mirroring the
// per-operation call shape used by the harness.
DecayTrajectory evolve_decay(const AnalyticState& initial, std::span<const double> t_grid,
                             DecayMethod method, const DecayModel& model);

// Natural energy width and population rate for a trajectory starting at mu0.
RateSet energy_width(const DecayModel& model, double mu0);

// Mean output velocity (from the initial state) and relative width
// delta_v/<v> with delta_v = delta_E/(M <v>).
std::pair<double, double> velocity_width(const DecayTrajectory& traj, const RateSet& rates,
                                         const PhysicalParams& p);

// Rf chirp that keeps the output velocity constant:
// hbar Delta0(t) = hbar Delta0(0) + mu(t) - mu(0), integrated
// self-consistently with alpha tracking the instantaneous detuning.
// Throws NumericalFailure("chirp exhausted ...") if the schedule would
// drive Delta0 <= 0 within the grid.
std::pair<DecayTrajectory, ChirpSchedule>
chirp_compensation(const AnalyticState& initial, std::span<const double> t_grid,
                   const DecayModel& model);

} // namespace atomlaser
