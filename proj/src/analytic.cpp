#include "atomlaser/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "atomlaser/errors.hpp"
#include "atomlaser/numerics.hpp"

namespace atomlaser {

namespace {
constexpr double pi = std::numbers::pi;

double hbar_detuning(const PhysicalParams& p, const TrapCoupling& tc) {
    return p.hbar * tc.detuning0;
}
} // namespace

double tf_density(double r, double mu, const PhysicalParams& p, const TrapCoupling& tc) {
    if (mu < 0.0)
        throw InvalidParameter("tf_density: mu must be >= 0");
    if (p.interaction_U <= 0.0)
        throw InvalidParameter("tf_density: interaction U must be positive");
    double v = 0.5 * p.mass * tc.omega_T * tc.omega_T * r * r;
    return std::max((mu - v) / p.interaction_U, 0.0);
}

double rabi_output_density(double r, double t, const TrapCoupling& tc, const PhysicalParams& p,
                           double mu0) {
    if (t < 0.0)
        throw InvalidParameter("rabi_output_density: t must be >= 0");
    double delta_r =
        tc.detuning0 - 0.5 * p.mass * tc.omega_T * tc.omega_T * r * r / p.hbar; // rad/s
    double d2 = delta_r * delta_r + 4.0 * tc.rabi * tc.rabi;
    if (d2 == 0.0) return 0.0;
    double s = std::sin(0.5 * std::sqrt(d2) * t);
    return 4.0 * tc.rabi * tc.rabi * s * s / d2 * tf_density(r, mu0, p, tc);
}

DecayModel::DecayModel(const PhysicalParams& p, const TrapCoupling& tc)
    : DecayModel(p, tc, DimensionMode::ThreeD) {}

DecayModel::DecayModel(const PhysicalParams& p, const TrapCoupling& tc, DimensionMode mode,
                       double u1)
    : phys_(p), trap_(tc), mode_(mode), u1_(u1) {
    if (mode_ == DimensionMode::ThreeD) {
        if (phys_.interaction_U <= 0.0)
            throw InvalidParameter("DecayModel: 3D interaction U must be positive");
    } else {
        if (u1_ <= 0.0)
            throw InvalidParameter("DecayModel: 1D coupling U1 must be positive");
    }
}

double DecayModel::matched_u1(const PhysicalParams& p, const TrapCoupling& tc, double n0_atoms) {
    DecayModel three_d(p, tc);
    double mu0 = three_d.mu_from_n(n0_atoms);
    double mw2 = p.mass * tc.omega_T * tc.omega_T;
    return 4.0 / (3.0 * n0_atoms) * std::sqrt(2.0 / mw2) * mu0 * std::sqrt(mu0);
}

double DecayModel::interaction() const {
    return mode_ == DimensionMode::ThreeD ? phys_.interaction_U : u1_;
}

double DecayModel::mu_power() const {
    return mode_ == DimensionMode::ThreeD ? 1.5 : 0.5;
}

double DecayModel::n_from_mu(double mu) const {
    if (mu < 0.0)
        throw InvalidParameter("n_from_mu: mu must be >= 0");
    double mw2 = phys_.mass * trap_.omega_T * trap_.omega_T;
    if (mode_ == DimensionMode::ThreeD)
        return 4.0 * pi / (15.0 * phys_.interaction_U) * std::pow(2.0 * mu, 2.5) /
               std::pow(mw2, 1.5);
    return 4.0 / (3.0 * u1_) * mu * std::sqrt(2.0 * mu / mw2);
}

double DecayModel::mu_from_n(double n_atoms) const {
    if (n_atoms <= 0.0)
        throw InvalidParameter("mu_from_n: atom number must be positive");
    double mw2 = phys_.mass * trap_.omega_T * trap_.omega_T;
    if (mode_ == DimensionMode::ThreeD)
        return 0.5 *
               std::pow(15.0 * n_atoms * phys_.interaction_U * std::pow(mw2, 1.5) / (4.0 * pi),
                        0.4);
    return std::pow(0.75 * n_atoms * u1_ * std::sqrt(0.5 * mw2), 2.0 / 3.0);
}

double DecayModel::resonance_radius() const {
    if (trap_.detuning0 <= 0.0)
        throw InvalidParameter("resonance_radius: Delta(0) <= 0, no resonance inside the trap");
    double mw2 = phys_.mass * trap_.omega_T * trap_.omega_T;
    return std::sqrt(2.0 * hbar_detuning(phys_, trap_) / mw2);
}

double DecayModel::detuning_gradient() const {
    return 2.0 * trap_.detuning0 / resonance_radius();
}

double DecayModel::gamma_perturbative() const {
    if (trap_.detuning0 <= 0.0)
        throw InvalidParameter("gamma_perturbative: Delta(0) must be positive");
    return gamma_at(trap_.detuning0);
}

double DecayModel::gamma_of_t(double t) const {
    if (t < 0.0)
        throw InvalidParameter("gamma_of_t: t must be >= 0");
    double r = resonance_radius(); // throws when no resonance exists
    double w2 = trap_.rabi * trap_.rabi;
    double prefactor;
    if (mode_ == DimensionMode::ThreeD)
        prefactor = 8.0 * pi * pi * r * r * w2 / detuning_gradient();
    else
        prefactor = 4.0 * pi * w2 / detuning_gradient();
    return prefactor * bessel_j0(2.0 * trap_.rabi * t);
}

double DecayModel::density_at_resonance(double mu) const {
    if (mu < 0.0)
        throw InvalidParameter("density_at_resonance: mu must be >= 0");
    return std::max((mu - hbar_detuning(phys_, trap_)) / interaction(), 0.0);
}

double DecayModel::flux(double mu) const {
    return gamma_perturbative() * density_at_resonance(mu);
}

double DecayModel::velocity(double mu) const {
    double e = mu - hbar_detuning(phys_, trap_);
    return e > 0.0 ? std::sqrt(2.0 * e / phys_.mass) : 0.0;
}

double DecayModel::implicit_F(double mu) const {
    double hd = hbar_detuning(phys_, trap_);
    double root = std::sqrt(mu);
    double at = artanh_branch(std::sqrt(mu / hd));
    if (mode_ == DimensionMode::ThreeD)
        return 2.0 * hd * root + (2.0 / 3.0) * mu * root - 2.0 * std::pow(hd, 1.5) * at;
    return 2.0 * root - 2.0 * std::sqrt(hd) * at;
}

double DecayModel::alpha() const {
    return alpha_at(trap_.detuning0);
}

double DecayModel::gamma_at(double detuning0) const {
    if (detuning0 <= 0.0)
        throw InvalidParameter("gamma_at: Delta(0) must be positive");
    double mw2 = phys_.mass * trap_.omega_T * trap_.omega_T;
    double w2 = trap_.rabi * trap_.rabi;
    if (mode_ == DimensionMode::ThreeD)
        return 8.0 * pi * pi * phys_.hbar * w2 * std::sqrt(2.0 * phys_.hbar * detuning0) /
               std::pow(mw2, 1.5);
    double x_res = std::sqrt(2.0 * phys_.hbar * detuning0 / mw2);
    return 4.0 * pi * w2 * x_res / (2.0 * detuning0);
}

double DecayModel::alpha_at(double detuning0) const {
    double mw2 = phys_.mass * trap_.omega_T * trap_.omega_T;
    if (mode_ == DimensionMode::ThreeD)
        return 3.0 * gamma_at(detuning0) * std::pow(mw2, 1.5) * std::pow(2.0, -3.5) / pi;
    return 0.5 * gamma_at(detuning0) * std::sqrt(0.5 * mw2);
}

RateSet DecayModel::rates(double mu0) const {
    if (mu0 <= 0.0)
        throw InvalidParameter("rates: mu0 must be positive");
    RateSet r;
    r.r_res = resonance_radius();
    r.gamma = gamma_perturbative();
    r.alpha = alpha();
    double w2 = trap_.rabi * trap_.rabi;
    if (mode_ == DimensionMode::ThreeD)
        r.gamma_pop = 7.5 * pi * std::pow(phys_.hbar, 1.5) * w2 * std::sqrt(trap_.detuning0) /
                      std::pow(mu0, 1.5);
    else
        r.gamma_pop = 1.5 * pi * std::sqrt(phys_.hbar) * w2 /
                      (std::sqrt(trap_.detuning0) * std::sqrt(mu0));
    r.delta_E = phys_.hbar * r.gamma_pop;
    return r;
}

AnalyticState DecayModel::initial_state(double n0_atoms, double t) const {
    return {t, mu_from_n(n0_atoms), n0_atoms};
}

std::pair<double, double> DecayModel::steady_state() const {
    double hd = hbar_detuning(phys_, trap_);
    if (hd <= 0.0)
        throw InvalidParameter("steady_state: Delta(0) must be positive");
    return {hd, n_from_mu(hd)};
}

double DecayModel::flux_decay_time(double mu0, double fraction) const {
    double hd = hbar_detuning(phys_, trap_);
    if (mu0 <= hd) return 0.0;
    if (trap_.rabi == 0.0)
        throw InvalidParameter("flux_decay_time: no decay at zero coupling");
    double mu_f = hd + fraction * (mu0 - hd);
    return (implicit_F(mu0) - implicit_F(mu_f)) / alpha();
}

std::vector<double> DecayModel::default_time_grid(double mu0) const {
    double hd = hbar_detuning(phys_, trap_);
    double horizon = 1.0;
    double dt = 0.01;
    if (trap_.rabi > 0.0 && trap_.detuning0 > 0.0 && mu0 > hd) {
        horizon = 1.5 * flux_decay_time(mu0, 0.05);
        dt = std::min(0.01 / rates(mu0).gamma_pop, 0.01);
    }
    std::size_t n = std::size_t(std::ceil(horizon / dt));
    n = std::clamp<std::size_t>(n, 100, 2'000'000);
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        grid[i] = horizon * double(i) / double(n);
    return grid;
}

DecayTrajectory DecayModel::evolve(const AnalyticState& initial, std::span<const double> t_grid,
                                   DecayMethod method) const {
    if (t_grid.empty())
        throw InvalidParameter("evolve: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw InvalidParameter("evolve: time grid must be strictly increasing");
    if (t_grid.front() < initial.t)
        throw InvalidParameter("evolve: time grid starts before the initial state");
    if (initial.mu <= 0.0)
        throw InvalidParameter("evolve: initial mu must be positive");

    DecayTrajectory traj;
    traj.dimension_mode = mode_;
    traj.states.reserve(t_grid.size());
    traj.flux.reserve(t_grid.size());
    traj.velocity.reserve(t_grid.size());

    const double hd = hbar_detuning(phys_, trap_);

    auto push = [&](double t, double mu) {
        mu = std::max(mu, std::min(initial.mu, hd)); // decay stops at the resonance energy
        traj.states.push_back({t, mu, n_from_mu(mu)});
        traj.flux.push_back(trap_.rabi > 0.0 && trap_.detuning0 > 0.0 ? flux(mu) : 0.0);
        traj.velocity.push_back(velocity(mu));
    };

    // Resonance shell outside the condensate (or no coupling): nothing decays.
    if (initial.mu <= hd || trap_.rabi == 0.0 || trap_.detuning0 <= 0.0) {
        traj.resonance_outside = initial.mu <= hd;
        for (double t : t_grid)
            push(t, initial.mu);
        return traj;
    }

    const double a = alpha();
    const double p = mu_power();

    if (method == DecayMethod::OdeRk4) {
        auto rhs = [&](double /*t*/, double mu) {
            if (mu <= hd) return 0.0;
            return -a * (mu - hd) / std::pow(mu, p);
        };
        std::vector<double> grid(t_grid.begin(), t_grid.end());
        if (grid.front() > initial.t)
            grid.insert(grid.begin(), initial.t);
        std::vector<double> mu = rk4_integrate(rhs, initial.mu, grid);
        std::size_t off = grid.size() - t_grid.size();
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            push(t_grid[i], mu[i + off]);
        return traj;
    }

    // Implicit Eq.-(13) route: invert F(mu0) - F(mu) = alpha (t - t0) by
    // bracketed root-finding on (hbar Delta0 (1+eps), previous mu].
    const double f0 = implicit_F(initial.mu);
    const double lo_limit = hd * (1.0 + 1e-12);
    double hi = initial.mu;
    for (double t : t_grid) {
        double tau = t - initial.t;
        auto g = [&](double mu) { return f0 - implicit_F(mu) - a * tau; };
        double mu_t;
        if (tau == 0.0) {
            mu_t = initial.mu;
        } else if (g(lo_limit) <= 0.0) {
            mu_t = hd; // saturated below bracket resolution
        } else {
            RootBracket b;
            b.lo = lo_limit;
            b.hi = hi;
            b.tol_rel = 1e-14;
            mu_t = find_root(g, b);
        }
        hi = std::max(mu_t, lo_limit);
        push(t, mu_t);
    }
    return traj;
}

DecayTrajectory evolve_decay(const AnalyticState& initial, std::span<const double> t_grid,
                             DecayMethod method, const DecayModel& model) {
    return model.evolve(initial, t_grid, method);
}

RateSet energy_width(const DecayModel& model, double mu0) {
    return model.rates(mu0);
}

std::pair<double, double> velocity_width(const DecayTrajectory& traj, const RateSet& rates,
                                         const PhysicalParams& p) {
    if (traj.states.empty())
        throw InvalidParameter("velocity_width: empty trajectory");
    double v0 = traj.velocity.front();
    if (v0 <= 0.0)
        throw InvalidParameter(
            "velocity_width: degenerate output, zero velocity outside the condensate");
    double dv = rates.delta_E / (p.mass * v0);
    return {v0, dv / v0};
}

std::pair<DecayTrajectory, ChirpSchedule>
chirp_compensation(const AnalyticState& initial, std::span<const double> t_grid,
                   const DecayModel& model) {
    if (t_grid.empty())
        throw InvalidParameter("chirp_compensation: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw InvalidParameter("chirp_compensation: time grid must be strictly increasing");

    const PhysicalParams& p = model.phys();
    const TrapCoupling& tc = model.trap();
    const double hbar = p.hbar;
    const double hd0 = hbar * tc.detuning0;
    if (initial.mu <= hd0)
        throw InvalidParameter("chirp_compensation: mu(0) must exceed hbar Delta(0)(0)");

    // mu - hbar Delta0(t) is held at its initial value, so the output
    // velocity never drifts; alpha follows the shrinking resonance shell.
    const double c = initial.mu - hd0;
    const double mu0 = initial.mu;
    const double pw = model.mode() == DimensionMode::ThreeD ? 1.5 : 0.5;
    const double v_const = std::sqrt(2.0 * c / p.mass);

    auto detuning_of = [&](double mu) { return (hd0 + mu - mu0) / hbar; }; // rad/s
    auto rhs = [&](double mu) {
        double d = detuning_of(mu);
        if (d <= 0.0) return 0.0; // exhausted; detected after the step
        return -model.alpha_at(d) * c / std::pow(mu, pw);
    };

    DecayTrajectory traj;
    traj.dimension_mode = model.mode();
    ChirpSchedule schedule;

    double mu = mu0;
    double t_prev = initial.t;
    bool rabi_on = tc.rabi > 0.0;
    for (double t : t_grid) {
        if (t < initial.t)
            throw InvalidParameter("chirp_compensation: grid starts before the initial state");
        if (rabi_on && t > t_prev) {
            double h = t - t_prev;
            double k1 = rhs(mu);
            double k2 = rhs(mu + 0.5 * h * k1);
            double k3 = rhs(mu + 0.5 * h * k2);
            double k4 = rhs(mu + h * k3);
            mu += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        }
        double d = detuning_of(mu);
        if (d <= 0.0) {
            std::ostringstream os;
            os << "chirp exhausted: schedule drives Delta(0) <= 0 at t = " << t << " s";
            throw NumericalFailure(os.str());
        }
        traj.states.push_back({t, mu, model.n_from_mu(mu)});
        // -dN/dt = Gamma(Delta(t)) * n(x_res); the resonance density stays
        // at its initial value c/U along the compensated trajectory.
        double flux = rabi_on ? model.gamma_at(d) * c / model.interaction() : 0.0;
        traj.flux.push_back(flux);
        traj.velocity.push_back(v_const);
        schedule.t.push_back(t);
        schedule.detuning.push_back(d);
        t_prev = t;
    }
    return {traj, schedule};
}

} // namespace atomlaser
