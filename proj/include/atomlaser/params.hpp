#pragma once

#include <optional>
#include <vector>

#include "atomlaser/constants.hpp"

namespace atomlaser {

// Atomic species constants. interaction_U is derived, U = 4 pi hbar^2 a / M,
// the mean-field coupling for the (assumed diagonal) scattering matrix.
struct PhysicalParams {
    double hbar = constants::hbar;               // J s
    double mass = constants::sodium_mass;        // kg
    double scatter_len = constants::sodium_scattering_length; // m
    double bohr_radius = constants::bohr_radius; // m
    double interaction_U = 0.0;                  // J m^3

    // Validates and fills interaction_U.
    static PhysicalParams make(double mass = constants::sodium_mass,
                               double scatter_len = constants::sodium_scattering_length);
    static PhysicalParams sodium() { return make(); }
};

// U = 4 pi hbar^2 a / M. Zero scattering length gives the noninteracting
// limit U = 0; negative inputs are rejected.
double derive_interaction(const PhysicalParams& p);

// Piecewise-linear rf detuning schedule Delta(0)(t), produced by the chirp
// compensation and carried along for bookkeeping.
struct ChirpSchedule {
    std::vector<double> t;        // s
    std::vector<double> detuning; // rad/s

    double at(double time) const; // linear interpolation, clamped ends
};

// Trap and rf-coupling parameters. hbar*detuning0 = hbar*omega_rf - V_off
// holds by construction; only detuning0 enters the dynamics.
struct TrapCoupling {
    double omega_T = 0.0;    // trap angular frequency, rad/s
    double V_off = 0.0;      // trap bottom offset, J
    double omega_rf = 0.0;   // rf angular frequency, rad/s
    double detuning0 = 0.0;  // Delta(0), rad/s
    double rabi = 0.0;       // Omega, rad/s
    std::optional<double> b_field_amp; // T
    std::optional<double> g_factor;    // dimensionless
    std::optional<ChirpSchedule> chirp;

    // From the trap-center detuning directly (V_off gauge-fixed to 0).
    static TrapCoupling make(double omega_T, double detuning0, double rabi);
    // From the rf frequency and potential offset.
    static TrapCoupling from_rf(double omega_T, double omega_rf, double V_off, double rabi);
    // Rabi frequency from the rf field amplitude: hbar Omega = g mu_B |B| / sqrt(2).
    static TrapCoupling from_b_field(double omega_T, double detuning0, double b_field_amp,
                                     double g_factor);
};

} // namespace atomlaser
