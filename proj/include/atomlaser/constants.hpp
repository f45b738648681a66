#pragma once

// Fundamental constants (CODATA 2018) and the sodium defaults used
// throughout. All values in SI.

namespace atomlaser::constants {

inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double bohr_radius = 5.29177210903e-11;     // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double bohr_magneton = 9.2740100783e-24;    // J/T

// 23Na in F=1: mass and the near-degenerate s-wave scattering length
// (53 Bohr radii for all m,m' channels).
inline constexpr double sodium_mass = 23.0 * atomic_mass_unit;          // kg
inline constexpr double sodium_scattering_length = 53.0 * bohr_radius;  // m

} // namespace atomlaser::constants
