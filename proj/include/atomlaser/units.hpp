#pragma once

#include <cmath>
#include <string>

#include "atomlaser/errors.hpp"

namespace atomlaser {

// Dimension exponents over the (length, time, energy) basis. Exponents are
// stored doubled so half-integer powers (e.g. the energy^{3/2}/time of the
// decay coefficient alpha) stay exact integers.
struct Dim {
    int len2 = 0;    // 2 x length exponent
    int time2 = 0;   // 2 x time exponent
    int energy2 = 0; // 2 x energy exponent

    friend constexpr bool operator==(Dim a, Dim b) = default;

    constexpr Dim operator*(Dim o) const {
        return {len2 + o.len2, time2 + o.time2, energy2 + o.energy2};
    }
    constexpr Dim operator/(Dim o) const {
        return {len2 - o.len2, time2 - o.time2, energy2 - o.energy2};
    }
    constexpr Dim pow(int num, int den = 1) const;
    std::string str() const;
};

constexpr Dim Dim::pow(int num, int den) const {
    // exponents scale by num/den; all uses in this library keep them
    // half-integral, enforced here
    Dim r{len2 * num, time2 * num, energy2 * num};
    if (r.len2 % den || r.time2 % den || r.energy2 % den)
        throw InvalidParameter("Dim::pow: fractional exponent not representable");
    return {r.len2 / den, r.time2 / den, r.energy2 / den};
}

namespace dim {
inline constexpr Dim scalar{0, 0, 0};
inline constexpr Dim length{2, 0, 0};
inline constexpr Dim time{0, 2, 0};
inline constexpr Dim energy{0, 0, 2};
inline constexpr Dim frequency{0, -2, 0};            // rad/s
inline constexpr Dim velocity{2, -2, 0};             // m/s
inline constexpr Dim mass{-4, 4, 2};                 // E t^2 / l^2
inline constexpr Dim action{0, 2, 2};                // J s
inline constexpr Dim volume{6, 0, 0};                // m^3
inline constexpr Dim density_3d{-6, 0, 0};           // m^-3
inline constexpr Dim density_1d{-2, 0, 0};           // m^-1
inline constexpr Dim volume_per_time{6, -2, 0};      // m^3/s (3D rate Gamma)
inline constexpr Dim interaction_3d{6, 0, 2};        // J m^3
inline constexpr Dim interaction_1d{2, 0, 2};        // J m
inline constexpr Dim alpha_3d{0, -2, 3};             // energy^{3/2}/time
inline constexpr Dim alpha_1d{0, -2, 1};             // energy^{1/2}/time
} // namespace dim

// A value tagged with its dimension. Used for unit conversions and the
// dimensional audits in the tests; the hot numerical paths work on plain
// doubles.
struct Quantity {
    double value = 0.0;
    Dim d = dim::scalar;

    Quantity operator*(const Quantity& o) const { return {value * o.value, d * o.d}; }
    Quantity operator/(const Quantity& o) const { return {value / o.value, d / o.d}; }
    Quantity operator+(const Quantity& o) const {
        require_same(o.d, "+");
        return {value + o.value, d};
    }
    Quantity operator-(const Quantity& o) const {
        require_same(o.d, "-");
        return {value - o.value, d};
    }
    Quantity operator*(double s) const { return {value * s, d}; }
    friend Quantity operator*(double s, const Quantity& q) { return {s * q.value, q.d}; }

private:
    void require_same(Dim o, const char* op) const;
};

Quantity sqrt(const Quantity& q);
Quantity pow(const Quantity& q, int num, int den = 1);

// Scales for converting between SI and dimensionless trap units
// (a_ho = sqrt(hbar/(M omega_T)), 1/omega_T, hbar omega_T by default).
struct UnitSystem {
    double length_scale; // m
    double time_scale;   // s
    double energy_scale; // J

    static UnitSystem trap_units(double mass, double omega_T);

    // Conversion factor for a quantity of dimension d: one dimensionless
    // unit of d equals `scale(d)` SI units.
    double scale(Dim d) const;

    double to_dimensionless(const Quantity& q) const { return q.value / scale(q.d); }
    Quantity from_dimensionless(double v, Dim d) const { return {v * scale(d), d}; }
};

} // namespace atomlaser
