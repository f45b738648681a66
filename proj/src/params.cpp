#include "atomlaser/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "atomlaser/errors.hpp"

namespace atomlaser {

double derive_interaction(const PhysicalParams& p) {
    if (p.hbar <= 0.0 || p.mass <= 0.0)
        throw InvalidParameter("derive_interaction: hbar and mass must be positive");
    if (p.scatter_len < 0.0)
        throw InvalidParameter("derive_interaction: scattering length must be >= 0");
    return 4.0 * std::numbers::pi * p.hbar * p.hbar * p.scatter_len / p.mass;
}

PhysicalParams PhysicalParams::make(double mass, double scatter_len) {
    PhysicalParams p;
    p.mass = mass;
    p.scatter_len = scatter_len;
    if (p.mass <= 0.0)
        throw InvalidParameter("PhysicalParams: mass must be positive");
    if (p.scatter_len < 0.0)
        throw InvalidParameter("PhysicalParams: scattering length must be >= 0");
    p.interaction_U = derive_interaction(p);
    return p;
}

double ChirpSchedule::at(double time) const {
    if (t.empty())
        throw InvalidParameter("ChirpSchedule: empty schedule");
    if (time <= t.front()) return detuning.front();
    if (time >= t.back()) return detuning.back();
    auto it = std::lower_bound(t.begin(), t.end(), time);
    std::size_t i = std::size_t(it - t.begin());
    double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return detuning[i - 1] + w * (detuning[i] - detuning[i - 1]);
}

namespace {

void validate(const TrapCoupling& tc) {
    if (tc.omega_T <= 0.0)
        throw InvalidParameter("TrapCoupling: omega_T must be positive");
    if (tc.rabi < 0.0)
        throw InvalidParameter("TrapCoupling: rabi frequency must be >= 0");
}

} // namespace

TrapCoupling TrapCoupling::make(double omega_T, double detuning0, double rabi) {
    TrapCoupling tc;
    tc.omega_T = omega_T;
    tc.detuning0 = detuning0;
    tc.rabi = rabi;
    tc.V_off = 0.0;
    tc.omega_rf = detuning0; // hbar Delta(0) = hbar omega_rf - V_off with V_off = 0
    validate(tc);
    return tc;
}

TrapCoupling TrapCoupling::from_rf(double omega_T, double omega_rf, double V_off, double rabi) {
    TrapCoupling tc;
    tc.omega_T = omega_T;
    tc.omega_rf = omega_rf;
    tc.V_off = V_off;
    tc.rabi = rabi;
    tc.detuning0 = omega_rf - V_off / constants::hbar;
    validate(tc);
    return tc;
}

TrapCoupling TrapCoupling::from_b_field(double omega_T, double detuning0, double b_field_amp,
                                        double g_factor) {
    if (b_field_amp < 0.0)
        throw InvalidParameter("TrapCoupling: field amplitude must be >= 0");
    double rabi =
        g_factor * constants::bohr_magneton * b_field_amp / (std::sqrt(2.0) * constants::hbar);
    TrapCoupling tc = make(omega_T, detuning0, rabi);
    tc.b_field_amp = b_field_amp;
    tc.g_factor = g_factor;
    return tc;
}

} // namespace atomlaser
