#include "atomlaser/units.hpp"

#include <cmath>
#include <sstream>

#include "atomlaser/constants.hpp"

namespace atomlaser {

std::string Dim::str() const {
    std::ostringstream os;
    auto emit = [&os](const char* name, int e2) {
        if (e2 == 0) return;
        os << (os.tellp() > 0 ? " " : "") << name << "^";
        if (e2 % 2 == 0)
            os << e2 / 2;
        else
            os << "(" << e2 << "/2)";
    };
    emit("L", len2);
    emit("T", time2);
    emit("E", energy2);
    if (os.tellp() == 0) return "1";
    return os.str();
}

void Quantity::require_same(Dim o, const char* op) const {
    if (d != o)
        throw InvalidParameter(std::string("dimension mismatch in '") + op + "': " + d.str() +
                               " vs " + o.str());
}

Quantity sqrt(const Quantity& q) {
    return {std::sqrt(q.value), q.d.pow(1, 2)};
}

Quantity pow(const Quantity& q, int num, int den) {
    return {std::pow(q.value, double(num) / double(den)), q.d.pow(num, den)};
}

UnitSystem UnitSystem::trap_units(double mass, double omega_T) {
    if (mass <= 0.0 || omega_T <= 0.0)
        throw InvalidParameter("trap_units: mass and omega_T must be positive");
    const double hbar = constants::hbar;
    return {std::sqrt(hbar / (mass * omega_T)), 1.0 / omega_T, hbar * omega_T};
}

double UnitSystem::scale(Dim d) const {
    if (length_scale <= 0.0 || time_scale <= 0.0 || energy_scale <= 0.0)
        throw InvalidParameter("UnitSystem: scales must be positive");
    return std::pow(length_scale, 0.5 * d.len2) * std::pow(time_scale, 0.5 * d.time2) *
           std::pow(energy_scale, 0.5 * d.energy2);
}

} // namespace atomlaser
