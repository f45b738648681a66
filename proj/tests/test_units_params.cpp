#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "atomlaser/analytic.hpp"
#include "atomlaser/constants.hpp"
#include "atomlaser/errors.hpp"
#include "atomlaser/params.hpp"
#include "atomlaser/units.hpp"
#include "oracles.hpp"

using namespace atomlaser;
namespace cst = atomlaser::constants;

TEST_CASE("derive_interaction for sodium") {
    PhysicalParams p = PhysicalParams::sodium();
    // 4 pi hbar^2 (53 a0) / (23 u), frozen against an independent evaluation
    CHECK(p.interaction_U == doctest::Approx(1.0262714673645525e-50).epsilon(1e-12));
    CHECK(std::fabs(p.interaction_U - derive_interaction(p)) <=
          1e-12 * p.interaction_U);
}

TEST_CASE("derive_interaction edge cases") {
    // zero scattering length is the noninteracting limit, not an error
    PhysicalParams p0 = PhysicalParams::make(cst::sodium_mass, 0.0);
    CHECK(p0.interaction_U == 0.0);

    PhysicalParams p1 = PhysicalParams::make(cst::sodium_mass, cst::sodium_scattering_length);
    PhysicalParams p2 =
        PhysicalParams::make(cst::sodium_mass, 2.0 * cst::sodium_scattering_length);
    CHECK(p2.interaction_U == doctest::Approx(2.0 * p1.interaction_U).epsilon(1e-14));

    CHECK_THROWS_AS(PhysicalParams::make(-1.0, cst::sodium_scattering_length), InvalidParameter);
    CHECK_THROWS_AS(PhysicalParams::make(cst::sodium_mass, -1e-10), InvalidParameter);
}

TEST_CASE("trap units and the oscillator length") {
    double omega = 2.0 * std::numbers::pi * 106.0;
    UnitSystem u = UnitSystem::trap_units(cst::sodium_mass, omega);
    CHECK(u.length_scale == doctest::Approx(2.0361358e-6).epsilon(1e-6));
    CHECK(u.time_scale == doctest::Approx(1.0 / omega).epsilon(1e-14));
    CHECK(u.energy_scale == doctest::Approx(cst::hbar * omega).epsilon(1e-14));

    // oscillator ground-state width as an independent route to a_ho:
    // <x^2> = a^2/2 for the gaussian exp(-x^2/2a^2), via quadrature
    double a = u.length_scale;
    auto dens = [&](double x) { return std::exp(-x * x / (a * a)); };
    auto x2dens = [&](double x) { return x * x * std::exp(-x * x / (a * a)); };
    double span = 12.0 * a;
    double x2 = oracle::simpson(x2dens, -span, span, 4000) /
                oracle::simpson(dens, -span, span, 4000);
    CHECK(std::sqrt(2.0 * x2) == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("quantity round trips through trap units") {
    UnitSystem u = UnitSystem::trap_units(cst::sodium_mass, 2.0 * std::numbers::pi * 106.0);
    // a_ho converts to exactly 1
    CHECK(u.to_dimensionless({u.length_scale, dim::length}) == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> vd(1e-30, 1e3);
    const Dim dims[] = {dim::length,  dim::time,         dim::energy,       dim::velocity,
                        dim::mass,    dim::density_3d,   dim::volume_per_time,
                        dim::alpha_3d, dim::interaction_1d};
    for (int i = 0; i < 200; ++i) {
        for (const Dim& d : dims) {
            double v = vd(rng);
            Quantity q{v, d};
            Quantity back = u.from_dimensionless(u.to_dimensionless(q), d);
            CHECK(std::fabs(back.value - v) <= 1e-12 * v);
        }
    }
}

TEST_CASE("dimension mismatch is an error") {
    Quantity len{1.0, dim::length};
    Quantity tm{1.0, dim::time};
    CHECK_THROWS_AS(len + tm, InvalidParameter);
    CHECK_THROWS_AS(len - tm, InvalidParameter);
    CHECK((len * tm).d == Dim{2, 2, 0});
    CHECK((len / tm).d == Dim{2, -2, 0});
}

TEST_CASE("trap coupling consistency invariants") {
    double omega = 2.0 * std::numbers::pi * 106.0;
    TrapCoupling tc = TrapCoupling::make(omega, 3500.0, 20.0);
    CHECK(std::fabs(cst::hbar * tc.detuning0 - (cst::hbar * tc.omega_rf - tc.V_off)) <=
          1e-12 * std::fabs(cst::hbar * tc.detuning0));

    TrapCoupling rf = TrapCoupling::from_rf(omega, 1e6, 3.0e-29, 20.0);
    CHECK(std::fabs(cst::hbar * rf.detuning0 - (cst::hbar * rf.omega_rf - rf.V_off)) <=
          1e-12 * std::fabs(cst::hbar * rf.omega_rf));

    CHECK_THROWS_AS(TrapCoupling::make(omega, 3500.0, -1.0), InvalidParameter);
    CHECK_THROWS_AS(TrapCoupling::make(0.0, 3500.0, 20.0), InvalidParameter);
}

TEST_CASE("rabi frequency from the rf field amplitude") {
    double omega = 2.0 * std::numbers::pi * 106.0;
    double g = 0.5, b = 1e-7; // T
    TrapCoupling tc = TrapCoupling::from_b_field(omega, 3500.0, b, g);
    double expected = g * cst::bohr_magneton * b / (std::sqrt(2.0) * cst::hbar);
    CHECK(tc.rabi == doctest::Approx(expected).epsilon(1e-14));
    CHECK(tc.b_field_amp.has_value());
}

TEST_CASE("dimensional audit of the derived rates") {
    // Compose Gamma, alpha and delta_E from dimension-tagged SI inputs and
    // check both the exponents and the values against the plain-double
    // implementation.
    PhysicalParams p = PhysicalParams::sodium();
    double omega = 2.0 * std::numbers::pi * 106.0;
    TrapCoupling tc = TrapCoupling::make(omega, 3500.0, 20.0);
    DecayModel model(p, tc);
    double mu0 = model.mu_from_n(5e6);

    Quantity hbar{p.hbar, dim::action};
    Quantity mass{p.mass, dim::mass};
    Quantity w{tc.rabi, dim::frequency};
    Quantity d0{tc.detuning0, dim::frequency};
    Quantity wt{tc.omega_T, dim::frequency};
    Quantity mu{mu0, dim::energy};

    Quantity mw2 = mass * wt * wt;
    CHECK(mw2.d == (dim::energy / (dim::length * dim::length))); // J/m^2

    Quantity gamma = 8.0 * std::numbers::pi * std::numbers::pi * hbar * w * w *
                     sqrt(2.0 * hbar * d0) / pow(mw2, 3, 2);
    CHECK(gamma.d == dim::volume_per_time);
    CHECK(gamma.value == doctest::Approx(model.gamma_perturbative()).epsilon(1e-12));

    Quantity alpha = 3.0 * std::pow(2.0, -3.5) / std::numbers::pi * gamma * pow(mw2, 3, 2);
    CHECK(alpha.d == dim::alpha_3d); // energy^{3/2}/time
    CHECK(alpha.value == doctest::Approx(model.alpha()).epsilon(1e-12));

    Quantity delta_e = 7.5 * std::numbers::pi * pow(hbar, 3, 2) * w * w * sqrt(d0) /
                       pow(mu, 3, 2) * hbar;
    CHECK(delta_e.d == dim::energy);
    CHECK(delta_e.value == doctest::Approx(model.rates(mu0).delta_E).epsilon(1e-12));
}
