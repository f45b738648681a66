#pragma once

#include <array>
#include <complex>
#include <vector>

#include "atomlaser/grid.hpp"

namespace atomlaser {

using cplx = std::complex<double>;

// Complex amplitudes for the Zeeman components on a shared grid.
// Component index c maps to magnetic quantum number m = c - 1, so
// c=0 is the trapped m=-1 state, c=1 the untrapped m=0 state and c=2 the
// (optional) repelled m=+1 state. Norms are atom numbers, sum |psi|^2 dx.
struct WaveField {
    Grid1D grid;
    int n_components = 2;
    std::array<std::vector<cplx>, 3> psi;
    double t = 0.0;
    // Norm removed by the absorbing boundary, per component ("ejected atoms").
    std::array<double, 3> ejected{0.0, 0.0, 0.0};

    static WaveField zeros(const Grid1D& grid, int n_components);

    double norm(int component) const;
    double total_norm() const;
    // total_norm() + sum of ejected: conserved through absorbed evolution.
    double bookkeeping_total() const;

    std::vector<double> density(int component) const; // |psi_c(x)|^2
};

} // namespace atomlaser
