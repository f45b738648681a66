#pragma once

#include <vector>

namespace atomlaser {

// Uniform 1D grid with the 2 pi periodic wavenumber layout used by the FFT
// (k[j] = 2 pi j / L for j < n/2, negative branch above).
struct Grid1D {
    int n_points = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    double dx = 0.0;
    std::vector<double> x;
    std::vector<double> k;

    // n_points must be a power of two >= 8.
    static Grid1D make(int n_points, double x_min, double x_max);
    static Grid1D centered(int n_points, double half_width) {
        return make(n_points, -half_width, half_width);
    }

    double half_width() const { return 0.5 * (x_max - x_min); }
    int index_of(double xq) const; // nearest grid index, clamped
};

} // namespace atomlaser
