#include "atomlaser/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "atomlaser/errors.hpp"

namespace atomlaser {

Grid1D Grid1D::make(int n_points, double x_min, double x_max) {
    if (n_points < 8 || (n_points & (n_points - 1)) != 0)
        throw InvalidParameter("Grid1D: n_points must be a power of two >= 8");
    if (!(x_max > x_min))
        throw InvalidParameter("Grid1D: x_max must exceed x_min");
    Grid1D g;
    g.n_points = n_points;
    g.x_min = x_min;
    g.x_max = x_max;
    g.dx = (x_max - x_min) / n_points;
    g.x.resize(n_points);
    g.k.resize(n_points);
    const double dk = 2.0 * std::numbers::pi / (x_max - x_min);
    for (int i = 0; i < n_points; ++i) {
        g.x[i] = x_min + i * g.dx;
        int j = i < n_points / 2 ? i : i - n_points;
        g.k[i] = dk * j;
    }
    return g;
}

int Grid1D::index_of(double xq) const {
    int i = int(std::lround((xq - x_min) / dx));
    return std::clamp(i, 0, n_points - 1);
}

} // namespace atomlaser
