#include "atomlaser/wavefield.hpp"

#include "atomlaser/errors.hpp"

namespace atomlaser {

WaveField WaveField::zeros(const Grid1D& grid, int n_components) {
    if (n_components != 2 && n_components != 3)
        throw InvalidParameter("WaveField: need two or three components");
    WaveField f;
    f.grid = grid;
    f.n_components = n_components;
    for (int c = 0; c < n_components; ++c)
        f.psi[c].assign(std::size_t(grid.n_points), cplx{0.0, 0.0});
    return f;
}

double WaveField::norm(int component) const {
    double s = 0.0;
    for (const cplx& a : psi[component])
        s += std::norm(a);
    return s * grid.dx;
}

double WaveField::total_norm() const {
    double s = 0.0;
    for (int c = 0; c < n_components; ++c)
        s += norm(c);
    return s;
}

double WaveField::bookkeeping_total() const {
    return total_norm() + ejected[0] + ejected[1] + ejected[2];
}

std::vector<double> WaveField::density(int component) const {
    std::vector<double> n(psi[component].size());
    for (std::size_t i = 0; i < n.size(); ++i)
        n[i] = std::norm(psi[component][i]);
    return n;
}

} // namespace atomlaser
