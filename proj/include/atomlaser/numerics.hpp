#pragma once

#include <functional>
#include <span>
#include <vector>

namespace atomlaser {

// Bessel function of the first kind, order zero. Power series up to the
// crossover, Hankel asymptotic expansion beyond; absolute error <= 1e-10
// for |x| <= 100.
double bessel_j0(double x);

// Real inverse hyperbolic tangent extended past the pole: for 0 <= x < 1
// the usual artanh(x); for x > 1 the real part (1/2) ln((x+1)/(x-1))
// (arcoth continuation). The constant imaginary offset of the analytic
// continuation cancels in the bracket differences it is used for.
double artanh_branch(double x);

struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
    double tol_rel = 1e-14;
    int max_iter = 200;
};

// Bracketed scalar root find: bisection with a secant proposal each
// iteration. Requires a sign change on [lo, hi]; deterministic
// (same bracket -> same root bit-for-bit).
double find_root(const std::function<double(double)>& f, const RootBracket& b);

// Classical fixed-step RK4 along the given strictly increasing grid, one
// step per interval. Returns y at every grid point (front() == y0).
std::vector<double> rk4_integrate(const std::function<double(double, double)>& rhs,
                                  double y0, std::span<const double> t_grid);

} // namespace atomlaser
