#include "atomlaser/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "atomlaser/errors.hpp"

namespace atomlaser {

namespace {

// Power series J0(x) = sum_k (-x^2/4)^k / (k!)^2. Grows to ~1e4 in the
// largest intermediate term at the crossover, so the rounding floor stays
// near 1e-12 absolute there.
double j0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 200; ++k) {
        term *= -q / (double(k) * double(k));
        sum += term;
        if (std::fabs(term) < 1e-19) break;
    }
    return sum;
}

// Hankel asymptotic expansion,
//   J0(x) = sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)],
//   P = sum_k (-1)^k [(4k-1)!!]^2 / ((2k)! (8x)^{2k}),
//   Q = -sum_k (-1)^k [(4k+1)!!]^2 / ((2k+1)! (8x)^{2k+1}),
// truncated at the smallest term.
double j0_asymptotic(double x) {
    const double z2 = 64.0 * x * x; // (8x)^2
    double p = 1.0, q = -1.0 / (8.0 * x);
    double tp = 1.0, tq = q;
    for (int k = 0; k < 20; ++k) {
        double fp = double(4 * k + 1) * double(4 * k + 1) * double(4 * k + 3) * double(4 * k + 3) /
                    (double(2 * k + 1) * double(2 * k + 2) * z2);
        double fq = double(4 * k + 3) * double(4 * k + 3) * double(4 * k + 5) * double(4 * k + 5) /
                    (double(2 * k + 2) * double(2 * k + 3) * z2);
        if (fp >= 1.0 || fq >= 1.0) break; // divergent tail reached
        tp *= -fp;
        tq *= -fq;
        p += tp;
        q += tq;
        if (std::fabs(tp) < 1e-18 && std::fabs(tq) < 1e-18) break;
    }
    double c = std::cos(x - 0.25 * std::numbers::pi);
    double s = std::sin(x - 0.25 * std::numbers::pi);
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * c - q * s);
}

} // namespace

double bessel_j0(double x) {
    if (!std::isfinite(x))
        throw InvalidParameter("bessel_j0: non-finite argument");
    x = std::fabs(x);
    return x <= 12.0 ? j0_series(x) : j0_asymptotic(x);
}

double artanh_branch(double x) {
    if (!(x >= 0.0))
        throw InvalidParameter("artanh_branch: argument must be >= 0");
    if (x == 1.0)
        throw InvalidParameter("artanh_branch: pole at x = 1");
    if (x < 1.0)
        return std::atanh(x);
    return 0.5 * std::log((x + 1.0) / (x - 1.0));
}

double find_root(const std::function<double(double)>& f, const RootBracket& b) {
    if (!(b.lo < b.hi))
        throw InvalidParameter("find_root: bracket must satisfy lo < hi");
    if (!(b.tol_rel > 0.0))
        throw InvalidParameter("find_root: tol_rel must be positive");
    double lo = b.lo, hi = b.hi;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericalFailure("find_root: no sign change across bracket");

    for (int it = 0; it < b.max_iter; ++it) {
        double width = hi - lo;
        double scale = std::max({std::fabs(lo), std::fabs(hi), 1e-300});
        if (width <= b.tol_rel * scale)
            return 0.5 * (lo + hi);

        // secant proposal, midpoint when it leaves the bracket interior
        double x = 0.5 * (lo + hi);
        if (fhi != flo) {
            double xs = hi - fhi * (hi - lo) / (fhi - flo);
            double margin = 0.01 * width;
            if (xs > lo + margin && xs < hi - margin) x = xs;
        }
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    throw NumericalFailure("find_root: max_iter exceeded before bracket converged");
}

std::vector<double> rk4_integrate(const std::function<double(double, double)>& rhs, double y0,
                                  std::span<const double> t_grid) {
    if (t_grid.size() < 1)
        throw InvalidParameter("rk4_integrate: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw InvalidParameter("rk4_integrate: time grid must be strictly increasing");

    std::vector<double> y(t_grid.size());
    y[0] = y0;
    auto eval = [&rhs](double t, double v) {
        double d = rhs(t, v);
        if (!std::isfinite(d)) {
            std::ostringstream os;
            os << "rk4_integrate: non-finite rhs at t = " << t;
            throw NumericalFailure(os.str());
        }
        return d;
    };
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        double t = t_grid[i - 1];
        double h = t_grid[i] - t;
        double v = y[i - 1];
        double k1 = eval(t, v);
        double k2 = eval(t + 0.5 * h, v + 0.5 * h * k1);
        double k3 = eval(t + 0.5 * h, v + 0.5 * h * k2);
        double k4 = eval(t + h, v + h * k3);
        y[i] = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

} // namespace atomlaser
