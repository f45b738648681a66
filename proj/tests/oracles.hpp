#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they are used to check.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// J0 through the integral representation J0(x) = (1/2pi) Int_0^{2pi}
// cos(x sin u) du; the trapezoid rule on a periodic analytic integrand
// converges spectrally, so N = 8192 is converged to rounding for |x| <= 100.
inline double j0_quadrature(double x) {
    const int n = 8192;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double u = 2.0 * std::numbers::pi * double(j) / double(n);
        sum += std::cos(x * std::sin(u));
    }
    return sum / double(n);
}

// Exactly the 40-term power series sum_k (-x^2/4)^k/(k!)^2.
inline double j0_series_40(double x) {
    double term = 1.0, sum = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k <= 40; ++k) {
        term *= -q / (double(k) * double(k));
        sum += term;
    }
    return sum;
}

// Composite Simpson on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Plain bisection; used where a second, independent root route is wanted.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Fixed-step classical RK4 with n substeps per unit interval, local to the
// tests so library integrators can be checked against it.
inline double rk4_scalar(const std::function<double(double, double)>& rhs, double y0, double t0,
                         double t1, long n_steps) {
    double y = y0, t = t0;
    double h = (t1 - t0) / double(n_steps);
    for (long i = 0; i < n_steps; ++i) {
        double k1 = rhs(t, y);
        double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        double k4 = rhs(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        t += h;
    }
    return y;
}

} // namespace oracle
