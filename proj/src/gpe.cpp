#include "atomlaser/gpe.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "atomlaser/analytic.hpp"
#include "atomlaser/errors.hpp"

namespace atomlaser {

namespace {
constexpr double pi = std::numbers::pi;

// FFTW plan creation/destruction is not thread safe; execution on distinct
// plans is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct GpeSolver::Fft {
    int n = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit Fft(int n_points) : n(n_points) {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        buf = fftw_alloc_complex(std::size_t(n));
        // FFTW_ESTIMATE keeps the plan choice deterministic across runs
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }

    cplx* data() { return reinterpret_cast<cplx*>(buf); }
    void load(const std::vector<cplx>& v) { std::copy(v.begin(), v.end(), data()); }
    void store(std::vector<cplx>& v) { std::copy(data(), data() + n, v.begin()); }
    void forward() { fftw_execute(fwd); }
    void backward() { fftw_execute(bwd); }
};

namespace {

// Cyclic Jacobi diagonalization of a symmetric 3x3; a is overwritten, v
// receives the eigenvectors as columns.
inline void jacobi_3x3(double a[3][3], double v[3][3]) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            v[i][j] = i == j ? 1.0 : 0.0;
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if (off <= 1e-30 * (diag + off)) break;
        static const int idx[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (const auto& pq : idx) {
            int p = pq[0], q = pq[1];
            if (a[p][q] == 0.0) continue;
            double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
            double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
            double cth = 1.0 / std::sqrt(t * t + 1.0);
            double sth = t * cth;
            for (int i = 0; i < 3; ++i) {
                double aip = a[i][p], aiq = a[i][q];
                a[i][p] = cth * aip - sth * aiq;
                a[i][q] = sth * aip + cth * aiq;
            }
            for (int j = 0; j < 3; ++j) {
                double apj = a[p][j], aqj = a[q][j];
                a[p][j] = cth * apj - sth * aqj;
                a[q][j] = sth * apj + cth * aqj;
            }
            for (int i = 0; i < 3; ++i) {
                double vip = v[i][p], viq = v[i][q];
                v[i][p] = cth * vip - sth * viq;
                v[i][q] = sth * vip + cth * viq;
            }
        }
    }
}

} // namespace

// Nonlinear split stepping goes parametrically unstable once the kinetic
// phase of the fastest grid mode exceeds pi per step.
double kinetic_stability_dt(const Grid1D& grid, const PhysicalParams& p) {
    double k_max = std::numbers::pi / grid.dx;
    return 2.0 * std::numbers::pi * p.mass / (p.hbar * k_max * k_max);
}

GpeSolver::GpeSolver(const Grid1D& grid, const PhysicalParams& p, const TrapCoupling& tc,
                     double u1, const SolverConfig& cfg)
    : grid_(grid), phys_(p), trap_(tc), u1_(u1), cfg_(cfg) {
    if (!(cfg_.dt > 0.0))
        throw InvalidParameter("GpeSolver: dt must be positive");
    if (cfg_.n_components != 2 && cfg_.n_components != 3)
        throw InvalidParameter("GpeSolver: two or three components");
    if (cfg_.record_every < 1)
        throw InvalidParameter("GpeSolver: record_every must be >= 1");
    if (u1_ < 0.0)
        throw InvalidParameter("GpeSolver: U1 must be >= 0");
    double span = grid_.x_max - grid_.x_min;
    if (cfg_.absorber.enabled && !(cfg_.absorber.width < 0.25 * span))
        throw InvalidParameter("GpeSolver: absorber width must be < span/4");
    if (cfg_.absorber.enabled && (cfg_.absorber.width < 0.0 || cfg_.absorber.strength < 0.0))
        throw InvalidParameter("GpeSolver: absorber width/strength must be >= 0");
    double absorber_w = cfg_.absorber.enabled ? cfg_.absorber.width : 0.0;
    if (cfg_.detector_x != 0.0 &&
        std::fabs(cfg_.detector_x) >= grid_.half_width() - absorber_w)
        throw InvalidParameter("GpeSolver: detector inside the absorbing region");
    if (u1_ > 0.0 && cfg_.dt > kinetic_stability_dt(grid_, p)) {
        std::ostringstream os;
        os << "GpeSolver: dt = " << cfg_.dt << " s exceeds the split-step stability bound "
           << kinetic_stability_dt(grid_, p)
           << " s (2 pi M/(hbar k_max^2)); high-k modes would grow parametrically";
        throw InvalidParameter(os.str());
    }

    const int n = grid_.n_points;
    trap_v_.resize(n);
    absorber_w_.assign(n, 0.0);
    kinetic_half_factor_.resize(n);
    const double mw2 = phys_.mass * trap_.omega_T * trap_.omega_T;
    for (int i = 0; i < n; ++i) {
        trap_v_[i] = 0.5 * mw2 * grid_.x[i] * grid_.x[i];
        double ph = phys_.hbar * grid_.k[i] * grid_.k[i] * cfg_.dt / (4.0 * phys_.mass);
        kinetic_half_factor_[i] = cplx{std::cos(ph), -std::sin(ph)};
    }
    precompute_coupling_exponentials();
    if (cfg_.absorber.enabled && cfg_.absorber.width > 0.0) {
        for (int i = 0; i < n; ++i) {
            double edge = 0.0;
            if (grid_.x[i] > grid_.x_max - cfg_.absorber.width)
                edge = (grid_.x[i] - (grid_.x_max - cfg_.absorber.width)) / cfg_.absorber.width;
            else if (grid_.x[i] < grid_.x_min + cfg_.absorber.width)
                edge = ((grid_.x_min + cfg_.absorber.width) - grid_.x[i]) / cfg_.absorber.width;
            if (edge > 0.0) {
                double s = std::sin(0.5 * pi * std::min(edge, 1.0));
                absorber_w_[i] = cfg_.absorber.strength * s * s;
            }
        }
    }
    fft_ = std::make_unique<Fft>(n);
}

GpeSolver::~GpeSolver() = default;

double GpeSolver::trap_potential(double x) const {
    return 0.5 * phys_.mass * trap_.omega_T * trap_.omega_T * x * x;
}

void GpeSolver::half_kinetic(WaveField& field) const {
    const int n = grid_.n_points;
    cplx* b = fft_->data();
    const double inv_n = 1.0 / double(n);
    for (int c = 0; c < field.n_components; ++c) {
        fft_->load(field.psi[c]);
        fft_->forward();
        for (int i = 0; i < n; ++i)
            b[i] *= kinetic_half_factor_[i];
        fft_->backward();
        for (int i = 0; i < n; ++i)
            b[i] *= inv_n;
        fft_->store(field.psi[c]);
    }
}

// The coupling matrix splits into (U1 n_tot) I plus a density-independent
// part B(x); exp(-i H dt/hbar) = exp(-i U1 n_tot dt/hbar) exp(-i B dt/hbar),
// and the second factor is precomputed per grid point.
void GpeSolver::precompute_coupling_exponentials() {
    const int n = grid_.n_points;
    const double theta = cfg_.dt / phys_.hbar;
    const double hd = phys_.hbar * trap_.detuning0;
    const double c = phys_.hbar * trap_.rabi;
    if (cfg_.n_components == 2) {
        pot2_.resize(std::size_t(n));
        for (int i = 0; i < n; ++i) {
            double a = trap_v_[i] - hd; // m = -1 diagonal, mean field removed
            double s = 0.5 * a;
            double d = 0.5 * a;
            double w = std::sqrt(d * d + c * c);
            double wt = w * theta;
            double cw = std::cos(wt);
            double sc = w > 0.0 ? std::sin(wt) / w : theta;
            cplx phase{std::cos(s * theta), -std::sin(s * theta)};
            pot2_[std::size_t(i)] = {phase * cplx{cw, -d * sc}, phase * cplx{0.0, -c * sc},
                                     phase * cplx{cw, d * sc}};
        }
    } else {
        pot3_.resize(std::size_t(n));
        for (int i = 0; i < n; ++i) {
            double a0 = trap_v_[i] - hd;
            double a[3][3] = {{a0, c, 0.0}, {c, 0.0, c}, {0.0, c, -a0}};
            double v[3][3];
            jacobi_3x3(a, v);
            Pot3& p3 = pot3_[std::size_t(i)];
            for (int r = 0; r < 3; ++r)
                for (int q = 0; q < 3; ++q)
                    p3.v[r][q] = v[r][q];
            for (int q = 0; q < 3; ++q) {
                double ph = a[q][q] * theta;
                p3.eig_phase[q] = cplx{std::cos(ph), -std::sin(ph)};
            }
        }
    }
}

std::vector<double> GpeSolver::coupling_matrix(double x, double n_tot) const {
    const int nc = cfg_.n_components;
    std::vector<double> h(std::size_t(nc) * nc, 0.0);
    double vt = trap_potential(x);
    double hd = phys_.hbar * trap_.detuning0;
    double mean = u1_ * n_tot;
    h[0] = vt - hd + mean;          // m = -1
    h[std::size_t(nc) + 1] = mean;  // m = 0
    if (nc == 3) h[8] = hd - vt + mean; // m = +1
    double c = phys_.hbar * trap_.rabi;
    h[1] = h[std::size_t(nc)] = c;
    if (nc == 3) h[5] = h[7] = c;
    return h;
}

void GpeSolver::potential_step(WaveField& field) const {
    const int n = grid_.n_points;
    const double theta = cfg_.dt / phys_.hbar;

    if (field.n_components == 2) {
        for (int i = 0; i < n; ++i) {
            cplx& u = field.psi[0][std::size_t(i)];
            cplx& v = field.psi[1][std::size_t(i)];
            double n_tot = std::norm(u) + std::norm(v);
            double ph = u1_ * n_tot * theta;
            cplx mean{std::cos(ph), -std::sin(ph)};
            const Pot2& m = pot2_[std::size_t(i)];
            cplx u2 = m.u00 * u + m.u01 * v;
            cplx v2 = m.u01 * u + m.u11 * v;
            u = mean * u2;
            v = mean * v2;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            cplx a0 = field.psi[0][std::size_t(i)];
            cplx a1 = field.psi[1][std::size_t(i)];
            cplx a2 = field.psi[2][std::size_t(i)];
            double n_tot = std::norm(a0) + std::norm(a1) + std::norm(a2);
            double ph = u1_ * n_tot * theta;
            cplx mean{std::cos(ph), -std::sin(ph)};
            const Pot3& p3 = pot3_[std::size_t(i)];
            cplx out0{}, out1{}, out2{};
            for (int q = 0; q < 3; ++q) {
                cplx proj = p3.v[0][q] * a0 + p3.v[1][q] * a1 + p3.v[2][q] * a2;
                proj *= p3.eig_phase[q];
                out0 += p3.v[0][q] * proj;
                out1 += p3.v[1][q] * proj;
                out2 += p3.v[2][q] * proj;
            }
            field.psi[0][std::size_t(i)] = mean * out0;
            field.psi[1][std::size_t(i)] = mean * out1;
            field.psi[2][std::size_t(i)] = mean * out2;
        }
    }
}

void GpeSolver::apply_absorber(WaveField& field) const {
    if (!cfg_.absorber.enabled || cfg_.absorber.width <= 0.0) return;
    const int n = grid_.n_points;
    for (int c = 0; c < field.n_components; ++c) {
        double removed = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = absorber_w_[i];
            if (w == 0.0) continue;
            double f = std::exp(-w * cfg_.dt / phys_.hbar);
            double before = std::norm(field.psi[c][i]);
            field.psi[c][i] *= f;
            removed += before * (1.0 - f * f);
        }
        field.ejected[c] += removed * grid_.dx;
    }
}

void GpeSolver::check_finite(const WaveField& field, long step_index) const {
    for (int c = 0; c < field.n_components; ++c) {
        const cplx& probe = field.psi[c][0];
        const cplx& mid = field.psi[c][std::size_t(grid_.n_points / 2)];
        if (!std::isfinite(probe.real()) || !std::isfinite(probe.imag()) ||
            !std::isfinite(mid.real()) || !std::isfinite(mid.imag())) {
            std::ostringstream os;
            os << "GpeSolver: NaN detected at step " << step_index << " (t = " << field.t
               << " s)";
            throw NumericalFailure(os.str());
        }
    }
}

void GpeSolver::step(WaveField& field) const {
    half_kinetic(field);
    potential_step(field);
    half_kinetic(field);
    apply_absorber(field);
    field.t += cfg_.dt;
    check_finite(field, std::lround(field.t / cfg_.dt));
}

WaveField GpeSolver::prepare_ground_state(double n_atoms, GroundStateMethod method) const {
    if (n_atoms <= 0.0)
        throw InvalidParameter("prepare_ground_state: atom number must be positive");
    const int n = grid_.n_points;
    WaveField field = WaveField::zeros(grid_, cfg_.n_components);

    double mu_tf = 0.0;
    if (u1_ > 0.0) {
        DecayModel model_1d(phys_, trap_, DimensionMode::OneD, u1_);
        mu_tf = model_1d.mu_from_n(n_atoms);
        double r_tf = std::sqrt(2.0 * mu_tf / (phys_.mass * trap_.omega_T * trap_.omega_T));
        double usable = grid_.half_width() - (cfg_.absorber.enabled ? cfg_.absorber.width : 0.0);
        if (r_tf > usable) {
            std::ostringstream os;
            os << "prepare_ground_state: grid too small, TF radius " << r_tf
               << " m exceeds usable half width " << usable << " m";
            throw ConfigError(os.str());
        }
        for (int i = 0; i < n; ++i)
            field.psi[0][i] = std::sqrt(std::max((mu_tf - trap_v_[i]) / u1_, 0.0));
    } else {
        // noninteracting limit: harmonic-oscillator gaussian
        double aho = std::sqrt(phys_.hbar / (phys_.mass * trap_.omega_T));
        mu_tf = 0.5 * phys_.hbar * trap_.omega_T;
        for (int i = 0; i < n; ++i)
            field.psi[0][i] = std::exp(-0.5 * grid_.x[i] * grid_.x[i] / (aho * aho));
    }

    auto renormalize = [&](WaveField& f) {
        double cur = f.norm(0);
        if (cur <= 0.0)
            throw NumericalFailure("prepare_ground_state: state collapsed to zero norm");
        double s = std::sqrt(n_atoms / cur);
        for (auto& a : f.psi[0])
            a *= s;
    };
    renormalize(field);
    last_mu_ = mu_tf;
    if (method == GroundStateMethod::TfProfile)
        return field;

    // imaginary-time relaxation with a dtau halving cascade; the split-step
    // fixed-point bias scales as dtau^2, so each halving refines the state
    GroundStateOptions opt = cfg_.ground_state;
    double dtau = opt.dtau_start > 0.0 ? opt.dtau_start : 0.05 * phys_.hbar / mu_tf;
    std::vector<double> kin(n);
    cplx* b = fft_->data();
    double mu_prev = 0.0;
    for (int stage = 0; stage <= opt.halvings; ++stage, dtau *= 0.5) {
        for (int i = 0; i < n; ++i)
            kin[i] = std::exp(-phys_.hbar * grid_.k[i] * grid_.k[i] * dtau / (4.0 * phys_.mass));
        bool converged = false;
        for (long it = 0; it < opt.max_iter; ++it) {
            // e^{-K dtau/2} e^{-V dtau} e^{-K dtau/2}, V = trap + U1 |psi|^2
            fft_->load(field.psi[0]);
            fft_->forward();
            for (int i = 0; i < n; ++i)
                b[i] *= kin[i];
            fft_->backward();
            const double inv_n = 1.0 / double(n);
            for (int i = 0; i < n; ++i) {
                cplx a = b[i] * inv_n;
                double vv = trap_v_[i] + u1_ * std::norm(a);
                b[i] = a * std::exp(-vv * dtau / phys_.hbar);
            }
            fft_->forward();
            for (int i = 0; i < n; ++i)
                b[i] *= kin[i];
            fft_->backward();
            for (int i = 0; i < n; ++i)
                b[i] *= inv_n;
            fft_->store(field.psi[0]);

            double decayed = field.norm(0);
            double mu = -0.5 * phys_.hbar * std::log(decayed / n_atoms) / dtau;
            renormalize(field);
            double drift = std::fabs(mu - mu_prev);
            mu_prev = mu;
            if (it > 0 && drift < opt.drift_tol * std::fabs(mu)) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream os;
            os << "prepare_ground_state: imaginary time did not converge at dtau = " << dtau;
            throw NumericalFailure(os.str());
        }
    }

    // polish by preconditioned gradient flow on the energy functional; this
    // removes the O(dtau^2) Trotter bias of the split relaxation and drives
    // the stationary-GPE residual toward rounding level
    {
        const std::size_t un = std::size_t(n);
        std::vector<cplx>& psi = field.psi[0];
        std::vector<cplx> hpsi(un), res(un);
        std::vector<double> kin_e(un), precond_k(un), precond_v(un);
        const double mu_ref = mu_tf > 0.0 ? mu_tf : 0.5 * phys_.hbar * trap_.omega_T;
        for (int i = 0; i < n; ++i) {
            kin_e[std::size_t(i)] =
                0.5 * phys_.hbar * phys_.hbar * grid_.k[i] * grid_.k[i] / phys_.mass;
            precond_k[std::size_t(i)] = 1.0 / (1.0 + kin_e[std::size_t(i)] / mu_ref);
            precond_v[std::size_t(i)] = 1.0 / (1.0 + trap_v_[i] / mu_ref);
        }
        const double eta = 0.4 / mu_ref;
        bool converged = false;
        for (long it = 0; it < opt.max_iter && !converged; ++it) {
            fft_->load(psi);
            fft_->forward();
            for (int i = 0; i < n; ++i)
                b[i] *= kin_e[std::size_t(i)] / double(n);
            fft_->backward();
            fft_->store(hpsi);
            double mu_num = 0.0;
            for (int i = 0; i < n; ++i) {
                hpsi[std::size_t(i)] +=
                    (trap_v_[i] + u1_ * std::norm(psi[std::size_t(i)])) * psi[std::size_t(i)];
                mu_num += std::real(std::conj(psi[std::size_t(i)]) * hpsi[std::size_t(i)]);
            }
            double mu = mu_num * grid_.dx / n_atoms;
            double res_sq = 0.0;
            for (int i = 0; i < n; ++i) {
                res[std::size_t(i)] = hpsi[std::size_t(i)] - mu * psi[std::size_t(i)];
                res_sq += std::norm(res[std::size_t(i)]);
            }
            double rel_residual = std::sqrt(res_sq * grid_.dx / n_atoms) / mu;
            fft_->load(res);
            fft_->forward();
            for (int i = 0; i < n; ++i)
                b[i] *= precond_k[std::size_t(i)] / double(n);
            fft_->backward();
            fft_->store(res);
            for (int i = 0; i < n; ++i)
                psi[std::size_t(i)] -= eta * precond_v[std::size_t(i)] * res[std::size_t(i)];
            renormalize(field);
            converged = rel_residual < opt.residual_tol &&
                        std::fabs(mu - mu_prev) < opt.drift_tol * std::fabs(mu);
            mu_prev = mu;
        }
        if (!converged)
            throw NumericalFailure("prepare_ground_state: gradient polish did not converge");
    }
    last_mu_ = mu_prev;
    return field;
}

double GpeSolver::measure_mu(const WaveField& field) const {
    const int n = grid_.n_points;
    double n_minus = field.norm(0);
    if (n_minus <= 0.0)
        throw InvalidParameter("measure_mu: empty m=-1 component");

    // kinetic energy spectrally: sum (hbar k)^2/2M |psi_k|^2, Parseval-normalized
    fft_->load(field.psi[0]);
    fft_->forward();
    cplx* b = fft_->data();
    double kin = 0.0;
    for (int i = 0; i < n; ++i)
        kin += 0.5 * phys_.hbar * phys_.hbar * grid_.k[i] * grid_.k[i] / phys_.mass *
               std::norm(b[i]);
    kin *= grid_.dx / double(n);

    double pot = 0.0, inter = 0.0;
    for (int i = 0; i < n; ++i) {
        double n_tot = 0.0;
        for (int c = 0; c < field.n_components; ++c)
            n_tot += std::norm(field.psi[c][i]);
        double nm1 = std::norm(field.psi[0][i]);
        pot += trap_v_[i] * nm1;
        inter += u1_ * n_tot * nm1;
    }
    pot *= grid_.dx;
    inter *= grid_.dx;
    return (kin + pot + inter) / n_minus;
}

double GpeSolver::probability_current(const WaveField& field, int component, double x) const {
    const int n = grid_.n_points;
    int i = grid_.index_of(x);
    i = std::clamp(i, 2, n - 3);
    const auto& psi = field.psi[component];
    // fourth-order centered derivative
    cplx dpsi = (-psi[std::size_t(i + 2)] + 8.0 * psi[std::size_t(i + 1)] -
                 8.0 * psi[std::size_t(i - 1)] + psi[std::size_t(i - 2)]) /
                (12.0 * grid_.dx);
    return phys_.hbar / phys_.mass * std::imag(std::conj(psi[std::size_t(i)]) * dpsi);
}

EffPotSnapshot GpeSolver::effective_potential(const WaveField& field) const {
    const int n = grid_.n_points;
    EffPotSnapshot snap;
    snap.t = field.t;
    snap.eff_pot.resize(n);
    std::vector<double> dens = field.density(0);
    double peak = *std::max_element(dens.begin(), dens.end());
    for (int i = 0; i < n; ++i)
        snap.eff_pot[i] = trap_v_[i] + u1_ * dens[i];

    // interior = condensate bulk, density at least 25% of the peak
    double sum = 0.0, sum2 = 0.0, half_width = 0.0;
    long count = 0;
    for (int i = 0; i < n; ++i) {
        if (dens[i] >= 0.25 * peak) {
            sum += snap.eff_pot[i];
            sum2 += snap.eff_pot[i] * snap.eff_pot[i];
            half_width = std::max(half_width, std::fabs(grid_.x[i]));
            ++count;
        }
    }
    if (count > 0) {
        snap.interior_mean = sum / double(count);
        snap.interior_std = std::sqrt(std::max(sum2 / double(count) -
                                               snap.interior_mean * snap.interior_mean, 0.0));
        snap.interior_half_width = half_width;
    }
    return snap;
}

std::vector<double> GpeSolver::coupling_diagonal(const WaveField& field, int component) const {
    const int n = grid_.n_points;
    std::vector<double> d(n);
    const double hd = phys_.hbar * trap_.detuning0;
    for (int i = 0; i < n; ++i) {
        double n_tot = 0.0;
        for (int c = 0; c < field.n_components; ++c)
            n_tot += std::norm(field.psi[c][i]);
        double mean = u1_ * n_tot;
        if (component == 0)
            d[i] = trap_v_[i] - hd + mean;
        else if (component == 1)
            d[i] = mean;
        else
            d[i] = hd - trap_v_[i] + mean;
    }
    return d;
}

GpeSeries GpeSolver::run(WaveField& field) const {
    GpeSeries series;
    double x_det = cfg_.detector_x;
    series.detector_x = x_det;

    std::vector<double> snaps = cfg_.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t snap_idx = 0;

    auto record = [&](const WaveField& f) {
        series.t.push_back(f.t);
        for (int c = 0; c < 3; ++c)
            series.n_atoms[c].push_back(c < f.n_components ? f.norm(c) : 0.0);
        double j_right = probability_current(f, 1, x_det);
        double j_left = probability_current(f, 1, -x_det);
        series.flux_detector.push_back(j_right - j_left);
        int idet = grid_.index_of(x_det);
        double n_det = std::norm(f.psi[1][std::size_t(idet)]);
        series.v_out.push_back(n_det > 0.0 && j_right > 0.0 ? j_right / n_det : 0.0);
        series.mu_estimate.push_back(measure_mu(f));
        series.bookkeeping.push_back(f.bookkeeping_total());
    };
    auto maybe_snapshot = [&](const WaveField& f) {
        while (snap_idx < snaps.size() && f.t >= snaps[snap_idx] - 0.5 * cfg_.dt) {
            series.snapshots.push_back(effective_potential(f));
            ++snap_idx;
        }
    };

    record(field);
    maybe_snapshot(field);
    for (long s = 1; s <= cfg_.n_steps; ++s) {
        step(field);
        maybe_snapshot(field);
        if (s % cfg_.record_every == 0 || s == cfg_.n_steps) {
            record(field);
            if (!std::isfinite(series.n_atoms[0].back()))
                throw NumericalFailure("GpeSolver::run: non-finite norm recorded");
        }
    }
    return series;
}

namespace {
double interp_series(const std::vector<double>& t, const std::vector<double>& y, double tq) {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return y.front();
    if (it == t.end()) return y.back();
    std::size_t i = std::size_t(it - t.begin());
    double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}
} // namespace

DeviationSummary compare_to_analytic(const GpeSeries& series, const GpeSolver& solver,
                                     const DecayTrajectory& traj, const DecayModel& model) {
    std::vector<std::string> mismatched;
    auto check = [&](const char* name, double a, double b) {
        double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
        if (std::fabs(a - b) > 1e-9 * scale) mismatched.push_back(name);
    };
    if (traj.dimension_mode != DimensionMode::OneD || model.mode() != DimensionMode::OneD)
        mismatched.push_back("dimension_mode (analytic side must be 1D)");
    // solver parameters against the model the trajectory came from
    const TrapCoupling& tg = solver.trap();
    const TrapCoupling& tm = model.trap();
    check("omega_T", tg.omega_T, tm.omega_T);
    check("detuning0", tg.detuning0, tm.detuning0);
    check("rabi", tg.rabi, tm.rabi);
    check("mass", solver.phys().mass, model.phys().mass);
    check("U1", solver.u1(), model.interaction());
    if (!series.t.empty() && !traj.states.empty())
        check("N0", series.n_atoms[0].front(), traj.states.front().n_atoms);
    if (!mismatched.empty()) {
        std::string msg = "compare_to_analytic: parameter mismatch in:";
        for (const auto& f : mismatched)
            msg += " " + f;
        throw InvalidParameter(msg);
    }
    if (series.t.empty() || traj.states.empty())
        throw InvalidParameter("compare_to_analytic: empty series");

    std::vector<double> ta, na, fa;
    ta.reserve(traj.size());
    na.reserve(traj.size());
    for (const auto& s : traj.states) {
        ta.push_back(s.t);
        na.push_back(s.n_atoms);
    }
    fa = traj.flux;

    DeviationSummary dev;
    dev.transient_cutoff = tm.rabi > 0.0 ? 2.0 * pi / tm.rabi : 0.0;
    double v0 = traj.velocity.front();
    double flux_cutoff =
        dev.transient_cutoff + (v0 > 0.0 ? std::fabs(series.detector_x) / v0 : 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        double t = series.t[i];
        if (t < dev.transient_cutoff || t > ta.back()) continue;
        double n_ref = interp_series(ta, na, t);
        if (n_ref <= 0.0) continue;
        double rel = std::fabs(series.n_atoms[0][i] - n_ref) / n_ref;
        dev.max_rel_n = std::max(dev.max_rel_n, rel);
        sum += rel;
        ++dev.points_compared;
        if (t >= flux_cutoff) {
            double f_ref = interp_series(ta, fa, t);
            if (f_ref > 0.05 * fa.front()) {
                double relf = std::fabs(series.flux_detector[i] - f_ref) / f_ref;
                dev.max_rel_flux = std::max(dev.max_rel_flux, relf);
            }
        }
    }
    if (dev.points_compared == 0)
        throw InvalidParameter("compare_to_analytic: no overlap after transient exclusion");
    dev.mean_rel_n = sum / double(dev.points_compared);
    return dev;
}

} // namespace atomlaser
