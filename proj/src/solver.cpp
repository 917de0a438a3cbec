#include "nsasym/solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "nsasym/fft.hpp"
#include "nsasym/trajectory.hpp"
#include "nsasym/util.hpp"

namespace nsasym {

Field make_initial_vorticity(const InitialDataSpec& spec, const Grid& grid) {
    if (grid.dim != 2) throw std::invalid_argument("make_initial_vorticity: 2-D only");
    if (spec.sigma <= 0) throw std::invalid_argument("make_initial_vorticity: sigma must be positive");
    Field f(grid, Rank::scalar, 0.0);
    const double s2 = spec.sigma * spec.sigma;
    const double s4 = s2 * s2;
    double x[3];
    for (std::size_t i = 0; i < grid.npoints(); ++i) {
        grid.node(i, x);
        const double a = x[0] - spec.center[0];
        const double b = x[1] - spec.center[1];
        f.data[i] = spec.amplitude * (4.0 * a * b / s4) * std::exp(-(a * a + b * b) / s2);
    }
    // localization precondition: the data must be numerically compact
    const int N = grid.points_per_dim;
    double boundary = 0;
    for (int i = 0; i < N; ++i) {
        int e1[2] = {0, i}, e2[2] = {N - 1, i}, e3[2] = {i, 0}, e4[2] = {i, N - 1};
        for (auto* e : {e1, e2, e3, e4}) boundary = std::max(boundary, std::abs(f.data[grid.index(e)]));
    }
    if (boundary > 1e-14 * std::abs(spec.amplitude))
        throw std::invalid_argument("make_initial_vorticity: data not localized (sigma too large for box)");
    return f;
}

namespace {

// r2c workspace per N, FFTW_ESTIMATE plans for reproducible roundoff.
struct R2CPlans {
    int N = 0;
    fftw_plan fwd = nullptr, bwd = nullptr;
    std::vector<double> real;
    std::vector<std::complex<double>> cplx;
};

std::mutex r2c_mutex;
std::map<int, R2CPlans>& r2c_cache() {
    static std::map<int, R2CPlans> cache;
    return cache;
}

R2CPlans& plans_for(int N) {
    std::lock_guard<std::mutex> lock(r2c_mutex);
    auto& p = r2c_cache()[N];
    if (!p.fwd) {
        p.N = N;
        p.real.resize(static_cast<std::size_t>(N) * N);
        p.cplx.resize(static_cast<std::size_t>(N) * (N / 2 + 1));
        p.fwd = fftw_plan_dft_r2c_2d(N, N, p.real.data(),
                                     reinterpret_cast<fftw_complex*>(p.cplx.data()), FFTW_ESTIMATE);
        p.bwd = fftw_plan_dft_c2r_2d(N, N, reinterpret_cast<fftw_complex*>(p.cplx.data()),
                                     p.real.data(), FFTW_ESTIMATE);
    }
    return p;
}

std::vector<std::complex<double>> r2c(const Grid& g, const double* values) {
    R2CPlans& p = plans_for(g.points_per_dim);
    std::vector<std::complex<double>> out(p.cplx.size());
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(values), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

// c2r destroys its input, so work on a scratch copy; includes 1/N^2.
void c2r(const Grid& g, const std::vector<std::complex<double>>& spec, double* out) {
    R2CPlans& p = plans_for(g.points_per_dim);
    p.cplx = spec;
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(p.cplx.data()), out);
    const double norm = 1.0 / g.npoints();
    const std::size_t np = g.npoints();
    for (std::size_t i = 0; i < np; ++i) out[i] *= norm;
}

inline std::size_t half_cols(int N) { return static_cast<std::size_t>(N / 2 + 1); }

}  // namespace

SolverState SolverState::from_vorticity(const Field& omega0) {
    if (omega0.grid.dim != 2 || omega0.rank != Rank::scalar)
        throw std::invalid_argument("SolverState: 2-D scalar vorticity required");
    omega0.check_finite("SolverState");
    SolverState s;
    s.grid = omega0.grid;
    s.t = omega0.time;
    s.omega_hat = r2c(s.grid, omega0.comp(0));
    s.omega_hat[0] = 0.0;  // zero total circulation
    return s;
}

Field SolverState::vorticity() const {
    Field f(grid, Rank::scalar, t);
    c2r(grid, omega_hat, f.comp(0));
    return f;
}

Field SolverState::velocity() const {
    const int N = grid.points_per_dim;
    const std::size_t hc = half_cols(N);
    std::vector<std::complex<double>> u1(omega_hat.size()), u2(omega_hat.size());
    for (int i = 0; i < N; ++i) {
        const double k1 = grid.wavenumber(i);
        for (std::size_t j = 0; j < hc; ++j) {
            const double k2 = kPi * static_cast<double>(j) / grid.half_extent;
            const double kk = k1 * k1 + k2 * k2;
            const std::size_t idx = i * hc + j;
            if (kk == 0) {
                u1[idx] = u2[idx] = 0.0;
                continue;
            }
            const std::complex<double> w = omega_hat[idx];
            u1[idx] = std::complex<double>(0, k2 / kk) * w;
            u2[idx] = std::complex<double>(0, -k1 / kk) * w;
        }
    }
    Field u(grid, Rank::vector, t);
    c2r(grid, u1, u.comp(0));
    c2r(grid, u2, u.comp(1));
    return u;
}

double SolverState::max_speed() const {
    Field u = velocity();
    double m = 0;
    for (std::size_t i = 0; i < grid.npoints(); ++i) m = std::max(m, u.magnitude(i));
    return m;
}

double SolverState::mean_abs() const {
    return std::abs(omega_hat[0]) / static_cast<double>(grid.npoints());
}

Field biot_savart(const Field& omega) {
    if (omega.grid.dim != 2 || omega.rank != Rank::scalar)
        throw std::invalid_argument("biot_savart: 2-D scalar vorticity required");
    const double l1 = lq_norm(omega, 1.0);
    const auto mean = moment(omega, MultiIndex(2, {0, 0}));
    if (l1 > 0 && std::abs(mean[0]) > 1e-8 * l1)
        throw std::invalid_argument("biot_savart: vorticity mean exceeds 1e-8 relative");
    SolverState s = SolverState::from_vorticity(omega);
    Field u = s.velocity();
    u.time = omega.time;
    return u;
}

Field nonlinearity_I(const Field& u, const Field& omega) {
    if (!(u.grid == omega.grid) || u.time != omega.time)
        throw std::invalid_argument("nonlinearity_I: grid or time mismatch");
    if (u.rank != Rank::vector || omega.rank != Rank::scalar)
        throw std::invalid_argument("nonlinearity_I: need vector u and scalar omega");
    Field out(u.grid, Rank::vector, u.time);
    const std::size_t np = u.grid.npoints();
    for (std::size_t i = 0; i < np; ++i) {
        const double w = omega.at(0, i);
        out.at(0, i) = -w * u.at(1, i);
        out.at(1, i) = w * u.at(0, i);
    }
    return out;
}

namespace {

// Advection RHS N(omega^) = -FFT[u . grad omega], dealiased by the 2/3 rule.
void advection_rhs(const Grid& g, const std::vector<std::complex<double>>& what,
                   std::vector<std::complex<double>>& nhat, double* max_speed_out) {
    const int N = g.points_per_dim;
    const std::size_t hc = half_cols(N);
    const std::size_t sz = what.size();
    std::vector<std::complex<double>> u1h(sz), u2h(sz), w1h(sz), w2h(sz);
    for (int i = 0; i < N; ++i) {
        const double k1 = g.wavenumber(i);
        for (std::size_t j = 0; j < hc; ++j) {
            const double k2 = kPi * static_cast<double>(j) / g.half_extent;
            const double kk = k1 * k1 + k2 * k2;
            const std::size_t idx = i * hc + j;
            const std::complex<double> w = what[idx];
            w1h[idx] = std::complex<double>(0, k1) * w;
            w2h[idx] = std::complex<double>(0, k2) * w;
            if (kk == 0) {
                u1h[idx] = u2h[idx] = 0.0;
            } else {
                u1h[idx] = std::complex<double>(0, k2 / kk) * w;
                u2h[idx] = std::complex<double>(0, -k1 / kk) * w;
            }
        }
    }
    const std::size_t np = g.npoints();
    std::vector<double> u1(np), u2(np), w1(np), w2(np);
    c2r(g, u1h, u1.data());
    c2r(g, u2h, u2.data());
    c2r(g, w1h, w1.data());
    c2r(g, w2h, w2.data());
    double vmax = 0;
    std::vector<double> prod(np);
    for (std::size_t i = 0; i < np; ++i) {
        prod[i] = -(u1[i] * w1[i] + u2[i] * w2[i]);
        const double sp = u1[i] * u1[i] + u2[i] * u2[i];
        if (sp > vmax) vmax = sp;
    }
    if (max_speed_out) *max_speed_out = std::sqrt(vmax);
    nhat = r2c(g, prod.data());
    // 2/3-rule dealiasing; also pins the zero mode so the mean is conserved.
    const int cut = N / 3;
    for (int i = 0; i < N; ++i) {
        const int m1 = std::abs(g.mode(i));
        for (std::size_t j = 0; j < hc; ++j) {
            if (m1 > cut || static_cast<int>(j) > cut) nhat[i * hc + j] = 0.0;
        }
    }
    nhat[0] = 0.0;
}

}  // namespace

double stable_dt(const SolverState& state, const StepOptions& opts) {
    const double h = state.grid.spacing;
    double bound = h * h / 4.0;
    if (opts.advection) {
        const double vmax = state.max_speed();
        if (vmax > 0) bound = std::min(bound, h / (2.0 * vmax));
    }
    return opts.cfl_safety * bound;
}

void step(SolverState& state, double dt, const StepOptions& opts) {
    if (dt <= 0) throw std::invalid_argument("step: dt must be positive");
    const Grid& g = state.grid;
    const int N = g.points_per_dim;
    const std::size_t hc = half_cols(N);
    const std::size_t sz = state.omega_hat.size();

    std::vector<double> e_half(sz), e_full(sz);
    for (int i = 0; i < N; ++i) {
        const double k1 = g.wavenumber(i);
        for (std::size_t j = 0; j < hc; ++j) {
            const double k2 = kPi * static_cast<double>(j) / g.half_extent;
            const double kk = k1 * k1 + k2 * k2;
            e_half[i * hc + j] = std::exp(-0.5 * dt * kk);
            e_full[i * hc + j] = std::exp(-dt * kk);
        }
    }

    auto& w = state.omega_hat;
    if (!opts.advection) {
        for (std::size_t i = 0; i < sz; ++i) w[i] *= e_full[i];
        state.t += dt;
        return;
    }

    std::vector<std::complex<double>> k1v, k2v, k3v, k4v, stage(sz);
    double vmax = 0;
    advection_rhs(g, w, k1v, &vmax);

    const double h = g.spacing;
    double bound = h * h / 4.0;
    if (vmax > 0) bound = std::min(bound, h / (2.0 * vmax));
    if (dt > opts.cfl_safety * bound * (1.0 + 1e-12))
        throw std::runtime_error("step: dt violates the stability bound");

    for (std::size_t i = 0; i < sz; ++i) stage[i] = e_half[i] * (w[i] + 0.5 * dt * k1v[i]);
    advection_rhs(g, stage, k2v, nullptr);

    for (std::size_t i = 0; i < sz; ++i) stage[i] = e_half[i] * w[i] + 0.5 * dt * k2v[i];
    advection_rhs(g, stage, k3v, nullptr);

    for (std::size_t i = 0; i < sz; ++i) stage[i] = e_full[i] * w[i] + dt * e_half[i] * k3v[i];
    advection_rhs(g, stage, k4v, nullptr);

    for (std::size_t i = 0; i < sz; ++i) {
        w[i] = e_full[i] * w[i] +
               (dt / 6.0) * (e_full[i] * k1v[i] + 2.0 * e_half[i] * (k2v[i] + k3v[i]) + k4v[i]);
    }
    w[0] = 0.0;
    const std::complex<double> probe = w[hc + 1];
    if (!std::isfinite(probe.real()) || !std::isfinite(probe.imag()))
        throw std::runtime_error("step: NaN detected, aborting");
    state.t += dt;
}

Trajectory simulate(const Field& omega0, double t_end, const std::vector<double>& snapshot_times,
                    const std::string& outdir, const InitialDataSpec& spec, const SimulateOptions& opts) {
    const Grid& g = omega0.grid;
    if (std::sqrt(t_end) > g.half_extent / 6.0 + 1e-12)
        throw std::runtime_error("simulate: containment violated, sqrt(t_end) > L/6");
    for (double ts : snapshot_times)
        if (ts <= 0 || ts > t_end) throw std::invalid_argument("simulate: snapshot times must lie in (0, t_end]");

    Trajectory traj = Trajectory::create(outdir, g, spec, snapshot_times, t_end, "");
    SolverState state = SolverState::from_vorticity(omega0);

    for (double target : snapshot_times) {
        while (state.t < target - 1e-13) {
            const double dtmax = stable_dt(state, opts.step);
            const double dt = std::min(dtmax, target - state.t);
            step(state, dt, opts.step);
        }
        state.t = target;  // guard against roundoff drift in the time stamp
        Snapshot snap;
        snap.t = target;
        snap.omega = state.vorticity();
        snap.omega.time = target;
        snap.u = state.velocity();
        snap.u.time = target;
        snap.inl = nonlinearity_I(snap.u, snap.omega);
        traj.append(snap);
        if (state.mean_abs() > 1e-13 * lq_norm(snap.omega, std::numeric_limits<double>::infinity()))
            throw std::runtime_error("simulate: zero-mean drift detected");
    }
    traj.finalize();
    return traj;
}

}  // namespace nsasym
