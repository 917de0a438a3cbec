#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nsasym/fft.hpp"
#include "nsasym/field.hpp"
#include "nsasym/kernels.hpp"
#include "nsasym/solver.hpp"
#include "nsasym/trajectory.hpp"
#include "nsasym/util.hpp"

using namespace nsasym;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Field analytic_diffused(const InitialDataSpec& spec, const Grid& g, double t) {
    // G(t) * d1 d2 phi in closed form: the Gaussian width grows to sigma^2+4t.
    Field f(g, Rank::scalar, t);
    const double w2 = spec.sigma * spec.sigma + 4 * t;
    const double pref = spec.amplitude * spec.sigma * spec.sigma / w2;
    double x[3];
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        const double a = x[0] - spec.center[0];
        const double b = x[1] - spec.center[1];
        f.data[i] = pref * (4 * a * b / (w2 * w2)) * std::exp(-(a * a + b * b) / w2);
    }
    return f;
}

}  // namespace

TEST_CASE("initial vorticity: derivative structure kills low moments") {
    Grid g = make_grid(2, 16.0, 256);
    InitialDataSpec spec{1.0, 1.0, {0, 0}};
    Field w0 = make_initial_vorticity(spec, g);

    CHECK(std::abs(moment(w0, MultiIndex(2, {0, 0}))[0]) < 1e-12);
    CHECK(std::abs(moment(w0, MultiIndex(2, {1, 0}))[0]) < 1e-10);
    CHECK(std::abs(moment(w0, MultiIndex(2, {0, 1}))[0]) < 1e-10);
    // moment (1,1) integrates back to phi itself: pi sigma^2
    CHECK(std::abs(moment(w0, MultiIndex(2, {1, 1}))[0] - kPi) < 1e-6);

    InitialDataSpec off{1.0, 1.0, {3, 0}};
    Field w1 = make_initial_vorticity(off, g);
    const double l1 = lq_norm(w1, 1.0);
    CHECK(std::abs(moment(w1, MultiIndex(2, {0, 0}))[0]) < 1e-10 * l1);
    CHECK(std::abs(moment(w1, MultiIndex(2, {1, 0}))[0]) < 1e-10 * l1);
    CHECK(std::abs(moment(w1, MultiIndex(2, {0, 1}))[0]) < 1e-10 * l1);

    InitialDataSpec wide{1.0, 8.0, {0, 0}};
    CHECK_THROWS_AS(make_initial_vorticity(wide, g), std::invalid_argument);
}

TEST_CASE("biot_savart recovers the stream-function velocity") {
    Grid g = make_grid(2, 12.0, 256);
    // omega = Lap psi with psi = exp(-|x|^2) -> u = (-d2 psi, d1 psi)
    Field omega(g, Rank::scalar, 0.0);
    double x[3];
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        const double r2 = x[0] * x[0] + x[1] * x[1];
        omega.data[i] = (4 * r2 - 4) * std::exp(-r2);
    }
    Field u = biot_savart(omega);
    const double half = g.half_extent / 2;
    double err = 0;
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        if (std::abs(x[0]) > half || std::abs(x[1]) > half) continue;
        const double e = std::exp(-(x[0] * x[0] + x[1] * x[1]));
        err = std::max(err, std::abs(u.at(0, i) - 2 * x[1] * e));
        err = std::max(err, std::abs(u.at(1, i) + 2 * x[0] * e));
    }
    CHECK(err < 1e-8);
    CHECK(relative_divergence(u) < 1e-10);

    // curl(biot_savart(omega)) round trip
    Field d1u2 = spectral_derivative(u, MultiIndex(2, {1, 0}));
    Field d2u1 = spectral_derivative(u, MultiIndex(2, {0, 1}));
    double rerr = 0, scale = lq_norm(omega, kInf);
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        if (std::abs(x[0]) > half || std::abs(x[1]) > half) continue;
        rerr = std::max(rerr, std::abs(d1u2.at(1, i) - d2u1.at(0, i) - omega.data[i]));
    }
    CHECK(rerr / scale < 1e-10);

    Field zero(g, Rank::scalar, 0.0);
    Field uz = biot_savart(zero);
    CHECK(lq_norm(uz, kInf) == 0.0);

    Field biased = omega;
    for (auto& v : biased.data) v += 1e-3;
    CHECK_THROWS_AS(biot_savart(biased), std::invalid_argument);
}

TEST_CASE("nonlinearity formula and vanishing integral") {
    Grid g = make_grid(2, 12.0, 128);
    Field omega(g, Rank::scalar, 0.0);
    double x[3];
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        omega.data[i] = std::sin(x[0]) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4);
    }
    Field uconst(g, Rank::vector, 0.0);
    for (std::size_t i = 0; i < g.npoints(); ++i) uconst.at(0, i) = 1.0;
    Field inl = nonlinearity_I(uconst, omega);
    for (std::size_t i = 0; i < g.npoints(); i += 997) {
        CHECK(inl.at(0, i) == 0.0);
        CHECK(inl.at(1, i) == omega.data[i]);
    }

    Field zero(g, Rank::scalar, 0.0);
    Field iz = nonlinearity_I(uconst, zero);
    CHECK(lq_norm(iz, kInf) == 0.0);

    // Gaussian stream pair: the integral of I vanishes identically
    Grid g2 = make_grid(2, 16.0, 256);
    InitialDataSpec spec{1.0, 1.0, {0, 0}};
    Field w0 = make_initial_vorticity(spec, g2);
    Field u0 = biot_savart(w0);
    Field i0 = nonlinearity_I(u0, w0);
    auto m = moment(i0, MultiIndex(2, {0, 0}));
    const double bound = 1e-9 * lq_norm(w0, 1.0) * lq_norm(u0, kInf);
    CHECK(std::abs(m[0]) < bound);
    CHECK(std::abs(m[1]) < bound);

    Field mismatched(make_grid(2, 8.0, 64), Rank::scalar, 0.0);
    CHECK_THROWS_AS(nonlinearity_I(uconst, mismatched), std::invalid_argument);
}

TEST_CASE("diffusion-only stepping is the exact heat semigroup") {
    Grid g = make_grid(2, 16.0, 128);
    InitialDataSpec spec{1.0, 1.0, {0, 0}};
    Field w0 = make_initial_vorticity(spec, g);
    SolverState st = SolverState::from_vorticity(w0);
    StepOptions diff;
    diff.advection = false;
    const double t_target = 0.5;
    for (int k = 0; k < 8; ++k) step(st, t_target / 8, diff);
    Field got = st.vorticity();
    Field expect = analytic_diffused(spec, g, t_target);
    double err = 0;
    for (std::size_t i = 0; i < g.npoints(); ++i)
        err = std::max(err, std::abs(got.data[i] - expect.data[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("tiny amplitude runs stay within O(A^2) of the linear flow") {
    Grid g = make_grid(2, 16.0, 128);
    InitialDataSpec spec{1e-6, 1.0, {0, 0}};
    Field w0 = make_initial_vorticity(spec, g);
    SolverState st = SolverState::from_vorticity(w0);
    StepOptions opts;
    // dt far below the stability cap: keeps the advective displacement, which
    // grows like A * t, below the 1e-10 relative target over 100 steps.
    const double dt = 0.5 * g.spacing * g.spacing / 4.0 / 2048.0;
    for (int k = 0; k < 100; ++k) step(st, dt, opts);
    Field got = st.vorticity();
    Field lin = analytic_diffused(spec, g, st.t);
    const double rel = lq_norm(got - lin, 2.0) / lq_norm(w0, 2.0);
    CHECK(rel < 1e-10);
}

TEST_CASE("RK4 order: halving dt shrinks the error 16-fold") {
    Grid g = make_grid(2, 16.0, 64);
    InitialDataSpec spec{4.0, 1.5, {0, 0}};
    Field w0 = make_initial_vorticity(spec, g);
    const double T = 0.5;
    auto run = [&](double dt) {
        SolverState st = SolverState::from_vorticity(w0);
        const int n = static_cast<int>(std::round(T / dt));
        for (int k = 0; k < n; ++k) step(st, dt, StepOptions{});
        return st.vorticity();
    };
    const double dt0 = 0.5 * g.spacing * g.spacing / 4.0;  // the stability cap
    Field coarse = run(dt0);
    Field mid = run(dt0 / 2);
    Field ref = run(dt0 / 8);
    const double e_coarse = lq_norm(coarse - ref, 2.0);
    const double e_mid = lq_norm(mid - ref, 2.0);
    const double ratio = e_coarse / e_mid;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("step rejects CFL violations and bad dt") {
    Grid g = make_grid(2, 16.0, 64);
    InitialDataSpec spec{4.0, 1.5, {0, 0}};
    SolverState st = SolverState::from_vorticity(make_initial_vorticity(spec, g));
    CHECK_THROWS_AS(step(st, 10.0 * stable_dt(st, StepOptions{}), StepOptions{}), std::runtime_error);
    CHECK_THROWS_AS(step(st, -0.1, StepOptions{}), std::invalid_argument);
}

TEST_CASE("simulate: containment, monotone norms, conserved structure") {
    Grid g = make_grid(2, 16.0, 128);
    InitialDataSpec spec{0.8, 1.0, {1.0, 0.5}};
    Field w0 = make_initial_vorticity(spec, g);

    CHECK_THROWS_AS(simulate(w0, 25.0, {1.0}, "/tmp/nsasym_bad", spec), std::runtime_error);

    auto dir = (std::filesystem::temp_directory_path() / "nsasym_sim_test").string();
    std::filesystem::remove_all(dir);
    std::vector<double> snaps = {0.25, 0.5, 1.0, 2.0, 4.0};
    Trajectory traj = simulate(w0, 4.0, snaps, dir, spec);
    CHECK(traj.size() == 5);

    const double w0_l1 = lq_norm(w0, 1.0);
    double prev_l1 = w0_l1, prev_en = -1;
    for (int i = 0; i < traj.size(); ++i) {
        Snapshot s = traj.load(i);
        const double l1 = lq_norm(s.omega, 1.0);
        CHECK(l1 <= prev_l1 + 1e-10 * w0_l1);
        prev_l1 = l1;

        const double en = lq_norm(s.u, 2.0);
        if (prev_en >= 0) CHECK(en <= prev_en + 1e-10 * prev_en);
        prev_en = en;

        CHECK(relative_divergence(s.u) < 1e-10);

        const double m0 = std::abs(moment(s.omega, MultiIndex(2, {0, 0}))[0]);
        CHECK(m0 <= 1e-13 * lq_norm(s.omega, kInf) * 4 * g.half_extent * g.half_extent + 1e-300);
        CHECK(std::abs(moment(s.omega, MultiIndex(2, {1, 0}))[0]) < 1e-8 * w0_l1 * g.half_extent);
        CHECK(std::abs(moment(s.omega, MultiIndex(2, {0, 1}))[0]) < 1e-8 * w0_l1 * g.half_extent);
    }

    // reopen from disk and compare metadata + a field
    Trajectory re = Trajectory::open(dir);
    CHECK(re.size() == 5);
    CHECK(re.time(2) == doctest::Approx(1.0));
    Field omega2 = re.load_omega(2);
    Field omega2b = traj.load_omega(2);
    CHECK(omega2.data == omega2b.data);
    std::filesystem::remove_all(dir);
}
