#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nsasym/fft.hpp"
#include "nsasym/field.hpp"
#include "nsasym/kernels.hpp"
#include "nsasym/util.hpp"

using namespace nsasym;

namespace {

// 6th-order central difference in one coordinate of a callable.
template <typename F>
double fd1(const F& fn, double* x, int d, double h) {
    const double x0 = x[d];
    auto eval = [&](double off) {
        x[d] = x0 + off;
        double v = fn(x);
        x[d] = x0;
        return v;
    };
    return (eval(3 * h) / 60 - 3 * eval(2 * h) / 20 + 3 * eval(h) / 4 - 3 * eval(-h) / 4 +
            3 * eval(-2 * h) / 20 - eval(-3 * h) / 60) /
           h;
}

// Mixed spatial finite difference d^beta of the heat kernel, one direction at
// a time, recursively.
double fd_grad_heat(const MultiIndex& beta, double t, double* x, int n, double h) {
    int d = -1;
    for (int k = 0; k < n; ++k)
        if (beta.a[k] > 0) {
            d = k;
            break;
        }
    if (d < 0) return heat_kernel(t, x, n);
    MultiIndex lower = beta;
    lower.a[d] -= 1;
    auto fn = [&](double* xx) { return fd_grad_heat(lower, t, xx, n, h); };
    return fd1(fn, x, d, h);
}

// 6th-order central difference in time of a kernel derivative of order l-1.
double fd_time_heat(const KernelSpec& spec_lm1, double t, const double* x, double ht) {
    auto eval = [&](double tt) { return heat_kernel_derivative(spec_lm1, tt, x); };
    return (eval(t + 3 * ht) / 60 - 3 * eval(t + 2 * ht) / 20 + 3 * eval(t + ht) / 4 -
            3 * eval(t - ht) / 4 + 3 * eval(t - 2 * ht) / 20 - eval(t - 3 * ht) / 60) /
           ht;
}

}  // namespace

TEST_CASE("heat kernel closed form and parabolic scaling") {
    double x0[2] = {0, 0};
    CHECK(heat_kernel(1.0, x0, 2) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-14));
    double x1[2] = {2, 0};
    CHECK(heat_kernel(1.0, x1, 2) == doctest::Approx(std::exp(-1.0) / (4 * kPi)).epsilon(1e-14));

    const double lam = 3.0;
    double xs[2] = {1, 1};
    double xl[2] = {lam * 1, lam * 1};
    CHECK(std::abs(lam * lam * heat_kernel(lam * lam, xl, 2) - heat_kernel(1.0, xs, 2)) < 1e-14);

    CHECK_THROWS_AS(heat_kernel(0.0, x0, 2), std::invalid_argument);
}

TEST_CASE("heat derivatives: first, second, and time derivative") {
    double x[2] = {0.7, -1.1};
    KernelSpec d10 = heat_spec(2, 0, MultiIndex(2, {1, 0}));
    const double expect = -(x[0] / 2.0) * heat_kernel(1.0, x, 2);
    CHECK(heat_kernel_derivative(d10, 1.0, x) == doctest::Approx(expect).epsilon(1e-13));

    double origin[2] = {0, 0};
    KernelSpec d20 = heat_spec(2, 0, MultiIndex(2, {2, 0}));
    CHECK(heat_kernel_derivative(d20, 1.0, origin) == doctest::Approx(-1.0 / (8 * kPi)).epsilon(1e-12));
    // cross-check by finite differences
    double xa[2] = {0, 0};
    const double fd = fd_grad_heat(MultiIndex(2, {2, 0}), 1.0, xa, 2, 0.02);
    CHECK(std::abs(fd - heat_kernel_derivative(d20, 1.0, origin)) <
          1e-7 * std::abs(heat_kernel_derivative(d20, 1.0, origin)));

    // l = 1 equals Lap G, matches time finite differencing
    double xb[2] = {1, 0};
    KernelSpec dt = heat_spec(2, 1, MultiIndex::zero(2));
    KernelSpec plain = heat_spec(2, 0, MultiIndex::zero(2));
    const double fdt = fd_time_heat(plain, 1.0, xb, 1e-3);
    const double exact = heat_kernel_derivative(dt, 1.0, xb);
    CHECK(std::abs(fdt - exact) < 1e-7 * std::abs(exact));
}

TEST_CASE("Hermite route agrees with finite differences for l+|beta| <= 4") {
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> ux(-2.5, 2.5), ut(0.5, 4.0);
    for (int pt = 0; pt < 20; ++pt) {
        double x[2] = {ux(rng), ux(rng)};
        const double t = ut(rng);
        for (int l = 0; l <= 4; ++l) {
            for (int btot = 0; btot + l <= 4; ++btot) {
                for (const auto& beta : multi_indices_of_order(2, btot)) {
                    KernelSpec spec = heat_spec(2, l, beta);
                    const double exact = heat_kernel_derivative(spec, t, x);
                    double approx;
                    if (l == 0) {
                        if (btot == 0) continue;
                        double xx[2] = {x[0], x[1]};
                        approx = fd_grad_heat(beta, t, xx, 2, 0.015 * std::sqrt(4 * t));
                    } else {
                        KernelSpec lower = heat_spec(2, l - 1, beta);
                        approx = fd_time_heat(lower, t, x, 1.2e-3 * t);
                    }
                    double origin[2] = {0, 0};
                    const double amplitude =
                        std::pow(4 * t, -0.5 * (2 * l + btot)) * heat_kernel(t, origin, 2);
                    const double denom = std::max(std::abs(exact), amplitude);
                    CHECK(std::abs(approx - exact) <= 1e-6 * denom);
                }
            }
        }
    }
}

TEST_CASE("heat family scaling identity is exact for lambda in {1/2, 2, 4}") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    for (double lam : {0.5, 2.0, 4.0}) {
        for (int l = 0; l <= 2; ++l)
            for (int btot = 0; btot <= 2; ++btot)
                for (const auto& beta : multi_indices_of_order(2, btot)) {
                    KernelSpec spec = heat_spec(2, l, beta);
                    double x[2] = {ux(rng), ux(rng)};
                    double xl[2] = {lam * x[0], lam * x[1]};
                    const double t = 1.3;
                    const double pw = std::pow(lam, 2.0 + 2 * l + btot);
                    const double lhs = pw * heat_kernel_derivative(spec, lam * lam * t, xl);
                    const double rhs = heat_kernel_derivative(spec, t, x);
                    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
                }
    }
}

TEST_CASE("derivative kernels integrate to zero") {
    Grid g = make_grid(2, 16.0, 256);
    for (int l = 0; l <= 2; ++l)
        for (int btot = (l == 0 ? 1 : 0); btot <= 2; ++btot)
            for (const auto& beta : multi_indices_of_order(2, btot)) {
                Field f = sample_kernel_field(heat_spec(2, l, beta), 1.0, g);
                auto m = moment(f, MultiIndex(2, {0, 0}));
                CHECK(std::abs(m[0]) < 1e-10);
            }
}

TEST_CASE("spectral heat sampling matches the closed form") {
    Grid g = make_grid(2, 16.0, 128);
    for (auto spec : {heat_spec(2, 0, MultiIndex::zero(2)), heat_spec(2, 0, MultiIndex(2, {1, 1})),
                      heat_spec(2, 1, MultiIndex(2, {1, 0}))}) {
        Field pw = sample_kernel_field(spec, 1.0, g);
        Field sp = sample_kernel_field_spectral(spec, 1.0, g);
        double err = 0;
        for (std::size_t i = 0; i < g.npoints(); ++i) err = std::max(err, std::abs(pw.data[i] - sp.data[i]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("nonlocal kernel parity") {
    Grid g = make_grid(2, 16.0, 128);
    KernelSpec bs = grad_inv_laplace_spec(2, 0, 0, MultiIndex::zero(2));
    Field f = sample_kernel_field(bs, 1.0, g);
    // odd in x1, even in x2: compare index (i,j) with (N-i, j) and (i, N-j)
    const int N = g.points_per_dim;
    double worst = 0;
    for (int i = 1; i < N; ++i)
        for (int j = 1; j < N; ++j) {
            int a[2] = {i, j}, bneg[2] = {N - i, j}, ceven[2] = {i, N - j};
            worst = std::max(worst, std::abs(f.data[g.index(a)] + f.data[g.index(bneg)]));
            worst = std::max(worst, std::abs(f.data[g.index(a)] - f.data[g.index(ceven)]));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("Riesz pairs sum to minus identity on the mean-zero representative") {
    Grid g = make_grid(2, 16.0, 256);
    Field r11 = sample_kernel_field(riesz_spec(2, 0, 0, 0, MultiIndex::zero(2)), 1.0, g);
    Field r22 = sample_kernel_field(riesz_spec(2, 1, 1, 0, MultiIndex::zero(2)), 1.0, g);
    // Sum of multipliers is -exp(-t|k|^2) away from k = 0; with the zero-mode
    // convention the sampled sum equals -(G - box mean of G).
    const double boxmean = 1.0 / (4 * g.half_extent * g.half_extent);
    const double half = g.half_extent / 2;
    double worst = 0;
    double x[3];
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        if (std::abs(x[0]) > half || std::abs(x[1]) > half) continue;
        const double expect = -(heat_kernel(1.0, x, 2) - boxmean);
        worst = std::max(worst, std::abs(r11.data[i] + r22.data[i] - expect));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("nonlocal kernels obey their parabolic scaling on proportional grids") {
    Grid ref = make_grid(2, 16.0, 256);
    for (double lam : {0.5, 2.0}) {
        Grid scaled = make_grid(2, lam * 16.0, 256);
        for (auto spec : {riesz_spec(2, 0, 1, 0, MultiIndex::zero(2)),
                          riesz_spec(2, 0, 0, 1, MultiIndex(2, {1, 0})),
                          grad_inv_laplace_spec(2, 1, 0, MultiIndex(2, {0, 1}))}) {
            const int e = spec.family == KernelFamily::grad_inv_laplace
                              ? 1 + spec.space_derivs.order()
                              : 2 + 2 * spec.time_derivs + spec.space_derivs.order();
            Field base = sample_kernel_field(spec, 1.0, ref);
            Field dil = sample_kernel_field(spec, lam * lam, scaled);
            // node alignment: scaled grid node i sits at lam * (ref node i)
            const double half = ref.half_extent / 2;
            double worst = 0, scale = 0;
            double x[3];
            for (std::size_t i = 0; i < ref.npoints(); ++i) {
                ref.node(i, x);
                scale = std::max(scale, std::abs(base.data[i]));
                if (std::abs(x[0]) > half || std::abs(x[1]) > half) continue;
                worst = std::max(worst, std::abs(std::pow(lam, e) * dil.data[i] - base.data[i]));
            }
            CHECK(worst / scale < 1e-6);
        }
    }
}

TEST_CASE("Riesz kernel is symmetric under index exchange, bitwise") {
    Grid g = make_grid(2, 16.0, 64);
    Field a = sample_kernel_field(riesz_spec(2, 0, 1, 0, MultiIndex(2, {1, 0})), 1.0, g);
    Field b = sample_kernel_field(riesz_spec(2, 1, 0, 0, MultiIndex(2, {1, 0})), 1.0, g);
    CHECK(a.data == b.data);
}

TEST_CASE("decay envelopes stabilize under grid refinement") {
    Grid coarse = make_grid(2, 16.0, 256);
    Grid fine = make_grid(2, 16.0, 512);

    KernelSpec bs = grad_inv_laplace_spec(2, 0, 0, MultiIndex::zero(2));
    CHECK(kernel_decay_power(bs) == 1);
    const double e1 = kernel_decay_envelope(bs, coarse);
    const double e2 = kernel_decay_envelope(bs, fine);
    CHECK(std::abs(e2 - e1) / e2 < 0.10);

    KernelSpec rz = riesz_spec(2, 0, 1, 0, MultiIndex::zero(2));
    CHECK(kernel_decay_power(rz) == 2);
    const double r1 = kernel_decay_envelope(rz, coarse);
    const double r2 = kernel_decay_envelope(rz, fine);
    CHECK(std::abs(r2 - r1) / r2 < 0.10);

    KernelSpec hs = heat_spec(2, 1, MultiIndex(2, {1, 0}));
    CHECK(std::isfinite(kernel_decay_envelope(hs, coarse)));
}

TEST_CASE("kernel field cache returns identical samples") {
    Grid g = make_grid(2, 16.0, 64);
    KernelSpec rz = riesz_spec(2, 0, 1, 0, MultiIndex::zero(2));
    const Field& c1 = sample_kernel_field_cached(rz, 2.0, g);
    Field direct = sample_kernel_field(rz, 2.0, g);
    CHECK(c1.data == direct.data);
    const Field& c2 = sample_kernel_field_cached(rz, 2.0, g);
    CHECK(&c1 == &c2);
}
