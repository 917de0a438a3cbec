#include "nsasym/verify.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

#include "nsasym/fft.hpp"
#include "nsasym/kernels.hpp"
#include "nsasym/solver.hpp"
#include "nsasym/util.hpp"

namespace nsasym {

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_a,
                   double t_b, int fixed_log_exponent) {
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_a && times[i] <= t_b && values[i] > 0) {
            ts.push_back(times[i]);
            vs.push_back(values[i]);
        }
    if (ts.size() < 6) throw std::invalid_argument("fit_decay: window holds fewer than 6 snapshots");

    auto solve = [&](int b) {
        // log v = log c - a log t + b log log t ; least squares in (log c, a)
        double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double x = std::log(ts[i]);
            const double y = std::log(vs[i]) - b * std::log(std::max(x, 1e-12));
            s1 += 1;
            sx += x;
            sxx += x * x;
            sy += y;
            sxy += x * y;
        }
        const double det = s1 * sxx - sx * sx;
        const double logc = (sxx * sy - sx * sxy) / det;
        const double slope = (s1 * sxy - sx * sy) / det;  // y ~ logc + slope x
        double rss = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double x = std::log(ts[i]);
            const double y = std::log(vs[i]) - b * std::log(std::max(x, 1e-12));
            const double r = y - (logc + slope * x);
            rss += r * r;
        }
        DecayFit f;
        f.t_a = t_a;
        f.t_b = t_b;
        f.exponent = -slope;
        f.log_exponent = b;
        f.amplitude = std::exp(logc);
        f.residual_rms = std::sqrt(rss / ts.size());
        f.npoints = static_cast<int>(ts.size());
        f.times = ts;
        f.values = vs;
        return f;
    };

    if (fixed_log_exponent >= 0) return solve(fixed_log_exponent);
    DecayFit best = solve(0);
    for (int b : {1, 2}) {
        DecayFit f = solve(b);
        if (f.residual_rms < best.residual_rms) best = f;
    }
    return best;
}

DecayFit remainder_decay(const Trajectory& traj, const ExpansionContext& ctx, int M, bool with_logs,
                         double q, double t_a, double t_b, bool interior) {
    std::vector<double> ts, vs;
    for (int i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        if (t < t_a || t > t_b) continue;
        Field u = traj.load_u(i);
        if (M > 0) {
            Field approx = expansion_sum(M, with_logs, t, traj.grid(), ctx);
            axpy(u, -1.0, approx);
        }
        ts.push_back(t);
        vs.push_back(interior ? lq_norm_interior(u, q) : lq_norm(u, q));
    }
    return fit_decay(ts, vs, t_a, t_b, 0);
}

DecayFit vorticity_remainder_decay(const Trajectory& traj, const MomentTable& table,
                                   const std::vector<int>& orders, double q, double t_a, double t_b,
                                   bool interior) {
    std::vector<double> ts, vs;
    for (int i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        if (t < t_a || t > t_b) continue;
        Field w = traj.load_omega(i);
        for (int m : orders) axpy(w, -1.0, omega_profile_scalar(m, t, traj.grid(), table));
        ts.push_back(t);
        vs.push_back(interior ? lq_norm_interior(w, q) : lq_norm(w, q));
    }
    return fit_decay(ts, vs, t_a, t_b, 0);
}

RescaledLimitReport rescaled_limit(const Trajectory& traj, const MomentTable& table, int m,
                                   const Grid& reference) {
    if (m < 1 || m > 2) throw std::invalid_argument("rescaled_limit: m <= n required");
    RescaledLimitReport rep;
    Field target = u_profile_low(m, 1.0, reference, table);
    rep.profile_norm = lq_norm(target, 2.0);
    for (int i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        // the rescaled window sqrt(t) * reference extent must stay inside the box
        if (std::sqrt(t) * reference.half_extent > traj.grid().half_extent) continue;
        Field u = traj.load_u(i);
        for (int k = 1; k < m; ++k) axpy(u, -1.0, u_profile_low(k, t, traj.grid(), table));
        auto rs = rescale_field(u, m, reference);
        rep.times.push_back(t);
        rep.distances.push_back(lq_norm(rs.field - target, 2.0));
    }
    const std::size_t K = rep.distances.size();
    if (K >= 4) {
        for (std::size_t i = K - 3; i < K; ++i)
            if (rep.distances[i] > 1.10 * rep.distances[i - 1]) rep.monotone = false;
    }
    return rep;
}

namespace {

// Trapezoid weights for the Duhamel integral over 0 = s_0 < s_1 < ... < s_K = t.
std::vector<double> duhamel_weights(const std::vector<double>& s) {
    std::vector<double> w(s.size(), 0.0);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double h = s[i + 1] - s[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

MildSolutionResiduals mild_solution_crosscheck(const Trajectory& traj, double t) {
    int it = -1;
    for (int i = 0; i < traj.size(); ++i)
        if (std::abs(traj.time(i) - t) < 1e-12) it = i;
    if (it < 0) throw std::invalid_argument("mild_solution_crosscheck: t is not a snapshot time");

    const Grid& g = traj.grid();
    const int N = g.points_per_dim;
    const std::size_t np = g.npoints();
    Field u_t = traj.load_u(it);
    Field omega0 = make_initial_vorticity(traj.initial_spec(), g);
    Field u0 = biot_savart(omega0);
    Field i0 = nonlinearity_I(u0, omega0);

    // quadrature nodes: s = 0 plus all snapshots up to t
    std::vector<double> s{0.0};
    std::vector<int> idx{-1};
    for (int i = 0; i <= it; ++i) {
        s.push_back(traj.time(i));
        idx.push_back(i);
    }
    const std::vector<double> w = duhamel_weights(s);

    cvec acc_v[2] = {cvec(np, 0.0), cvec(np, 0.0)};  // vorticity-form Duhamel
    cvec acc_u[2] = {cvec(np, 0.0), cvec(np, 0.0)};  // velocity-form Duhamel
    for (std::size_t q = 0; q < s.size(); ++q) {
        Field inl = (idx[q] < 0) ? i0 : traj.load_inl(idx[q]);
        Field uu = (idx[q] < 0) ? u0 : traj.load_u(idx[q]);
        cvec ih[2] = {fft_forward(g, inl.comp(0)), fft_forward(g, inl.comp(1))};
        std::vector<double> prod(np);
        cvec uh[3];  // u1u1, u1u2, u2u2
        for (int c = 0; c < 3; ++c) {
            const int a = c == 2 ? 1 : 0, b = c == 0 ? 0 : 1;
            for (std::size_t i = 0; i < np; ++i) prod[i] = uu.at(a, i) * uu.at(b, i);
            uh[c] = fft_forward(g, prod.data());
        }
        const double tm = t - s[q];
        int iv[2];
        for (std::size_t i = 0; i < np; ++i) {
            g.unindex(i, iv);
            if (iv[0] == N / 2 || iv[1] == N / 2) continue;
            const double k1 = g.wavenumber(iv[0]);
            const double k2 = g.wavenumber(iv[1]);
            const double kk = k1 * k1 + k2 * k2;
            const double heat = std::exp(-tm * kk);
            const double kv[2] = {k1, k2};
            for (int j = 0; j < 2; ++j) {
                // - R^j R G(t-s) * I(s)
                std::complex<double> rr = 0;
                if (kk > 0) rr = (kv[j] * k1 / kk) * ih[0][i] + (kv[j] * k2 / kk) * ih[1][i];
                acc_v[j][i] += w[q] * heat * (rr - ih[j][i]);
                // - sum_{k,h} (delta_{jk} + R^j R^k) d_h G(t-s) * (u^h u^k)(s)
                std::complex<double> sum = 0;
                for (int kc = 0; kc < 2; ++kc) {
                    double proj = (j == kc ? 1.0 : 0.0);
                    if (kk > 0) proj -= kv[j] * kv[kc] / kk;
                    for (int hc = 0; hc < 2; ++hc) {
                        const int pi = hc + kc;  // 0:u1u1 1:u1u2 2:u2u2
                        sum += proj * std::complex<double>(0.0, kv[hc]) * uh[pi][i];
                    }
                }
                acc_u[j][i] -= w[q] * heat * sum;
            }
        }
    }

    // leading terms
    cvec w0h = fft_forward(g, omega0.comp(0));
    cvec u0h[2] = {fft_forward(g, u0.comp(0)), fft_forward(g, u0.comp(1))};
    int iv[2];
    for (std::size_t i = 0; i < np; ++i) {
        g.unindex(i, iv);
        if (iv[0] == N / 2 || iv[1] == N / 2) continue;
        const double k1 = g.wavenumber(iv[0]);
        const double k2 = g.wavenumber(iv[1]);
        const double kk = k1 * k1 + k2 * k2;
        const double heat = std::exp(-t * kk);
        if (kk > 0) {
            acc_v[0][i] += std::complex<double>(0.0, k2 / kk) * heat * w0h[i];
            acc_v[1][i] += std::complex<double>(0.0, -k1 / kk) * heat * w0h[i];
        }
        acc_u[0][i] += heat * u0h[0][i];
        acc_u[1][i] += heat * u0h[1][i];
    }

    MildSolutionResiduals out;
    const double un = lq_norm(u_t, 2.0);
    Field rhs_v(g, Rank::vector, t), rhs_u(g, Rank::vector, t);
    for (int j = 0; j < 2; ++j) {
        std::vector<double> rv = fft_inverse_real(g, acc_v[j]);
        std::vector<double> ru = fft_inverse_real(g, acc_u[j]);
        for (std::size_t i = 0; i < np; ++i) {
            rhs_v.at(j, i) = rv[i];
            rhs_u.at(j, i) = ru[i];
        }
    }
    out.vorticity_form = lq_norm(u_t - rhs_v, 2.0) / un;
    out.velocity_form = lq_norm(u_t - rhs_u, 2.0) / un;
    return out;
}

Field profile_rescaled(const std::string& name, double t, const Grid& reference,
                       const ExpansionContext& ctx, const JOptions& jopts, int* exponent_out) {
    Grid src = make_grid(reference.dim, std::sqrt(t) * reference.half_extent, reference.points_per_dim);
    Field f;
    int expo = 0;
    if (name.rfind("Omega", 0) == 0) {
        const int m = name.back() - '0';
        f = omega_profile_scalar(m, t, src, ctx.table);
        expo = 2 + m;
    } else if (name.rfind("Ip", 0) == 0) {
        const int p = name.back() - '0';
        f = i_p_profile(p, t, src, ctx.table);
        expo = 2 + p;
    } else if (name.rfind("Jr", 0) == 0) {
        const int m = name.back() - '0';
        f = ctx.j->j_profile(m, t, src, KernelFamily::riesz_pair, jopts);
        expo = 2 + m;
    } else if (name.rfind("Jg", 0) == 0) {
        const int m = name.back() - '0';
        f = ctx.j->j_profile(m, t, src, KernelFamily::heat, jopts);
        expo = 2 + m;
    } else if (name.rfind("K", 0) == 0) {
        const int m = name.back() - '0';
        f = k_profile(m, t, src, ctx.table);
        expo = 2 + m;
    } else if (name.rfind("U", 0) == 0) {
        const int m = name.back() - '0';
        f = u_profile(m, t, src, ctx, jopts);
        expo = 2 + m;
    } else {
        throw std::invalid_argument("profile_rescaled: unknown profile " + name);
    }
    if (exponent_out) *exponent_out = expo;
    const int m_for_rescale = expo - reference.dim;
    auto rs = rescale_field(f, m_for_rescale, reference);
    return rs.field;
}

std::vector<ScalingRow> scaling_report(const ExpansionContext& ctx, const std::vector<double>& ts,
                                       const Grid& reference, const JOptions& jopts) {
    std::vector<ScalingRow> rows;
    struct Entry {
        std::string name;
        double tol;
    };
    const std::vector<Entry> entries = {{"Omega2", 1e-6}, {"Omega3", 1e-6}, {"U1", 1e-6},
                                        {"U2", 1e-6},     {"Ip5", 1e-6},    {"Ip6", 1e-6},
                                        {"K3", 1e-6},     {"K4", 1e-6},     {"Jr3", 1e-4},
                                        {"Jr4", 1e-4},    {"Jg3", 1e-4},    {"Jg4", 1e-4},
                                        {"U3", 1e-4},     {"U4", 1e-4}};
    for (const auto& e : entries) {
        Field base = profile_rescaled(e.name, 1.0, reference, ctx, jopts, nullptr);
        const double scale = lq_norm(base, std::numeric_limits<double>::infinity());
        for (double t : ts) {
            if (t == 1.0) continue;
            Field f = profile_rescaled(e.name, t, reference, ctx, jopts, nullptr);
            double err = 0;
            for (std::size_t i = 0; i < base.data.size(); ++i)
                err = std::max(err, std::abs(f.data[i] - base.data[i]));
            const double rel = scale > 0 ? err / scale : 0.0;
            rows.push_back({e.name, t, rel, e.tol, rel <= e.tol});
        }
    }
    return rows;
}

}  // namespace nsasym
