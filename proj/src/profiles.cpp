#include "nsasym/profiles.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nsasym/fft.hpp"
#include "nsasym/solver.hpp"
#include "nsasym/util.hpp"

namespace nsasym {

using nlohmann::json;

Field ProfileDescriptor::evaluate(double t, const Grid& g) const {
    if (t <= 0) throw std::invalid_argument("profile evaluate: t > 0 required");
    Field out(g, rank, t);
    std::vector<const KernelTerm*> heat, nonlocal;
    for (const auto& term : terms)
        (term.spec.family == KernelFamily::heat ? heat : nonlocal).push_back(&term);

    if (!heat.empty()) {
        parallel_for(g.npoints(), [&](std::size_t lo, std::size_t hi) {
            double x[3];
            for (std::size_t i = lo; i < hi; ++i) {
                g.node(i, x);
                for (const auto* term : heat) {
                    const double w = term->coeff * (term->t_power == 0 ? 1.0 : std::pow(t, term->t_power));
                    out.at(term->out_comp, i) += w * heat_kernel_derivative(term->spec, t, x);
                }
            }
        });
    }

    if (!nonlocal.empty()) {
        const int N = g.points_per_dim;
        const std::size_t np = g.npoints();
        double hn = 1;
        for (int d = 0; d < g.dim; ++d) hn *= g.spacing;
        for (int c = 0; c < ncomp; ++c) {
            std::vector<const KernelTerm*> mine;
            for (const auto* term : nonlocal)
                if (term->out_comp == c) mine.push_back(term);
            if (mine.empty()) continue;
            cvec acc(np, 0.0);
            int iv[3];
            double kv[3];
            for (std::size_t i = 0; i < np; ++i) {
                g.unindex(i, iv);
                for (int d = 0; d < g.dim; ++d) kv[d] = g.wavenumber(iv[d]);
                std::complex<double> v = 0;
                for (const auto* term : mine) {
                    bool drop = false;
                    for (int d = 0; d < g.dim; ++d)
                        if (iv[d] == N / 2 && kernel_symbol_odd_in(term->spec, d)) drop = true;
                    if (drop) continue;
                    const double w = term->coeff * (term->t_power == 0 ? 1.0 : std::pow(t, term->t_power));
                    v += w * kernel_multiplier(term->spec, kv, t);
                }
                acc[i] = v * (center_phase(g, iv) / hn);
            }
            std::vector<double> re = fft_inverse_real(g, acc);
            for (std::size_t i = 0; i < np; ++i) out.at(c, i) += re[i];
        }
    }
    return out;
}

std::string ProfileDescriptor::manifest() const {
    json j;
    j["name"] = name;
    j["scaling_exponent"] = scaling_exponent;
    j["terms"] = json::array();
    for (const auto& term : terms) {
        json e;
        switch (term.spec.family) {
            case KernelFamily::heat: e["family"] = "heat"; break;
            case KernelFamily::grad_inv_laplace:
                e["family"] = "grad_inv_laplace";
                e["i"] = term.spec.comp_i;
                break;
            case KernelFamily::riesz_pair:
                e["family"] = "riesz_pair";
                e["j"] = term.spec.riesz_j;
                e["k"] = term.spec.riesz_k;
                break;
        }
        e["l"] = term.spec.time_derivs;
        e["beta"] = {term.spec.space_derivs.a[0], term.spec.space_derivs.a[1]};
        e["coeff"] = term.coeff;
        e["out_comp"] = term.out_comp;
        e["t_power"] = term.t_power;
        j["terms"].push_back(e);
    }
    return j.dump(2);
}

namespace {

double pair_factorial(int l, const MultiIndex& beta) {
    double f = 1;
    for (int k = 2; k <= l; ++k) f *= k;
    return f * beta.factorial();
}

// Nonlinear kernel block shared by U_m and K_m: for the coefficient vector w,
//   u^j += sign * (1/(l! beta!)) [ sum_k dt^l grad^beta R^j R^k G * w_k
//                                  + dt^l grad^beta G * w_j ] * t^{t_power}.
void add_vector_kernel_block(ProfileDescriptor& d, int l, const MultiIndex& beta, const Vec2& w,
                             double sign, double t_power) {
    const double fac = pair_factorial(l, beta);
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            if (w[k] == 0) continue;
            d.terms.push_back({riesz_spec(2, j, k, l, beta), sign * w[k] / fac, j, t_power});
        }
        if (w[j] != 0) d.terms.push_back({heat_spec(2, l, beta), sign * w[j] / fac, j, t_power});
    }
}

// Initial-data block of U_m: the Biot-Savart field of sum (b_a/a!) grad^a G,
// i.e. u = (d2, -d1)(-Lap)^{-1} applied to each heat kernel.
void add_ic_block(ProfileDescriptor& d, int m, const MomentTable& table) {
    for (const auto& alpha : multi_indices_of_order(2, m + 1)) {
        const double b = table.initial_moment(alpha);
        if (b == 0) continue;
        const double c = b / alpha.factorial();
        d.terms.push_back({grad_inv_laplace_spec(2, 1, 0, alpha), c, 0, 0.0});
        d.terms.push_back({grad_inv_laplace_spec(2, 0, 0, alpha), -c, 1, 0.0});
    }
}

}  // namespace

ProfileDescriptor build_omega_profile(int m, const MomentTable& table) {
    if (m < 2 || m > 3) throw std::invalid_argument("omega_profile: m must lie in 2..n+1");
    ProfileDescriptor d;
    d.name = "Omega" + std::to_string(m);
    d.rank = Rank::scalar;
    d.ncomp = 1;
    d.scaling_exponent = 2 + m;
    for (const auto& alpha : multi_indices_of_order(2, m)) {
        const double b = table.initial_moment(alpha);
        if (b == 0) continue;
        d.terms.push_back({heat_spec(2, 0, alpha), b / alpha.factorial(), 0, 0.0});
    }
    for (const auto& pair : parabolic_pairs_of_order(2, m - 1)) {
        const Vec2 w = table.raw_coeff(pair.l, pair.beta).value;
        const double fac = pair_factorial(pair.l, pair.beta);
        MultiIndex b2 = pair.beta;
        b2.a[1] += 1;  // d2 kernel carries I^1
        MultiIndex b1 = pair.beta;
        b1.a[0] += 1;  // d1 kernel carries I^2
        if (w[0] != 0) d.terms.push_back({heat_spec(2, pair.l, b2), w[0] / fac, 0, 0.0});
        if (w[1] != 0) d.terms.push_back({heat_spec(2, pair.l, b1), -w[1] / fac, 0, 0.0});
    }
    return d;
}

ProfileDescriptor build_u_profile_low(int m, const MomentTable& table) {
    if (m < 1 || m > 2) throw std::invalid_argument("u_profile_low: m must lie in 1..n");
    ProfileDescriptor d;
    d.name = "U" + std::to_string(m);
    d.rank = Rank::vector;
    d.ncomp = 2;
    d.scaling_exponent = 2 + m;
    add_ic_block(d, m, table);
    for (const auto& pair : parabolic_pairs_of_order(2, m))
        add_vector_kernel_block(d, pair.l, pair.beta, table.raw_coeff(pair.l, pair.beta).value, -1.0, 0.0);
    return d;
}

ProfileDescriptor build_k_profile(int m, const MomentTable& table) {
    if (m < 3 || m > 4) throw std::invalid_argument("k_profile: m must lie in n+1..2n");
    ProfileDescriptor d;
    d.name = "K" + std::to_string(m);
    d.rank = Rank::vector;
    d.ncomp = 2;
    d.scaling_exponent = 2 + m;
    for (const auto& pair : parabolic_pairs_of_order(2, m)) {
        const Vec2 e = log_coefficient(m + 2, pair.l, pair.beta, table);
        add_vector_kernel_block(d, pair.l, pair.beta, e, -1.0, 0.0);
    }
    return d;
}

ProfileDescriptor build_u_profile_high_kernels(int m, const MomentTable& table) {
    if (m < 3 || m > 4) throw std::invalid_argument("u_profile_high: m must lie in n+1..2n");
    const int n = 2;
    ProfileDescriptor d;
    d.name = "U" + std::to_string(m) + "_kernels";
    d.rank = Rank::vector;
    d.ncomp = 2;
    d.scaling_exponent = n + m;
    add_ic_block(d, m, table);

    // renormalized constants and the constant term of the log-integral polynomial
    for (const auto& pair : parabolic_pairs_of_order(2, m)) {
        const Vec2 a = table.renorm_coeff(pair.l, pair.beta).value;
        add_vector_kernel_block(d, pair.l, pair.beta, a, -1.0, 0.0);
        const Vec2 c = table.profile_c(m + 2, pair.beta);
        const double q0 = log_time_poly(pair.l, 0.0);
        if (q0 != 0) {
            const double sgn = (pair.l % 2) ? -1.0 : 1.0;
            add_vector_kernel_block(d, pair.l, pair.beta, {q0 * sgn * c[0], q0 * sgn * c[1]}, -1.0, 0.0);
        }
    }

    // truncated-time tails of lower-order coefficients land at this order
    for (int mp = 1; mp < m; ++mp) {
        for (const auto& pair : parabolic_pairs_of_order(2, mp)) {
            const Vec2 c = table.profile_c(m + 2, pair.beta);
            if (c[0] == 0 && c[1] == 0) continue;
            const double sgn = (pair.l % 2) ? -1.0 : 1.0;
            const double f = sgn * 2.0 / (m - mp);
            add_vector_kernel_block(d, pair.l, pair.beta, {f * c[0], f * c[1]}, 1.0,
                                    -0.5 * (m - mp));
        }
    }

    // Taylor-in-time corrections of the shifted approximants (empty for n = 2:
    // they would need 2l+|beta|+2k = m with 2l+|beta| >= n+1 and k >= 1)
    for (int k = 1; 2 * k < m; ++k) {
        const int mp = m - 2 * k;
        const int q = mp + 2;
        if (q < n + 3) continue;
        for (const auto& pair : parabolic_pairs_of_order(2, mp)) {
            const Vec2 c = table.profile_c(q, pair.beta);
            if (c[0] == 0 && c[1] == 0) continue;
            double kfac = 1, prod = 1;
            for (int i = 1; i <= k; ++i) {
                kfac *= i;
                prod *= -(pair.l + i);
            }
            const double sgn = (pair.l % 2) ? -1.0 : 1.0;
            const double f = sgn * prod / (kfac * k);
            add_vector_kernel_block(d, pair.l, pair.beta, {f * c[0], f * c[1]}, -1.0,
                                    -static_cast<double>(k));
        }
    }
    return d;
}

Field omega_profile_scalar(int m, double t, const Grid& g, const MomentTable& table) {
    return build_omega_profile(m, table).evaluate(t, g);
}

Field omega_profile(int m, double t, const Grid& g, const MomentTable& table) {
    Field s = omega_profile_scalar(m, t, g, table);
    Field out(g, Rank::tensor, t);
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        out.at(1, i) = s.data[i];   // (1,2) component
        out.at(2, i) = -s.data[i];  // (2,1) component
    }
    return out;
}

Field u_profile_low(int m, double t, const Grid& g, const MomentTable& table) {
    return build_u_profile_low(m, table).evaluate(t, g);
}

Field k_profile(int m, double t, const Grid& g, const MomentTable& table) {
    return build_k_profile(m, table).evaluate(t, g);
}

Field i_p_profile(int p, double t, const Grid& g, const MomentTable& table) {
    const int n = 2;
    if (p < n + 3 || p > 2 * n + 2) throw std::invalid_argument("i_p_profile: p must lie in n+3..2n+2");
    Field out(g, Rank::vector, t);
    for (int m = 1; m <= p - n - 2; ++m) {
        Field om = omega_profile_scalar(p - n - m, t, g, table);
        Field um = u_profile_low(m, t, g, table);
        for (std::size_t i = 0; i < g.npoints(); ++i) {
            const double w = om.data[i];
            out.at(0, i) += -w * um.at(1, i);
            out.at(1, i) += w * um.at(0, i);
        }
    }
    return out;
}

ExpansionContext make_expansion_context(const MomentTable& table, const ContextOptions& opts) {
    Grid pad = make_grid(2, opts.pad_L, opts.pad_N);
    std::map<int, Field> ip;
    for (int p : {5, 6}) ip.emplace(p, i_p_profile(p, 1.0, pad, table));
    ExpansionContext ctx;
    ctx.table = table;
    ctx.j = std::make_shared<JContext>(table, ip);
    return ctx;
}

Field u_profile_high(int m, double t, const Grid& g, const ExpansionContext& ctx, const JOptions& jopts) {
    Field out = build_u_profile_high_kernels(m, ctx.table).evaluate(t, g);
    axpy(out, -1.0, ctx.j->j_profile(m, t, g, KernelFamily::riesz_pair, jopts));
    axpy(out, -1.0, ctx.j->j_profile(m, t, g, KernelFamily::heat, jopts));
    return out;
}

Field u_profile(int m, double t, const Grid& g, const ExpansionContext& ctx, const JOptions& jopts) {
    if (m <= 2) return u_profile_low(m, t, g, ctx.table);
    return u_profile_high(m, t, g, ctx, jopts);
}

Field expansion_sum(int M, bool with_logs, double t, const Grid& g, const ExpansionContext& ctx,
                    const JOptions& jopts) {
    const int n = 2;
    if (M < 1 || M > 2 * n) throw std::invalid_argument("expansion_sum: M must lie in 1..2n");
    Field out(g, Rank::vector, t);
    for (int m = 1; m <= M; ++m) out += u_profile(m, t, g, ctx, jopts);
    if (with_logs && M >= n + 1) {
        const double lg = std::log(t);
        if (lg != 0)
            for (int m = n + 1; m <= M; ++m) axpy(out, lg, k_profile(m, t, g, ctx.table));
    }
    return out;
}

MomentTable build_moment_table(const Trajectory& traj, const TableBuildOptions& opts) {
    const Grid& g = traj.grid();
    if (g.dim != 2) throw std::invalid_argument("build_moment_table: 2-D trajectories only");
    MomentTable table;
    table.dim = 2;
    table.run_id = traj.config_hash().empty() ? fnv1a_hex(traj.dir()) : traj.config_hash();

    Field omega0 = make_initial_vorticity(traj.initial_spec(), g);
    for (int m = 0; m <= 2 * g.dim + 1; ++m)
        for (const auto& alpha : multi_indices_of_order(2, m))
            table.initial[alpha] = moment_neg(omega0, alpha)[0];

    MomentSeries series = extract_moment_series(traj, opts.series_order);

    // absolutely convergent coefficients, 1 <= 2l+|beta| <= n
    for (int m = 1; m <= 2; ++m)
        for (const auto& pair : parabolic_pairs_of_order(2, m))
            table.raw[{pair.l, pair.beta}] = spacetime_moment(series, pair.l, pair.beta, {}, table);

    // profile moment constants from I_p(1,.) on the padded grid; the J tails
    // need |beta| up to 2n+1
    Grid pad = make_grid(2, opts.pad.pad_L, opts.pad.pad_N);
    for (int p : {5, 6}) {
        Field ip = i_p_profile(p, 1.0, pad, table);
        for (int m = 0; m <= 2 * g.dim + 1; ++m)
            for (const auto& beta : multi_indices_of_order(2, m)) {
                auto mv = moment_neg(ip, beta);
                table.profile_moment[{p, beta}] = {mv[0], mv[1]};
            }
    }

    // renormalized constants, n+1 <= 2l+|beta| <= 2n
    for (int m = 3; m <= 4; ++m)
        for (const auto& pair : parabolic_pairs_of_order(2, m))
            table.renorm[{pair.l, pair.beta}] = claim31_constant(series, pair.l, pair.beta, table).constant;

    return table;
}

void write_profile_manifest(const std::string& path, const MomentTable& table,
                            const std::string& config_hash) {
    json j;
    j["format"] = "nsasym-profiles-1";
    j["config_hash"] = config_hash;
    j["run_id"] = table.run_id;
    json arr = json::array();
    for (int m = 2; m <= 3; ++m) arr.push_back(json::parse(build_omega_profile(m, table).manifest()));
    for (int m = 1; m <= 2; ++m) arr.push_back(json::parse(build_u_profile_low(m, table).manifest()));
    for (int m = 3; m <= 4; ++m) {
        arr.push_back(json::parse(build_u_profile_high_kernels(m, table).manifest()));
        arr.push_back(json::parse(build_k_profile(m, table).manifest()));
    }
    j["profiles"] = arr;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << "\n";
}

}  // namespace nsasym
