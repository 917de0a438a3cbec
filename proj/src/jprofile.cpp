#include "nsasym/jprofile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsasym/util.hpp"

namespace nsasym {

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int mhalf = (n + 1) / 2;
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    for (int i = 0; i < mhalf; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

namespace {

// cubic B-spline kernel weights for fractional offset u in [0,1)
inline void bs_weights(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = (1 - 3 * u + 3 * u2 - u3) / 6.0;
    w[1] = (4 - 6 * u2 + 3 * u3) / 6.0;
    w[2] = (1 + 3 * u + 3 * u2 - 3 * u3) / 6.0;
    w[3] = u3 / 6.0;
}

// in-place interpolating-spline prefilter (Unser), mirror boundaries
void bspline_prefilter_line(std::complex<double>* f, int n, std::ptrdiff_t stride) {
    const double z = std::sqrt(3.0) - 2.0;
    const double lambda = 6.0;
    // causal init: truncated series of the mirror expansion
    std::complex<double> sum = f[0];
    double zn = z;
    const int horizon = std::min(n, 64);
    for (int i = 1; i < horizon; ++i) {
        sum += zn * f[i * stride];
        zn *= z;
    }
    f[0] = sum;
    for (int i = 1; i < n; ++i) f[i * stride] = f[i * stride] + z * f[(i - 1) * stride];
    // anticausal
    f[(n - 1) * stride] = (z / (z * z - 1.0)) * (f[(n - 1) * stride] + z * f[(n - 2) * stride]);
    for (int i = n - 2; i >= 0; --i)
        f[i * stride] = z * (f[(i + 1) * stride] - f[i * stride]);
    for (int i = 0; i < n; ++i) f[i * stride] *= lambda;
}

void bspline_prefilter_2d(cvec& lat, int N) {
    for (int row = 0; row < N; ++row) bspline_prefilter_line(lat.data() + row * N, N, 1);
    for (int col = 0; col < N; ++col) bspline_prefilter_line(lat.data() + col, N, N);
}

// e^z minus its Taylor polynomial through degree L, stable for small z.
double exp_remainder(double z, int L) {
    if (std::abs(z) < 1.0) {
        double term = 1.0;
        for (int l = 1; l <= L; ++l) term *= z / l;
        double sum = 0;
        for (int l = L + 1; l <= L + 40; ++l) {
            term *= z / l;
            sum += term;
            if (std::abs(term) < 1e-300) break;
        }
        return sum;
    }
    double poly = 0, term = 1.0;
    for (int l = 0; l <= L; ++l) {
        poly += term;
        term *= z / (l + 1);
    }
    return std::exp(z) - poly;
}

}  // namespace

Vec2 JContext::Base::moment_of(const MultiIndex& beta) const {
    if (beta.order() == 0) return {0.0, 0.0};  // mean-zero representative
    for (const auto& [b, c] : moments)
        if (b == beta) return c;
    throw std::out_of_range("JContext: missing base moment " + beta.str());
}

// The transform of I_p(1,.) is stored in reduced form: its moment polynomial
// P(kappa) = sum_{|beta| <= p-1} c_beta (i kappa)^beta / beta! is kept as
// coefficients and the lattice holds Q = (T - P)/|kappa|^p.  Q is bounded at
// the origin (T - P vanishes to order p there because the lattice transform
// and the quadrature moments come from the same rectangle-rule sum), so the
// interpolation error stays proportional to |kappa|^p and survives the
// s^{-p/2} amplification in the small-s Duhamel bracket.
JContext::JContext(const MomentTable& table, const std::map<int, Field>& ip_at_1) : table_(table) {
    for (const auto& [p, field] : ip_at_1) {
        if (field.grid.dim != 2 || field.rank != Rank::vector)
            throw std::invalid_argument("JContext: I_p must be a 2-D vector field");
        Base base;
        base.p = p;
        base.N = field.grid.points_per_dim;
        base.dk = kPi / field.grid.half_extent;
        const Grid& g = field.grid;
        const int N = base.N;
        const double hn = g.spacing * g.spacing;
        base.kappa_max = (N / 2 - 2) * base.dk;

        // int I_p dx = 0 is an exact identity; its quadrature residue would
        // otherwise enter the bracket as a spurious s^{-p/2} head, so the
        // mean-zero representative is used throughout (beta = 0 dropped).
        // The moment polynomial runs through degree p+1 and is computed from
        // the projected samples themselves, which makes T - P vanish to order
        // p+2 at the origin in exact arithmetic.
        std::array<std::vector<double>, 2> proj;
        for (int c = 0; c < 2; ++c) {
            proj[c].assign(field.comp(c), field.comp(c) + g.npoints());
            double mean = 0;
            for (double v : proj[c]) mean += v;
            mean /= static_cast<double>(proj[c].size());
            for (double& v : proj[c]) v -= mean;
        }
        for (int mo = 1; mo <= p + 1; ++mo) {
            for (const auto& beta : multi_indices_of_order(2, mo)) {
                Vec2 c{0, 0};
                double x[3];
                for (std::size_t i = 0; i < g.npoints(); ++i) {
                    g.node(i, x);
                    double mono = 1;
                    for (int d = 0; d < 2; ++d)
                        for (int a = 0; a < beta.a[d]; ++a) mono *= -x[d];
                    c[0] += mono * proj[0][i];
                    c[1] += mono * proj[1][i];
                }
                c[0] *= hn;
                c[1] *= hn;
                base.moments.push_back({beta, c});
                std::complex<double> ipow(1.0, 0.0);
                for (int k = 0; k < mo; ++k) ipow *= std::complex<double>(0.0, 1.0);
                const double inv_fac = 1.0 / beta.factorial();
                base.poly.push_back({beta, {ipow * (c[0] * inv_fac), ipow * (c[1] * inv_fac)}});
            }
        }

        for (int c = 0; c < 2; ++c) {
            cvec spec = fft_forward(g, proj[c].data());
            cvec centered(spec.size());
            int iv[2];
            for (int mi = -N / 2; mi < N / 2; ++mi)
                for (int mj = -N / 2; mj < N / 2; ++mj) {
                    iv[0] = mi >= 0 ? mi : mi + N;
                    iv[1] = mj >= 0 ? mj : mj + N;
                    const std::size_t src = static_cast<std::size_t>(iv[0]) * N + iv[1];
                    const double phase = ((mi + mj) % 2 == 0) ? 1.0 : -1.0;
                    const double kx = mi * base.dk, ky = mj * base.dk;
                    std::complex<double> T = spec[src] * (phase * hn);
                    std::complex<double> P = 0;
                    double kv[2] = {kx, ky};
                    for (const auto& term : base.poly) {
                        double mono = 1;
                        for (int d = 0; d < 2; ++d)
                            for (int a = 0; a < term.beta.a[d]; ++a) mono *= kv[d];
                        P += term.coef[c] * mono;
                    }
                    const double r2 = kx * kx + ky * ky;
                    const double wpow = std::pow(r2, 0.5 * p);
                    centered[static_cast<std::size_t>(mi + N / 2) * N + (mj + N / 2)] =
                        (r2 == 0) ? 0.0 : (T - P) / wpow;
                }
            bspline_prefilter_2d(centered, N);
            base.lattice[c] = std::move(centered);
        }
        bases_.emplace(p, std::move(base));
    }
}

std::complex<double> JContext::interp(const Base& b, int comp, double kx, double ky) const {
    const int N = b.N;
    const double u = kx / b.dk + N / 2;
    const double v = ky / b.dk + N / 2;
    const int iu = static_cast<int>(std::floor(u));
    const int jv = static_cast<int>(std::floor(v));
    if (iu - 1 < 0 || iu + 2 > N - 1 || jv - 1 < 0 || jv + 2 > N - 1) return 0.0;
    double wu[4], wv[4];
    bs_weights(u - iu, wu);
    bs_weights(v - jv, wv);
    const cvec& lat = b.lattice[comp];
    std::complex<double> acc = 0;
    for (int a = 0; a < 4; ++a) {
        std::complex<double> row = 0;
        const std::size_t base_idx = static_cast<std::size_t>(iu - 1 + a) * N + (jv - 1);
        for (int c = 0; c < 4; ++c) row += wv[c] * lat[base_idx + c];
        acc += wu[a] * row;
    }
    return acc;
}

std::complex<double> JContext::poly_value(const Base& b, int comp, double kx, double ky) const {
    std::complex<double> P = 0;
    const double kv[2] = {kx, ky};
    for (const auto& term : b.poly) {
        double mono = 1;
        for (int d = 0; d < 2; ++d)
            for (int a = 0; a < term.beta.a[d]; ++a) mono *= kv[d];
        P += term.coef[comp] * mono;
    }
    return P;
}

std::complex<double> JContext::ihat_base(int p, int comp, double kx, double ky) const {
    auto it = bases_.find(p);
    if (it == bases_.end()) throw std::out_of_range("JContext: no base for p=" + std::to_string(p));
    const Base& b = it->second;
    if (std::hypot(kx, ky) >= b.kappa_max) return 0.0;
    const double r2 = kx * kx + ky * ky;
    return interp(b, comp, kx, ky) * std::pow(r2, 0.5 * b.p) + poly_value(b, comp, kx, ky);
}

Field JContext::convolve_profile(int p, double t_minus_s, double s, const Grid& g,
                                 KernelFamily family) const {
    if (s <= 0 || t_minus_s < 0) throw std::invalid_argument("convolve_profile: bad times");
    const Base& base = bases_.at(p);
    const int N = g.points_per_dim;
    const std::size_t np = g.npoints();
    const double rs = std::sqrt(s);
    // continuum transform vs grid DFT: scale 1/h^n plus the -L lattice shift
    const double sp = std::pow(s, -0.5 * p) / (g.spacing * g.spacing);
    Field out(g, Rank::vector, t_minus_s + s);
    int iv[2];
    for (int j = 0; j < 2; ++j) {
        cvec acc(np, 0.0);
        for (std::size_t i = 0; i < np; ++i) {
            g.unindex(i, iv);
            if (iv[0] == N / 2 || iv[1] == N / 2) continue;
            const double k1 = g.wavenumber(iv[0]);
            const double k2 = g.wavenumber(iv[1]);
            const double kk = k1 * k1 + k2 * k2;
            const double heat = std::exp(-t_minus_s * kk);
            std::complex<double> v = 0;
            if (family == KernelFamily::riesz_pair) {
                if (kk > 0) {
                    const double kj = (j == 0) ? k1 : k2;
                    v = -(kj * k1 / kk) * sp * ihat_base(p, 0, rs * k1, rs * k2) -
                        (kj * k2 / kk) * sp * ihat_base(p, 1, rs * k1, rs * k2);
                }
            } else {
                v = sp * ihat_base(p, j, rs * k1, rs * k2);
            }
            acc[i] = heat * v * center_phase(g, iv);
        }
        std::vector<double> re = fft_inverse_real(g, acc);
        for (std::size_t i = 0; i < np; ++i) out.at(j, i) = re[i];
    }
    return out;
}

Field JContext::j_profile(int m, double t, const Grid& g, KernelFamily family,
                          const JOptions& opts) const {
    if (t <= 0) throw std::invalid_argument("j_profile: t > 0 required");
    if (m < 3 || m > 4) throw std::invalid_argument("j_profile: m must lie in n+1..2n");
    if (family == KernelFamily::grad_inv_laplace)
        throw std::invalid_argument("j_profile: family must be riesz_pair or heat");
    const int p = m + 2;
    const Base& base = bases_.at(p);

    // quadrature nodes: sqrt(s) on (eps*t, t/2], plain s on (t/2, t); the
    // cutoff scales with t so node layouts are parabolic-scale covariant
    std::vector<double> xa, wa, xb, wb;
    gauss_legendre(opts.nodes, std::sqrt(opts.eps * t), std::sqrt(0.5 * t), xa, wa);
    gauss_legendre(opts.nodes, 0.5 * t, t, xb, wb);

    struct Node {
        double s;
        double weight;
        bool piece_a;  // piece A evaluates the Taylor-subtracted bracket
    };
    std::vector<Node> nodes;
    for (int i = 0; i < opts.nodes; ++i) nodes.push_back({xa[i] * xa[i], wa[i] * 2.0 * xa[i], true});

    // With orders through m+1 removed the bracket tends to a constant in
    // sigma = sqrt(s); fit a + b sigma + c sigma^2 on the smallest nodes and
    // integrate the model over (0, eps*t].  The fit is linear in the node
    // values, so it folds into the node weights.
    {
        const int nh = std::min(8, opts.nodes);
        double mom[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < nh; ++i) {
            double pw = 1;
            for (int k = 0; k <= 4; ++k) {
                mom[k] += pw;
                pw *= xa[i];
            }
        }
        double A[3][3] = {{mom[0], mom[1], mom[2]}, {mom[1], mom[2], mom[3]}, {mom[2], mom[3], mom[4]}};
        double inv[3][3];
        const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                           A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                           A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
        inv[0][0] = (A[1][1] * A[2][2] - A[1][2] * A[2][1]) / det;
        inv[0][1] = (A[0][2] * A[2][1] - A[0][1] * A[2][2]) / det;
        inv[0][2] = (A[0][1] * A[1][2] - A[0][2] * A[1][1]) / det;
        inv[1][0] = (A[1][2] * A[2][0] - A[1][0] * A[2][2]) / det;
        inv[1][1] = (A[0][0] * A[2][2] - A[0][2] * A[2][0]) / det;
        inv[1][2] = (A[0][2] * A[1][0] - A[0][0] * A[1][2]) / det;
        inv[2][0] = (A[1][0] * A[2][1] - A[1][1] * A[2][0]) / det;
        inv[2][1] = (A[0][1] * A[2][0] - A[0][0] * A[2][1]) / det;
        inv[2][2] = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) / det;
        const double sig0 = std::sqrt(opts.eps * t);
        // int_0^{sig0} 2 sigma * sigma^k d sigma
        const double im[3] = {sig0 * sig0, (2.0 / 3.0) * sig0 * sig0 * sig0, 0.5 * sig0 * sig0 * sig0 * sig0};
        for (int i = 0; i < nh; ++i) {
            double basis[3] = {1.0, xa[i], xa[i] * xa[i]};
            double extra = 0;
            for (int r = 0; r < 3; ++r) {
                double coef_i = 0;
                for (int c = 0; c < 3; ++c) coef_i += inv[r][c] * basis[c];
                extra += im[r] * coef_i;
            }
            nodes[i].weight += extra;
        }
    }
    for (int i = 0; i < opts.nodes; ++i) nodes.push_back({xb[i], wb[i], false});

    // analytic pieces carried by the derivative kernels at time t:
    //   +int_0^{t/2} M ds for the added-back order m+1,
    //   -int_{t/2}^t M ds for the orders 1..m on the upper half.
    struct Pair {
        int l;
        MultiIndex beta;
        double inv_fac;
        Vec2 scalar;  // folded coefficient per component
    };
    std::vector<Pair> pairs;
    for (int order = 1; order <= m + 1; ++order)
        for (const auto& pr : parabolic_pairs_of_order(2, order)) {
            Pair q;
            q.l = pr.l;
            q.beta = pr.beta;
            double fac = 1;
            for (int k = 2; k <= pr.l; ++k) fac *= k;
            q.inv_fac = 1.0 / (fac * pr.beta.factorial());
            const double expo = 0.5 * (order - p);
            const double sgn = (pr.l % 2) ? -1.0 : 1.0;
            const Vec2 c = base.moment_of(pr.beta);
            double scalar;
            if (order == m + 1) {
                scalar = std::pow(0.5 * t, expo + 1.0) / (expo + 1.0);
            } else if (expo == -1.0) {
                scalar = -std::log(2.0);
            } else {
                scalar = -(std::pow(t, expo + 1.0) - std::pow(0.5 * t, expo + 1.0)) / (expo + 1.0);
            }
            q.scalar = {sgn * c[0] * scalar, sgn * c[1] * scalar};
            pairs.push_back(q);
        }

    const int N = g.points_per_dim;
    const std::size_t np = g.npoints();
    const double hn = g.spacing * g.spacing;
    Field out(g, Rank::vector, t);
    for (int j = 0; j < 2; ++j) {
        cvec acc(np, 0.0);
        parallel_for(np, [&](std::size_t lo, std::size_t hi) {
            int iv[2];
            for (std::size_t i = lo; i < hi; ++i) {
                g.unindex(i, iv);
                if (iv[0] == N / 2 || iv[1] == N / 2) continue;
                const double k1 = g.wavenumber(iv[0]);
                const double k2 = g.wavenumber(iv[1]);
                const double kk = k1 * k1 + k2 * k2;
                const double kj = (j == 0) ? k1 : k2;
                const double kv[2] = {k1, k2};
                std::complex<double> v = 0;

                for (const auto& nd : nodes) {
                    const double tm = t - nd.s;
                    if (tm * kk > 46.0) continue;
                    const double rs = std::sqrt(nd.s);
                    const double sp = std::pow(nd.s, -0.5 * p);
                    const double kap1 = rs * k1, kap2 = rs * k2;
                    const bool in_range = std::hypot(kap1, kap2) < base.kappa_max;

                    // components of the dilated transform (or its bracket)
                    std::complex<double> val[2] = {0.0, 0.0};
                    if (nd.piece_a) {
                        const double z = nd.s * kk;
                        const double heat_t = std::exp(-t * kk);
                        const double heat_tm = std::exp(-tm * kk);
                        for (int c = 0; c < 2; ++c) {
                            std::complex<double> red = 0;
                            if (in_range) {
                                const double r2 = kap1 * kap1 + kap2 * kap2;
                                red = interp(base, c, kap1, kap2) * std::pow(r2, 0.5 * p) * heat_tm;
                            }
                            // moment-polynomial groups: orders at most m+1 are
                            // subtracted (exact exponential remainder), the
                            // higher orders ride along in full
                            std::complex<double> grp = 0;
                            for (const auto& term : base.poly) {
                                const int bo = term.beta.order();
                                double mono = 1;
                                for (int d = 0; d < 2; ++d)
                                    for (int a = 0; a < term.beta.a[d]; ++a) mono *= kv[d];
                                const double spow = std::pow(nd.s, 0.5 * (bo - p));
                                if (bo <= m + 1) {
                                    const int L = (m + 1 - bo) / 2;
                                    grp += term.coef[c] * mono * spow * heat_t * exp_remainder(z, L);
                                } else {
                                    grp += term.coef[c] * mono * spow * heat_tm;
                                }
                            }
                            val[c] = sp * red + grp;
                        }
                    } else {
                        if (!in_range) continue;
                        const double heat = std::exp(-tm * kk);
                        for (int c = 0; c < 2; ++c) {
                            const double r2 = kap1 * kap1 + kap2 * kap2;
                            const std::complex<double> T =
                                interp(base, c, kap1, kap2) * std::pow(r2, 0.5 * p) +
                                poly_value(base, c, kap1, kap2);
                            val[c] = sp * heat * T;
                        }
                    }
                    std::complex<double> contract = 0;
                    if (family == KernelFamily::riesz_pair) {
                        if (kk > 0) contract = -(kj * k1 / kk) * val[0] - (kj * k2 / kk) * val[1];
                    } else {
                        contract = val[j];
                    }
                    v += nd.weight * contract;
                }

                // derivative-kernel terms carrying the analytic M integrals
                if (t * kk <= 46.0) {
                    const double heat_t = std::exp(-t * kk);
                    for (const auto& pr : pairs) {
                        std::complex<double> deriv(1.0, 0.0);
                        for (int dd = 0; dd < pr.l; ++dd) deriv *= -kk;
                        for (int d = 0; d < 2; ++d) {
                            const std::complex<double> ik(0.0, kv[d]);
                            for (int a = 0; a < pr.beta.a[d]; ++a) deriv *= ik;
                        }
                        deriv *= heat_t * pr.inv_fac;
                        std::complex<double> contract = 0;
                        if (family == KernelFamily::riesz_pair) {
                            if (kk > 0)
                                contract = -(kj * k1 / kk) * pr.scalar[0] - (kj * k2 / kk) * pr.scalar[1];
                        } else {
                            contract = pr.scalar[j];
                        }
                        v += deriv * contract;
                    }
                }
                // continuum transforms vs grid DFT: 1/h^n and the -L shift
                acc[i] = v * (center_phase(g, iv) / hn);
            }
        });
        std::vector<double> re = fft_inverse_real(g, acc);
        for (std::size_t i = 0; i < np; ++i) out.at(j, i) = re[i];
    }
    return out;
}

}  // namespace nsasym
