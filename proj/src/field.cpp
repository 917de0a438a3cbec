#include "nsasym/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nsasym/util.hpp"

namespace nsasym {

int rank_components(Rank r, int dim) {
    switch (r) {
        case Rank::scalar: return 1;
        case Rank::vector: return dim;
        case Rank::tensor: return dim * dim;
    }
    return 1;
}

Field::Field(const Grid& g, Rank r, double t)
    : grid(g), rank(r), ncomp(rank_components(r, g.dim)), time(t),
      data(static_cast<std::size_t>(ncomp) * g.npoints(), 0.0) {}

double Field::magnitude(std::size_t idx) const {
    if (ncomp == 1) return std::abs(data[idx]);
    double s = 0;
    for (int c = 0; c < ncomp; ++c) {
        double v = at(c, idx);
        s += v * v;
    }
    return std::sqrt(s);
}

void Field::check_finite(const char* what) const {
    for (double v : data)
        if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": non-finite field value");
}

static void check_compatible(const Field& a, const Field& b) {
    if (!(a.grid == b.grid) || a.ncomp != b.ncomp)
        throw std::invalid_argument("field arithmetic: grid or rank mismatch");
}

Field operator+(const Field& a, const Field& b) {
    check_compatible(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    check_compatible(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

Field& operator+=(Field& a, const Field& b) {
    check_compatible(a, b);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
    return a;
}

Field& axpy(Field& a, double c, const Field& b) {
    check_compatible(a, b);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += c * b.data[i];
    return a;
}

Field operator*(double c, const Field& a) {
    Field out = a;
    for (double& v : out.data) v *= c;
    return out;
}

static double cell_measure(const Grid& g) {
    double m = 1;
    for (int d = 0; d < g.dim; ++d) m *= g.spacing;
    return m;
}

double lq_norm(const Field& f, double q) {
    if (q < 1.0) throw std::invalid_argument("lq_norm: q must be >= 1");
    const std::size_t np = f.grid.npoints();
    if (std::isinf(q)) {
        double mx = 0;
        for (std::size_t i = 0; i < np; ++i) mx = std::max(mx, f.magnitude(i));
        return mx;
    }
    double s = 0;
    if (q == 1.0) {
        for (std::size_t i = 0; i < np; ++i) s += f.magnitude(i);
    } else if (q == 2.0) {
        for (std::size_t i = 0; i < np; ++i) {
            double m = f.magnitude(i);
            s += m * m;
        }
    } else {
        for (std::size_t i = 0; i < np; ++i) s += std::pow(f.magnitude(i), q);
    }
    return std::pow(s * cell_measure(f.grid), 1.0 / q);
}

double lq_norm_interior(const Field& f, double q) {
    if (q < 1.0) throw std::invalid_argument("lq_norm: q must be >= 1");
    const Grid& g = f.grid;
    const double half = g.half_extent / 2;
    const std::size_t np = g.npoints();
    double s = 0, mx = 0;
    double x[3];
    for (std::size_t i = 0; i < np; ++i) {
        g.node(i, x);
        bool inside = true;
        for (int d = 0; d < g.dim; ++d) inside = inside && std::abs(x[d]) <= half;
        if (!inside) continue;
        double m = f.magnitude(i);
        if (std::isinf(q))
            mx = std::max(mx, m);
        else
            s += std::pow(m, q);
    }
    if (std::isinf(q)) return mx;
    return std::pow(s * cell_measure(g), 1.0 / q);
}

static std::vector<double> moment_impl(const Field& f, const MultiIndex& alpha, bool negate) {
    if (alpha.dim != f.grid.dim) throw std::invalid_argument("moment: dimension mismatch");
    if (alpha.order() > 2 * f.grid.dim + 1)
        throw std::invalid_argument("moment: order exceeds 2n+1 weight cap");
    const Grid& g = f.grid;
    const std::size_t np = g.npoints();
    std::vector<double> out(f.ncomp, 0.0);
    double x[3];
    for (std::size_t i = 0; i < np; ++i) {
        g.node(i, x);
        if (negate)
            for (int d = 0; d < g.dim; ++d) x[d] = -x[d];
        const double w = alpha.power(x);
        for (int c = 0; c < f.ncomp; ++c) out[c] += w * f.at(c, i);
    }
    const double cm = cell_measure(g);
    for (double& v : out) v *= cm;
    return out;
}

std::vector<double> moment(const Field& f, const MultiIndex& alpha) { return moment_impl(f, alpha, false); }
std::vector<double> moment_neg(const Field& f, const MultiIndex& alpha) { return moment_impl(f, alpha, true); }

// Catmull-Rom weights for fractional offset u in [0,1).
static inline void cr_weights(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = 0.5 * (-u3 + 2 * u2 - u);
    w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
    w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
    w[3] = 0.5 * (u3 - u2);
}

// Cubic interpolation of one component at physical point x.  Stencils wrap
// periodically; points outside [-L, L) report false (caller zeroes them).
static bool interp_cubic(const Field& f, int c, const double* x, double& out) {
    const Grid& g = f.grid;
    const int N = g.points_per_dim;
    double w[3][4];
    int base[3];
    for (int d = 0; d < g.dim; ++d) {
        if (x[d] < -g.half_extent || x[d] >= g.half_extent) return false;
        const double s = (x[d] + g.half_extent) / g.spacing;
        const int i0 = static_cast<int>(std::floor(s));
        cr_weights(s - i0, w[d]);
        base[d] = i0 - 1;
    }
    auto wrap = [N](int i) { return ((i % N) + N) % N; };
    double acc = 0;
    int iv[3] = {0, 0, 0};
    if (g.dim == 1) {
        for (int a = 0; a < 4; ++a) {
            iv[0] = wrap(base[0] + a);
            acc += w[0][a] * f.at(c, g.index(iv));
        }
    } else if (g.dim == 2) {
        for (int a = 0; a < 4; ++a) {
            iv[0] = wrap(base[0] + a);
            double row = 0;
            for (int b = 0; b < 4; ++b) {
                iv[1] = wrap(base[1] + b);
                row += w[1][b] * f.at(c, g.index(iv));
            }
            acc += w[0][a] * row;
        }
    } else {
        for (int a = 0; a < 4; ++a) {
            iv[0] = wrap(base[0] + a);
            double plane = 0;
            for (int b = 0; b < 4; ++b) {
                iv[1] = wrap(base[1] + b);
                double row = 0;
                for (int e = 0; e < 4; ++e) {
                    iv[2] = wrap(base[2] + e);
                    row += w[2][e] * f.at(c, g.index(iv));
                }
                plane += w[1][b] * row;
            }
            acc += w[0][a] * plane;
        }
    }
    out = acc;
    return true;
}

RescaleResult rescale_field(const Field& f, int m, const Grid& reference) {
    if (f.time <= 0) throw std::invalid_argument("rescale_field: requires t > 0");
    if (reference.dim != f.grid.dim) throw std::invalid_argument("rescale_field: dimension mismatch");
    const double t = f.time;
    const double root_t = std::sqrt(t);
    const double scale = std::pow(t, 0.5 * (f.grid.dim + m));
    RescaleResult res;
    res.field = Field(reference, f.rank, 1.0);
    const std::size_t np = reference.npoints();
    bool truncated = false;
    double xi[3], x[3];
    for (std::size_t i = 0; i < np; ++i) {
        reference.node(i, xi);
        for (int d = 0; d < reference.dim; ++d) x[d] = root_t * xi[d];
        for (int c = 0; c < f.ncomp; ++c) {
            double v = 0;
            if (!interp_cubic(f, c, x, v)) {
                truncated = true;
                v = 0;
            }
            res.field.at(c, i) = scale * v;
        }
    }
    res.truncated = truncated;
    return res;
}

}  // namespace nsasym
