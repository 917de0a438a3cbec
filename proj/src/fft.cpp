#include "nsasym/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nsasym {

// FFTW plans are cached per (dim, N, sign).  Plans are created with
// FFTW_ESTIMATE so plan selection, and hence roundoff, is reproducible.
namespace {

struct PlanKey {
    int dim, N, sign;
    bool operator<(const PlanKey& o) const {
        if (dim != o.dim) return dim < o.dim;
        if (N != o.N) return N < o.N;
        return sign < o.sign;
    }
};

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan> plan_cache;

fftw_plan get_plan(const Grid& g, int sign, fftw_complex* buf) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    PlanKey key{g.dim, g.points_per_dim, sign};
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    int n[3] = {g.points_per_dim, g.points_per_dim, g.points_per_dim};
    fftw_plan p = fftw_plan_dft(g.dim, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

cvec fft_forward(const Grid& g, const double* values) {
    const std::size_t np = g.npoints();
    cvec buf(np);
    for (std::size_t i = 0; i < np; ++i) buf[i] = values[i];
    fftw_complex* raw = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(get_plan(g, FFTW_FORWARD, raw), raw, raw);
    return buf;
}

cvec fft_inverse(const Grid& g, const cvec& spectrum) {
    cvec buf = spectrum;
    fftw_complex* raw = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(get_plan(g, FFTW_BACKWARD, raw), raw, raw);
    const double norm = 1.0 / static_cast<double>(g.npoints());
    for (auto& v : buf) v *= norm;
    return buf;
}

std::vector<double> fft_inverse_real(const Grid& g, const cvec& spectrum) {
    cvec full = fft_inverse(g, spectrum);
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) out[i] = full[i].real();
    return out;
}

Field spectral_derivative(const Field& f, const MultiIndex& beta) {
    const Grid& g = f.grid;
    if (beta.dim != g.dim) throw std::invalid_argument("spectral_derivative: dimension mismatch");
    Field out(g, f.rank, f.time);
    const int N = g.points_per_dim;
    const std::size_t np = g.npoints();
    for (int c = 0; c < f.ncomp; ++c) {
        cvec spec = fft_forward(g, f.comp(c));
        int iv[3];
        for (std::size_t i = 0; i < np; ++i) {
            g.unindex(i, iv);
            std::complex<double> m(1.0, 0.0);
            for (int d = 0; d < g.dim; ++d) {
                if (beta.a[d] == 0) continue;
                // Nyquist plane of odd derivatives has no conjugate partner.
                if (beta.a[d] % 2 == 1 && iv[d] == N / 2) {
                    m = 0.0;
                    break;
                }
                const std::complex<double> ik(0.0, g.wavenumber(iv[d]));
                for (int k = 0; k < beta.a[d]; ++k) m *= ik;
            }
            spec[i] *= m;
        }
        std::vector<double> re = fft_inverse_real(g, spec);
        for (std::size_t i = 0; i < np; ++i) out.at(c, i) = re[i];
    }
    return out;
}

Field divergence(const Field& f) {
    if (f.rank != Rank::vector) throw std::invalid_argument("divergence: vector field required");
    const Grid& g = f.grid;
    Field out(g, Rank::scalar, f.time);
    for (int d = 0; d < g.dim; ++d) {
        MultiIndex e = MultiIndex::zero(g.dim);
        e.a[d] = 1;
        Field single(g, Rank::scalar, f.time);
        for (std::size_t i = 0; i < g.npoints(); ++i) single.at(0, i) = f.at(d, i);
        Field dd = spectral_derivative(single, e);
        for (std::size_t i = 0; i < g.npoints(); ++i) out.at(0, i) += dd.at(0, i);
    }
    return out;
}

double relative_divergence(const Field& f) {
    const Grid& g = f.grid;
    Field div = divergence(f);
    double grad2 = 0;
    for (int c = 0; c < f.ncomp; ++c) {
        Field single(g, Rank::scalar, f.time);
        for (std::size_t i = 0; i < g.npoints(); ++i) single.at(0, i) = f.at(c, i);
        for (int d = 0; d < g.dim; ++d) {
            MultiIndex e = MultiIndex::zero(g.dim);
            e.a[d] = 1;
            Field dd = spectral_derivative(single, e);
            double n = lq_norm(dd, 2.0);
            grad2 += n * n;
        }
    }
    const double dn = lq_norm(div, 2.0);
    const double gn = std::sqrt(grad2);
    if (gn == 0) return dn == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return dn / gn;
}

}  // namespace nsasym
