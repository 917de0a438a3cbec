#include "nsasym/kernels.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include "nsasym/fft.hpp"
#include "nsasym/util.hpp"

namespace nsasym {

void KernelSpec::validate() const {
    const int cap = 2 * dim + 2;
    if (time_derivs < 0 || time_derivs > cap)
        throw std::invalid_argument("KernelSpec: time derivative order out of range");
    if (space_derivs.order() > cap) throw std::invalid_argument("KernelSpec: space derivative order out of range");
    if (space_derivs.dim != dim) throw std::invalid_argument("KernelSpec: beta dimension mismatch");
    if (family == KernelFamily::grad_inv_laplace && (comp_i < 0 || comp_i >= dim))
        throw std::invalid_argument("KernelSpec: component out of range");
    if (family == KernelFamily::riesz_pair &&
        (riesz_j < 0 || riesz_j >= dim || riesz_k < 0 || riesz_k >= dim))
        throw std::invalid_argument("KernelSpec: Riesz indices out of range");
}

KernelSpec heat_spec(int n, int l, const MultiIndex& beta) {
    KernelSpec s;
    s.family = KernelFamily::heat;
    s.dim = n;
    s.time_derivs = l;
    s.space_derivs = beta;
    s.validate();
    return s;
}

KernelSpec grad_inv_laplace_spec(int n, int i, int l, const MultiIndex& beta) {
    KernelSpec s;
    s.family = KernelFamily::grad_inv_laplace;
    s.dim = n;
    s.comp_i = i;
    s.time_derivs = l;
    s.space_derivs = beta;
    s.validate();
    return s;
}

KernelSpec riesz_spec(int n, int j, int k, int l, const MultiIndex& beta) {
    KernelSpec s;
    s.family = KernelFamily::riesz_pair;
    s.dim = n;
    // Symmetric in (j,k); store sorted so equal pairs share cache entries bitwise.
    s.riesz_j = std::min(j, k);
    s.riesz_k = std::max(j, k);
    s.time_derivs = l;
    s.space_derivs = beta;
    s.validate();
    return s;
}

double heat_kernel(double t, const double* x, int n) {
    if (t <= 0) throw std::invalid_argument("heat_kernel: t must be positive");
    double r2 = 0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    return std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
}

namespace {

// Hermite coefficient table, H_m(z) = sum_k c_{m,k} z^k.
std::shared_mutex hermite_mutex;
std::vector<std::vector<double>> hermite_coeffs = {{1.0}, {0.0, 2.0}};

const std::vector<double>& hermite_row(int m) {
    {
        std::shared_lock lock(hermite_mutex);
        if (m < static_cast<int>(hermite_coeffs.size())) return hermite_coeffs[m];
    }
    std::unique_lock lock(hermite_mutex);
    while (m >= static_cast<int>(hermite_coeffs.size())) {
        const int k = static_cast<int>(hermite_coeffs.size());
        const auto& a = hermite_coeffs[k - 1];
        const auto& b = hermite_coeffs[k - 2];
        std::vector<double> c(k + 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) c[i + 1] += 2.0 * a[i];  // 2 z H_{k-1}
        for (std::size_t i = 0; i < b.size(); ++i) c[i] -= 2.0 * (k - 1) * b[i];
        hermite_coeffs.push_back(std::move(c));
    }
    return hermite_coeffs[m];
}

}  // namespace

double hermite_poly(int m, double z) {
    const auto& c = hermite_row(m);
    double v = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * z + c[k];
    return v;
}

const std::vector<std::pair<MultiIndex, double>>& laplacian_expansion(int n, int l) {
    static std::shared_mutex mtx;
    static std::map<std::pair<int, int>, std::vector<std::pair<MultiIndex, double>>> cache;
    {
        std::shared_lock lock(mtx);
        auto it = cache.find({n, l});
        if (it != cache.end()) return it->second;
    }
    std::unique_lock lock(mtx);
    auto& entry = cache[{n, l}];
    if (entry.empty()) {
        double lfac = 1;
        for (int k = 2; k <= l; ++k) lfac *= k;
        for (const auto& gamma : multi_indices_of_order(n, l))
            entry.push_back({gamma, lfac / gamma.factorial()});
    }
    return entry;
}

// grad^alpha G(t,x) from the Hermite identity.
static double grad_heat(const MultiIndex& alpha, double t, const double* x, int n, double gval) {
    const double inv = 1.0 / std::sqrt(4.0 * t);
    double v = gval;
    for (int d = 0; d < n; ++d)
        if (alpha.a[d] > 0) v *= hermite_poly(alpha.a[d], x[d] * inv);
    const int m = alpha.order();
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(4.0 * t, -0.5 * m) * v;
}

double heat_kernel_derivative(const KernelSpec& spec, double t, const double* x) {
    if (spec.family != KernelFamily::heat)
        throw std::invalid_argument("heat_kernel_derivative: heat family required");
    if (t <= 0) throw std::invalid_argument("heat_kernel_derivative: t must be positive");
    const int n = spec.dim;
    const double gval = heat_kernel(t, x, n);
    double sum = 0;
    for (const auto& [gamma, coeff] : laplacian_expansion(n, spec.time_derivs)) {
        MultiIndex alpha = spec.space_derivs;
        for (int d = 0; d < n; ++d) alpha.a[d] += 2 * gamma.a[d];
        sum += coeff * grad_heat(alpha, t, x, n, gval);
    }
    return sum;
}

std::complex<double> kernel_multiplier(const KernelSpec& spec, const double* k, double t) {
    const int n = spec.dim;
    double k2 = 0;
    for (int d = 0; d < n; ++d) k2 += k[d] * k[d];
    std::complex<double> m(std::exp(-t * k2), 0.0);
    if (spec.family == KernelFamily::grad_inv_laplace) {
        if (k2 == 0) return 0.0;  // mean-zero representative on the torus
        m *= std::complex<double>(0.0, k[spec.comp_i] / k2);
    } else if (spec.family == KernelFamily::riesz_pair) {
        if (k2 == 0) return 0.0;
        m *= -k[spec.riesz_j] * k[spec.riesz_k] / k2;
    }
    for (int j = 0; j < spec.time_derivs; ++j) m *= -k2;
    for (int d = 0; d < n; ++d)
        for (int a = 0; a < spec.space_derivs.a[d]; ++a) m *= std::complex<double>(0.0, k[d]);
    return m;
}

// Does the symbol change sign under k_d -> -k_d?  Used to zero unpaired
// Nyquist planes so sampled kernels stay real and symmetric.
bool kernel_symbol_odd_in(const KernelSpec& spec, int d) {
    int parity = spec.space_derivs.a[d];
    if (spec.family == KernelFamily::grad_inv_laplace && spec.comp_i == d) parity += 1;
    if (spec.family == KernelFamily::riesz_pair) {
        if (spec.riesz_j == d) parity += 1;
        if (spec.riesz_k == d) parity += 1;
    }
    return parity % 2 == 1;
}

Field sample_kernel_field_spectral(const KernelSpec& spec, double t, const Grid& grid) {
    if (t <= 0) throw std::invalid_argument("sample_kernel_field: t must be positive");
    spec.validate();
    if (grid.dim != spec.dim) throw std::invalid_argument("sample_kernel_field: dimension mismatch");
    const std::size_t np = grid.npoints();
    cvec spec_buf(np);
    double kv[3];
    int iv[3];
    const int N = grid.points_per_dim;
    double hn = 1;
    for (int d = 0; d < grid.dim; ++d) hn *= grid.spacing;
    for (std::size_t i = 0; i < np; ++i) {
        grid.unindex(i, iv);
        bool drop = false;
        for (int d = 0; d < grid.dim; ++d) {
            kv[d] = grid.wavenumber(iv[d]);
            if (iv[d] == N / 2 && kernel_symbol_odd_in(spec, d)) drop = true;
        }
        if (drop) {
            spec_buf[i] = 0.0;
            continue;
        }
        spec_buf[i] = kernel_multiplier(spec, kv, t) * (center_phase(grid, iv) / hn);
    }
    std::vector<double> re = fft_inverse_real(grid, spec_buf);
    Field out(grid, Rank::scalar, t);
    out.data = std::move(re);
    return out;
}

Field sample_kernel_field(const KernelSpec& spec, double t, const Grid& grid) {
    if (spec.family != KernelFamily::heat) return sample_kernel_field_spectral(spec, t, grid);
    if (t <= 0) throw std::invalid_argument("sample_kernel_field: t must be positive");
    Field out(grid, Rank::scalar, t);
    const std::size_t np = grid.npoints();
    parallel_for(np, [&](std::size_t lo, std::size_t hi) {
        double x[3];
        for (std::size_t i = lo; i < hi; ++i) {
            grid.node(i, x);
            out.data[i] = heat_kernel_derivative(spec, t, x);
        }
    });
    return out;
}

namespace {

std::string spec_key(const KernelSpec& s, double t, const Grid& g) {
    std::uint64_t tb;
    static_assert(sizeof(tb) == sizeof(t));
    std::memcpy(&tb, &t, 8);
    std::string k;
    k += std::to_string(static_cast<int>(s.family)) + ":" + std::to_string(s.comp_i) + ":" +
         std::to_string(s.riesz_j) + ":" + std::to_string(s.riesz_k) + ":" +
         std::to_string(s.time_derivs) + ":" + s.space_derivs.str() + ":" + std::to_string(tb) + ":" +
         std::to_string(g.dim) + ":" + std::to_string(g.points_per_dim) + ":" +
         std::to_string(g.half_extent);
    return k;
}

std::shared_mutex field_cache_mutex;
std::map<std::string, Field> field_cache;
std::vector<std::string> field_cache_order;
constexpr std::size_t kFieldCacheCap = 96;

}  // namespace

const Field& sample_kernel_field_cached(const KernelSpec& spec, double t, const Grid& grid) {
    const std::string key = spec_key(spec, t, grid);
    {
        std::shared_lock lock(field_cache_mutex);
        auto it = field_cache.find(key);
        if (it != field_cache.end()) return it->second;
    }
    Field f = sample_kernel_field(spec, t, grid);
    std::unique_lock lock(field_cache_mutex);
    auto it = field_cache.find(key);
    if (it != field_cache.end()) return it->second;
    if (field_cache_order.size() >= kFieldCacheCap) {
        field_cache.erase(field_cache_order.front());
        field_cache_order.erase(field_cache_order.begin());
    }
    field_cache_order.push_back(key);
    return field_cache.emplace(key, std::move(f)).first->second;
}

int kernel_decay_power(const KernelSpec& spec) {
    const int n = spec.dim;
    switch (spec.family) {
        case KernelFamily::grad_inv_laplace: return n - 1 + spec.space_derivs.order();
        case KernelFamily::riesz_pair: return n + 2 * spec.time_derivs + spec.space_derivs.order();
        case KernelFamily::heat: return n + 2 * spec.time_derivs + spec.space_derivs.order();
    }
    return n;
}

double kernel_decay_envelope(const KernelSpec& spec, const Grid& grid) {
    Field f = sample_kernel_field(spec, 1.0, grid);
    const int p = kernel_decay_power(spec);
    const double half = grid.half_extent / 2;
    double sup = 0;
    double x[3];
    for (std::size_t i = 0; i < grid.npoints(); ++i) {
        grid.node(i, x);
        double r = 0;
        bool inside = true;
        for (int d = 0; d < grid.dim; ++d) {
            r += x[d] * x[d];
            inside = inside && std::abs(x[d]) <= half;
        }
        if (!inside) continue;
        sup = std::max(sup, std::pow(1.0 + std::sqrt(r), p) * std::abs(f.data[i]));
    }
    return sup;
}

}  // namespace nsasym
