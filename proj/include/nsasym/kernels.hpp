#ifndef NSASYM_KERNELS_HPP
#define NSASYM_KERNELS_HPP

#include <complex>
#include <vector>

#include "nsasym/field.hpp"
#include "nsasym/grid.hpp"
#include "nsasym/multiindex.hpp"

namespace nsasym {

// Convolution kernels of the expansion: dt^l grad^beta applied to the heat
// kernel G, to grad (-Lap)^{-1} G (component i), or to R^j R^k G.
enum class KernelFamily { heat, grad_inv_laplace, riesz_pair };

struct KernelSpec {
    KernelFamily family = KernelFamily::heat;
    int comp_i = 0;             // grad_inv_laplace component
    int riesz_j = 0, riesz_k = 0;
    int time_derivs = 0;        // l
    MultiIndex space_derivs;    // beta
    int dim = 2;

    KernelSpec() : space_derivs(MultiIndex::zero(2)) {}
    void validate() const;
};

KernelSpec heat_spec(int n, int l, const MultiIndex& beta);
KernelSpec grad_inv_laplace_spec(int n, int i, int l, const MultiIndex& beta);
KernelSpec riesz_spec(int n, int j, int k, int l, const MultiIndex& beta);

// G(t,x) = (4 pi t)^{-n/2} exp(-|x|^2/(4t)).
double heat_kernel(double t, const double* x, int n);

// Exact dt^l grad^beta G via the Hermite identity
//   grad^alpha G(t,x) = (-1)^{|alpha|} (4t)^{-|alpha|/2} H_alpha(x/sqrt(4t)) G(t,x),
// with dt^l expanded as Lap^l.
double heat_kernel_derivative(const KernelSpec& spec, double t, const double* x);

// Fourier symbol of the kernel (continuum convention K^(k) = int K e^{-ikx}).
std::complex<double> kernel_multiplier(const KernelSpec& spec, const double* k, double t);
// True when the symbol is odd under k_d -> -k_d; such Nyquist planes have no
// conjugate partner and are zeroed when sampling.
bool kernel_symbol_odd_in(const KernelSpec& spec, int d);

// Sample the kernel on a grid: heat family pointwise from the closed form,
// nonlocal families by inverse FFT of the symbol (zero mode set to 0).
Field sample_kernel_field(const KernelSpec& spec, double t, const Grid& grid);
// Cached variant behind a read-mostly table keyed by (spec, t, grid).
const Field& sample_kernel_field_cached(const KernelSpec& spec, double t, const Grid& grid);
// Spectral route for the heat family too; used for cross-checks.
Field sample_kernel_field_spectral(const KernelSpec& spec, double t, const Grid& grid);

// sup over the interior half box of (1+|x|)^p |K(1,x)| with the decay power
// p of the kernel's family law.
double kernel_decay_envelope(const KernelSpec& spec, const Grid& grid);
int kernel_decay_power(const KernelSpec& spec);

// Physicists' Hermite polynomial H_m by the three-term recurrence (cached).
double hermite_poly(int m, double z);

// Lap^l as a sum of pure space derivatives: pairs (gamma, l!/gamma!) with
// |gamma| = l; the actual derivative is grad^{2 gamma}.
const std::vector<std::pair<MultiIndex, double>>& laplacian_expansion(int n, int l);

}  // namespace nsasym

#endif
