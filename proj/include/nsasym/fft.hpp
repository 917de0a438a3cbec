#ifndef NSASYM_FFT_HPP
#define NSASYM_FFT_HPP

#include <complex>
#include <vector>

#include "nsasym/field.hpp"
#include "nsasym/grid.hpp"

namespace nsasym {

using cvec = std::vector<std::complex<double>>;

// Unnormalized forward DFT of one real component; layout matches grid indexing.
cvec fft_forward(const Grid& g, const double* values);
// Inverse DFT including the 1/N^n factor; returns the real part.
std::vector<double> fft_inverse_real(const Grid& g, const cvec& spectrum);
cvec fft_inverse(const Grid& g, const cvec& spectrum);

// Spectral derivative d^beta f (Nyquist planes of odd derivatives zeroed).
Field spectral_derivative(const Field& f, const MultiIndex& beta);

// Divergence of a vector field via Fourier differentiation.
Field divergence(const Field& f);

// ||div f||_2 relative to ||grad f||_2; the scale-free divergence measure.
double relative_divergence(const Field& f);

// Phase factor that recenters a multiplier-sampled kernel at the x = 0 node
// (grids start at -L, so a bare inverse DFT lands at the corner).
inline double center_phase(const Grid& g, const int* iv) {
    int s = 0;
    for (int d = 0; d < g.dim; ++d) s += g.mode(iv[d]);
    return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace nsasym

#endif
