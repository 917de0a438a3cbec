#ifndef NSASYM_JPROFILE_HPP
#define NSASYM_JPROFILE_HPP

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "nsasym/fft.hpp"
#include "nsasym/field.hpp"
#include "nsasym/kernels.hpp"
#include "nsasym/moments.hpp"

namespace nsasym {

struct JOptions {
    int nodes = 48;      // Gauss-Legendre nodes per subinterval
    double eps = 1e-4;   // lower quadrature cutoff in s, relative to t
};

// Evaluates the Duhamel tails
//   J_m(t) = int_0^t [ K(t-s) * I_{m+2}(s) - sum_{1<=2l+|b|<=m} dt^l grad^b K(t) M_{lb}(s) / (l! b!) ] ds
// for K = R^j R G (and its plain-G mirror).  The integrand is handled in
// Fourier space throughout: I_{m+2}(s) enters through the exact dilation of a
// precomputed transform of I_{m+2}(1,.), the Taylor moments M_{lb}(s) through
// the closed-form scaling of the profile moments, and the s-quadrature uses
// Gauss-Legendre in sqrt(s) on (eps, t/2] plus Gauss-Legendre on (t/2, t),
// with the Taylor orders m+1, m+2 subtracted and re-added analytically so the
// eps -> 0 limit is reached by a fitted O(sqrt(s)) head.
class JContext {
  public:
    // ip_at_1: I_p(1,.) sampled on a large padded grid, keyed by p.
    JContext(const MomentTable& table, const std::map<int, Field>& ip_at_1);

    // Continuum Fourier transform of I_p(1,.) at an arbitrary wavevector,
    // cubic interpolation on the padded lattice.
    std::complex<double> ihat_base(int p, int comp, double kx, double ky) const;

    // J_m as a vector field; family selects R^j R G or plain G.
    Field j_profile(int m, double t, const Grid& g, KernelFamily family,
                    const JOptions& opts = {}) const;

    // K_fam(t-s) * I_p(s) via the dilation route; used by the mild-solution
    // cross-check and by tests against directly sampled profiles.
    Field convolve_profile(int p, double t_minus_s, double s, const Grid& g,
                           KernelFamily family) const;

    bool has(int p) const { return bases_.count(p) > 0; }
    const MomentTable& table() const { return table_; }

  private:
    struct PolyTerm {
        MultiIndex beta;
        std::array<std::complex<double>, 2> coef;  // c_beta i^{|beta|} / beta!
    };
    struct Base {
        int p;
        int N;
        double dk;
        double kappa_max = 0;
        std::vector<PolyTerm> poly;   // moment polynomial through degree p+1
        std::vector<std::pair<MultiIndex, Vec2>> moments;  // matching moment values
        std::array<cvec, 2> lattice;  // (T - P)/|kappa|^p, centered layout
        Vec2 moment_of(const MultiIndex& beta) const;
    };
    std::complex<double> interp(const Base& b, int comp, double kx, double ky) const;
    std::complex<double> poly_value(const Base& b, int comp, double kx, double ky) const;

    MomentTable table_;
    std::map<int, Base> bases_;
};

// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace nsasym

#endif
