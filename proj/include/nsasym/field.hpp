#ifndef NSASYM_FIELD_HPP
#define NSASYM_FIELD_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "nsasym/grid.hpp"
#include "nsasym/multiindex.hpp"

namespace nsasym {

enum class Rank { scalar, vector, tensor };

int rank_components(Rank r, int dim);

// Sampled field on a Grid: scalar, vector(n) or tensor(n x n) values plus a
// time stamp.  Storage is component-major, row-major over grid points.
struct Field {
    Grid grid;
    Rank rank = Rank::scalar;
    int ncomp = 1;
    double time = 0.0;
    std::vector<double> data;

    Field() = default;
    Field(const Grid& g, Rank r, double t = 0.0);

    double& at(int c, std::size_t idx) { return data[static_cast<std::size_t>(c) * grid.npoints() + idx]; }
    double at(int c, std::size_t idx) const { return data[static_cast<std::size_t>(c) * grid.npoints() + idx]; }
    double* comp(int c) { return data.data() + static_cast<std::size_t>(c) * grid.npoints(); }
    const double* comp(int c) const { return data.data() + static_cast<std::size_t>(c) * grid.npoints(); }

    // Pointwise Euclidean magnitude across components.
    double magnitude(std::size_t idx) const;

    void check_finite(const char* what) const;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field& operator+=(Field& a, const Field& b);
Field& axpy(Field& a, double c, const Field& b);  // a += c*b
Field operator*(double c, const Field& a);

// L^q norm by the rectangle rule, q in [1, inf]; q = inf returns max magnitude.
double lq_norm(const Field& f, double q);
// Same restricted to the interior half box |x_d| <= L/2.
double lq_norm_interior(const Field& f, double q);

// Rectangle-rule moment integral x^alpha f dx, one value per component.
std::vector<double> moment(const Field& f, const MultiIndex& alpha);
// Signed variant used by the expansion tables: integral (-x)^alpha f dx.
std::vector<double> moment_neg(const Field& f, const MultiIndex& alpha);

// Parabolic rescale: xi -> t^{(n+m)/2} f(t, sqrt(t)*xi) sampled on `reference`
// by cubic interpolation; out-of-box samples are zero and flagged.
struct RescaleResult {
    Field field;
    bool truncated = false;
};
RescaleResult rescale_field(const Field& f, int m, const Grid& reference);

}  // namespace nsasym

#endif
