#ifndef NSASYM_GRID_HPP
#define NSASYM_GRID_HPP

#include <cstddef>
#include <stdexcept>

namespace nsasym {

// Uniform periodic grid on the box [-L, L)^n, node x_i = -L + i*h, h = 2L/N.
struct Grid {
    int dim = 2;          // n
    double half_extent = 0;  // L
    int points_per_dim = 0;  // N, even
    double spacing = 0;      // h

    std::size_t npoints() const {
        std::size_t p = 1;
        for (int d = 0; d < dim; ++d) p *= static_cast<std::size_t>(points_per_dim);
        return p;
    }
    double coord(int i) const { return -half_extent + i * spacing; }

    // Row-major index, first dimension slowest.
    std::size_t index(const int* iv) const {
        std::size_t idx = 0;
        for (int d = 0; d < dim; ++d) idx = idx * points_per_dim + iv[d];
        return idx;
    }
    void unindex(std::size_t idx, int* iv) const {
        for (int d = dim - 1; d >= 0; --d) {
            iv[d] = static_cast<int>(idx % points_per_dim);
            idx /= points_per_dim;
        }
    }
    void node(std::size_t idx, double* x) const {
        int iv[3];
        unindex(idx, iv);
        for (int d = 0; d < dim; ++d) x[d] = coord(iv[d]);
    }

    // Fourier mode m for FFT bin i: 0..N/2-1, -N/2..-1.  Wavenumber k = pi*m/L.
    int mode(int i) const { return i < points_per_dim / 2 ? i : i - points_per_dim; }
    double wavenumber(int i) const { return 3.14159265358979323846 * mode(i) / half_extent; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && half_extent == o.half_extent && points_per_dim == o.points_per_dim;
    }
};

Grid make_grid(int n, double L, int N);

}  // namespace nsasym

#endif
