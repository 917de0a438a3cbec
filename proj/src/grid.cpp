#include "nsasym/grid.hpp"

namespace nsasym {

Grid make_grid(int n, double L, int N) {
    if (n < 1 || n > 3) throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
    if (L <= 0) throw std::invalid_argument("make_grid: half extent must be positive");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("make_grid: N must be even and >= 2");
    Grid g;
    g.dim = n;
    g.half_extent = L;
    g.points_per_dim = N;
    g.spacing = 2.0 * L / N;
    return g;
}

}  // namespace nsasym
