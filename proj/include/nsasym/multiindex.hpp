#ifndef NSASYM_MULTIINDEX_HPP
#define NSASYM_MULTIINDEX_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsasym {

// Multi-index alpha in Z_+^n, n <= 3.  Carries |alpha|, alpha!, x^alpha.
struct MultiIndex {
    int dim = 2;
    std::array<int, 3> a{0, 0, 0};

    MultiIndex() = default;
    MultiIndex(int n, std::initializer_list<int> entries) : dim(n) {
        if (n < 1 || n > 3) throw std::invalid_argument("MultiIndex: dim must be 1..3");
        int i = 0;
        for (int e : entries) {
            if (i >= n) throw std::invalid_argument("MultiIndex: too many entries");
            if (e < 0) throw std::invalid_argument("MultiIndex: negative entry");
            a[i++] = e;
        }
    }
    static MultiIndex zero(int n) { return MultiIndex(n, {}); }

    int order() const {
        int s = 0;
        for (int d = 0; d < dim; ++d) s += a[d];
        return s;
    }

    // alpha! as double; overflow-checked on the integer side.
    double factorial() const {
        std::int64_t f = 1;
        for (int d = 0; d < dim; ++d)
            for (int k = 2; k <= a[d]; ++k) {
                if (f > (INT64_MAX / k)) throw std::overflow_error("MultiIndex: factorial overflow");
                f *= k;
            }
        return static_cast<double>(f);
    }

    double power(const double* x) const {
        double p = 1.0;
        for (int d = 0; d < dim; ++d)
            for (int k = 0; k < a[d]; ++k) p *= x[d];
        return p;
    }

    bool operator==(const MultiIndex& o) const { return dim == o.dim && a == o.a; }
    bool operator<(const MultiIndex& o) const {
        if (dim != o.dim) return dim < o.dim;
        return a < o.a;
    }

    std::string str() const {
        std::string s = "(";
        for (int d = 0; d < dim; ++d) s += std::to_string(a[d]) + (d + 1 < dim ? "," : "");
        return s + ")";
    }
};

// All multi-indices of given order |alpha| = m in n dims, lexicographic.
std::vector<MultiIndex> multi_indices_of_order(int n, int m);

// All (l, beta) with 2l + |beta| = m.
struct ParabolicPair {
    int l;
    MultiIndex beta;
    int order() const { return 2 * l + beta.order(); }
};
std::vector<ParabolicPair> parabolic_pairs_of_order(int n, int m);

}  // namespace nsasym

#endif
