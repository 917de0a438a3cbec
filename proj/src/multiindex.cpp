#include "nsasym/multiindex.hpp"

namespace nsasym {

std::vector<MultiIndex> multi_indices_of_order(int n, int m) {
    std::vector<MultiIndex> out;
    if (n == 1) {
        MultiIndex mi = MultiIndex::zero(1);
        mi.a[0] = m;
        out.push_back(mi);
    } else if (n == 2) {
        for (int a0 = m; a0 >= 0; --a0) {
            MultiIndex mi = MultiIndex::zero(2);
            mi.a[0] = a0;
            mi.a[1] = m - a0;
            out.push_back(mi);
        }
    } else {
        for (int a0 = m; a0 >= 0; --a0)
            for (int a1 = m - a0; a1 >= 0; --a1) {
                MultiIndex mi = MultiIndex::zero(3);
                mi.a[0] = a0;
                mi.a[1] = a1;
                mi.a[2] = m - a0 - a1;
                out.push_back(mi);
            }
    }
    return out;
}

std::vector<ParabolicPair> parabolic_pairs_of_order(int n, int m) {
    std::vector<ParabolicPair> out;
    for (int l = 0; 2 * l <= m; ++l)
        for (const auto& beta : multi_indices_of_order(n, m - 2 * l))
            out.push_back({l, beta});
    return out;
}

}  // namespace nsasym
