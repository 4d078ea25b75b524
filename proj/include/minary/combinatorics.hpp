#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace minary {

// Visits every k-subset of {0,...,m-1} in lexicographic order.
template <class F>
void for_each_k_subset(int m, int k, F&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        fn(const_cast<const std::vector<int>&>(idx));
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int l = i + 1; l < k; ++l)
            idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
    }
}

// C(m,k), saturating at cap+1 once it exceeds cap.
inline std::uint64_t binomial_capped(int m, int k, std::uint64_t cap) {
    long double v = 1.0L;
    for (int i = 1; i <= k; ++i) {
        v *= static_cast<long double>(m - k + i) / static_cast<long double>(i);
        if (v > static_cast<long double>(cap) * 2.0L) return cap + 1;
    }
    const std::uint64_t r = static_cast<std::uint64_t>(v + 0.5L);
    return r > cap ? cap + 1 : r;
}

}  // namespace minary
