#include "minary/rng.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace minary {

std::vector<int> sample_k_subset(Rng& rng, int m, int k) {
    assert(k >= 1 && k <= m);
    std::vector<int> pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(m - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace minary
