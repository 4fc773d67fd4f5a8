#include "maxclaim/ranks.hpp"

#include <algorithm>
#include <numeric>

namespace maxclaim {

std::vector<double> average_ranks(std::span<const double> x)
{
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && x[idx[j]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = avg;
        i = j;
    }
    return ranks;
}

} // namespace maxclaim
