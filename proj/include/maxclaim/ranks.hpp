#pragma once

#include <span>
#include <vector>

namespace maxclaim {

// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

} // namespace maxclaim
