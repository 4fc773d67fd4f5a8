#pragma once

#include "maxclaim/margin.hpp"
#include "maxclaim/mixture.hpp"
#include "maxclaim/random.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace maxclaim {

using PairSample = std::vector<std::pair<double, double>>;

// One draw from C: lambda ~ Lambda, lambda pairs from Q, componentwise maxima
// (M1, M2) kept on the fly, returned as (L(-log M1), L(-log M2)).
std::pair<double, double> sample_mixture_pair(const MixtureCopula& mc, Engine& rng);
// A draw from a bare base copula or a mixture.
std::pair<double, double> sample_model_pair(const CopulaModel& model, Engine& rng);

// n draws from one engine seeded by `stream`.
PairSample sample_mixture(const MixtureCopula& mc, std::size_t n, const SeededStream& stream);

// Pairs are produced in fixed-size blocks; block b draws from stream.child(b).
// The output is therefore identical for every thread count.
inline constexpr std::size_t kSampleBlock = 256;
PairSample sample_model(const CopulaModel& model, std::size_t n, const SeededStream& stream, unsigned threads = 1);

// Copula pairs mapped through the margins' quantile functions.
PairSample sample_claims(const CopulaModel& model, const Margin& x, const Margin& y, std::size_t n,
                         const SeededStream& stream, unsigned threads = 1);

} // namespace maxclaim
