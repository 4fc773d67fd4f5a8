#include "maxclaim/sampling.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/parallel.hpp"

#include <algorithm>

namespace maxclaim {

std::pair<double, double> sample_mixture_pair(const MixtureCopula& mc, Engine& rng)
{
    const std::int64_t lambda = mc.mixing().sample_count(rng);
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::int64_t j = 0; j < lambda; ++j) {
        const auto [a, b] = mc.base().sample_pair(rng);
        m1 = std::max(m1, a);
        m2 = std::max(m2, b);
    }
    return {mc.mixing().laplace_s(m1), mc.mixing().laplace_s(m2)};
}

std::pair<double, double> sample_model_pair(const CopulaModel& model, Engine& rng)
{
    if (model.is_mixture()) return sample_mixture_pair(model.mixture(), rng);
    return model.base().sample_pair(rng);
}

PairSample sample_mixture(const MixtureCopula& mc, std::size_t n, const SeededStream& stream)
{
    if (n == 0) throw DomainError("sample size must be positive");
    Engine rng = stream.engine();
    PairSample out(n);
    for (auto& p : out) p = sample_mixture_pair(mc, rng);
    return out;
}

PairSample sample_model(const CopulaModel& model, std::size_t n, const SeededStream& stream, unsigned threads)
{
    if (n == 0) throw DomainError("sample size must be positive");
    PairSample out(n);
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        Engine rng = stream.child(b).engine();
        const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
        for (std::size_t i = b * kSampleBlock; i < end; ++i) out[i] = sample_model_pair(model, rng);
    });
    return out;
}

PairSample sample_claims(const CopulaModel& model, const Margin& x, const Margin& y, std::size_t n,
                         const SeededStream& stream, unsigned threads)
{
    PairSample out = sample_model(model, n, stream, threads);
    for (auto& [a, b] : out) {
        a = x.quantile(a);
        b = y.quantile(b);
    }
    return out;
}

} // namespace maxclaim
