#include "maxclaim/dependence.hpp"
#include "maxclaim/sampling.hpp"

#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace maxclaim;
using Catch::Approx;

namespace {

std::vector<double> first(const PairSample& s)
{
    std::vector<double> out;
    for (const auto& p : s) out.push_back(p.first);
    return out;
}

std::vector<double> second(const PairSample& s)
{
    std::vector<double> out;
    for (const auto& p : s) out.push_back(p.second);
    return out;
}

} // namespace

TEST_CASE("samples are reproducible and thread-count invariant", "[sampling]")
{
    const CopulaModel model(Copula::joe(3.0), MixingLaw(MixingModel::ShiftedPoisson, 4.0));
    const SeededStream stream{2024, 3};
    const auto a = sample_model(model, 2000, stream, 1);
    const auto b = sample_model(model, 2000, stream, 1);
    const auto c = sample_model(model, 2000, stream, 7);
    CHECK(a == b);
    CHECK(a == c);
    // A shorter run is a prefix of a longer one.
    const auto d = sample_model(model, 700, stream, 3);
    CHECK(std::equal(d.begin(), d.end(), a.begin()));
    CHECK(sample_model(model, 2000, SeededStream{2024, 4}) != a);

    const MixtureCopula mc(Copula::gumbel(2.0), MixingLaw(MixingModel::TruncatedPoisson, 1.0));
    CHECK(sample_mixture(mc, 100, stream) == sample_mixture(mc, 100, stream));
}

TEST_CASE("mixture samples have uniform margins", "[sampling][statistical]")
{
    const std::vector<MixtureCopula> models = {
        {Copula::gumbel(10.0), MixingLaw(MixingModel::ShiftedPoisson, 9.0)},
        {Copula::joe(2.3727), MixingLaw(MixingModel::ShiftedGeometric, 0.3254)},
        {Copula::clayton(3.0), MixingLaw(MixingModel::TruncatedPoisson, 1.866)},
        {Copula::student(0.6, 3.0), MixingLaw(MixingModel::ShiftedPoisson, 1.0)}};
    const std::size_t n = 100000;
    std::uint64_t seed = 10;
    for (const auto& mc : models) {
        INFO(mc.describe());
        const auto s = sample_model(CopulaModel(mc), n, SeededStream{seed++, 0}, 4);
        CHECK(testutil::ks_uniform(first(s)) < testutil::ks_critical_1pct(n));
        CHECK(testutil::ks_uniform(second(s)) < testutil::ks_critical_1pct(n));
    }
}

TEST_CASE("empirical copula matches the mixture cdf", "[sampling][statistical]")
{
    const std::vector<MixtureCopula> models = {
        {Copula::gumbel(1.8), MixingLaw(MixingModel::ShiftedPoisson, 2.0)},
        {Copula::frank(-4.0), MixingLaw(MixingModel::TruncatedPoisson, 3.0)},
        {Copula::joe(2.0), MixingLaw(MixingModel::ShiftedGeometric, 0.5)}};
    const std::size_t n = 20000;
    for (const auto& mc : models) {
        INFO(mc.describe());
        const auto s = sample_mixture(mc, n, SeededStream{55, 1});
        double mad = 0.0;
        for (int i = 1; i <= 20; ++i) {
            for (int j = 1; j <= 20; ++j) {
                const double a = i / 21.0;
                const double b = j / 21.0;
                const auto hits =
                    std::count_if(s.begin(), s.end(), [&](const auto& p) { return p.first <= a && p.second <= b; });
                mad += std::abs(static_cast<double>(hits) / n - mc.cdf(a, b));
            }
        }
        mad /= 400.0;
        CHECK(mad <= 3.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("degenerate mixing reproduces the base copula", "[sampling][statistical]")
{
    const Copula q = Copula::gumbel(2.5);
    const MixtureCopula mc(q, MixingLaw(MixingModel::ShiftedPoisson, 0.0));
    const std::size_t n = 50000;
    const auto s = sample_mixture(mc, n, SeededStream{8, 0});
    // max(U1, U2) has df C(u, u).
    std::vector<double> mx;
    for (const auto& [a, b] : s) mx.push_back(std::max(a, b));
    const double d = testutil::ks_statistic(mx, [&](double u) { return q.cdf(u, u); });
    CHECK(d < testutil::ks_critical_1pct(n));
}

TEST_CASE("sampled kendall tau", "[sampling][statistical]")
{
    const MixtureCopula g(Copula::gumbel(10.0), MixingLaw::with_mean(MixingModel::ShiftedPoisson, 10.0));
    const auto sg = sample_mixture(g, 10000, SeededStream{1, 0});
    CHECK(kendall_tau(first(sg), second(sg)) == Approx(0.9059).margin(0.02));

    const MixtureCopula j(Copula::joe(10.0), MixingLaw::with_mean(MixingModel::ShiftedPoisson, 100.0));
    const auto sj = sample_mixture(j, 10000, SeededStream{2, 0});
    CHECK(kendall_tau(first(sj), second(sj)) == Approx(0.9005).margin(0.02));

    // Near-comonotone base.
    const auto sc = sample_model(CopulaModel(Copula::gumbel(50.0)), 5000, SeededStream{3, 0});
    std::vector<double> gap;
    for (const auto& [a, b] : sc) gap.push_back(std::abs(a - b));
    std::nth_element(gap.begin(), gap.begin() + gap.size() / 2, gap.end());
    CHECK(gap[gap.size() / 2] < 0.05);
}

TEST_CASE("claim sampling", "[sampling][statistical]")
{
    const CopulaModel model(Copula::gumbel(2.0), MixingLaw(MixingModel::ShiftedPoisson, 1.0));
    const SeededStream stream{77, 0};
    const auto u = sample_model(model, 5000, stream, 2);
    const auto same = sample_claims(model, Margin::uniform(), Margin::uniform(), 5000, stream, 2);
    CHECK(u == same);

    const Margin px = Margin::pareto(10000.0, 2.2);
    const Margin py = Margin::pareto(50000.0, 2.5);
    const std::size_t n = 1000000;
    const auto claims = sample_claims(model, px, py, n, stream, 8);
    double mean = 0.0;
    for (const auto& c : claims) mean += c.first;
    mean /= static_cast<double>(n);
    CHECK(mean == Approx(10000.0 * 2.2 / 1.2).epsilon(0.01));

    const auto xs = first(claims);
    const std::vector<double> head(xs.begin(), xs.begin() + 100000);
    CHECK(testutil::ks_statistic(head, [&](double x) { return px.cdf(x); }) < testutil::ks_critical_1pct(head.size()));
    const auto ys = second(claims);
    const std::vector<double> yhead(ys.begin(), ys.begin() + 100000);
    CHECK(testutil::ks_statistic(yhead, [&](double y) { return py.cdf(y); }) <
          testutil::ks_critical_1pct(yhead.size()));
}

TEST_CASE("margins", "[sampling]")
{
    const Margin p = Margin::pareto(10000.0, 2.2);
    CHECK(p.mean() == Approx(18333.333333333333).epsilon(1e-14));
    CHECK(p.quantile(p.cdf(25000.0)) == Approx(25000.0).epsilon(1e-12));
    CHECK(std::isinf(Margin::pareto(1.0, 1.5).variance()));
    const Margin e = Margin::empirical({3.0, 1.0, 2.0, 2.0});
    CHECK(e.quantile(0.25) == 1.0);
    CHECK(e.quantile(0.26) == 2.0);
    CHECK(e.quantile(0.75) == 2.0);
    CHECK(e.quantile(1.0) == 3.0);
    CHECK(e.cdf(2.0) == 0.75);
    CHECK(e.mean() == 2.0);
    const Margin l = parse_margin("lognormal:1,0.5");
    CHECK(l.mean() == Approx(std::exp(1.125)).epsilon(1e-14));
    CHECK(parse_margin("pareto:10000,2.2").describe() == "pareto:10000,2.2");
}
