#include "maxclaim/dependence.hpp"
#include "maxclaim/error.hpp"
#include "maxclaim/ranks.hpp"
#include "maxclaim/sampling.hpp"

#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace maxclaim;
using Catch::Approx;

namespace {

struct Columns {
    std::vector<double> x;
    std::vector<double> y;
};

Columns columns(const PairSample& s)
{
    Columns c;
    for (const auto& [a, b] : s) {
        c.x.push_back(a);
        c.y.push_back(b);
    }
    return c;
}

Columns base_sample(const Copula& q, std::size_t n, std::uint64_t seed)
{
    return columns(sample_model(CopulaModel(q), n, SeededStream{seed, 0}));
}

} // namespace

TEST_CASE("kendall tau agrees with the quadratic oracle", "[dependence]")
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> small(0, 6);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rep * 7;
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // Heavy ties in both coordinates on even reps.
            x[i] = rep % 2 == 0 ? small(rng) : std::uniform_real_distribution<double>()(rng);
            y[i] = rep % 2 == 0 ? small(rng) + 0.1 * x[i] : std::uniform_real_distribution<double>()(rng);
        }
        const double naive = testutil::kendall_naive(x, y);
        if (std::isnan(naive)) continue;
        CHECK(kendall_tau(x, y) == Approx(naive).epsilon(1e-12).margin(1e-14));
    }
}

TEST_CASE("kendall tau simple cases", "[dependence]")
{
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 1};
    const std::vector<double> c{1, 2};
    CHECK(kendall_tau(a, a) == 1.0);
    CHECK(kendall_tau(c, b) == -1.0);
    // tau-b with ties: x = (1,1,2), y = (1,2,3): C=2, D=0, ties in x = 1.
    const std::vector<double> tx{1, 1, 2};
    const std::vector<double> ty{1, 2, 3};
    CHECK(kendall_tau(tx, ty) == Approx(2.0 / std::sqrt(2.0 * 3.0)).epsilon(1e-15));
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(kendall_tau(one, one), InsufficientDataError);
    CHECK_THROWS_AS(spearman_rho(one, one), InsufficientDataError);
    CHECK_THROWS_AS(pearson(one, one), InsufficientDataError);
    CHECK_THROWS(kendall_tau(a, c));
}

TEST_CASE("rank correlations", "[dependence]")
{
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    const std::vector<double> y{1, 8, 27, 64, 125, 216};
    CHECK(spearman_rho(x, y) == Approx(1.0).epsilon(1e-15));
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    CHECK(pearson(rx, ry) == Approx(1.0).epsilon(1e-15));
    CHECK(pearson(x, y) < 1.0);

    const std::vector<double> tied{3, 1, 3, 2};
    CHECK(average_ranks(tied) == std::vector<double>{3.5, 1.0, 3.5, 2.0});

    // Pearson against a direct two-pass computation.
    const auto u = testutil::uniforms(1000, 3);
    const auto v = testutil::uniforms(1000, 4);
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + 0.5 * v[i];
    double mu = 0.0;
    double mw = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mu += u[i];
        mw += w[i];
    }
    mu /= 1000.0;
    mw /= 1000.0;
    double suw = 0.0;
    double suu = 0.0;
    double sww = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suw += (u[i] - mu) * (w[i] - mw);
        suu += (u[i] - mu) * (u[i] - mu);
        sww += (w[i] - mw) * (w[i] - mw);
    }
    CHECK(pearson(u, w) == Approx(suw / std::sqrt(suu * sww)).epsilon(1e-12));
}

TEST_CASE("rank statistics are invariant to increasing transforms", "[dependence][property]")
{
    const auto s = base_sample(Copula::gumbel(1.8), 3000, 11);
    std::vector<double> fx(s.x.size());
    std::vector<double> fy(s.y.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        fx[i] = std::exp(8.0 * s.x[i]);
        fy[i] = std::pow(s.y[i], 0.3) * 1e6 - 7.0;
    }
    CHECK(kendall_tau(s.x, s.y) == kendall_tau(fx, fy));
    CHECK(spearman_rho(s.x, s.y) == spearman_rho(fx, fy));
    CHECK(upper_tail_empirical(s.x, s.y) == upper_tail_empirical(fx, fy));
}

TEST_CASE("empirical tau of the Gumbel copula", "[dependence][statistical]")
{
    const auto s = base_sample(Copula::gumbel(10.0), 10000, 2);
    CHECK(kendall_tau(s.x, s.y) == Approx(0.90).margin(0.02));
}

TEST_CASE("empirical upper tail dependence", "[dependence][statistical]")
{
    const auto u = testutil::uniforms(100000, 8);
    const auto v = testutil::uniforms(100000, 9);
    const double log_est = upper_tail_empirical(u, v, 0.95);
    CHECK(log_est >= -0.05);
    CHECK(log_est <= 0.05);
    // The secant form is biased by 1 - q under independence.
    CHECK(upper_tail_empirical(u, v, 0.95, TailEstimator::Secant) == Approx(0.05).margin(0.01));

    const auto s = base_sample(Copula::gumbel(10.0), 100000, 21);
    CHECK(upper_tail_empirical(s.x, s.y, 0.999) == Approx(2.0 - std::pow(2.0, 0.1)).margin(0.03));
    CHECK(upper_tail_empirical(s.x, s.y, 0.999, TailEstimator::Secant) ==
          Approx(2.0 - std::pow(2.0, 0.1)).margin(0.03));

    CHECK_THROWS_AS(upper_tail_empirical(u, v, 1.0), DomainError);
    CHECK_THROWS_AS(upper_tail_empirical(u, v, 0.0), DomainError);
}

TEST_CASE("pickands functions satisfy their constraints", "[dependence][property]")
{
    const std::vector<PickandsFunction> fns = {
        PickandsFunction::gumbel(1.0),        PickandsFunction::gumbel(1.5),
        PickandsFunction::gumbel(10.0),       PickandsFunction::joe(0.5),
        PickandsFunction::joe(10.0),          PickandsFunction::joe(2.0, 0.3, 0.9),
        PickandsFunction::joe(4.0, 1.0, 0.5), PickandsFunction::independence()};
    for (const auto& a : fns) {
        INFO("kind " << static_cast<int>(a.kind) << " alpha " << a.alpha);
        CHECK(a(0.0) == Approx(1.0).margin(1e-14));
        CHECK(a(1.0) == Approx(1.0).margin(1e-14));
        std::vector<double> grid(1001);
        for (int i = 0; i <= 1000; ++i) {
            const double t = i / 1000.0;
            grid[i] = a(t);
            CHECK(grid[i] >= std::max(t, 1.0 - t) - 1e-14);
            CHECK(grid[i] <= 1.0 + 1e-14);
        }
        for (int i = 1; i < 1000; ++i) CHECK(grid[i + 1] - 2.0 * grid[i] + grid[i - 1] >= -1e-10);
    }
    CHECK_THROWS_AS(PickandsFunction::gumbel(0.5), DomainError);
    CHECK_THROWS_AS(PickandsFunction::joe(-1.0), DomainError);
    CHECK_THROWS_AS(PickandsFunction::joe(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("kendall tau and spearman rho of extreme-value copulas", "[dependence]")
{
    CHECK(pickands_tau(PickandsFunction::gumbel(10.0)) == Approx(0.9).epsilon(1e-15));
    CHECK(pickands_tau(PickandsFunction::independence()) == Approx(0.0).margin(1e-12));
    CHECK(pickands_tau(PickandsFunction::joe(10.0)) == Approx(0.9066).margin(0.002));
    // The numerical route reproduces the Gumbel closed form.
    for (double a : {1.5, 3.0, 10.0}) {
        CHECK(pickands_tau_numeric(PickandsFunction::gumbel(a)) == Approx(1.0 - 1.0 / a).margin(2e-3));
    }
    CHECK(pickands_rho(PickandsFunction::gumbel(10.0)) == Approx(0.9855).margin(5e-4));
    CHECK(pickands_rho(PickandsFunction::joe(10.0)) == Approx(0.9874).margin(1e-3));
    CHECK(pickands_rho(PickandsFunction::independence()) == Approx(0.0).margin(1e-10));

    // Rho of the Gumbel copula against a double-integral oracle, 12 int int C - 3.
    const Copula g = Copula::gumbel(2.0);
    const int n = 600;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) sum += g.cdf((i + 0.5) / n, (j + 0.5) / n);
    }
    CHECK(pickands_rho(PickandsFunction::gumbel(2.0)) == Approx(12.0 * sum / (n * n) - 3.0).margin(1e-4));
}

TEST_CASE("theoretical upper tail dependence", "[dependence]")
{
    CHECK(upper_tail_theoretical(Copula::independence()) == Approx(0.0).margin(1e-6));
    CHECK(upper_tail_theoretical(Copula::gumbel(10.0)) == Approx(2.0 - std::pow(2.0, 0.1)).margin(1e-6));
    CHECK(upper_tail_theoretical(Copula::joe(3.0)) == Approx(2.0 - std::pow(2.0, 1.0 / 3.0)).margin(1e-6));
    CHECK(upper_tail_theoretical(Copula::clayton(2.0)) == Approx(0.0).margin(1e-4));
    CHECK(upper_tail_theoretical(Copula::frank(5.0)) == Approx(0.0).margin(1e-4));

    for (const auto& base : {Copula::gumbel(10.0), Copula::gumbel(1.6), Copula::joe(2.3727)}) {
        const double mu_q = upper_tail_theoretical(base);
        for (const auto& law :
             {MixingLaw(MixingModel::ShiftedGeometric, 0.3), MixingLaw(MixingModel::ShiftedPoisson, 5.0),
              MixingLaw(MixingModel::TruncatedPoisson, 1.866)}) {
            const MixtureCopula mc(base, law);
            INFO(mc.describe());
            CHECK(upper_tail_theoretical(mc) == Approx(mu_q).margin(1e-3));
        }
    }
}

TEST_CASE("convergence study", "[dependence][statistical]")
{
    const SeededStream stream{314, 0};
    const std::vector<double> e{10.0, 100.0};
    const auto rows = tau_convergence_study(Copula::gumbel(10.0), MixingModel::ShiftedPoisson, e, 2000, stream, 1);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.tau_c == Approx(0.9).margin(0.03));
        CHECK(r.tau_q == Approx(0.9).margin(0.03));
        CHECK(r.rho_q > r.tau_q);
    }
    const auto rows4 = tau_convergence_study(Copula::gumbel(10.0), MixingModel::ShiftedPoisson, e, 2000, stream, 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].tau_c == rows4[i].tau_c);
        CHECK(rows[i].rho_q == rows4[i].rho_q);
    }
    const std::string csv = convergence_csv(rows);
    CHECK(csv.rfind("e_lambda,tau_c,tau_q,rho_c,rho_q\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
