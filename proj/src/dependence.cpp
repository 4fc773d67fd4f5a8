#include "maxclaim/dependence.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/ranks.hpp"
#include "maxclaim/sampling.hpp"
#include "maxclaim/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

namespace maxclaim {

namespace {

void check_pairs(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw DomainError("paired samples must have equal length");
    if (x.size() < 2) throw InsufficientDataError("at least two pairs are required");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) throw DataError("NaN in paired sample");
    }
}

// Sum of t(t-1)/2 over runs of equal values in a sorted sequence.
template <class Eq>
std::int64_t tied_pairs(std::size_t n, Eq equal)
{
    std::int64_t total = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && equal(i - 1, i)) {
            ++run;
        } else {
            total += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

// Stable merge sort of v counting inversions (strictly greater elements passed over).
std::int64_t sort_counting_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi)
{
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = sort_counting_swaps(v, buf, lo, mid) + sort_counting_swaps(v, buf, mid, hi);
    std::size_t i = lo;
    std::size_t j = mid;
    std::size_t k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            buf[k++] = v[j++];
            swaps += static_cast<std::int64_t>(mid - i);
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y)
{
    check_pairs(x, y);
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
    const std::int64_t n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[idx[a]] == x[idx[b]]; });
    const std::int64_t n3 = tied_pairs(
        n, [&](std::size_t a, std::size_t b) { return x[idx[a]] == x[idx[b]] && ys[a] == ys[b]; });
    std::vector<double> buf(n);
    const std::int64_t swaps = sort_counting_swaps(ys, buf, 0, n);
    const std::int64_t n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });
    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const double num = static_cast<double>(n0 - n1 - n2 + n3) - 2.0 * static_cast<double>(swaps);
    const double den = n1 == n2 ? static_cast<double>(n0 - n1)
                                : std::sqrt(static_cast<double>(n0 - n1)) * std::sqrt(static_cast<double>(n0 - n2));
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return num / den;
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    check_pairs(x, y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

double spearman_rho(std::span<const double> x, std::span<const double> y)
{
    check_pairs(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double upper_tail_empirical(std::span<const double> x, std::span<const double> y, double q, TailEstimator estimator)
{
    check_pairs(x, y);
    if (!(q > 0.0 && q < 1.0)) throw DomainError("tail threshold must lie in (0,1)");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double cut = q * (n + 1.0);
    std::size_t both = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (rx[i] <= cut && ry[i] <= cut) ++both;
    }
    const double c = static_cast<double>(both) / n;
    if (estimator == TailEstimator::Secant) return 2.0 - (1.0 - c) / (1.0 - q);
    if (both == 0) throw InsufficientDataError("no pair below the tail threshold");
    return 2.0 - std::log(c) / std::log(q);
}

PickandsFunction PickandsFunction::gumbel(double alpha)
{
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw DomainError("Gumbel Pickands function requires alpha >= 1");
    return {Kind::Gumbel, alpha, 1.0, 1.0};
}

PickandsFunction PickandsFunction::joe(double alpha, double psi1, double psi2)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("Joe Pickands function requires alpha > 0");
    if (!(psi1 > 0.0 && psi1 <= 1.0 && psi2 > 0.0 && psi2 <= 1.0)) {
        throw DomainError("Joe Pickands weights must lie in (0,1]");
    }
    return {Kind::Joe, alpha, psi1, psi2};
}

double PickandsFunction::operator()(double t) const
{
    if (std::isnan(t) || t < 0.0 || t > 1.0) throw DomainError("Pickands argument outside [0,1]");
    switch (kind) {
    case Kind::Independence: return 1.0;
    case Kind::Gumbel: {
        if (t == 0.0 || t == 1.0) return 1.0;
        const double a = alpha;
        return std::exp(special::log_add_exp(a * std::log(t), a * std::log1p(-t)) / a);
    }
    case Kind::Joe: {
        if (t == 0.0 || t == 1.0) return 1.0;
        const double a = alpha;
        const double log_sum = special::log_add_exp(-a * std::log(psi1 * (1.0 - t)), -a * std::log(psi2 * t));
        return 1.0 - std::exp(-log_sum / a);
    }
    }
    return 1.0;
}

double pickands_tau(const PickandsFunction& a)
{
    if (a.kind == PickandsFunction::Kind::Independence) return 0.0;
    if (a.kind == PickandsFunction::Kind::Gumbel) return 1.0 - 1.0 / a.alpha;
    return pickands_tau_numeric(a);
}

double pickands_tau_numeric(const PickandsFunction& a)
{
    constexpr int kIntervals = 2000;
    const double h = 1.0 / kIntervals;
    std::vector<double> values(kIntervals + 1);
    for (int i = 0; i <= kIntervals; ++i) values[static_cast<std::size_t>(i)] = a(i * h);
    double tau = 0.0;
    for (int i = 1; i < kIntervals; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double t = i * h;
        const double d_slope = (values[k + 1] - 2.0 * values[k] + values[k - 1]) / h;
        tau += t * (1.0 - t) / values[k] * d_slope;
    }
    return tau;
}

double pickands_rho(const PickandsFunction& a)
{
    auto f = [&](double t) {
        const double v = 1.0 + a(t);
        return 1.0 / (v * v);
    };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-13);
    return 12.0 * integral - 3.0;
}

double upper_tail_theoretical(const std::function<double(double, double)>& cdf)
{
    constexpr int kLevels = 4;
    double table[kLevels][kLevels];
    double u = 1e-3;
    for (int k = 0; k < kLevels; ++k, u /= 10.0) {
        const double w = 1.0 - u;
        table[k][0] = (1.0 - cdf(w, w)) / u;
        double factor = 1.0;
        for (int j = 1; j <= k; ++j) {
            factor *= 10.0;
            table[k][j] = table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0);
        }
    }
    return std::clamp(2.0 - table[kLevels - 1][kLevels - 1], 0.0, 1.0);
}

double upper_tail_theoretical(const Copula& c)
{
    return upper_tail_theoretical([&](double a, double b) { return c.cdf(a, b); });
}

double upper_tail_theoretical(const MixtureCopula& mc)
{
    if (!std::isfinite(mc.mixing().mean())) throw UnsupportedError("upper tail limit needs a finite E[Lambda]");
    return upper_tail_theoretical([&](double a, double b) { return mc.cdf(a, b); });
}

std::vector<ConvergenceRow> tau_convergence_study(const Copula& base, MixingModel model,
                                                  const std::vector<double>& e_lambdas, std::size_t reps,
                                                  const SeededStream& stream, unsigned threads)
{
    if (reps < 2) throw InsufficientDataError("convergence study needs at least two replications");
    std::vector<ConvergenceRow> rows;
    rows.reserve(e_lambdas.size());
    std::vector<double> a(reps);
    std::vector<double> b(reps);
    auto measures = [&](const PairSample& s, double& tau, double& rho) {
        for (std::size_t i = 0; i < reps; ++i) {
            a[i] = s[i].first;
            b[i] = s[i].second;
        }
        tau = kendall_tau(a, b);
        rho = spearman_rho(a, b);
    };
    for (std::size_t i = 0; i < e_lambdas.size(); ++i) {
        const MixtureCopula mc(base, MixingLaw::with_mean(model, e_lambdas[i]));
        ConvergenceRow row{e_lambdas[i], 0.0, 0.0, 0.0, 0.0};
        measures(sample_model(mc, reps, stream.child(2 * i), threads), row.tau_c, row.rho_c);
        measures(sample_model(base, reps, stream.child(2 * i + 1), threads), row.tau_q, row.rho_q);
        rows.push_back(row);
    }
    return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream os;
    os << "e_lambda,tau_c,tau_q,rho_c,rho_q\n";
    for (const auto& r : rows) {
        os << format_double(r.e_lambda) << ',' << format_double(r.tau_c) << ',' << format_double(r.tau_q) << ','
           << format_double(r.rho_c) << ',' << format_double(r.rho_q) << '\n';
    }
    return os.str();
}

} // namespace maxclaim
