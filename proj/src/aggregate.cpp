#include "maxclaim/aggregate.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/parallel.hpp"
#include "maxclaim/sampling.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace maxclaim {

RiskMeasures risk_measures(std::span<const double> sample, double p)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("confidence level must lie in (0,1)");
    const std::size_t n = sample.size();
    if (n == 0 || static_cast<double>(n) < 1.0 / (1.0 - p) - 1e-9) {
        throw InsufficientDataError("risk measures need at least 1/(1-p) observations");
    }
    const double nd = static_cast<double>(n);
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / nd;
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(ss / (nd - 1.0)) : 0.0;

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    // The 1e-9 guards p * n landing a hair above an integer.
    const auto k = static_cast<std::size_t>(std::clamp(std::ceil(p * nd - 1e-9), 1.0, nd));
    const double var = sorted[k - 1];
    const double tail = std::accumulate(sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end(), 0.0);
    return {mean, sd, var, tail / static_cast<double>(n - k + 1)};
}

CountLaw CountLaw::poisson(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson count mean must be finite and >= 0");
    return {Kind::Poisson, mean, MixingLaw(MixingModel::ShiftedPoisson, 0.0)};
}

CountLaw CountLaw::fixed(std::int64_t count)
{
    if (count < 0) throw DomainError("fixed count must be >= 0");
    return {Kind::Fixed, static_cast<double>(count), MixingLaw(MixingModel::ShiftedPoisson, 0.0)};
}

CountLaw CountLaw::mixing(const MixingLaw& law) { return {Kind::Mixing, law.mean(), law}; }

double CountLaw::mean() const { return kind_ == Kind::Mixing ? law_.mean() : value_; }

std::int64_t CountLaw::sample(Engine& rng) const
{
    switch (kind_) {
    case Kind::Poisson: {
        if (value_ == 0.0) return 0;
        std::poisson_distribution<std::int64_t> pois(value_);
        return pois(rng);
    }
    case Kind::Fixed: return static_cast<std::int64_t>(value_);
    case Kind::Mixing: return law_.sample_count(rng);
    }
    return 0;
}

std::string CountLaw::describe() const
{
    switch (kind_) {
    case Kind::Poisson: return "poisson(" + format_double(value_) + ")";
    case Kind::Fixed: return "fixed(" + format_double(value_) + ")";
    case Kind::Mixing: return law_.describe();
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

double covariance(std::span<const double> a, std::span<const double> b)
{
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / (n - 1.0);
}

} // namespace

InfluenceReport largest_claim_influence(const InfluenceConfig& config)
{
    const std::size_t b_reps = config.replications;
    if (b_reps < 100) throw InsufficientDataError("largest-claim influence needs at least 100 replications");
    InfluenceReport rep;
    rep.replications = b_reps;
    rep.p = config.p;
    rep.seed = config.stream.seed;
    rep.s_n.resize(b_reps);
    rep.s_n_star.resize(b_reps);
    rep.x_max.resize(b_reps);
    rep.y_max.resize(b_reps);

    parallel_for(b_reps, config.threads, [&](std::size_t b) {
        Engine rng = config.stream.child(b).engine();
        const std::int64_t n = config.count.sample(rng);
        double sx = 0.0;
        double sy = 0.0;
        double xm = 0.0;
        double ym = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto [u1, u2] = config.claim_copula.sample_pair(rng);
            const double x = config.x.quantile(u1);
            const double y = config.y.quantile(u2);
            sx += x;
            sy += y;
            xm = std::max(xm, x);
            ym = std::max(ym, y);
        }
        rep.s_n[b] = sx + sy;
        rep.x_max[b] = xm;
        rep.y_max[b] = ym;
        rep.s_n_star[b] = (sx - xm) + (sy - ym);
    });

    std::vector<double> m(b_reps);
    for (std::size_t b = 0; b < b_reps; ++b) m[b] = rep.x_max[b] + rep.y_max[b];
    const double var_m = covariance(m, m);
    if (!(var_m > 0.0)) throw DomainError("allocation undefined: the largest claims have zero variance");
    const double share_x = covariance(rep.x_max, m) / var_m;
    const double share_y = covariance(rep.y_max, m) / var_m;

    const RiskMeasures full = risk_measures(rep.s_n, config.p);
    const RiskMeasures star = risk_measures(rep.s_n_star, config.p);
    auto row = [&](const char* name, double a, double b) {
        const double inf = a - b;
        return InfluenceRow{name, a, b, inf, 100.0 * inf / a, share_x * inf, share_y * inf};
    };
    rep.rows = {row("mean", full.mean, star.mean), row("std", full.std, star.std), row("var", full.var, star.var),
                row("tvar", full.tvar, star.tvar)};
    return rep;
}

std::string influence_to_csv(const InfluenceReport& report)
{
    std::ostringstream os;
    os << "measure,s_n,s_n_star,influence,influence_pct,alloc_x,alloc_y\n";
    for (const auto& r : report.rows) {
        os << r.measure << ',' << format_double(r.s_n) << ',' << format_double(r.s_n_star) << ','
           << format_double(r.influence) << ',' << format_double(r.influence_pct) << ',' << format_double(r.alloc_x)
           << ',' << format_double(r.alloc_y) << '\n';
    }
    return os.str();
}

std::string influence_to_json(const InfluenceReport& report)
{
    nlohmann::json j;
    j["replications"] = report.replications;
    j["p"] = report.p;
    j["seed"] = report.seed;
    j["var_convention"] = "order statistic ceil(pB); TVaR averages the sorted sample from that statistic on";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"measure", r.measure},
                        {"s_n", r.s_n},
                        {"s_n_star", r.s_n_star},
                        {"influence", r.influence},
                        {"influence_pct", r.influence_pct},
                        {"alloc_x", r.alloc_x},
                        {"alloc_y", r.alloc_y}});
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::string_view to_string(Treaty t) { return t == Treaty::ExcessOfLoss ? "excess-of-loss" : "stop-loss"; }

double excess_of_loss_payment(double x, double y, double r)
{
    if (x <= r) return 0.0;
    return x - r + (x - r) / x * y;
}

namespace {

PremiumGrid premium_impl(const PremiumConfig& config, Treaty treaty)
{
    const std::size_t b_reps = config.replications;
    if (b_reps < 2) throw InsufficientDataError("premium estimation needs at least two replications");
    if (config.levels.empty()) throw DomainError("no retention or deductible levels given");
    for (double l : config.levels) {
        const bool ok = treaty == Treaty::ExcessOfLoss ? l > 0.0 : l >= 0.0;
        if (!ok || !std::isfinite(l)) throw DomainError("invalid retention or deductible level");
    }
    const std::size_t nl = config.levels.size();
    PremiumGrid grid;
    grid.treaty = treaty;
    grid.levels = config.levels;
    grid.replications = b_reps;
    grid.seed = config.stream.seed;
    grid.replication_values.assign(nl, std::vector<double>(b_reps));
    std::vector<double> claims(b_reps);

    parallel_for(b_reps, config.threads, [&](std::size_t b) {
        Engine rng = config.stream.child(b).engine();
        const std::int64_t k = config.count.sample(rng);
        std::vector<double> acc(nl, 0.0);
        double total = 0.0;
        for (std::int64_t i = 0; i < k; ++i) {
            const auto [u1, u2] = sample_model_pair(config.model, rng);
            const double x = config.x.quantile(u1);
            const double y = config.y.quantile(u2);
            total += x + y;
            if (treaty == Treaty::ExcessOfLoss) {
                for (std::size_t l = 0; l < nl; ++l) acc[l] += excess_of_loss_payment(x, y, config.levels[l]);
            }
        }
        for (std::size_t l = 0; l < nl; ++l) {
            grid.replication_values[l][b] =
                treaty == Treaty::ExcessOfLoss ? acc[l] : std::max(total - config.levels[l], 0.0);
        }
        claims[b] = static_cast<double>(k);
    });

    const double nb = static_cast<double>(b_reps);
    const double total_claims = std::accumulate(claims.begin(), claims.end(), 0.0);
    for (std::size_t l = 0; l < nl; ++l) {
        const auto& v = grid.replication_values[l];
        const double sum = std::accumulate(v.begin(), v.end(), 0.0);
        const double mean = sum / nb;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        grid.estimates.push_back(mean);
        grid.std_errors.push_back(std::sqrt(ss / (nb - 1.0) / nb));
        if (treaty == Treaty::ExcessOfLoss) {
            grid.direct.push_back(total_claims > 0.0 ? config.count.mean() * sum / total_claims : 0.0);
        }
    }
    return grid;
}

} // namespace

PremiumGrid excess_of_loss_premium(const PremiumConfig& config) { return premium_impl(config, Treaty::ExcessOfLoss); }

PremiumGrid stop_loss_premium(const PremiumConfig& config) { return premium_impl(config, Treaty::StopLoss); }

std::string premium_to_csv(const PremiumGrid& grid)
{
    std::ostringstream os;
    os << "treaty,level,estimate,std_error,direct\n";
    for (std::size_t l = 0; l < grid.levels.size(); ++l) {
        os << to_string(grid.treaty) << ',' << format_double(grid.levels[l]) << ',' << format_double(grid.estimates[l])
           << ',' << format_double(grid.std_errors[l]) << ','
           << (grid.direct.empty() ? std::string() : format_double(grid.direct[l])) << '\n';
    }
    return os.str();
}

std::string premium_to_json(const PremiumGrid& grid)
{
    nlohmann::json j;
    j["treaty"] = std::string(to_string(grid.treaty));
    j["replications"] = grid.replications;
    j["seed"] = grid.seed;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t l = 0; l < grid.levels.size(); ++l) {
        nlohmann::json r{{"level", grid.levels[l]}, {"estimate", grid.estimates[l]}, {"std_error", grid.std_errors[l]}};
        if (!grid.direct.empty()) r["direct"] = grid.direct[l];
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

} // namespace maxclaim
