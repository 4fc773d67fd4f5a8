#pragma once

#include "maxclaim/copula.hpp"
#include "maxclaim/margin.hpp"
#include "maxclaim/mixing.hpp"
#include "maxclaim/mixture.hpp"
#include "maxclaim/random.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace maxclaim {

struct RiskMeasures {
    double mean;
    double std;
    double var;  // order statistic ceil(pB)
    double tvar; // mean of the sorted sample from that order statistic on
};

RiskMeasures risk_measures(std::span<const double> sample, double p);

// Claim-count law for N or K: Poisson (may be zero), a fixed count, or a mixing law (>= 1).
class CountLaw {
public:
    enum class Kind { Poisson, Fixed, Mixing };

    static CountLaw poisson(double mean);
    static CountLaw fixed(std::int64_t count);
    static CountLaw mixing(const MixingLaw& law);

    Kind kind() const { return kind_; }
    double mean() const;
    std::int64_t sample(Engine& rng) const;
    std::string describe() const;

private:
    CountLaw(Kind kind, double value, MixingLaw law) : kind_(kind), value_(value), law_(law) {}

    Kind kind_;
    double value_;
    MixingLaw law_;
};

// ---------------------------------------------------------------------------
// Influence of the largest claims on the aggregate loss.

struct InfluenceConfig {
    Copula claim_copula = Copula::independence(); // Q, coupling each (X_i, Y_i)
    CountLaw count = CountLaw::fixed(1);
    Margin x = Margin::uniform();
    Margin y = Margin::uniform();
    std::size_t replications = 10000;
    double p = 0.99;
    SeededStream stream{};
    unsigned threads = 1;
};

struct InfluenceRow {
    std::string measure; // mean, std, var, tvar
    double s_n;
    double s_n_star;
    double influence;     // I* = rho(S_N) - rho(S_N*)
    double influence_pct; // 100 I* / rho(S_N)
    double alloc_x;       // cov(X_NN, M_N) / var(M_N) * I*
    double alloc_y;
};

struct InfluenceReport {
    std::vector<InfluenceRow> rows;
    std::size_t replications;
    double p;
    std::uint64_t seed;
    // Per-replication draws, kept for diagnostics.
    std::vector<double> s_n;
    std::vector<double> s_n_star;
    std::vector<double> x_max;
    std::vector<double> y_max;
};

// Replication b draws from stream.child(b): N from the count law, N pairs
// from Q mapped through the margins, S_N, the largest X and Y, and
// S_N* = S_N - X_NN - Y_NN. Requires B >= 100.
InfluenceReport largest_claim_influence(const InfluenceConfig& config);

std::string influence_to_csv(const InfluenceReport& report);
std::string influence_to_json(const InfluenceReport& report);

// ---------------------------------------------------------------------------
// Reinsurance premiums.

enum class Treaty { ExcessOfLoss, StopLoss };

struct PremiumConfig {
    CopulaModel model = CopulaModel(Copula::independence());
    Margin x = Margin::uniform();
    Margin y = Margin::uniform();
    CountLaw count = CountLaw::poisson(156.2);
    std::vector<double> levels;
    std::size_t replications = 10000;
    SeededStream stream{};
    unsigned threads = 1;
};

struct PremiumGrid {
    Treaty treaty;
    std::vector<double> levels;
    std::vector<double> estimates;
    std::vector<double> std_errors;
    // Excess of loss only: E[K] times the mean of g over every simulated claim.
    std::vector<double> direct;
    std::size_t replications;
    std::uint64_t seed;
    // replication_values[level][b].
    std::vector<std::vector<double>> replication_values;
};

// g(x, y, r) = 0 if x <= r, else x - r + ((x - r) / x) y.
double excess_of_loss_payment(double x, double y, double r);

PremiumGrid excess_of_loss_premium(const PremiumConfig& config);
PremiumGrid stop_loss_premium(const PremiumConfig& config);

std::string premium_to_csv(const PremiumGrid& grid);
std::string premium_to_json(const PremiumGrid& grid);

std::string_view to_string(Treaty t);

} // namespace maxclaim
