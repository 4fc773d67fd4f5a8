#pragma once

#include "maxclaim/margin.hpp"
#include "maxclaim/mixture.hpp"
#include "maxclaim/random.hpp"

#include <optional>
#include <string>
#include <vector>

namespace maxclaim {

// Paired loss (x) and expense (y) observations. delta and limit are either
// empty or one entry per row; delta_i = 0 marks x_i as right-censored at
// limit_i.
struct ClaimsDataset {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<int> delta;
    std::vector<double> limit;

    std::size_t size() const { return x.size(); }
    bool has_censoring() const { return !delta.empty(); }
    // Throws DataError naming the first offending rows (1-based data rows).
    void validate() const;
};

struct ColumnMapping {
    std::string loss = "loss";
    std::string alae = "alae";
    std::string censor; // empty: no censoring column
    std::string limit;  // empty: no limit column
};

ClaimsDataset load_csv(const std::string& path, const ColumnMapping& mapping = {});
ClaimsDataset parse_csv(const std::string& text, const ColumnMapping& mapping = {});
void save_csv(const ClaimsDataset& ds, const std::string& path, const ColumnMapping& mapping = {});
std::string to_csv(const ClaimsDataset& ds, const ColumnMapping& mapping = {});

struct ColumnSummary {
    std::string name;
    std::size_t count;
    double min;
    double q1;
    double q2;
    double q3;
    double max;
    double mean;
    double std;
};

// Quantile with linear interpolation between order statistics (h = (n-1)p).
double quantile_linear(std::vector<double> values, double p);
ColumnSummary summarize_column(const std::string& name, const std::vector<double>& values);
std::vector<ColumnSummary> summarize(const ClaimsDataset& ds);
std::string summary_to_csv(const std::vector<ColumnSummary>& rows);

struct SynthesisConfig {
    CopulaModel model = CopulaModel(Copula::independence());
    Margin x = Margin::uniform();
    Margin y = Margin::uniform();
    std::size_t n = 0;
    SeededStream stream{};
    // When set, x is right-censored at this sample quantile of x.
    std::optional<double> censor_quantile;
    unsigned threads = 1;
};

ClaimsDataset synthesize(const SynthesisConfig& config);

} // namespace maxclaim
