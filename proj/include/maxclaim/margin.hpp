#pragma once

#include <memory>
#include <string>
#include <vector>

namespace maxclaim {

// Univariate claim-size law used to map copula pairs to the original scale.
class Margin {
public:
    enum class Kind { Uniform, ParetoI, Lognormal, Empirical };

    static Margin uniform();
    // F(x) = 1 - (scale / x)^shape for x >= scale.
    static Margin pareto(double scale, double shape);
    // log X ~ Normal(mu, sigma).
    static Margin lognormal(double mu, double sigma);
    // Empirical df of the data; quantile is its left-continuous inverse.
    static Margin empirical(std::vector<double> data);

    Kind kind() const { return kind_; }
    double cdf(double x) const;
    double quantile(double u) const;
    // Infinite when the moment does not exist.
    double mean() const;
    double variance() const;
    std::string describe() const;

    double param1() const { return p1_; }
    double param2() const { return p2_; }
    const std::vector<double>& sorted_data() const;

private:
    Margin(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

    Kind kind_;
    double p1_;
    double p2_;
    std::shared_ptr<const std::vector<double>> data_;
};

// "pareto:10000,2.2", "lognormal:10.4,1.6", "uniform".
Margin parse_margin(const std::string& spec);

} // namespace maxclaim
