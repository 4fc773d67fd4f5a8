#include "maxclaim/margin.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxclaim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_u(double u)
{
    if (std::isnan(u) || u < 0.0 || u > 1.0) throw DomainError("margin quantile argument outside [0,1]");
}
} // namespace

Margin Margin::uniform() { return {Kind::Uniform, 0.0, 1.0}; }

Margin Margin::pareto(double scale, double shape)
{
    if (!(scale > 0.0) || !(shape > 0.0) || !std::isfinite(scale) || !std::isfinite(shape)) {
        throw DomainError("Pareto margin requires scale > 0 and shape > 0");
    }
    return {Kind::ParetoI, scale, shape};
}

Margin Margin::lognormal(double mu, double sigma)
{
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("lognormal margin requires finite mu and sigma > 0");
    }
    return {Kind::Lognormal, mu, sigma};
}

Margin Margin::empirical(std::vector<double> data)
{
    if (data.empty()) throw InsufficientDataError("empirical margin needs at least one observation");
    for (double x : data) {
        if (!std::isfinite(x)) throw DataError("empirical margin data must be finite");
    }
    std::sort(data.begin(), data.end());
    Margin m{Kind::Empirical, 0.0, 0.0};
    m.data_ = std::make_shared<const std::vector<double>>(std::move(data));
    return m;
}

const std::vector<double>& Margin::sorted_data() const
{
    if (!data_) throw UnsupportedError("margin has no data");
    return *data_;
}

double Margin::cdf(double x) const
{
    switch (kind_) {
    case Kind::Uniform: return std::clamp(x, 0.0, 1.0);
    case Kind::ParetoI: return x <= p1_ ? 0.0 : -std::expm1(p2_ * std::log(p1_ / x));
    case Kind::Lognormal: return x <= 0.0 ? 0.0 : special::normal_cdf((std::log(x) - p1_) / p2_);
    case Kind::Empirical: {
        const auto& d = *data_;
        return static_cast<double>(std::upper_bound(d.begin(), d.end(), x) - d.begin()) /
               static_cast<double>(d.size());
    }
    }
    return 0.0;
}

double Margin::quantile(double u) const
{
    check_u(u);
    switch (kind_) {
    case Kind::Uniform: return u;
    case Kind::ParetoI:
        if (u == 1.0) return kInf;
        return p1_ * std::exp(-std::log1p(-u) / p2_);
    case Kind::Lognormal:
        if (u == 0.0) return 0.0;
        if (u == 1.0) return kInf;
        return std::exp(p1_ + p2_ * special::normal_quantile(u));
    case Kind::Empirical: {
        // inf{x : F_n(x) >= u} = x_(ceil(n u)).
        const auto& d = *data_;
        const double pos = std::ceil(u * static_cast<double>(d.size()));
        const auto idx = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(d.size()))) - 1;
        return d[idx];
    }
    }
    return 0.0;
}

double Margin::mean() const
{
    switch (kind_) {
    case Kind::Uniform: return 0.5;
    case Kind::ParetoI: return p2_ > 1.0 ? p1_ * p2_ / (p2_ - 1.0) : kInf;
    case Kind::Lognormal: return std::exp(p1_ + 0.5 * p2_ * p2_);
    case Kind::Empirical: {
        double s = 0.0;
        for (double x : *data_) s += x;
        return s / static_cast<double>(data_->size());
    }
    }
    return 0.0;
}

double Margin::variance() const
{
    switch (kind_) {
    case Kind::Uniform: return 1.0 / 12.0;
    case Kind::ParetoI:
        if (p2_ <= 2.0) return kInf;
        return p1_ * p1_ * p2_ / ((p2_ - 1.0) * (p2_ - 1.0) * (p2_ - 2.0));
    case Kind::Lognormal: return std::expm1(p2_ * p2_) * std::exp(2.0 * p1_ + p2_ * p2_);
    case Kind::Empirical: {
        const double m = mean();
        double s = 0.0;
        for (double x : *data_) s += (x - m) * (x - m);
        return s / static_cast<double>(data_->size());
    }
    }
    return 0.0;
}

std::string Margin::describe() const
{
    switch (kind_) {
    case Kind::Uniform: return "uniform";
    case Kind::ParetoI: return "pareto:" + format_double(p1_) + "," + format_double(p2_);
    case Kind::Lognormal: return "lognormal:" + format_double(p1_) + "," + format_double(p2_);
    case Kind::Empirical: return "empirical(n=" + std::to_string(data_->size()) + ")";
    }
    return "unknown";
}

Margin parse_margin(const std::string& spec)
{
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    if (name == "uniform") return Margin::uniform();
    if (colon == std::string::npos) throw DomainError("margin spec '" + spec + "' needs parameters");
    const std::string rest = spec.substr(colon + 1);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw DomainError("margin spec '" + spec + "' needs two parameters");
    double a = 0.0;
    double b = 0.0;
    try {
        a = std::stod(rest.substr(0, comma));
        b = std::stod(rest.substr(comma + 1));
    } catch (const std::exception&) {
        throw DomainError("margin spec '" + spec + "' has non-numeric parameters");
    }
    if (name == "pareto") return Margin::pareto(a, b);
    if (name == "lognormal") return Margin::lognormal(a, b);
    throw DomainError("unknown margin '" + name + "'");
}

} // namespace maxclaim
