#include "maxclaim/mixing.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <random>

namespace maxclaim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - exp(-theta)) for theta > 0.
double log_one_minus_exp_neg(double theta) { return std::log(-std::expm1(-theta)); }

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

} // namespace

std::string_view to_string(MixingModel m)
{
    switch (m) {
    case MixingModel::ShiftedGeometric: return "shifted-geometric";
    case MixingModel::ShiftedPoisson: return "shifted-poisson";
    case MixingModel::TruncatedPoisson: return "truncated-poisson";
    }
    return "unknown";
}

MixingModel mixing_from_string(std::string_view name)
{
    if (name == "shifted-geometric" || name == "geometric" || name == "a" || name == "A")
        return MixingModel::ShiftedGeometric;
    if (name == "shifted-poisson" || name == "b" || name == "B") return MixingModel::ShiftedPoisson;
    if (name == "truncated-poisson" || name == "c" || name == "C") return MixingModel::TruncatedPoisson;
    throw DomainError("unknown mixing model '" + std::string(name) + "'");
}

MixingLaw::MixingLaw(MixingModel model, double theta) : model_(model), theta_(theta)
{
    if (!std::isfinite(theta)) throw DomainError("mixing parameter must be finite");
    switch (model) {
    case MixingModel::ShiftedGeometric:
        if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("shifted geometric requires theta in (0,1]");
        break;
    case MixingModel::ShiftedPoisson:
        if (!(theta >= 0.0)) throw DomainError("shifted Poisson requires theta >= 0");
        break;
    case MixingModel::TruncatedPoisson:
        if (!(theta > 0.0)) throw DomainError("truncated Poisson requires theta > 0");
        break;
    }
}

MixingLaw MixingLaw::with_mean(MixingModel model, double mean)
{
    if (!(mean >= 1.0) || !std::isfinite(mean)) throw DomainError("mixing mean must be finite and >= 1");
    switch (model) {
    case MixingModel::ShiftedGeometric: return {model, 1.0 / mean};
    case MixingModel::ShiftedPoisson: return {model, mean - 1.0};
    case MixingModel::TruncatedPoisson: {
        if (!(mean > 1.0)) throw DomainError("truncated Poisson mean must exceed 1");
        // theta / (1 - exp(-theta)) increases from 1 to infinity.
        auto f = [mean](double th) { return th / -std::expm1(-th) - mean; };
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, 1e-300, mean, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
        return {model, 0.5 * (r.first + r.second)};
    }
    }
    throw DomainError("unknown mixing model");
}

double MixingLaw::mean() const
{
    switch (model_) {
    case MixingModel::ShiftedGeometric: return 1.0 / theta_;
    case MixingModel::ShiftedPoisson: return 1.0 + theta_;
    case MixingModel::TruncatedPoisson: return theta_ / -std::expm1(-theta_);
    }
    return 0.0;
}

double MixingLaw::log_pmf(std::int64_t k) const
{
    if (k < 1) return kNegInf;
    const double kd = static_cast<double>(k);
    switch (model_) {
    case MixingModel::ShiftedGeometric:
        if (k == 1) return std::log(theta_);
        return std::log(theta_) + (kd - 1.0) * std::log1p(-theta_);
    case MixingModel::ShiftedPoisson:
        if (theta_ == 0.0) return k == 1 ? 0.0 : kNegInf;
        return -theta_ + (kd - 1.0) * std::log(theta_) - std::lgamma(kd);
    case MixingModel::TruncatedPoisson:
        return -theta_ + kd * std::log(theta_) - std::lgamma(kd + 1.0) - log_one_minus_exp_neg(theta_);
    }
    return kNegInf;
}

double MixingLaw::pmf(std::int64_t k) const { return std::exp(log_pmf(k)); }

double MixingLaw::log_laplace_s(double s) const
{
    const double ls = safe_log(s);
    switch (model_) {
    case MixingModel::ShiftedGeometric: return std::log(theta_) + ls - std::log1p(-(1.0 - theta_) * s);
    case MixingModel::ShiftedPoisson: return ls - theta_ * (1.0 - s);
    case MixingModel::TruncatedPoisson:
        if (s <= 0.0) return kNegInf;
        return theta_ * (s - 1.0) + std::log(-std::expm1(-theta_ * s)) - log_one_minus_exp_neg(theta_);
    }
    return kNegInf;
}

double MixingLaw::laplace_s(double s) const
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return std::exp(log_laplace_s(s));
}

double MixingLaw::log_neg_d1_s(double s) const
{
    const double ls = safe_log(s);
    switch (model_) {
    case MixingModel::ShiftedGeometric: return std::log(theta_) + ls - 2.0 * std::log1p(-(1.0 - theta_) * s);
    case MixingModel::ShiftedPoisson: return ls - theta_ * (1.0 - s) + std::log1p(theta_ * s);
    case MixingModel::TruncatedPoisson:
        return std::log(theta_) + ls + theta_ * (s - 1.0) - log_one_minus_exp_neg(theta_);
    }
    return kNegInf;
}

double MixingLaw::log_d2_s(double s) const
{
    const double ls = safe_log(s);
    const double q = 1.0 - theta_;
    switch (model_) {
    case MixingModel::ShiftedGeometric:
        return std::log(theta_) + ls + std::log1p(q * s) - 3.0 * std::log1p(-q * s);
    case MixingModel::ShiftedPoisson:
        return ls - theta_ * (1.0 - s) + std::log1p(theta_ * s * (3.0 + theta_ * s));
    case MixingModel::TruncatedPoisson:
        return std::log(theta_) + ls + theta_ * (s - 1.0) + std::log1p(theta_ * s) - log_one_minus_exp_neg(theta_);
    }
    return kNegInf;
}

namespace {
void check_t(double t)
{
    if (std::isnan(t) || t < 0.0) throw DomainError("Laplace transform argument must be >= 0");
}
} // namespace

double MixingLaw::laplace(double t) const
{
    check_t(t);
    if (t == 0.0) return 1.0;
    return std::exp(log_laplace_s(std::exp(-t)));
}

double MixingLaw::laplace_d1(double t) const
{
    check_t(t);
    return -std::exp(log_neg_d1_s(std::exp(-t)));
}

double MixingLaw::laplace_d2(double t) const
{
    check_t(t);
    return std::exp(log_d2_s(std::exp(-t)));
}

namespace {

// Root of x exp(theta (x - 1)) = u on (0, 1]. g(x) = log x + theta (x - 1) - log u
// is increasing and concave, so Newton from x0 = u (where g <= 0) climbs
// monotonically onto the root.
double shifted_poisson_root(double theta, double u)
{
    if (u >= 1.0) return 1.0;
    const double log_u = std::log(u);
    double x = u;
    for (int it = 0; it < 200; ++it) {
        const double g = std::log(x) + theta * (x - 1.0) - log_u;
        const double step = g / (1.0 / x + theta);
        double next = x - step;
        if (!(next > 0.0 && next <= 1.0)) next = next <= 0.0 ? 0.5 * x : 0.5 * (x + 1.0);
        if (std::fabs(next - x) <= 1e-15 * x) return next;
        x = next;
    }
    throw ConvergenceError("shifted Poisson v-transform did not converge");
}

void check_u(double u)
{
    if (std::isnan(u) || u < 0.0 || u > 1.0) throw DomainError("v_transform argument outside [0,1]");
}

} // namespace

double MixingLaw::v_transform(double u) const
{
    check_u(u);
    if (u == 0.0) return 0.0;
    if (u == 1.0) return 1.0;
    switch (model_) {
    case MixingModel::ShiftedGeometric: return u / (theta_ + (1.0 - theta_) * u);
    case MixingModel::ShiftedPoisson: return theta_ == 0.0 ? u : shifted_poisson_root(theta_, u);
    case MixingModel::TruncatedPoisson:
        if (theta_ <= 30.0) return std::log1p(u * std::expm1(theta_)) / theta_;
        return 1.0 + std::log(u + (1.0 - u) * std::exp(-theta_)) / theta_;
    }
    return u;
}

double MixingLaw::laplace_inverse(double u) const
{
    if (std::isnan(u) || u <= 0.0 || u > 1.0) throw DomainError("laplace_inverse requires u in (0,1]");
    if (u == 1.0) return 0.0;
    switch (model_) {
    case MixingModel::ShiftedGeometric: return std::log1p(theta_ * (1.0 - u) / u);
    case MixingModel::ShiftedPoisson: {
        if (theta_ == 0.0) return -std::log(u);
        const double x = shifted_poisson_root(theta_, u);
        return std::max(0.0, -std::log(u) - theta_ * (1.0 - x));
    }
    case MixingModel::TruncatedPoisson: return std::max(0.0, -std::log(v_transform(u)));
    }
    return 0.0;
}

double MixingLaw::v_transform_derivative(double v) const
{
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("v_transform_derivative requires v in (0,1]");
    return std::exp(std::log(v) - log_neg_d1_s(v));
}

std::int64_t MixingLaw::sample_count(Engine& rng) const
{
    switch (model_) {
    case MixingModel::ShiftedGeometric: {
        if (theta_ == 1.0) return 1;
        std::geometric_distribution<std::int64_t> geo(theta_);
        return 1 + geo(rng);
    }
    case MixingModel::ShiftedPoisson: {
        if (theta_ == 0.0) return 1;
        std::poisson_distribution<std::int64_t> pois(theta_);
        return 1 + pois(rng);
    }
    case MixingModel::TruncatedPoisson: {
        if (theta_ <= 30.0) {
            const double u = uniform_open(rng);
            std::int64_t k = 1;
            double p = std::exp(log_pmf(1));
            double cum = p;
            while (u > cum && k < 100000) {
                ++k;
                p *= theta_ / static_cast<double>(k);
                if (p == 0.0) break;
                cum += p;
            }
            return k;
        }
        std::poisson_distribution<std::int64_t> pois(theta_);
        for (;;) {
            const std::int64_t k = pois(rng);
            if (k >= 1) return k;
        }
    }
    }
    return 1;
}

std::string MixingLaw::describe() const
{
    return std::string(to_string(model_)) + "(theta=" + format_double(theta_) + ")";
}

} // namespace maxclaim
