#include "maxclaim/mixture.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxclaim {

namespace {

constexpr double kClampLo = 1e-15;
constexpr double kClampHi = 1.0 - 1e-15;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_interior(double u, const char* what)
{
    if (std::isnan(u) || u <= 0.0 || u >= 1.0) {
        throw BoundaryError(std::string(what) + ": argument must lie strictly inside (0,1)");
    }
    return std::clamp(u, kClampLo, kClampHi);
}

void check_unit(double u, const char* what)
{
    if (std::isnan(u) || u < 0.0 || u > 1.0) throw DomainError(std::string(what) + ": argument outside [0,1]");
}

double log_checked(double q, const char* what)
{
    if (!(q > 0.0)) throw BoundaryError(std::string(what) + ": base copula underflows to 0");
    return std::log(q);
}

} // namespace

std::pair<double, double> MixtureCopula::v_pair(double u1, double u2) const
{
    return {std::clamp(mixing_.v_transform(u1), kClampLo, kClampHi),
            std::clamp(mixing_.v_transform(u2), kClampLo, kClampHi)};
}

double MixtureCopula::cdf(double u1, double u2) const
{
    check_unit(u1, "mixture cdf");
    check_unit(u2, "mixture cdf");
    if (u1 == 0.0 || u2 == 0.0) return 0.0;
    if (u1 == 1.0) return u2;
    if (u2 == 1.0) return u1;
    const double q = base_.cdf(mixing_.v_transform(u1), mixing_.v_transform(u2));
    return std::clamp(mixing_.laplace_s(q), std::max(u1 + u2 - 1.0, 0.0), std::min(u1, u2));
}

double MixtureCopula::log_pdf(double u1, double u2) const
{
    const auto [v1, v2] = v_pair(clamp_interior(u1, "mixture pdf"), clamp_interior(u2, "mixture pdf"));
    const Copula::LogTerms t = base_.log_terms(v1, v2);
    const double q_cdf = t.cdf;
    log_checked(q_cdf, "mixture pdf");
    const double lp = t.log_d1 + t.log_d2;
    const double th = mixing_.theta();
    switch (mixing_.model()) {
    case MixingModel::ShiftedGeometric: {
        const double q = 1.0 - th;
        const double log_w =
            q == 0.0 ? t.log_pdf
                     : special::log_add_exp(std::log1p(-q * q_cdf) + t.log_pdf, std::log(2.0 * q) + lp);
        return log_w + 2.0 * std::log1p(-q * v1) + 2.0 * std::log1p(-q * v2) - std::log(th) -
               3.0 * std::log1p(-q * q_cdf);
    }
    case MixingModel::ShiftedPoisson: {
        if (th == 0.0) return t.log_pdf;
        const double log_w = special::log_add_exp(std::log1p(th * q_cdf) + t.log_pdf,
                                                  std::log(th) + std::log(2.0 + th * q_cdf) + lp);
        return th * (q_cdf + 1.0 - v1 - v2) - std::log1p(th * v1) - std::log1p(th * v2) + log_w;
    }
    case MixingModel::TruncatedPoisson: {
        const double log_w = special::log_add_exp(std::log(th) + lp, t.log_pdf);
        return std::log(-std::expm1(-th)) - std::log(th) + th * (1.0 + q_cdf - v1 - v2) + log_w;
    }
    }
    return kNegInf;
}

double MixtureCopula::pdf(double u1, double u2) const { return std::exp(log_pdf(u1, u2)); }

double MixtureCopula::pdf_generic(double u1, double u2) const
{
    const auto [v1, v2] = v_pair(clamp_interior(u1, "mixture pdf"), clamp_interior(u2, "mixture pdf"));
    const Copula::LogTerms t = base_.log_terms(v1, v2);
    const double s = t.cdf;
    log_checked(s, "mixture pdf");
    const double l1 = -std::exp(mixing_.log_neg_d1_s(s));
    const double l2 = std::exp(mixing_.log_d2_s(s));
    const double d1 = std::exp(t.log_d1);
    const double d2 = std::exp(t.log_d2);
    const double dens = std::exp(t.log_pdf);
    const double jac = mixing_.v_transform_derivative(v1) * mixing_.v_transform_derivative(v2);
    return jac / (s * s) * ((l1 + l2) * d1 * d2 - l1 * s * dens);
}

double MixtureCopula::partial_u2(double u1, double u2) const
{
    const auto [v1, v2] = v_pair(clamp_interior(u1, "mixture partial"), clamp_interior(u2, "mixture partial"));
    const double q_cdf = base_.cdf(v1, v2);
    const double ld2 = base_.log_partial_v2(v1, v2);
    const double th = mixing_.theta();
    double log_value = kNegInf;
    switch (mixing_.model()) {
    case MixingModel::ShiftedGeometric: {
        const double q = 1.0 - th;
        log_value = ld2 + 2.0 * std::log1p(-q * v2) - 2.0 * std::log1p(-q * q_cdf);
        break;
    }
    case MixingModel::ShiftedPoisson:
        log_value = ld2 + th * (q_cdf - v2) + std::log1p(th * q_cdf) - std::log1p(th * v2);
        break;
    case MixingModel::TruncatedPoisson: log_value = ld2 + th * (q_cdf - v2); break;
    }
    return std::min(1.0, std::exp(log_value));
}

double MixtureCopula::partial_u2_generic(double u1, double u2) const
{
    const auto [v1, v2] = v_pair(clamp_interior(u1, "mixture partial"), clamp_interior(u2, "mixture partial"));
    const double s = base_.cdf(v1, v2);
    const double log_s = log_checked(s, "mixture partial");
    const double chain = std::exp(mixing_.log_neg_d1_s(s) - log_s + base_.log_partial_v2(v1, v2));
    return chain * mixing_.v_transform_derivative(v2);
}

double MixtureCopula::log_survival_u2(double u1, double u2) const { return std::log1p(-partial_u2(u1, u2)); }

double MixtureCopula::cdf_multivariate(std::span<const double> u) const
{
    if (u.size() < 2) throw DomainError("cdf_multivariate requires dimension >= 2");
    const Family fam = base_.family();
    if (fam != Family::Gumbel && fam != Family::Clayton && fam != Family::Independence) {
        throw UnsupportedError("cdf_multivariate supports Gumbel, Clayton and independence bases only");
    }
    for (double x : u) {
        check_unit(x, "cdf_multivariate");
        if (x == 0.0) return 0.0;
    }
    const double a = base_.alpha();
    double q = 1.0;
    if (fam == Family::Independence) {
        for (double x : u) q *= mixing_.v_transform(x);
    } else if (fam == Family::Gumbel) {
        double log_sum = kNegInf;
        for (double x : u) {
            const double v = mixing_.v_transform(x);
            if (v < 1.0) log_sum = special::log_add_exp(log_sum, a * std::log(-std::log(v)));
        }
        q = log_sum == kNegInf ? 1.0 : std::exp(-std::exp(log_sum / a));
    } else {
        double sum = 0.0;
        for (double x : u) sum += std::expm1(-a * std::log(mixing_.v_transform(x)));
        q = std::exp(-std::log1p(sum) / a);
    }
    return mixing_.laplace_s(q);
}

std::string MixtureCopula::describe() const { return base_.describe() + " x " + mixing_.describe(); }

double mixture_df(const MixtureCopula& mc, const std::function<double(double)>& g1,
                  const std::function<double(double)>& g2, double x, double y)
{
    return mc.mixing().laplace_s(mc.base().cdf(g1(x), g2(y)));
}

double compound_df(double p_zero, double f)
{
    if (!(p_zero >= 0.0 && p_zero <= 1.0)) throw DomainError("compound_df: P(N=0) outside [0,1]");
    return p_zero + (1.0 - p_zero) * f;
}

MixtureCopula CopulaModel::mixture() const
{
    if (!mixing_) throw UnsupportedError("model has no mixing law");
    return {base_, *mixing_};
}

double CopulaModel::cdf(double u1, double u2) const
{
    return mixing_ ? MixtureCopula(base_, *mixing_).cdf(u1, u2) : base_.cdf(u1, u2);
}

double CopulaModel::log_pdf(double u1, double u2) const
{
    return mixing_ ? MixtureCopula(base_, *mixing_).log_pdf(u1, u2) : base_.log_pdf(u1, u2);
}

double CopulaModel::partial_u2(double u1, double u2) const
{
    return mixing_ ? MixtureCopula(base_, *mixing_).partial_u2(u1, u2) : base_.partial_v2(u1, u2);
}

double CopulaModel::log_survival_u2(double u1, double u2) const { return std::log1p(-partial_u2(u1, u2)); }

std::string CopulaModel::describe() const
{
    return mixing_ ? base_.describe() + " x " + mixing_->describe() : base_.describe();
}

} // namespace maxclaim
