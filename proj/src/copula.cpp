#include "maxclaim/copula.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/special.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace maxclaim {

namespace {

constexpr double kClampLo = 1e-15;
constexpr double kClampHi = 1.0 - 1e-15;
constexpr double kFrankMinAbs = 1e-6;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_interior(double v, const char* what)
{
    if (std::isnan(v) || v <= 0.0 || v >= 1.0) {
        throw BoundaryError(std::string(what) + ": argument must lie strictly inside (0,1)");
    }
    return std::clamp(v, kClampLo, kClampHi);
}

void check_unit(double v, const char* what)
{
    if (std::isnan(v) || v < 0.0 || v > 1.0) throw DomainError(std::string(what) + ": argument outside [0,1]");
}

// Frank pieces for alpha > 0 (negative alpha is handled by rotation).
struct FrankTerms {
    double e1;    // exp(-a v1)
    double om1;   // 1 - exp(-a v1)
    double om2;   // 1 - exp(-a v2)
    double omall; // 1 - exp(-a)
    double denom; // (1 - e^{-a}) - (1 - e^{-a v1})(1 - e^{-a v2}) > 0
};

FrankTerms frank_terms(double a, double v1, double v2)
{
    FrankTerms t{};
    t.e1 = std::exp(-a * v1);
    t.om1 = -std::expm1(-a * v1);
    t.om2 = -std::expm1(-a * v2);
    t.omall = -std::expm1(-a);
    // Written as a sum of positive terms; the difference form cancels badly for large a.
    t.denom = t.e1 * t.om2 - std::exp(-a * v2) * std::expm1(-a * (1.0 - v2));
    return t;
}

double frank_cdf_pos(double a, double v1, double v2)
{
    // -(1/a) log(1 + (e^{-a v1}-1)(e^{-a v2}-1)/(e^{-a}-1))
    const double g1 = std::expm1(-a * v1);
    const double g2 = std::expm1(-a * v2);
    const double g = std::expm1(-a);
    const double r = g1 * g2 / g;
    if (r > -0.5) return -std::log1p(r) / a;
    const FrankTerms t = frank_terms(a, v1, v2);
    return -(std::log(t.denom) - std::log(t.omall)) / a;
}

double frank_log_partial_pos(double a, double v1, double v2)
{
    const FrankTerms t = frank_terms(a, v1, v2);
    return -a * v1 + std::log(t.om2) - std::log(t.denom);
}

double frank_log_pdf_pos(double a, double v1, double v2)
{
    const FrankTerms t = frank_terms(a, v1, v2);
    return std::log(a) + std::log(t.omall) - a * (v1 + v2) - 2.0 * std::log(t.denom);
}

double frank_inverse_pos(double a, double v1, double p)
{
    // exp(-a v2) = (A (1-p) + p e^-a) / (A (1-p) + p) with A = exp(-a v1), in logs.
    const double l_a = -a * v1 + std::log1p(-p);
    const double l_p = std::log(p);
    const double v2 = (special::log_add_exp(l_a, l_p) - special::log_add_exp(l_a, l_p - a)) / a;
    return std::clamp(v2, 0.0, 1.0);
}

// Joe: S = A + B - A B with A = (1-v1)^a, B = (1-v2)^a.
double joe_log_s(double log_a_pow, double log_b_pow)
{
    return special::log_add_exp(log_a_pow, log_b_pow + std::log1p(-std::exp(log_a_pow)));
}

} // namespace

std::string_view to_string(Family f)
{
    switch (f) {
    case Family::Gumbel: return "gumbel";
    case Family::Frank: return "frank";
    case Family::Joe: return "joe";
    case Family::Student: return "student";
    case Family::Clayton: return "clayton";
    case Family::Independence: return "independence";
    }
    return "unknown";
}

Family family_from_string(std::string_view name)
{
    for (Family f : {Family::Gumbel, Family::Frank, Family::Joe, Family::Student, Family::Clayton,
                     Family::Independence}) {
        if (to_string(f) == name) return f;
    }
    throw DomainError("unknown copula family '" + std::string(name) + "'");
}

Copula::Copula(Family family, double alpha, double dof) : family_(family), alpha_(alpha), dof_(dof)
{
    auto fail = [&](const char* msg) { throw DomainError(std::string(to_string(family)) + " copula: " + msg); };
    if (std::isnan(alpha) || std::isinf(alpha)) fail("parameter must be finite");
    switch (family) {
    case Family::Gumbel:
        if (alpha < 1.0) fail("alpha must be >= 1");
        break;
    case Family::Joe:
        if (alpha < 1.0) fail("alpha must be >= 1");
        break;
    case Family::Frank:
        if (std::fabs(alpha) < kFrankMinAbs) fail("|alpha| must be >= 1e-6");
        break;
    case Family::Clayton:
        if (!(alpha > 0.0)) fail("alpha must be > 0");
        break;
    case Family::Student:
        if (!(alpha > -1.0 && alpha < 1.0)) fail("correlation must lie in (-1,1)");
        if (!(dof > 0.0) || std::isinf(dof)) fail("degrees of freedom must be positive and finite");
        break;
    case Family::Independence:
        alpha_ = 0.0;
        break;
    }
    if (family != Family::Student) dof_ = 0.0;
}

int Copula::parameter_count() const
{
    switch (family_) {
    case Family::Independence: return 0;
    case Family::Student: return 2;
    default: return 1;
    }
}

std::string Copula::describe() const
{
    std::string s(to_string(family_));
    if (family_ == Family::Student) return s + "(rho=" + format_double(alpha_) + ", m=" + format_double(dof_) + ")";
    if (family_ != Family::Independence) s += "(alpha=" + format_double(alpha_) + ")";
    return s;
}

double Copula::cdf(double v1, double v2) const
{
    check_unit(v1, "cdf");
    check_unit(v2, "cdf");
    if (v1 == 0.0 || v2 == 0.0) return 0.0;
    if (v1 == 1.0) return v2;
    if (v2 == 1.0) return v1;
    const double a = alpha_;
    double q = 0.0;
    switch (family_) {
    case Family::Independence: q = v1 * v2; break;
    case Family::Gumbel: {
        const double x = -std::log(v1);
        const double y = -std::log(v2);
        const double log_sum = special::log_add_exp(a * std::log(x), a * std::log(y));
        q = std::exp(-std::exp(log_sum / a));
        break;
    }
    case Family::Frank:
        q = a > 0.0 ? frank_cdf_pos(a, v1, v2) : v1 - frank_cdf_pos(-a, v1, 1.0 - v2);
        break;
    case Family::Joe: {
        const double log_s = joe_log_s(a * std::log1p(-v1), a * std::log1p(-v2));
        q = -std::expm1(log_s / a);
        break;
    }
    case Family::Clayton: {
        // (v1^-a + v2^-a - 1)^(-1/a) = exp(-(1/a) log(v1^-a + expm1(-a log v2)))
        const double l1 = -a * std::log(v1);
        const double e2 = std::expm1(-a * std::log(v2));
        const double log_s = e2 > 0.0 ? special::log_add_exp(l1, std::log(e2)) : l1;
        q = std::exp(-log_s / a);
        break;
    }
    case Family::Student: q = student_cdf(v1, v2); break;
    }
    // Frechet bounds hold analytically; trim rounding excursions.
    return std::clamp(q, std::max(v1 + v2 - 1.0, 0.0), std::min(v1, v2));
}

double Copula::student_cdf(double v1, double v2) const
{
    const double m = dof_;
    const double r = alpha_;
    const double x1 = special::student_t_quantile(v1, m);
    const double x2 = special::student_t_quantile(v2, m);
    const double scale = std::sqrt((1.0 - r * r) / (m + 1.0));
    // Q = int_{-inf}^{x1} t_m(z) T_{m+1}((x2 - r z) / sqrt((m+z^2)(1-r^2)/(m+1))) dz,
    // integrated over s = x1 - z in [0, inf).
    auto integrand = [&](double s) {
        const double z = x1 - s;
        const double arg = (x2 - r * z) / (scale * std::sqrt(m + z * z));
        return special::student_t_pdf(z, m) * special::student_t_cdf(arg, m + 1.0);
    };
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
    return value;
}

double Copula::partial_v1(double v1, double v2) const
{
    check_unit(v2, "partial_v1");
    const double c1 = clamp_interior(v1, "partial_v1");
    if (v2 == 0.0) return 0.0;
    if (v2 == 1.0) return 1.0;
    if (family_ == Family::Independence) return v2;
    if (family_ == Family::Frank && alpha_ < 0.0) {
        const double c2 = std::clamp(1.0 - v2, kClampLo, kClampHi);
        return 1.0 - std::exp(frank_log_partial_pos(-alpha_, c1, c2));
    }
    if (family_ == Family::Student) {
        const double m = dof_;
        const double r = alpha_;
        const double x1 = special::student_t_quantile(c1, m);
        const double x2 = special::student_t_quantile(std::clamp(v2, kClampLo, kClampHi), m);
        const double arg = (x2 - r * x1) / std::sqrt((m + x1 * x1) * (1.0 - r * r) / (m + 1.0));
        return special::student_t_cdf(arg, m + 1.0);
    }
    return std::min(1.0, std::exp(log_partial_interior(c1, std::clamp(v2, kClampLo, kClampHi))));
}

double Copula::log_partial_v1(double v1, double v2) const
{
    check_unit(v2, "log_partial_v1");
    const double c1 = clamp_interior(v1, "log_partial_v1");
    if (v2 == 0.0) return kNegInf;
    if (v2 == 1.0) return 0.0;
    const double c2 = std::clamp(v2, kClampLo, kClampHi);
    if (family_ == Family::Frank && alpha_ < 0.0) return std::log1p(-std::exp(frank_log_partial_pos(-alpha_, c1, 1.0 - c2)));
    return log_partial_interior(c1, c2);
}

double Copula::log_partial_interior(double v1, double v2) const
{
    const double a = alpha_;
    switch (family_) {
    case Family::Independence: return std::log(v2);
    case Family::Gumbel: {
        const double x = -std::log(v1);
        const double y = -std::log(v2);
        const double lx = std::log(x);
        const double log_sum = special::log_add_exp(a * lx, a * std::log(y));
        const double w = std::exp(log_sum / a);
        return -w + x + (a - 1.0) * lx + (1.0 / a - 1.0) * log_sum;
    }
    case Family::Frank: return frank_log_partial_pos(a, v1, v2);
    case Family::Joe: {
        const double log_a = std::log1p(-v1);
        const double log_b_pow = a * std::log1p(-v2);
        const double log_s = joe_log_s(a * log_a, log_b_pow);
        return (a - 1.0) * log_a + std::log(-std::expm1(log_b_pow)) + (1.0 / a - 1.0) * log_s;
    }
    case Family::Clayton: {
        const double l1 = -a * std::log(v1);
        const double e2 = std::expm1(-a * std::log(v2));
        const double log_s = e2 > 0.0 ? special::log_add_exp(l1, std::log(e2)) : l1;
        return -(a + 1.0) * std::log(v1) - (1.0 / a + 1.0) * log_s;
    }
    case Family::Student: {
        const double m = dof_;
        const double x1 = special::student_t_quantile(v1, m);
        const double x2 = special::student_t_quantile(v2, m);
        const double arg = (x2 - a * x1) / std::sqrt((m + x1 * x1) * (1.0 - a * a) / (m + 1.0));
        return special::student_t_log_cdf(arg, m + 1.0);
    }
    }
    return kNegInf;
}

double Copula::pdf(double v1, double v2) const { return std::exp(log_pdf(v1, v2)); }

double Copula::log_pdf(double v1, double v2) const
{
    const double c1 = clamp_interior(v1, "pdf");
    const double c2 = clamp_interior(v2, "pdf");
    return log_pdf_interior(c1, c2);
}

double Copula::log_pdf_interior(double v1, double v2) const
{
    const double a = alpha_;
    switch (family_) {
    case Family::Independence: return 0.0;
    case Family::Gumbel: {
        const double x = -std::log(v1);
        const double y = -std::log(v2);
        const double lx = std::log(x);
        const double ly = std::log(y);
        const double log_sum = special::log_add_exp(a * lx, a * ly);
        const double w = std::exp(log_sum / a);
        return -w + x + y + (a - 1.0) * (lx + ly) + (1.0 / a - 2.0) * log_sum + std::log(w + a - 1.0);
    }
    case Family::Frank:
        return a > 0.0 ? frank_log_pdf_pos(a, v1, v2) : frank_log_pdf_pos(-a, v1, 1.0 - v2);
    case Family::Joe: {
        const double la = std::log1p(-v1);
        const double lb = std::log1p(-v2);
        const double log_s = joe_log_s(a * la, a * lb);
        return (a - 1.0) * (la + lb) + (1.0 / a - 2.0) * log_s + std::log(a - 1.0 + std::exp(log_s));
    }
    case Family::Clayton: {
        const double l1 = -a * std::log(v1);
        const double e2 = std::expm1(-a * std::log(v2));
        const double log_s = e2 > 0.0 ? special::log_add_exp(l1, std::log(e2)) : l1;
        return std::log1p(a) - (a + 1.0) * (std::log(v1) + std::log(v2)) - (1.0 / a + 2.0) * log_s;
    }
    case Family::Student: {
        const double m = dof_;
        const double x1 = special::student_t_quantile(v1, m);
        const double x2 = special::student_t_quantile(v2, m);
        const double one_r2 = 1.0 - a * a;
        const double quad = (x1 * x1 + x2 * x2 - 2.0 * a * x1 * x2) / (m * one_r2);
        return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(one_r2) - special::student_t_log_pdf(x1, m) -
               special::student_t_log_pdf(x2, m) - 0.5 * (m + 2.0) * std::log1p(quad);
    }
    }
    return kNegInf;
}

Copula::LogTerms Copula::log_terms(double v1, double v2) const
{
    const double c1 = clamp_interior(v1, "log_terms");
    const double c2 = clamp_interior(v2, "log_terms");
    const double a = alpha_;
    switch (family_) {
    case Family::Gumbel: {
        const double x = -std::log(c1);
        const double y = -std::log(c2);
        const double lx = std::log(x);
        const double ly = std::log(y);
        const double log_sum = special::log_add_exp(a * lx, a * ly);
        const double w = std::exp(log_sum / a);
        const double common = -w + (1.0 / a - 1.0) * log_sum;
        return {std::exp(-w), common + x + (a - 1.0) * lx, common + y + (a - 1.0) * ly,
                -w + x + y + (a - 1.0) * (lx + ly) + (1.0 / a - 2.0) * log_sum + std::log(w + a - 1.0)};
    }
    case Family::Joe: {
        const double la = std::log1p(-c1);
        const double lb = std::log1p(-c2);
        const double log_s = joe_log_s(a * la, a * lb);
        const double tail = (1.0 / a - 1.0) * log_s;
        return {-std::expm1(log_s / a), (a - 1.0) * la + std::log(-std::expm1(a * lb)) + tail,
                (a - 1.0) * lb + std::log(-std::expm1(a * la)) + tail,
                (a - 1.0) * (la + lb) + (1.0 / a - 2.0) * log_s + std::log(a - 1.0 + std::exp(log_s))};
    }
    case Family::Clayton: {
        const double l1 = std::log(c1);
        const double l2 = std::log(c2);
        const double e2 = std::expm1(-a * l2);
        const double log_s = e2 > 0.0 ? special::log_add_exp(-a * l1, std::log(e2)) : -a * l1;
        return {std::exp(-log_s / a), -(a + 1.0) * l1 - (1.0 / a + 1.0) * log_s,
                -(a + 1.0) * l2 - (1.0 / a + 1.0) * log_s,
                std::log1p(a) - (a + 1.0) * (l1 + l2) - (1.0 / a + 2.0) * log_s};
    }
    default:
        return {cdf(c1, c2), log_partial_v1(c1, c2), log_partial_v1(c2, c1), log_pdf_interior(c1, c2)};
    }
}

double Copula::conditional_inverse(double v1, double p) const
{
    const double c1 = clamp_interior(v1, "conditional_inverse");
    if (std::isnan(p) || p <= 0.0 || p >= 1.0) throw DomainError("conditional_inverse: p must lie in (0,1)");
    const double a = alpha_;
    switch (family_) {
    case Family::Independence: return p;
    case Family::Frank:
        if (a > 0.0) return frank_inverse_pos(a, c1, p);
        return 1.0 - frank_inverse_pos(-a, c1, 1.0 - p);
    case Family::Clayton: {
        // v2 = (1 + v1^-a (p^{-a/(1+a)} - 1))^{-1/a}
        const double d = std::expm1(-a / (1.0 + a) * std::log(p));
        const double log_term = -a * std::log(c1) + std::log(d);
        return std::exp(-special::log_add_exp(log_term, 0.0) / a);
    }
    case Family::Student: {
        const double m = dof_;
        const double x1 = special::student_t_quantile(c1, m);
        const double z = special::student_t_quantile(p, m + 1.0);
        const double x2 = a * x1 + z * std::sqrt((m + x1 * x1) * (1.0 - a * a) / (m + 1.0));
        return special::student_t_cdf(x2, m);
    }
    case Family::Gumbel: {
        // With x = -ln v1 and w = (x^a + y^a)^{1/a}, the conditional df equals p iff
        //   h(w) = w + (a-1) ln w = x + (a-1) ln x - ln p.
        // h is increasing and concave, so Newton from w = x climbs monotonically.
        const double x = -std::log(c1);
        const double target = x + (a - 1.0) * std::log(x) - std::log(p);
        double w = x;
        if (a == 1.0) {
            w = target;
        } else {
            int it = 0;
            for (; it < 200; ++it) {
                const double h = w + (a - 1.0) * std::log(w) - target;
                const double step = h / (1.0 + (a - 1.0) / w);
                w -= step;
                if (std::fabs(step) <= 1e-12 * w) {
                    w -= (w + (a - 1.0) * std::log(w) - target) / (1.0 + (a - 1.0) / w);
                    break;
                }
            }
            if (it == 200) throw ConvergenceError("gumbel conditional_inverse did not converge");
        }
        // y = (w^a - x^a)^{1/a}
        const double ratio = std::pow(x / w, a);
        const double y = w * std::exp(std::log1p(-ratio) / a);
        return std::exp(-y);
    }
    case Family::Joe: {
        // Safeguarded Newton in v2 on log(dQ/dv1) - log p, which is increasing
        // in v2 with derivative q / (dQ/dv1).
        const double log_p = std::log(p);
        double lo = 0.0;
        double hi = 1.0;
        double v2 = p;
        double val = 1.0;
        bool done = false;
        for (int it = 0; it < 200 && !done; ++it) {
            const double log_part = log_partial_interior(c1, v2);
            val = log_part - log_p;
            if (std::fabs(val) < 1e-15) {
                done = true;
                break;
            }
            if (val > 0.0) hi = v2;
            else lo = v2;
            // Bracket collapsed onto neighbouring doubles: best representable root.
            if (std::nextafter(lo, 1.0) >= hi) {
                done = true;
                break;
            }
            const double slope = std::exp(log_pdf_interior(c1, v2) - log_part);
            double next = v2 - val / slope;
            if (!(next > lo && next < hi) || !std::isfinite(next)) {
                // Geometric bisection near 0 reaches tiny roots quickly.
                next = lo > 0.0 || hi > 0.5 ? 0.5 * (lo + hi) : std::sqrt(std::max(lo, 1e-300) * hi);
            }
            if (next == v2) {
                done = true;
                break;
            }
            v2 = next;
        }
        if (!done) throw ConvergenceError("joe conditional_inverse did not converge");
        return v2;
    }
    }
    throw UnsupportedError("conditional_inverse: unsupported family");
}

std::pair<double, double> Copula::sample_pair(Engine& rng) const
{
    const double v1 = uniform_open(rng);
    const double p = uniform_open(rng);
    return {v1, conditional_inverse(v1, p)};
}

} // namespace maxclaim
