#include "maxclaim/special.hpp"

#include "maxclaim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace maxclaim::special {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

// Continued fraction for I_x(a,b) (Numerical Recipes betacf form).
double beta_continued_fraction(double a, double b, double x)
{
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw ConvergenceError("incomplete_beta: continued fraction did not converge");
}

double log_beta_prefactor(double a, double b, double x)
{
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
}

} // namespace

double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(log_beta_prefactor(a, b, x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_log_pdf(double x, double m)
{
    if (!(m > 0.0)) throw DomainError("student_t: degrees of freedom must be positive");
    return std::lgamma(0.5 * (m + 1.0)) - std::lgamma(0.5 * m) - 0.5 * std::log(m * std::numbers::pi) -
           0.5 * (m + 1.0) * std::log1p(x * x / m);
}

double student_t_pdf(double x, double m) { return std::exp(student_t_log_pdf(x, m)); }

namespace {

// Lower tail probability P(T <= -|x|) and its complement, both accurate.
struct TailSplit {
    double lower; // P(T <= -|x|)
    double upper; // 1 - lower
};

TailSplit t_tails(double ax, double m)
{
    const double x2 = ax * ax;
    if (x2 < std::min(1.0, m)) {
        // Near the centre: I_{x^2/(m+x^2)}(1/2, m/2) is small and accurate, and
        // P(T <= -|x|) stays above 0.15, so 0.5 - w loses nothing.
        const double w = 0.5 * incomplete_beta(0.5, 0.5 * m, x2 / (m + x2));
        return {0.5 - w, 0.5 + w};
    }
    const double tail = 0.5 * incomplete_beta(0.5 * m, 0.5, m / (m + x2));
    return {tail, 1.0 - tail};
}

} // namespace

double student_t_cdf(double x, double m)
{
    if (!(m > 0.0)) throw DomainError("student_t: degrees of freedom must be positive");
    if (std::isnan(x)) throw DomainError("student_t_cdf: NaN argument");
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    const TailSplit t = t_tails(std::fabs(x), m);
    return x < 0.0 ? t.lower : t.upper;
}

double student_t_log_cdf(double x, double m)
{
    if (!(m > 0.0)) throw DomainError("student_t: degrees of freedom must be positive");
    if (x == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    const TailSplit t = t_tails(std::fabs(x), m);
    return x < 0.0 ? std::log(t.lower) : std::log1p(-t.lower);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw DomainError("normal_quantile: p must lie in [0,1]");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    // The upper half reflects the lower; 1 - p is exact there.
    if (p > 0.5) return -normal_quantile(1.0 - p);
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Halley refinement.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double student_t_quantile(double p, double m)
{
    if (!(m > 0.0)) throw DomainError("student_t: degrees of freedom must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("student_t_quantile: p must lie in [0,1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (p == 0.5) return 0.0;

    // Solve on the lower half, P(T <= x) = q with q < 1/2, then reflect.
    const bool upper = p > 0.5;
    const double q = upper ? 1.0 - p : p;
    // 1 - p loses digits when p is close to 1; callers needing that regime
    // should pass the lower-tail probability instead.

    // Seed: the larger (in magnitude) of the normal quantile and the power-law tail.
    const double log_k = std::lgamma(0.5 * (m + 1.0)) - std::lgamma(0.5 * m) - 0.5 * std::log(m * std::numbers::pi);
    const double log_tail_const = log_k + 0.5 * (m + 1.0) * std::log(m) - std::log(m);
    double x = normal_quantile(q);
    const double x_tail = -std::exp((log_tail_const - std::log(q)) / m);
    if (x_tail < x) x = x_tail;
    if (!std::isfinite(x)) return -std::numeric_limits<double>::max();

    // Bracket [lo, hi] with F(lo) <= q <= F(hi), hi <= 0.
    double hi = 0.0;
    double lo = x;
    while (student_t_cdf(lo, m) > q) {
        hi = lo;
        lo *= 2.0;
        if (!std::isfinite(lo)) return -std::numeric_limits<double>::max();
    }
    x = lo;

    for (int it = 0; it < 200; ++it) {
        const double f = student_t_cdf(x, m) - q;
        if (f == 0.0) break;
        if (f < 0.0) lo = x;
        else hi = x;
        // Newton on log F is better behaved in the tail than on F.
        const double dens = student_t_pdf(x, m);
        const double fx = f + q;
        double step = (std::log(fx) - std::log(q)) * fx / dens;
        double next = x - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
            step = x - next;
        }
        x = next;
        if (std::fabs(step) <= 1e-15 * std::fabs(x) + 1e-300 || hi - lo <= 4e-16 * std::fabs(x)) break;
    }
    return upper ? -x : x;
}

double log_expm1(double x)
{
    if (!(x > 0.0)) throw DomainError("log_expm1: argument must be positive");
    if (x > 30.0) return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

double log_add_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

} // namespace maxclaim::special
