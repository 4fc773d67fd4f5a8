#pragma once

namespace maxclaim::special {

// Regularized incomplete beta I_x(a, b), evaluated by continued fraction
// (modified Lentz) on whichever side of the mode converges fastest.
double incomplete_beta(double a, double b, double x);

// Student t with m > 0 degrees of freedom. m need not be an integer.
double student_t_pdf(double x, double m);
double student_t_log_pdf(double x, double m);
double student_t_cdf(double x, double m);
double student_t_log_cdf(double x, double m);

// Inverse of student_t_cdf on (0,1). Safeguarded Newton seeded from a normal
// (or tail power-law) approximation; returns +-infinity at p = 1 / p = 0.
double student_t_quantile(double p, double m);

double normal_cdf(double x);
// Acklam's rational approximation refined by one Halley step.
double normal_quantile(double p);

// log(exp(x) - 1) for x > 0 without overflow.
double log_expm1(double x);
// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

} // namespace maxclaim::special
