#pragma once

#include "maxclaim/random.hpp"

#include <string>
#include <string_view>
#include <utility>

namespace maxclaim {

enum class Family { Gumbel, Frank, Joe, Student, Clayton, Independence };

std::string_view to_string(Family f);
// Accepts lower-case names ("gumbel", "frank", ...). Throws DomainError.
Family family_from_string(std::string_view name);

// Bivariate base copula Q_alpha.
//
// cdf accepts the closed unit square. Density-type evaluations (pdf,
// partials, conditional inverse) require arguments strictly inside (0,1);
// exact 0 or 1 raise BoundaryError, and interior arguments are clamped to
// [1e-15, 1 - 1e-15] before evaluation. For partial_v1 the second argument
// may sit on {0,1}, where the conditional df is exactly 0 or 1.
//
// All five families are exchangeable, so partial_v2(a, b) == partial_v1(b, a).
class Copula {
public:
    // alpha is the dependence parameter; dof is used by Student only.
    Copula(Family family, double alpha, double dof = 0.0);

    static Copula gumbel(double alpha) { return {Family::Gumbel, alpha}; }
    static Copula frank(double alpha) { return {Family::Frank, alpha}; }
    static Copula joe(double alpha) { return {Family::Joe, alpha}; }
    static Copula clayton(double alpha) { return {Family::Clayton, alpha}; }
    static Copula student(double rho, double dof) { return {Family::Student, rho, dof}; }
    static Copula independence() { return {Family::Independence, 0.0}; }

    Family family() const { return family_; }
    double alpha() const { return alpha_; }
    double dof() const { return dof_; }
    // Number of free parameters (0 for independence, 2 for Student, else 1).
    int parameter_count() const;

    double cdf(double v1, double v2) const;
    double pdf(double v1, double v2) const;
    double log_pdf(double v1, double v2) const;
    double partial_v1(double v1, double v2) const;
    double partial_v2(double v1, double v2) const { return partial_v1(v2, v1); }
    double log_partial_v1(double v1, double v2) const;
    double log_partial_v2(double v1, double v2) const { return log_partial_v1(v2, v1); }

    // Q, log dQ/dv1, log dQ/dv2 and log q at an interior point, sharing work
    // between the four. Arguments are clamped as for pdf.
    struct LogTerms {
        double cdf;
        double log_d1;
        double log_d2;
        double log_pdf;
    };
    LogTerms log_terms(double v1, double v2) const;

    // v2 with partial_v1(v1, v2) == p.
    double conditional_inverse(double v1, double p) const;

    // Conditional-distribution method: V1 uniform, V2 = conditional_inverse(V1, U).
    std::pair<double, double> sample_pair(Engine& rng) const;

    std::string describe() const;

private:
    double log_partial_interior(double v1, double v2) const;
    double log_pdf_interior(double v1, double v2) const;
    double student_cdf(double v1, double v2) const;

    Family family_;
    double alpha_;
    double dof_;
};

} // namespace maxclaim
