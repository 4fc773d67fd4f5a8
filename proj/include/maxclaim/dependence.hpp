#pragma once

#include "maxclaim/copula.hpp"
#include "maxclaim/mixture.hpp"
#include "maxclaim/random.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace maxclaim {

// Kendall's tau-b in O(n log n) (Knight's merge-sort count).
double kendall_tau(std::span<const double> x, std::span<const double> y);
// Pearson correlation of average ranks.
double spearman_rho(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);

enum class TailEstimator {
    // 2 - log C_n(q,q) / log q: exact for extreme-value copulas, zero under independence.
    Log,
    // 2 - (1 - C_n(q,q)) / (1 - q): equals 1 - q under independence.
    Secant,
};

// Empirical upper-tail dependence at threshold quantile q, computed on
// rank pseudo-observations.
double upper_tail_empirical(std::span<const double> x, std::span<const double> y, double q = 0.95,
                            TailEstimator estimator = TailEstimator::Log);

// Pickands dependence function of a bivariate extreme-value copula.
//   Gumbel:    A(t) = (t^a + (1-t)^a)^(1/a), a >= 1.
//   Joe:       A(t) = 1 - ((psi1 (1-t))^-a + (psi2 t)^-a)^(-1/a), a > 0, psi in (0,1].
//   Independence: A == 1.
struct PickandsFunction {
    enum class Kind { Gumbel, Joe, Independence };
    Kind kind = Kind::Independence;
    double alpha = 1.0;
    double psi1 = 1.0;
    double psi2 = 1.0;

    static PickandsFunction gumbel(double alpha);
    static PickandsFunction joe(double alpha, double psi1 = 1.0, double psi2 = 1.0);
    static PickandsFunction independence() { return {}; }

    double operator()(double t) const;
};

// Kendall's tau of Q_A. Gumbel uses 1 - 1/alpha; otherwise pickands_tau_numeric.
double pickands_tau(const PickandsFunction& a);
// Stieltjes sum of t(1-t)/A(t) dA'(t) with A' from central differences on a 2001-point grid.
double pickands_tau_numeric(const PickandsFunction& a);
// 12 int_0^1 (1 + A(t))^-2 dt - 3 by adaptive Gauss-Kronrod.
double pickands_rho(const PickandsFunction& a);

// 2 - lim_{u->0} (1 - C(1-u, 1-u)) / u, extrapolated from u = 1e-3 ... 1e-6.
double upper_tail_theoretical(const std::function<double(double, double)>& cdf);
double upper_tail_theoretical(const Copula& c);
double upper_tail_theoretical(const MixtureCopula& mc);

struct ConvergenceRow {
    double e_lambda;
    double tau_c;
    double tau_q;
    double rho_c;
    double rho_q;
};

// Empirical tau/rho of C and of Q for each E[Lambda], reps pairs per cell.
// Cell i samples C from stream.child(2i) and Q from stream.child(2i+1).
std::vector<ConvergenceRow> tau_convergence_study(const Copula& base, MixingModel model,
                                                  const std::vector<double>& e_lambdas, std::size_t reps,
                                                  const SeededStream& stream, unsigned threads = 1);

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

} // namespace maxclaim
