#pragma once

#include "maxclaim/copula.hpp"
#include "maxclaim/mixing.hpp"
#include "maxclaim/mixture.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maxclaim {

struct PseudoObservations {
    std::vector<double> u1;
    std::vector<double> u2;
    // 1 = observed, 0 = first coordinate right-censored. Empty when uncensored.
    std::vector<int> delta;

    std::size_t size() const { return u1.size(); }
    bool censored() const;
};

// Average ranks divided by n + 1.
PseudoObservations pseudo_observations(std::span<const double> x, std::span<const double> y);

// Kaplan-Meier df of x (right-censored where delta == 0) and the empirical df
// of y, both rescaled by n / (n + 1). Observations tied in x share the mean of
// their sequential product-limit values, so without censoring the result
// equals pseudo_observations.
PseudoObservations km_pseudo_observations(std::span<const double> x, std::span<const double> y,
                                          std::span<const int> delta);

// Product-limit estimate of the df at each x_i (before the n/(n+1) rescale).
std::vector<double> kaplan_meier_cdf(std::span<const double> x, std::span<const int> delta);

// ---------------------------------------------------------------------------
// Derivative-free minimization.

struct NelderMeadOptions {
    double tolerance = 1e-8; // simplex diameter (max vertex distance to the best vertex)
    int max_iterations = 2000;
    double initial_step = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    int iterations;
    int evaluations;
    bool converged;
};

// Minimizes f over the box [lower, upper]; proposals are projected onto the box.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                             std::span<const double> lower, std::span<const double> upper,
                             const NelderMeadOptions& options = {});

// ---------------------------------------------------------------------------
// Pseudo-maximum likelihood.

struct ModelSpec {
    Family family;
    std::optional<MixingModel> mixing;

    std::string name() const;
};

struct FitOptions {
    int starts = 5;
    NelderMeadOptions optimizer{};
    unsigned threads = 1;
    double theta_floor = 1e-4;
    double dof_min = 0.5;
    double dof_max = 200.0;
};

struct FitResult {
    ModelSpec spec;
    double theta = 0.0; // NaN without mixing
    double alpha = 0.0; // NaN for independence
    double m = 0.0;     // NaN unless Student
    double loglik = 0.0;
    double aic = 0.0;
    int parameters = 0;
    bool converged = false;
    int iterations = 0;
    std::string error; // set when the fit failed (grid cells only)

    CopulaModel model() const;
};

// Parameter vector <-> model. Unconstrained coordinates:
//   theta: logit (geometric) or log (Poisson laws), floored at theta_floor;
//   alpha: log(alpha - 1) for Gumbel/Joe, log for Clayton, identity for Frank,
//          atanh for the Student correlation; m: logit on [dof_min, dof_max].
class ParameterMap {
public:
    ParameterMap(ModelSpec spec, const FitOptions& options);

    std::size_t dimension() const { return lower_.size(); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    // Throws DomainError when z maps outside the family domain (Frank near 0).
    CopulaModel to_model(std::span<const double> z) const;
    // Quasi-random start k in transformed coordinates.
    std::vector<double> start(int k) const;

private:
    ModelSpec spec_;
    double theta_floor_;
    double dof_min_;
    double dof_max_;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

// Pseudo log-likelihood: sum of log c(u1, u2), plus log(1 - dC/du2) for
// censored rows when obs carries censoring flags. Non-finite terms
// propagate; callers decide how to penalize.
double pseudo_loglik(const CopulaModel& model, const PseudoObservations& obs, bool use_censoring);

FitResult pml_fit(const PseudoObservations& obs, Family family, std::optional<MixingModel> mixing,
                  const FitOptions& options = {});
FitResult censored_pml_fit(const PseudoObservations& obs, Family family, std::optional<MixingModel> mixing,
                           const FitOptions& options = {});

// Fits every family x mixing cell and, if include_pure, every bare family.
// The censored likelihood is used when obs is censored. Failed cells carry
// `error` and an infinite AIC; the list is sorted by AIC ascending.
std::vector<FitResult> model_grid_fit(const PseudoObservations& obs, const std::vector<Family>& families,
                                      const std::vector<MixingModel>& mixings, bool include_pure = true,
                                      const FitOptions& options = {});

std::string fits_to_csv(const std::vector<FitResult>& fits);
std::string fits_to_json(const std::vector<FitResult>& fits);

} // namespace maxclaim
