#pragma once

#include "maxclaim/random.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace maxclaim {

enum class MixingModel { ShiftedGeometric, ShiftedPoisson, TruncatedPoisson };

std::string_view to_string(MixingModel m);
// "shifted-geometric" / "geometric" / "a", "shifted-poisson" / "b", "truncated-poisson" / "c".
MixingModel mixing_from_string(std::string_view name);

// Claim-count law Lambda >= 1 and its Laplace transform L(t) = E[exp(-t Lambda)].
//
// Shifted geometric: P(Lambda = k) = theta (1-theta)^{k-1}, theta in (0,1].
// Shifted Poisson:   Lambda = 1 + Poisson(theta), theta >= 0.
// Truncated Poisson: Poisson(theta) conditioned on >= 1, theta > 0.
// theta = 1 (geometric) and theta = 0 (shifted Poisson) are the degenerate
// law Lambda == 1, under which the mixture copula equals its base.
//
// Most evaluations come in two flavours: in t, and in s = exp(-t). The
// mixture copula works with s = Q(v1, v2) directly, which avoids the
// round trip through -log.
class MixingLaw {
public:
    MixingLaw(MixingModel model, double theta);

    // Law of the given model whose mean E[Lambda] equals mean (>= 1; > 1 for truncated Poisson).
    static MixingLaw with_mean(MixingModel model, double mean);

    MixingModel model() const { return model_; }
    double theta() const { return theta_; }
    double mean() const;
    double pmf(std::int64_t k) const;
    double log_pmf(std::int64_t k) const;

    double laplace(double t) const;
    double laplace_d1(double t) const;
    double laplace_d2(double t) const;
    double laplace_inverse(double u) const;
    // exp(-laplace_inverse(u)).
    double v_transform(double u) const;
    // dv/du at v = v_transform(u), written in v.
    double v_transform_derivative(double v) const;

    double laplace_s(double s) const;
    double log_laplace_s(double s) const;
    // log(-L'(t)) and log(L''(t)) at s = exp(-t).
    double log_neg_d1_s(double s) const;
    double log_d2_s(double s) const;

    std::int64_t sample_count(Engine& rng) const;

    std::string describe() const;

private:
    MixingModel model_;
    double theta_;
};

} // namespace maxclaim
