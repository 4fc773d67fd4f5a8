#pragma once

#include "maxclaim/copula.hpp"
#include "maxclaim/mixing.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace maxclaim {

// Copula of the componentwise maxima of Lambda iid pairs from Q:
//   C(u1, u2) = L(-log Q(v1, v2)),  v_i = exp(-L^{-1}(u_i)).
class MixtureCopula {
public:
    MixtureCopula(Copula base, MixingLaw mixing) : base_(base), mixing_(mixing) {}

    const Copula& base() const { return base_; }
    const MixingLaw& mixing() const { return mixing_; }

    double cdf(double u1, double u2) const;

    // Density via the per-model closed forms.
    double pdf(double u1, double u2) const;
    // Density via the generic Laplace assembly
    //   (dv1/du1)(dv2/du2)/Q^2 [(L' + L'') dQ/dv1 dQ/dv2 - L' Q q].
    double pdf_generic(double u1, double u2) const;
    // Log density from the simplified per-model log expressions.
    double log_pdf(double u1, double u2) const;

    // dC/du2, the conditional df of U1 given U2 = u2 (closed form and chain-rule assembly).
    double partial_u2(double u1, double u2) const;
    double partial_u2_generic(double u1, double u2) const;
    // log(1 - dC/du2): the contribution of a right-censored first coordinate.
    double log_survival_u2(double u1, double u2) const;

    // d-variate exchangeable extension; Gumbel, Clayton and Independence bases only.
    double cdf_multivariate(std::span<const double> u) const;

    std::string describe() const;

private:
    std::pair<double, double> v_pair(double u1, double u2) const;

    Copula base_;
    MixingLaw mixing_;
};

// F(x, y) = L(-log Q(G1(x), G2(y))), the df of the largest-claim pair when the
// individual claims have margins G1, G2 coupled by Q.
double mixture_df(const MixtureCopula& mc, const std::function<double(double)>& g1,
                  const std::function<double(double)>& g2, double x, double y);

// F*(x, y) = P(N = 0) + P(N >= 1) F(x, y) for a count N that may be zero.
double compound_df(double p_zero, double f);

// Either a bare base copula or a mixture; the unit estimation, sampling and
// the premium studies operate on.
class CopulaModel {
public:
    CopulaModel(Copula base) : base_(base) {}
    CopulaModel(Copula base, MixingLaw mixing) : base_(base), mixing_(mixing) {}
    CopulaModel(const MixtureCopula& mc) : base_(mc.base()), mixing_(mc.mixing()) {}

    const Copula& base() const { return base_; }
    const std::optional<MixingLaw>& mixing() const { return mixing_; }
    bool is_mixture() const { return mixing_.has_value(); }
    MixtureCopula mixture() const;

    // Free parameters: base parameters plus one for the mixing law.
    int parameter_count() const { return base_.parameter_count() + (mixing_ ? 1 : 0); }

    double cdf(double u1, double u2) const;
    double log_pdf(double u1, double u2) const;
    double partial_u2(double u1, double u2) const;
    double log_survival_u2(double u1, double u2) const;

    std::string describe() const;

private:
    Copula base_;
    std::optional<MixingLaw> mixing_;
};

} // namespace maxclaim
