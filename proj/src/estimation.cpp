#include "maxclaim/estimation.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/parallel.hpp"
#include "maxclaim/ranks.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace maxclaim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenalty = 1e300;

void check_xy(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw DataError("x and y must have equal length");
    if (x.size() < 2) throw InsufficientDataError("pseudo-observations need at least two rows");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) throw DataError("NaN in row " + std::to_string(i + 1));
    }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

} // namespace

bool PseudoObservations::censored() const
{
    return std::any_of(delta.begin(), delta.end(), [](int d) { return d == 0; });
}

PseudoObservations pseudo_observations(std::span<const double> x, std::span<const double> y)
{
    check_xy(x, y);
    const double scale = 1.0 / (static_cast<double>(x.size()) + 1.0);
    PseudoObservations obs;
    obs.u1 = average_ranks(x);
    obs.u2 = average_ranks(y);
    for (double& u : obs.u1) u *= scale;
    for (double& u : obs.u2) u *= scale;
    return obs;
}

std::vector<double> kaplan_meier_cdf(std::span<const double> x, std::span<const int> delta)
{
    const std::size_t n = x.size();
    if (delta.size() != n) throw DataError("censoring flags must match the sample length");
    if (n == 0) throw InsufficientDataError("Kaplan-Meier needs data");
    std::size_t events = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(x[i])) throw DataError("NaN in row " + std::to_string(i + 1));
        if (delta[i] != 0 && delta[i] != 1) throw DataError("censoring flags must be 0 or 1");
        events += static_cast<std::size_t>(delta[i]);
    }
    if (events == 0) throw InsufficientDataError("all observations are censored");

    // Events precede censorings at equal times.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && delta[a] > delta[b]);
    });
    std::vector<double> seq(n);
    double surv = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = idx[k];
        if (delta[i] == 1) surv *= 1.0 - 1.0 / static_cast<double>(n - k);
        seq[k] = 1.0 - surv;
    }
    std::vector<double> out(n);
    std::size_t k = 0;
    while (k < n) {
        std::size_t j = k;
        double sum = 0.0;
        std::size_t count = 0;
        while (j < n && x[idx[j]] == x[idx[k]]) {
            if (delta[idx[j]] == 1) {
                sum += seq[j];
                ++count;
            }
            ++j;
        }
        // A group of censorings only sees the curve up to that time.
        const double value = count > 0 ? sum / static_cast<double>(count) : seq[j - 1];
        for (std::size_t t = k; t < j; ++t) out[idx[t]] = value;
        k = j;
    }
    return out;
}

PseudoObservations km_pseudo_observations(std::span<const double> x, std::span<const double> y,
                                          std::span<const int> delta)
{
    check_xy(x, y);
    PseudoObservations obs = pseudo_observations(x, y);
    const double scale = static_cast<double>(x.size()) / (static_cast<double>(x.size()) + 1.0);
    obs.u1 = kaplan_meier_cdf(x, delta);
    for (double& u : obs.u1) u *= scale;
    obs.delta.assign(delta.begin(), delta.end());
    return obs;
}

// ---------------------------------------------------------------------------

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                             std::span<const double> lower, std::span<const double> upper,
                             const NelderMeadOptions& options)
{
    const std::size_t d = start.size();
    if (lower.size() != d || upper.size() != d) throw DomainError("nelder_mead: bound dimension mismatch");
    auto project = [&](std::vector<double>& p) {
        for (std::size_t i = 0; i < d; ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
    };
    int evaluations = 0;
    auto eval = [&](const std::vector<double>& p) {
        ++evaluations;
        const double v = f(p);
        return std::isfinite(v) ? v : kPenalty;
    };

    project(start);
    std::vector<std::vector<double>> simplex(d + 1, start);
    for (std::size_t i = 0; i < d; ++i) {
        auto& p = simplex[i + 1];
        p[i] += options.initial_step;
        if (p[i] > upper[i]) p[i] = start[i] - options.initial_step;
        project(p);
    }
    std::vector<double> values(d + 1);
    for (std::size_t i = 0; i <= d; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(d + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s(d + 1);
        std::vector<double> v(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            s[i] = simplex[order[i]];
            v[i] = values[order[i]];
        }
        simplex.swap(s);
        values.swap(v);
    };
    auto diameter = [&] {
        double diam = 0.0;
        for (std::size_t i = 1; i <= d; ++i) {
            for (std::size_t j = 0; j < d; ++j) diam = std::max(diam, std::fabs(simplex[i][j] - simplex[0][j]));
        }
        return diam;
    };

    int iter = 0;
    bool converged = false;
    std::vector<double> centroid(d);
    auto along = [&](double t) {
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j) p[j] = centroid[j] + t * (simplex[d][j] - centroid[j]);
        project(p);
        return p;
    };
    sort_simplex();
    while (iter < options.max_iterations) {
        if (diameter() < options.tolerance) {
            converged = true;
            break;
        }
        ++iter;
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);
        }
        const auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < values[0]) {
            const auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[d] = xe;
                values[d] = fe;
            } else {
                simplex[d] = xr;
                values[d] = fr;
            }
        } else if (fr < values[d - 1]) {
            simplex[d] = xr;
            values[d] = fr;
        } else {
            const bool outside = fr < values[d];
            const auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : values[d])) {
                simplex[d] = xc;
                values[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
        sort_simplex();
    }
    if (!converged && diameter() < options.tolerance) converged = true;
    return {simplex[0], values[0], iter, evaluations, converged};
}

// ---------------------------------------------------------------------------

std::string ModelSpec::name() const
{
    std::string s(to_string(family));
    if (mixing) s += "/" + std::string(to_string(*mixing));
    return s;
}

CopulaModel FitResult::model() const
{
    const Copula base(spec.family, std::isnan(alpha) ? 0.0 : alpha, std::isnan(m) ? 0.0 : m);
    if (spec.mixing) return {base, MixingLaw(*spec.mixing, theta)};
    return {base};
}

ParameterMap::ParameterMap(ModelSpec spec, const FitOptions& options)
    : spec_(spec), theta_floor_(options.theta_floor), dof_min_(options.dof_min), dof_max_(options.dof_max)
{
    if (spec.mixing) {
        if (*spec.mixing == MixingModel::ShiftedGeometric) {
            lower_.push_back(logit(theta_floor_));
            upper_.push_back(15.0);
        } else {
            lower_.push_back(std::log(theta_floor_));
            upper_.push_back(std::log(1e4));
        }
    }
    switch (spec.family) {
    case Family::Gumbel:
    case Family::Joe:
        lower_.push_back(std::log(1e-6));
        upper_.push_back(std::log(100.0));
        break;
    case Family::Clayton:
        lower_.push_back(std::log(1e-4));
        upper_.push_back(std::log(100.0));
        break;
    case Family::Frank:
        lower_.push_back(-100.0);
        upper_.push_back(100.0);
        break;
    case Family::Student:
        lower_.push_back(-5.0);
        upper_.push_back(5.0);
        lower_.push_back(std::log(dof_min_));
        upper_.push_back(std::log(dof_max_));
        break;
    case Family::Independence: break;
    }
    if (lower_.empty()) throw UnsupportedError("model " + spec.name() + " has no free parameter");
}

CopulaModel ParameterMap::to_model(std::span<const double> z) const
{
    std::size_t k = 0;
    std::optional<MixingLaw> law;
    if (spec_.mixing) {
        const double th = *spec_.mixing == MixingModel::ShiftedGeometric ? sigmoid(z[k]) : std::exp(z[k]);
        law.emplace(*spec_.mixing, std::max(th, theta_floor_));
        ++k;
    }
    double alpha = 0.0;
    double dof = 0.0;
    switch (spec_.family) {
    case Family::Gumbel:
    case Family::Joe: alpha = 1.0 + std::exp(z[k]); break;
    case Family::Clayton: alpha = std::exp(z[k]); break;
    case Family::Frank: alpha = z[k]; break;
    case Family::Student:
        alpha = std::tanh(z[k]);
        dof = std::clamp(std::exp(z[k + 1]), dof_min_, dof_max_);
        break;
    case Family::Independence: break;
    }
    const Copula base(spec_.family, alpha, dof);
    if (law) return {base, *law};
    return {base};
}

std::vector<double> ParameterMap::start(int k) const
{
    // Halton point k + 1 in bases 2, 3, 5 over natural-scale start ranges.
    auto halton = [](int index, int base) {
        double f = 1.0;
        double r = 0.0;
        while (index > 0) {
            f /= base;
            r += f * (index % base);
            index /= base;
        }
        return r;
    };
    const int bases[] = {2, 3, 5};
    std::vector<double> z;
    int coord = 0;
    auto add = [&](double lo, double hi) {
        const double h = halton(k + 1, bases[coord++]);
        z.push_back(lo + h * (hi - lo));
    };
    if (spec_.mixing) {
        if (*spec_.mixing == MixingModel::ShiftedGeometric) add(logit(0.1), logit(0.9));
        else add(std::log(0.05), std::log(5.0));
    }
    switch (spec_.family) {
    case Family::Gumbel:
    case Family::Joe: add(std::log(0.2), std::log(5.0)); break;
    case Family::Clayton: add(std::log(0.2), std::log(8.0)); break;
    case Family::Frank: add(-8.0, 12.0); break;
    case Family::Student:
        add(std::atanh(-0.5), std::atanh(0.9));
        add(std::log(2.0), std::log(30.0));
        break;
    case Family::Independence: break;
    }
    return z;
}

double pseudo_loglik(const CopulaModel& model, const PseudoObservations& obs, bool use_censoring)
{
    if (obs.u1.size() != obs.u2.size()) throw DataError("pseudo-observation vectors differ in length");
    const bool cens = use_censoring && !obs.delta.empty();
    if (cens && obs.delta.size() != obs.u1.size()) throw DataError("censoring flags differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < obs.u1.size(); ++i) {
        if (cens && obs.delta[i] == 0) total += model.log_survival_u2(obs.u1[i], obs.u2[i]);
        else total += model.log_pdf(obs.u1[i], obs.u2[i]);
    }
    return total;
}

namespace {

FitResult fit_impl(const PseudoObservations& obs, Family family, std::optional<MixingModel> mixing,
                   const FitOptions& options, bool use_censoring)
{
    if (obs.size() < 2) throw InsufficientDataError("fitting needs at least two observations");
    if (options.starts < 1) throw DomainError("at least one optimizer start is required");
    const ModelSpec spec{family, mixing};
    if (family == Family::Independence && !mixing) {
        // Nothing to estimate.
        FitResult fit;
        fit.spec = spec;
        fit.theta = fit.alpha = fit.m = kNaN;
        fit.loglik = pseudo_loglik(CopulaModel(Copula::independence()), obs, use_censoring);
        fit.aic = 0.0 - 2.0 * fit.loglik;
        fit.converged = true;
        return fit;
    }
    const ParameterMap map(spec, options);
    auto objective = [&](std::span<const double> z) {
        try {
            const double ll = pseudo_loglik(map.to_model(z), obs, use_censoring);
            return std::isfinite(ll) ? -ll : kPenalty;
        } catch (const Error&) {
            return kPenalty;
        }
    };
    std::vector<NelderMeadResult> runs(static_cast<std::size_t>(options.starts));
    parallel_for(runs.size(), options.threads, [&](std::size_t k) {
        runs[k] = nelder_mead(objective, map.start(static_cast<int>(k)), map.lower(), map.upper(), options.optimizer);
    });
    const NelderMeadResult* best = nullptr;
    const NelderMeadResult* best_any = nullptr;
    int iterations = 0;
    for (const auto& r : runs) {
        iterations += r.iterations;
        if (!best_any || r.value < best_any->value) best_any = &r;
        if (r.converged && r.value < kPenalty && (!best || r.value < best->value)) best = &r;
    }
    if (!best) {
        throw OptimizationError("no optimizer start converged for " + spec.name(), best_any->x, best_any->value);
    }
    const CopulaModel model = map.to_model(best->x);
    FitResult fit;
    fit.spec = spec;
    fit.theta = model.mixing() ? model.mixing()->theta() : kNaN;
    fit.alpha = family == Family::Independence ? kNaN : model.base().alpha();
    fit.m = family == Family::Student ? model.base().dof() : kNaN;
    fit.loglik = -best->value;
    fit.parameters = model.parameter_count();
    fit.aic = 2.0 * fit.parameters - 2.0 * fit.loglik;
    fit.converged = true;
    fit.iterations = iterations;
    return fit;
}

} // namespace

FitResult pml_fit(const PseudoObservations& obs, Family family, std::optional<MixingModel> mixing,
                  const FitOptions& options)
{
    return fit_impl(obs, family, mixing, options, false);
}

FitResult censored_pml_fit(const PseudoObservations& obs, Family family, std::optional<MixingModel> mixing,
                           const FitOptions& options)
{
    return fit_impl(obs, family, mixing, options, true);
}

std::vector<FitResult> model_grid_fit(const PseudoObservations& obs, const std::vector<Family>& families,
                                      const std::vector<MixingModel>& mixings, bool include_pure,
                                      const FitOptions& options)
{
    std::vector<ModelSpec> cells;
    for (Family f : families) {
        for (MixingModel m : mixings) cells.push_back({f, m});
        if (include_pure) cells.push_back({f, std::nullopt});
    }
    if (cells.empty()) throw DomainError("model grid is empty");
    const bool cens = obs.censored();
    std::vector<FitResult> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        try {
            out.push_back(fit_impl(obs, cell.family, cell.mixing, options, cens));
        } catch (const Error& e) {
            FitResult failed;
            failed.spec = cell;
            failed.theta = failed.alpha = failed.m = failed.loglik = kNaN;
            failed.aic = kInf;
            failed.error = e.what();
            out.push_back(failed);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const FitResult& a, const FitResult& b) { return a.aic < b.aic; });
    return out;
}

namespace {
std::string csv_number(double x) { return std::isnan(x) ? std::string() : format_double(x); }
nlohmann::json json_number(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return x;
}
} // namespace

std::string fits_to_csv(const std::vector<FitResult>& fits)
{
    std::ostringstream os;
    os << "family,mixing,theta,alpha,m,loglik,aic,converged\n";
    for (const auto& f : fits) {
        os << to_string(f.spec.family) << ',' << (f.spec.mixing ? to_string(*f.spec.mixing) : "none") << ','
           << csv_number(f.theta) << ',' << csv_number(f.alpha) << ',' << csv_number(f.m) << ','
           << csv_number(f.loglik) << ',' << (std::isinf(f.aic) ? std::string() : format_double(f.aic)) << ','
           << (f.converged ? "true" : "false") << '\n';
    }
    return os.str();
}

std::string fits_to_json(const std::vector<FitResult>& fits)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : fits) {
        nlohmann::json j;
        j["family"] = std::string(to_string(f.spec.family));
        j["mixing"] = f.spec.mixing ? std::string(to_string(*f.spec.mixing)) : std::string("none");
        j["theta"] = json_number(f.theta);
        j["alpha"] = json_number(f.alpha);
        j["m"] = json_number(f.m);
        j["loglik"] = json_number(f.loglik);
        j["aic"] = json_number(f.aic);
        j["parameters"] = f.parameters;
        j["converged"] = f.converged;
        j["iterations"] = f.iterations;
        if (!f.error.empty()) j["error"] = f.error;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

} // namespace maxclaim
