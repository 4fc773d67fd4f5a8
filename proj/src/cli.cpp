#include "maxclaim/cli.hpp"

#include "maxclaim/data.hpp"
#include "maxclaim/dependence.hpp"
#include "maxclaim/error.hpp"
#include "maxclaim/estimation.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace maxclaim::cli {

using nlohmann::json;

namespace {

// Thrown for configuration problems detected after parsing.
struct ConfigError : Error {
    using Error::Error;
};

struct GlobalArgs {
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::string out;
    std::string format = "csv";
    std::string config_file;
};

struct ModelArgs {
    std::string base = "gumbel";
    double alpha = 2.0;
    double dof = 4.0;
    std::string mixing = "none";
    double theta = 0.0;
    double elambda = 0.0;
    CLI::Option* theta_opt = nullptr;
    CLI::Option* elambda_opt = nullptr;
};

struct MappingArgs {
    ColumnMapping mapping;
};

struct Rendered {
    std::string csv;
    json doc;
    std::vector<std::string> money;
};

Copula make_base(const std::string& name, double alpha, double dof)
{
    const Family f = family_from_string(name);
    if (f == Family::Independence) return Copula::independence();
    if (f == Family::Student) return Copula::student(alpha, dof);
    return {f, alpha};
}

json base_json(const Copula& c)
{
    json j{{"family", std::string(to_string(c.family()))}};
    if (c.family() != Family::Independence) j["alpha"] = c.alpha();
    if (c.family() == Family::Student) j["dof"] = c.dof();
    return j;
}

json law_json(const MixingLaw& law)
{
    return {{"model", std::string(to_string(law.model()))}, {"theta", law.theta()}, {"e_lambda", law.mean()}};
}

void add_model_options(CLI::App* sub, ModelArgs& m, bool single_elambda)
{
    sub->add_option("--base", m.base, "base copula family")->capture_default_str();
    sub->add_option("--alpha", m.alpha, "base copula parameter")->capture_default_str();
    sub->add_option("--dof", m.dof, "Student degrees of freedom")->capture_default_str();
    sub->add_option("--mixing", m.mixing, "mixing law or none")->capture_default_str();
    m.theta_opt = sub->add_option("--theta", m.theta, "mixing parameter");
    if (single_elambda) m.elambda_opt = sub->add_option("--elambda", m.elambda, "mixing mean E[Lambda]");
}

CopulaModel build_model(const ModelArgs& m)
{
    const Copula base = make_base(m.base, m.alpha, m.dof);
    const bool has_theta = m.theta_opt && m.theta_opt->count() > 0;
    const bool has_mean = m.elambda_opt && m.elambda_opt->count() > 0;
    if (m.mixing == "none") {
        if (has_theta || has_mean) throw ConfigError("--theta/--elambda need a mixing law");
        return CopulaModel(base);
    }
    const MixingModel model = mixing_from_string(m.mixing);
    if (has_theta && has_mean) throw ConfigError("give either --theta or --elambda, not both");
    if (has_theta) return {base, MixingLaw(model, m.theta)};
    if (has_mean) return {base, MixingLaw::with_mean(model, m.elambda)};
    throw ConfigError("mixing law '" + m.mixing + "' needs --theta" + (m.elambda_opt ? " or --elambda" : ""));
}

json model_json(const CopulaModel& model)
{
    json j{{"base", base_json(model.base())}};
    j["mixing"] = model.mixing() ? law_json(*model.mixing()) : json("none");
    return j;
}

void add_mapping_options(CLI::App* sub, MappingArgs& m)
{
    sub->add_option("--loss-col", m.mapping.loss, "loss column name")->capture_default_str();
    sub->add_option("--alae-col", m.mapping.alae, "ALAE column name")->capture_default_str();
    sub->add_option("--censor-col", m.mapping.censor, "censoring flag column (1 observed, 0 censored)");
    sub->add_option("--limit-col", m.mapping.limit, "policy limit column");
}

json mapping_json(const ColumnMapping& m)
{
    return {{"loss", m.loss}, {"alae", m.alae}, {"censor", m.censor}, {"limit", m.limit}};
}

double parse_double(const std::string& s, const std::string& what)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("non-numeric " + what + " '" + s + "'");
    }
    return v;
}

std::string render(const Rendered& r, const std::string& format)
{
    if (format == "json") return r.doc.dump(2) + "\n";
    if (format == "table") return pretty_table(r.csv, r.money);
    return r.csv;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string data;
    MappingArgs map;
    std::vector<std::string> families{"gumbel", "frank", "joe", "student", "clayton"};
    std::vector<std::string> mixings{"none", "shifted-geometric", "shifted-poisson", "truncated-poisson"};
    int starts = 5;
    int max_iter = 2000;
};

Rendered cmd_fit(const FitArgs& a, const GlobalArgs& g, json& cfg, bool& all_failed)
{
    std::vector<Family> fams;
    for (const auto& f : a.families) fams.push_back(family_from_string(f));
    std::vector<MixingModel> mix;
    bool pure = false;
    for (const auto& m : a.mixings) {
        if (m == "none") {
            pure = true;
        } else {
            mix.push_back(mixing_from_string(m));
        }
    }
    if (fams.empty()) throw ConfigError("no families selected");
    if (mix.empty() && !pure) throw ConfigError("no mixing laws selected");
    if (a.starts < 1) throw ConfigError("--starts must be >= 1");
    if (a.max_iter < 1) throw ConfigError("--max-iter must be >= 1");

    const ClaimsDataset ds = load_csv(a.data, a.map.mapping);
    const bool censored = !ds.delta.empty();
    const PseudoObservations obs =
        censored ? km_pseudo_observations(ds.x, ds.y, ds.delta) : pseudo_observations(ds.x, ds.y);
    FitOptions opts;
    opts.starts = a.starts;
    opts.optimizer.max_iterations = a.max_iter;
    opts.threads = resolve_threads(g.threads);
    const auto fits = model_grid_fit(obs, fams, mix, pure, opts);

    cfg["data"] = a.data;
    cfg["columns"] = mapping_json(a.map.mapping);
    cfg["families"] = a.families;
    cfg["mixing"] = a.mixings;
    cfg["starts"] = a.starts;
    cfg["max_iter"] = a.max_iter;
    cfg["censored_likelihood"] = censored;
    cfg["n"] = ds.size();

    all_failed = std::all_of(fits.begin(), fits.end(), [](const FitResult& f) { return !f.error.empty(); });
    return {fits_to_csv(fits), json::parse(fits_to_json(fits)), {}};
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    ModelArgs model;
    std::size_t n = 1000;
    std::string x_margin = "uniform";
    std::string y_margin = "uniform";
    double censor_q = 0.0;
    CLI::Option* censor_opt = nullptr;
};

Rendered cmd_simulate(const SimulateArgs& a, const GlobalArgs& g, json& cfg)
{
    SynthesisConfig sc;
    sc.model = build_model(a.model);
    sc.x = parse_margin(a.x_margin);
    sc.y = parse_margin(a.y_margin);
    sc.n = a.n;
    sc.stream = {g.seed, 0};
    sc.threads = resolve_threads(g.threads);
    if (a.censor_opt->count() > 0) sc.censor_quantile = a.censor_q;
    const ClaimsDataset ds = synthesize(sc);

    cfg["model"] = model_json(sc.model);
    cfg["n"] = a.n;
    cfg["x_margin"] = sc.x.describe();
    cfg["y_margin"] = sc.y.describe();
    cfg["censor_quantile"] = sc.censor_quantile ? json(*sc.censor_quantile) : json(nullptr);

    // Copula-scale samples are written as u1,u2 and claim-scale samples as x,y.
    const bool copula_scale = sc.x.kind() == Margin::Kind::Uniform && sc.y.kind() == Margin::Kind::Uniform;
    ColumnMapping names;
    names.loss = copula_scale ? "u1" : "x";
    names.alae = copula_scale ? "u2" : "y";
    names.censor = "censor";
    names.limit = "limit";
    json doc{{"n", ds.size()}, {names.loss, ds.x}, {names.alae, ds.y}};
    if (!ds.delta.empty()) {
        doc["censor"] = ds.delta;
        doc["limit"] = ds.limit;
    }
    return {to_csv(ds, names), doc, {}};
}

// ---------------------------------------------------------------------------

struct DependenceArgs {
    std::string base = "gumbel";
    double alpha = 10.0;
    double dof = 4.0;
    std::string mixing = "shifted-poisson";
    std::vector<double> elambdas{10.0, 100.0, 1000.0, 10000.0};
    std::size_t reps = 10000;
    std::string data;
    MappingArgs map;
    double tail_q = 0.95;
    std::string tail_estimator = "log";
};

Rendered cmd_dependence(const DependenceArgs& a, const GlobalArgs& g, json& cfg)
{
    if (!a.data.empty()) {
        const ClaimsDataset ds = load_csv(a.data, a.map.mapping);
        if (ds.size() < 2) throw InsufficientDataError("dependence measures need at least two rows");
        const TailEstimator est = a.tail_estimator == "secant" ? TailEstimator::Secant : TailEstimator::Log;
        const std::vector<std::pair<std::string, double>> stats{
            {"kendall_tau", kendall_tau(ds.x, ds.y)},
            {"spearman_rho", spearman_rho(ds.x, ds.y)},
            {"pearson", pearson(ds.x, ds.y)},
            {"upper_tail", upper_tail_empirical(ds.x, ds.y, a.tail_q, est)}};
        cfg["data"] = a.data;
        cfg["columns"] = mapping_json(a.map.mapping);
        cfg["tail_q"] = a.tail_q;
        cfg["tail_estimator"] = a.tail_estimator;
        std::ostringstream os;
        os << "statistic,value\n" << "n," << ds.size() << '\n';
        json doc{{"n", ds.size()}};
        for (const auto& [k, v] : stats) {
            os << k << ',' << format_double(v) << '\n';
            doc[k] = v;
        }
        return {os.str(), doc, {}};
    }
    const Copula base = make_base(a.base, a.alpha, a.dof);
    const MixingModel model = mixing_from_string(a.mixing);
    if (a.elambdas.empty()) throw ConfigError("no --elambda values given");
    if (a.reps < 2) throw ConfigError("--b must be >= 2");
    const auto rows = tau_convergence_study(base, model, a.elambdas, a.reps, {g.seed, 0}, resolve_threads(g.threads));

    cfg["base"] = base_json(base);
    cfg["mixing"] = std::string(to_string(model));
    cfg["e_lambda"] = a.elambdas;
    cfg["b"] = a.reps;

    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back(
            {{"e_lambda", r.e_lambda}, {"tau_c", r.tau_c}, {"tau_q", r.tau_q}, {"rho_c", r.rho_c}, {"rho_q", r.rho_q}});
    }
    return {convergence_csv(rows), json{{"replications", a.reps}, {"seed", g.seed}, {"rows", arr}}, {}};
}

// ---------------------------------------------------------------------------

struct InfluenceArgs {
    std::string base = "gumbel";
    double alpha = 2.324;
    double dof = 4.0;
    std::string count = "shifted-poisson:1000";
    std::string x_margin = "pareto:10000,2.2";
    std::string y_margin = "pareto:50000,2.5";
    std::size_t reps = 10000;
    double p = 0.99;
};

Rendered cmd_influence(const InfluenceArgs& a, const GlobalArgs& g, json& cfg)
{
    InfluenceConfig ic;
    ic.claim_copula = make_base(a.base, a.alpha, a.dof);
    ic.count = parse_count(a.count);
    ic.x = parse_margin(a.x_margin);
    ic.y = parse_margin(a.y_margin);
    ic.replications = a.reps;
    ic.p = a.p;
    ic.stream = {g.seed, 0};
    ic.threads = resolve_threads(g.threads);
    const InfluenceReport rep = largest_claim_influence(ic);

    cfg["base"] = base_json(ic.claim_copula);
    cfg["count"] = ic.count.describe();
    cfg["x_margin"] = ic.x.describe();
    cfg["y_margin"] = ic.y.describe();
    cfg["b"] = a.reps;
    cfg["p"] = a.p;
    return {influence_to_csv(rep), json::parse(influence_to_json(rep)),
            {"s_n", "s_n_star", "influence", "alloc_x", "alloc_y"}};
}

// ---------------------------------------------------------------------------

struct PremiumArgs {
    ModelArgs model;
    std::string treaty;
    std::vector<double> retentions;
    std::vector<double> deductibles;
    std::string count = "poisson:156.2";
    std::string x_margin = "pareto:10000,2.2";
    std::string y_margin = "pareto:50000,2.5";
    std::string data;
    MappingArgs map;
    std::size_t reps = 10000;
};

Rendered cmd_premium(const PremiumArgs& a, const GlobalArgs& g, json& cfg)
{
    Treaty treaty = Treaty::ExcessOfLoss;
    if (a.treaty.empty()) {
        if (a.retentions.empty() == a.deductibles.empty()) {
            throw ConfigError("give --treaty, or exactly one of --retentions and --deductibles");
        }
        treaty = a.retentions.empty() ? Treaty::StopLoss : Treaty::ExcessOfLoss;
    } else if (a.treaty == "excess-of-loss" || a.treaty == "xl") {
        treaty = Treaty::ExcessOfLoss;
    } else if (a.treaty == "stop-loss" || a.treaty == "sl") {
        treaty = Treaty::StopLoss;
    } else {
        throw ConfigError("unknown treaty '" + a.treaty + "'");
    }
    const bool xl = treaty == Treaty::ExcessOfLoss;
    if (xl && !a.deductibles.empty()) throw ConfigError("--deductibles apply to stop-loss only");
    if (!xl && !a.retentions.empty()) throw ConfigError("--retentions apply to excess-of-loss only");

    PremiumConfig pc;
    pc.model = build_model(a.model);
    pc.count = parse_count(a.count);
    if (!a.data.empty()) {
        const ClaimsDataset ds = load_csv(a.data, a.map.mapping);
        if (ds.has_censoring()) throw DataError("empirical margins need uncensored data");
        pc.x = Margin::empirical(ds.x);
        pc.y = Margin::empirical(ds.y);
        cfg["data"] = a.data;
        cfg["columns"] = mapping_json(a.map.mapping);
    } else {
        pc.x = parse_margin(a.x_margin);
        pc.y = parse_margin(a.y_margin);
        cfg["x_margin"] = pc.x.describe();
        cfg["y_margin"] = pc.y.describe();
    }
    pc.levels = xl ? a.retentions : a.deductibles;
    pc.replications = a.reps;
    pc.stream = {g.seed, 0};
    pc.threads = resolve_threads(g.threads);
    const PremiumGrid grid = xl ? excess_of_loss_premium(pc) : stop_loss_premium(pc);

    cfg["treaty"] = std::string(to_string(treaty));
    cfg["levels"] = pc.levels;
    cfg["model"] = model_json(pc.model);
    cfg["count"] = pc.count.describe();
    cfg["b"] = a.reps;
    return {premium_to_csv(grid), json::parse(premium_to_json(grid)), {"level", "estimate", "std_error", "direct"}};
}

// ---------------------------------------------------------------------------

struct SummarizeArgs {
    std::string data;
    MappingArgs map;
};

Rendered cmd_summarize(const SummarizeArgs& a, json& cfg)
{
    const ClaimsDataset ds = load_csv(a.data, a.map.mapping);
    const auto rows = summarize(ds);
    cfg["data"] = a.data;
    cfg["columns"] = mapping_json(a.map.mapping);
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"column", r.name},
                       {"count", r.count},
                       {"min", r.min},
                       {"q1", r.q1},
                       {"q2", r.q2},
                       {"q3", r.q3},
                       {"max", r.max},
                       {"mean", r.mean},
                       {"std", r.std}});
    }
    return {summary_to_csv(rows), json{{"rows", arr}}, {"min", "q1", "q2", "q3", "max", "mean", "std"}};
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

} // namespace

CountLaw parse_count(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("count spec '" + spec + "' needs the form name:value");
    const std::string name = spec.substr(0, colon);
    const std::string value = spec.substr(colon + 1);
    if (name == "poisson") return CountLaw::poisson(parse_double(value, "Poisson mean"));
    if (name == "fixed") {
        const double k = parse_double(value, "fixed count");
        if (k != std::floor(k)) throw ConfigError("fixed count must be an integer");
        return CountLaw::fixed(static_cast<std::int64_t>(k));
    }
    return CountLaw::mixing(MixingLaw(mixing_from_string(name), parse_double(value, "mixing parameter")));
}

std::string pretty_table(const std::string& csv, const std::vector<std::string>& money_columns)
{
    std::vector<std::vector<std::string>> cells;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        if (!line.empty() && line.back() == ',') row.emplace_back();
        cells.push_back(row);
    }
    if (cells.empty()) return {};
    std::vector<bool> money(cells[0].size(), false);
    for (std::size_t c = 0; c < cells[0].size(); ++c) {
        if (std::find(money_columns.begin(), money_columns.end(), cells[0][c]) != money_columns.end()) {
            money[c] = true;
            cells[0][c] += " (M)";
        }
    }
    for (std::size_t r = 1; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size() && c < money.size(); ++c) {
            std::string& s = cells[r][c];
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) continue;
            const bool integral = s.find_first_of(".eE") == std::string::npos;
            if (!money[c] && integral) continue;
            char buf[64];
            std::snprintf(buf, sizeof buf, money[c] ? "%.2f" : "%.4f", money[c] ? v / 1e6 : v);
            s = buf;
        }
    }
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream os;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) os << "  ";
            os << std::string(width[c] - row[c].size(), ' ') << row[c];
        }
        os << '\n';
    }
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Largest-claim mixture copulas: fitting, simulation and reinsurance pricing", "maxclaim"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI configuration file (flags take precedence)");

    GlobalArgs g;
    app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0: available parallelism)")->capture_default_str();
    app.add_option("--out", g.out, "primary output path (default: stdout)");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "table"}))
        ->capture_default_str();

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit the family x mixing grid by pseudo-maximum likelihood");
    fit_cmd->add_option("--data", fit.data, "claims CSV")->required();
    add_mapping_options(fit_cmd, fit.map);
    fit_cmd->add_option("--families", fit.families, "base families")->delimiter(',')->capture_default_str();
    fit_cmd->add_option("--mixing", fit.mixings, "mixing laws; none adds the bare families")
        ->delimiter(',')
        ->capture_default_str();
    fit_cmd->add_option("--starts", fit.starts, "optimizer starts per cell")->capture_default_str();
    fit_cmd->add_option("--max-iter", fit.max_iter, "Nelder-Mead iteration cap per start")->capture_default_str();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic claims dataset");
    add_model_options(sim_cmd, sim.model, true);
    sim_cmd->add_option("--n", sim.n, "number of pairs")->capture_default_str();
    sim_cmd->add_option("--x-margin", sim.x_margin, "loss margin")->capture_default_str();
    sim_cmd->add_option("--y-margin", sim.y_margin, "ALAE margin")->capture_default_str();
    sim.censor_opt = sim_cmd->add_option("--censor-q", sim.censor_q, "right-censor losses at this sample quantile");

    DependenceArgs dep;
    auto* dep_cmd = app.add_subcommand("dependence", "tau/rho convergence study, or dependence of a dataset");
    dep_cmd->add_option("--base", dep.base, "base copula family")->capture_default_str();
    dep_cmd->add_option("--alpha", dep.alpha, "base copula parameter")->capture_default_str();
    dep_cmd->add_option("--dof", dep.dof, "Student degrees of freedom")->capture_default_str();
    dep_cmd->add_option("--mixing", dep.mixing, "mixing law")->capture_default_str();
    dep_cmd->add_option("--elambda", dep.elambdas, "E[Lambda] values")->delimiter(',')->capture_default_str();
    dep_cmd->add_option("--b", dep.reps, "pairs per cell")->capture_default_str();
    dep_cmd->add_option("--data", dep.data, "claims CSV (switches to empirical measures)");
    add_mapping_options(dep_cmd, dep.map);
    dep_cmd->add_option("--tail-q", dep.tail_q, "threshold for the empirical tail coefficient")
        ->check(CLI::Range(0.5, 1.0))
        ->capture_default_str();
    dep_cmd->add_option("--tail-estimator", dep.tail_estimator, "log or secant")
        ->check(CLI::IsMember({"log", "secant"}))
        ->capture_default_str();

    InfluenceArgs inf;
    auto* inf_cmd = app.add_subcommand("influence", "influence of the largest claims on aggregate risk");
    inf_cmd->add_option("--base", inf.base, "claim copula family")->capture_default_str();
    inf_cmd->add_option("--alpha", inf.alpha, "claim copula parameter")->capture_default_str();
    inf_cmd->add_option("--dof", inf.dof, "Student degrees of freedom")->capture_default_str();
    inf_cmd->add_option("--count", inf.count, "claim count law")->capture_default_str();
    inf_cmd->add_option("--x-margin", inf.x_margin, "loss margin")->capture_default_str();
    inf_cmd->add_option("--y-margin", inf.y_margin, "ALAE margin")->capture_default_str();
    inf_cmd->add_option("--b", inf.reps, "replications")->check(CLI::Range(std::size_t{100}, std::size_t{1} << 40))
        ->capture_default_str();
    inf_cmd->add_option("--p", inf.p, "VaR/TVaR level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

    PremiumArgs prem;
    prem.model.base = "joe";
    prem.model.alpha = 2.3727;
    auto* prem_cmd = app.add_subcommand("premium", "excess-of-loss or stop-loss premiums");
    add_model_options(prem_cmd, prem.model, true);
    prem_cmd->add_option("--treaty", prem.treaty, "excess-of-loss (xl) or stop-loss (sl)");
    prem_cmd->add_option("--retentions", prem.retentions, "excess-of-loss retentions")->delimiter(',');
    prem_cmd->add_option("--deductibles", prem.deductibles, "stop-loss deductibles")->delimiter(',');
    prem_cmd->add_option("--count", prem.count, "claim count law")->capture_default_str();
    prem_cmd->add_option("--x-margin", prem.x_margin, "loss margin")->capture_default_str();
    prem_cmd->add_option("--y-margin", prem.y_margin, "ALAE margin")->capture_default_str();
    prem_cmd->add_option("--data", prem.data, "claims CSV for empirical margins");
    add_mapping_options(prem_cmd, prem.map);
    prem_cmd->add_option("--b", prem.reps, "replications")->capture_default_str();

    SummarizeArgs sum;
    auto* sum_cmd = app.add_subcommand("summarize", "summary statistics of a claims dataset");
    sum_cmd->add_option("--data", sum.data, "claims CSV")->required();
    add_mapping_options(sum_cmd, sum.map);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    json cfg{{"command", command}, {"seed", g.seed}, {"threads", resolve_threads(g.threads)},
             {"format", g.format}, {"out", g.out}};
    try {
        Rendered result;
        bool all_failed = false;
        if (command == "fit") {
            result = cmd_fit(fit, g, cfg, all_failed);
        } else if (command == "simulate") {
            result = cmd_simulate(sim, g, cfg);
        } else if (command == "dependence") {
            result = cmd_dependence(dep, g, cfg);
        } else if (command == "influence") {
            result = cmd_influence(inf, g, cfg);
        } else if (command == "premium") {
            result = cmd_premium(prem, g, cfg);
        } else {
            result = cmd_summarize(sum, cfg);
        }
        const std::string text = render(result, g.format);
        const std::string config_text = cfg.dump(2) + "\n";
        if (g.out.empty()) {
            out << text;
            err << config_text;
        } else {
            write_file(g.out, text);
            write_file(g.out + ".config.json", config_text);
        }
        if (all_failed) {
            err << "error: every model fit failed\n";
            return kExitFit;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const InsufficientDataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnsupportedError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const OptimizationError& e) {
        err << "fit error: " << e.what() << '\n';
        return kExitFit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace maxclaim::cli
