#include "maxclaim/data.hpp"

#include "maxclaim/error.hpp"
#include "maxclaim/format.hpp"
#include "maxclaim/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace maxclaim {

namespace {

constexpr std::size_t kMaxDiagnostics = 10;

void raise_if_any(const std::vector<std::string>& problems)
{
    if (problems.empty()) return;
    std::string msg = std::to_string(problems.size()) + " invalid row(s):";
    for (std::size_t i = 0; i < problems.size() && i < kMaxDiagnostics; ++i) msg += "\n  " + problems[i];
    if (problems.size() > kMaxDiagnostics) msg += "\n  ...";
    throw DataError(msg);
}

// Splits one CSV record; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t\r");
        const auto e = f.find_last_not_of(" \t\r");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

bool parse_number(const std::string& s, double& out)
{
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

} // namespace

void ClaimsDataset::validate() const
{
    std::vector<std::string> problems;
    if (y.size() != x.size()) throw DataError("loss and ALAE columns differ in length");
    if (!delta.empty() && delta.size() != x.size()) throw DataError("censoring column differs in length");
    if (!limit.empty() && limit.size() != x.size()) throw DataError("limit column differs in length");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::string row = "row " + std::to_string(i + 1) + ": ";
        if (!(x[i] > 0.0) || !std::isfinite(x[i])) problems.push_back(row + "loss must be positive");
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) problems.push_back(row + "ALAE must be positive");
        if (!delta.empty()) {
            if (delta[i] != 0 && delta[i] != 1) {
                problems.push_back(row + "censoring flag must be 0 or 1");
            } else if (delta[i] == 0 && (limit.empty() || x[i] != limit[i])) {
                problems.push_back(row + "censored loss must equal its policy limit");
            }
        }
    }
    raise_if_any(problems);
}

ClaimsDataset parse_csv(const std::string& text, const ColumnMapping& mapping)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            header = split_record(line);
            break;
        }
    }
    if (header.empty()) throw DataError("CSV has no header row");
    if (header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) header[0].erase(0, 3);

    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        if (name.empty()) return -1;
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("missing column '" + name + "'");
        return it - header.begin();
    };
    const auto cx = column(mapping.loss);
    const auto cy = column(mapping.alae);
    const auto cd = column(mapping.censor);
    const auto cl = column(mapping.limit);

    ClaimsDataset ds;
    std::vector<std::string> problems;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        const auto fields = split_record(line);
        const std::string where = "row " + std::to_string(row) + " (line " + std::to_string(line_no) + "): ";
        if (fields.size() != header.size()) {
            problems.push_back(where + "expected " + std::to_string(header.size()) + " fields, found " +
                               std::to_string(fields.size()));
            continue;
        }
        auto get = [&](std::ptrdiff_t c, const std::string& name, double& out) {
            if (!parse_number(fields[static_cast<std::size_t>(c)], out)) {
                problems.push_back(where + "non-numeric " + name + " '" + fields[static_cast<std::size_t>(c)] + "'");
                return false;
            }
            return true;
        };
        double x = 0.0;
        double y = 0.0;
        double d = 1.0;
        double lim = 0.0;
        bool ok = get(cx, mapping.loss, x);
        ok = get(cy, mapping.alae, y) && ok;
        if (cd >= 0) ok = get(cd, mapping.censor, d) && ok;
        if (cl >= 0) ok = get(cl, mapping.limit, lim) && ok;
        if (!ok) continue;
        if (!(x > 0.0) || !std::isfinite(x)) problems.push_back(where + "loss must be positive");
        if (!(y > 0.0) || !std::isfinite(y)) problems.push_back(where + "ALAE must be positive");
        if (cd >= 0 && d != 0.0 && d != 1.0) problems.push_back(where + "censoring flag must be 0 or 1");
        if (cd >= 0 && d == 0.0 && (cl < 0 || x != lim)) {
            problems.push_back(where + "censored loss must equal its policy limit");
        }
        ds.x.push_back(x);
        ds.y.push_back(y);
        if (cd >= 0) ds.delta.push_back(static_cast<int>(d));
        if (cl >= 0) ds.limit.push_back(lim);
    }
    raise_if_any(problems);
    return ds;
}

ClaimsDataset load_csv(const std::string& path, const ColumnMapping& mapping)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), mapping);
}

std::string to_csv(const ClaimsDataset& ds, const ColumnMapping& mapping)
{
    ds.validate();
    const std::string censor = mapping.censor.empty() ? "censor" : mapping.censor;
    const std::string limit = mapping.limit.empty() ? "limit" : mapping.limit;
    std::ostringstream os;
    os << mapping.loss << ',' << mapping.alae;
    if (!ds.delta.empty()) os << ',' << censor;
    if (!ds.limit.empty()) os << ',' << limit;
    os << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        os << format_double(ds.x[i]) << ',' << format_double(ds.y[i]);
        if (!ds.delta.empty()) os << ',' << ds.delta[i];
        if (!ds.limit.empty()) os << ',' << format_double(ds.limit[i]);
        os << '\n';
    }
    return os.str();
}

void save_csv(const ClaimsDataset& ds, const std::string& path, const ColumnMapping& mapping)
{
    const std::string text = to_csv(ds, mapping);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

double quantile_linear(std::vector<double> values, double p)
{
    if (values.empty()) throw InsufficientDataError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ColumnSummary summarize_column(const std::string& name, const std::vector<double>& values)
{
    if (values.empty()) throw InsufficientDataError("cannot summarize an empty column");
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    // Sorting first makes the summation order, and hence the result, independent of row order.
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {name,
            v.size(),
            v.front(),
            quantile_linear(v, 0.25),
            quantile_linear(v, 0.5),
            quantile_linear(v, 0.75),
            v.back(),
            mean,
            v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

std::vector<ColumnSummary> summarize(const ClaimsDataset& ds)
{
    if (ds.size() == 0) throw InsufficientDataError("cannot summarize an empty dataset");
    return {summarize_column("loss", ds.x), summarize_column("alae", ds.y)};
}

std::string summary_to_csv(const std::vector<ColumnSummary>& rows)
{
    std::ostringstream os;
    os << "column,count,min,q1,q2,q3,max,mean,std\n";
    for (const auto& r : rows) {
        os << r.name << ',' << r.count << ',' << format_double(r.min) << ',' << format_double(r.q1) << ','
           << format_double(r.q2) << ',' << format_double(r.q3) << ',' << format_double(r.max) << ','
           << format_double(r.mean) << ',' << format_double(r.std) << '\n';
    }
    return os.str();
}

ClaimsDataset synthesize(const SynthesisConfig& config)
{
    if (config.n == 0) throw DomainError("synthetic dataset size must be positive");
    const PairSample s = sample_claims(config.model, config.x, config.y, config.n, config.stream, config.threads);
    ClaimsDataset ds;
    ds.x.reserve(config.n);
    ds.y.reserve(config.n);
    for (const auto& [a, b] : s) {
        ds.x.push_back(a);
        ds.y.push_back(b);
    }
    if (config.censor_quantile) {
        const double q = *config.censor_quantile;
        if (!(q > 0.0 && q < 1.0)) throw DomainError("censoring quantile must lie in (0,1)");
        const double cap = quantile_linear(ds.x, q);
        ds.delta.assign(config.n, 1);
        ds.limit.assign(config.n, cap);
        for (std::size_t i = 0; i < config.n; ++i) {
            if (ds.x[i] > cap) {
                ds.x[i] = cap;
                ds.delta[i] = 0;
            }
        }
    }
    return ds;
}

} // namespace maxclaim
