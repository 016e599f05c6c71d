#pragma once

// CSV schemas for figure data. Floats are written with 9 significant digits
// unless TRAPION_PRECISION (1..17) overrides it.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "trapion/config.hpp"
#include "trapion/engine.hpp"
#include "trapion/errors.hpp"
#include "trapion/rates.hpp"
#include "trapion/specfun.hpp"
#include "trapion/trapping.hpp"

namespace trapion::csv {

inline constexpr int kDefaultPrecision = 9;
inline constexpr const char* kPrecisionEnv = "TRAPION_PRECISION";

inline int output_precision()
{
    if (const char* env = std::getenv(kPrecisionEnv)) {
        char* end = nullptr;
        const long p = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && p >= 1 && p <= 17)
            return static_cast<int>(p);
    }
    return kDefaultPrecision;
}

inline std::string fmt(double v, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

/// Header plus rows of raw string fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw ConfigError("csv: missing column `" + name + "`");
    }
};

inline std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

inline Table parse(const std::string& text)
{
    Table t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto fields = split_line(line);
        if (first) {
            t.header = std::move(fields);
            first = false;
            continue;
        }
        if (fields.size() != t.header.size())
            throw ConfigError("csv: row width " + std::to_string(fields.size())
                              + " does not match header width " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(fields));
    }
    if (first)
        throw ConfigError("csv: empty input");
    return t;
}

inline double to_double(const std::string& s) { return detail::parse_double("csv", s); }
inline int to_int(const std::string& s) { return detail::parse_int<int>("csv", s); }

// ---- writers -------------------------------------------------------------

inline std::string write_coupling(const CouplingProfile& profile)
{
    const int prec = output_precision();
    std::string out = "n,f\n";
    for (int n = 0; n <= profile.n_max(); ++n)
        out += std::to_string(n) + "," + fmt(profile[n], prec) + "\n";
    return out;
}

inline std::string write_rates(const TransitionRates& rates)
{
    const int prec = output_precision();
    std::string out = "n,up,stay\n";
    for (std::size_t n = 0; n < rates.up.size(); ++n)
        out += std::to_string(n) + "," + fmt(rates.up[n], prec) + "," + fmt(rates.stay[n], prec) + "\n";
    return out;
}

inline std::string write_snapshots(const std::vector<Snapshot>& snaps)
{
    const int prec = output_precision();
    std::string out = "cycle,n,prob\n";
    for (const auto& s : snaps)
        for (std::size_t n = 0; n < s.dist.probs.size(); ++n)
            out += std::to_string(s.cycle) + "," + std::to_string(n) + ","
                 + fmt(s.dist.probs[n], prec) + "\n";
    return out;
}

inline std::string write_moments(const MomentSeries& series)
{
    const int prec = output_precision();
    std::string out = "cycle,mean,variance,relvar,argmax,pmax,leak\n";
    for (const auto& r : series.records) {
        out += std::to_string(r.cycle) + "," + fmt(r.mean, prec) + "," + fmt(r.variance, prec) + ","
             + (r.relvar ? fmt(*r.relvar, prec) : std::string()) + "," + std::to_string(r.argmax)
             + "," + fmt(r.pmax, prec) + "," + fmt(r.leak, prec) + "\n";
    }
    return out;
}

inline std::string write_fig5(const std::vector<Fig5Row>& rows)
{
    const int prec = output_precision();
    std::string out = "n0,eta,root_index\n";
    for (const auto& r : rows)
        out += std::to_string(r.n0) + "," + fmt(r.eta, prec) + "," + std::to_string(r.root_index) + "\n";
    return out;
}

inline std::string write_distribution(const NumberDistribution& d)
{
    const int prec = output_precision();
    std::string out = "n,prob\n";
    for (std::size_t n = 0; n < d.probs.size(); ++n)
        out += std::to_string(n) + "," + fmt(d.probs[n], prec) + "\n";
    return out;
}

// ---- readers -------------------------------------------------------------

inline CouplingProfile read_coupling(const std::string& text, double eta)
{
    const Table t = parse(text);
    const auto cn = t.column("n");
    const auto cf = t.column("f");
    CouplingProfile p;
    p.eta = eta;
    for (const auto& row : t.rows) {
        if (to_int(row[cn]) != static_cast<int>(p.values.size()))
            throw ConfigError("csv: coupling rows must list n = 0, 1, 2, ...");
        p.values.push_back(to_double(row[cf]));
    }
    return p;
}

inline TransitionRates read_rates(const std::string& text, Regime regime)
{
    const Table t = parse(text);
    const auto cn = t.column("n");
    const auto cu = t.column("up");
    const auto cs = t.column("stay");
    TransitionRates r;
    r.regime = regime;
    for (const auto& row : t.rows) {
        if (to_int(row[cn]) != static_cast<int>(r.up.size()))
            throw ConfigError("csv: rate rows must list n = 0, 1, 2, ...");
        r.up.push_back(to_double(row[cu]));
        r.stay.push_back(to_double(row[cs]));
    }
    return r;
}

/// Distribution from `n,prob` rows; n may be sparse, missing entries are 0.
inline NumberDistribution read_distribution(const std::string& text, int n_max)
{
    const Table t = parse(text);
    const auto cn = t.column("n");
    const auto cp = t.column("prob");
    NumberDistribution d;
    d.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (const auto& row : t.rows) {
        const int n = to_int(row[cn]);
        const double p = to_double(row[cp]);
        if (n < 0 || n > n_max)
            throw ConfigError("csv: n = " + std::to_string(n) + " outside [0, n_max]");
        if (!(p >= 0.0))
            throw ConfigError("csv: negative probability at n = " + std::to_string(n));
        d.probs[static_cast<std::size_t>(n)] = p;
    }
    return d;
}

inline std::vector<Snapshot> read_snapshots(const std::string& text)
{
    const Table t = parse(text);
    const auto cc = t.column("cycle");
    const auto cn = t.column("n");
    const auto cp = t.column("prob");
    std::vector<Snapshot> out;
    for (const auto& row : t.rows) {
        const int cycle = to_int(row[cc]);
        if (out.empty() || out.back().cycle != cycle)
            out.push_back({cycle, {}});
        auto& probs = out.back().dist.probs;
        if (to_int(row[cn]) != static_cast<int>(probs.size()))
            throw ConfigError("csv: snapshot rows must list n = 0, 1, 2, ... per cycle");
        probs.push_back(to_double(row[cp]));
    }
    return out;
}

inline MomentSeries read_moments(const std::string& text)
{
    const Table t = parse(text);
    const auto cc = t.column("cycle");
    const auto cm = t.column("mean");
    const auto cv = t.column("variance");
    const auto cr = t.column("relvar");
    const auto ca = t.column("argmax");
    const auto cx = t.column("pmax");
    const auto cl = t.column("leak");
    MomentSeries s;
    for (const auto& row : t.rows) {
        MomentRecord r;
        r.cycle = to_int(row[cc]);
        r.mean = to_double(row[cm]);
        r.variance = to_double(row[cv]);
        if (!row[cr].empty())
            r.relvar = to_double(row[cr]);
        r.argmax = to_int(row[ca]);
        r.pmax = to_double(row[cx]);
        r.leak = to_double(row[cl]);
        s.records.push_back(r);
    }
    return s;
}

inline std::vector<Fig5Row> read_fig5(const std::string& text)
{
    const Table t = parse(text);
    const auto cn = t.column("n0");
    const auto ce = t.column("eta");
    const auto ci = t.column("root_index");
    std::vector<Fig5Row> out;
    for (const auto& row : t.rows)
        out.push_back({to_int(row[cn]), to_double(row[ce]), to_int(row[ci])});
    return out;
}

// ---- files ---------------------------------------------------------------

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write `" + path + "`");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for `" + path + "`");
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open `" + path + "`");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace trapion::csv
