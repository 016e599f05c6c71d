#pragma once

// Experiment description read from flat `key = value` text. Keys may carry
// dotted sections (`recoil.eta1 = 0.142`) or sit under a `[recoil]` header.
// `#` starts a comment.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trapion/errors.hpp"
#include "trapion/rates.hpp"

namespace trapion {

struct RecoilConfig {
    bool enabled = false;
    double eta1 = 0.142;
    double eta2 = 0.142;
    double gamma1_over_gamma2 = 9.5 / 3.3;
};

struct InitialConfig {
    std::optional<int> delta_n;
    std::optional<std::string> file; // CSV `n,prob`
};

struct ExperimentConfig {
    Regime regime = Regime::incoherent;
    double eta = 0.0;
    std::optional<int> eta_trap_n0; // eta chosen as a coupling zero of this n0
    int eta_root_index = 1;
    std::optional<double> pulse_area;
    std::optional<int> pulse_area_trap_n0; // pulse area completing Rabi cycles at this n0
    int pulse_area_m = 1;
    std::optional<double> G;
    RecoilConfig recoil;
    std::optional<int> n_max;
    int cycles = 0;
    InitialConfig initial;
    std::vector<int> checkpoints;
    std::uint64_t seed = 0;
    double leak_tolerance = 1e-3;
    int trajectories = 20000;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    auto b = s.begin();
    auto e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b)))
        ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1))))
        --e;
    return std::string(b, e);
}

inline double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: `" + key + "` expects a number, got `" + v + "`");
    }
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("config: `" + key + "` expects an integer, got `" + v + "`");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("config: `" + key + "` expects a boolean, got `" + v + "`");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_int<int>(key, item));
    }
    return out;
}

} // namespace detail

/// Parses and validates an experiment description.
inline ExperimentConfig parse_config(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (!section.empty())
            key = section + "." + key;
        if (!kv.emplace(key, value).second)
            throw ConfigError("config: duplicate key `" + key + "`");
    }

    ExperimentConfig cfg;
    bool have_regime = false;
    bool have_eta = false;
    for (const auto& [key, v] : kv) {
        using namespace detail;
        if (key == "regime") {
            if (v == "coherent")
                cfg.regime = Regime::coherent;
            else if (v == "incoherent")
                cfg.regime = Regime::incoherent;
            else
                throw ConfigError("config: regime must be `coherent` or `incoherent`");
            have_regime = true;
        } else if (key == "eta") {
            cfg.eta = parse_double(key, v);
            have_eta = true;
        } else if (key == "eta.trap_n0") {
            cfg.eta_trap_n0 = parse_int<int>(key, v);
        } else if (key == "eta.root_index") {
            cfg.eta_root_index = parse_int<int>(key, v);
        } else if (key == "pulse_area") {
            cfg.pulse_area = parse_double(key, v);
        } else if (key == "pulse_area.trap_n0") {
            cfg.pulse_area_trap_n0 = parse_int<int>(key, v);
        } else if (key == "pulse_area.m") {
            cfg.pulse_area_m = parse_int<int>(key, v);
        } else if (key == "G") {
            cfg.G = parse_double(key, v);
        } else if (key == "recoil.enabled") {
            cfg.recoil.enabled = parse_bool(key, v);
        } else if (key == "recoil.eta1") {
            cfg.recoil.eta1 = parse_double(key, v);
        } else if (key == "recoil.eta2") {
            cfg.recoil.eta2 = parse_double(key, v);
        } else if (key == "recoil.gamma1_over_gamma2") {
            cfg.recoil.gamma1_over_gamma2 = parse_double(key, v);
        } else if (key == "n_max") {
            cfg.n_max = parse_int<int>(key, v);
        } else if (key == "cycles") {
            cfg.cycles = parse_int<int>(key, v);
        } else if (key == "initial.delta_n") {
            cfg.initial.delta_n = parse_int<int>(key, v);
        } else if (key == "initial.file") {
            cfg.initial.file = v;
        } else if (key == "checkpoints") {
            cfg.checkpoints = parse_int_list(key, v);
        } else if (key == "seed") {
            cfg.seed = parse_int<std::uint64_t>(key, v);
        } else if (key == "leak_tolerance") {
            cfg.leak_tolerance = parse_double(key, v);
        } else if (key == "trajectories") {
            cfg.trajectories = parse_int<int>(key, v);
        } else {
            throw ConfigError("config: unknown key `" + key + "`");
        }
    }

    if (!have_regime)
        throw ConfigError("config: `regime` is required");
    if (have_eta == cfg.eta_trap_n0.has_value())
        throw ConfigError("config: set exactly one of `eta` and `eta.trap_n0`");
    if (cfg.eta_trap_n0 && *cfg.eta_trap_n0 < 1)
        throw ConfigError("config: `eta.trap_n0` must be >= 1");
    if (cfg.eta_trap_n0 && (cfg.eta_root_index < 1 || cfg.eta_root_index > *cfg.eta_trap_n0))
        throw ConfigError("config: `eta.root_index` must lie in [1, eta.trap_n0]");
    if (!(cfg.eta >= 0.0))
        throw ConfigError("config: eta must be >= 0");
    if (cfg.regime == Regime::coherent) {
        if (cfg.pulse_area.has_value() == cfg.pulse_area_trap_n0.has_value() || cfg.G)
            throw ConfigError("config: coherent regime takes one of `pulse_area` and "
                              "`pulse_area.trap_n0`, and no `G`");
        if (cfg.pulse_area && !(*cfg.pulse_area >= 0.0))
            throw ConfigError("config: pulse_area must be >= 0");
        if (cfg.pulse_area_trap_n0 && (*cfg.pulse_area_trap_n0 < 0 || cfg.pulse_area_m < 1))
            throw ConfigError("config: pulse_area.trap_n0 must be >= 0 and pulse_area.m >= 1");
    } else {
        if (!cfg.G || cfg.pulse_area || cfg.pulse_area_trap_n0)
            throw ConfigError("config: incoherent regime takes `G` and no `pulse_area`");
        if (!(*cfg.G >= 0.0))
            throw ConfigError("config: G must be >= 0");
    }
    if (!(cfg.recoil.eta1 >= 0.0) || !(cfg.recoil.eta2 >= 0.0))
        throw ConfigError("config: recoil.eta1 and recoil.eta2 must be >= 0");
    if (!(cfg.recoil.gamma1_over_gamma2 > 0.0))
        throw ConfigError("config: recoil.gamma1_over_gamma2 must be > 0");
    if (cfg.n_max && *cfg.n_max < 1)
        throw ConfigError("config: n_max must be >= 1");
    if (cfg.cycles < 0)
        throw ConfigError("config: cycles must be >= 0");
    if (cfg.initial.delta_n && cfg.initial.file)
        throw ConfigError("config: set at most one of initial.delta_n and initial.file");
    if (cfg.initial.delta_n && *cfg.initial.delta_n < 0)
        throw ConfigError("config: initial.delta_n must be >= 0");
    if (!std::is_sorted(cfg.checkpoints.begin(), cfg.checkpoints.end()))
        throw ConfigError("config: checkpoints must be sorted ascending");
    for (int k : cfg.checkpoints)
        if (k < 0 || k > cfg.cycles)
            throw ConfigError("config: checkpoint " + std::to_string(k) + " outside [0, cycles]");
    if (!(cfg.leak_tolerance >= 0.0))
        throw ConfigError("config: leak_tolerance must be >= 0");
    if (cfg.trajectories < 1)
        throw ConfigError("config: trajectories must be >= 1");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open `" + path + "`");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace trapion
