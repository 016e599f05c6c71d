#pragma once

// Subcommand implementations behind the `trapion` executable. Each command
// writes its CSV/JSON outputs and returns the computed structures.

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trapion/config.hpp"
#include "trapion/csv.hpp"
#include "trapion/engine.hpp"
#include "trapion/kernel.hpp"
#include "trapion/montecarlo.hpp"
#include "trapion/rates.hpp"
#include "trapion/specfun.hpp"
#include "trapion/trapping.hpp"

namespace trapion::cli {

namespace fs = std::filesystem;

/// Everything derived from an ExperimentConfig that the engine and the
/// sampler need.
struct ResolvedExperiment {
    double eta = 0.0;
    int n_max = 0;
    TransitionRates rates;
    RecoilParams recoil;
    NumberDistribution initial;
};

inline double resolve_eta(const ExperimentConfig& cfg)
{
    if (!cfg.eta_trap_n0)
        return cfg.eta;
    return eta_zeros_for_n(*cfg.eta_trap_n0, cfg.eta_root_index).back();
}

inline double resolve_pulse_area(const ExperimentConfig& cfg, double eta)
{
    if (cfg.pulse_area)
        return *cfg.pulse_area;
    return pulse_area_for_state(*cfg.pulse_area_trap_n0, eta, cfg.pulse_area_m);
}

/// Mean quanta added per completed sideband step, pump recoil included.
inline double heating_per_step(const RecoilConfig& r)
{
    if (!r.enabled)
        return 0.0;
    return 0.4 * (r.eta2 * r.eta2 + r.gamma1_over_gamma2 * r.eta1 * r.eta1);
}

inline ResolvedExperiment resolve(const ExperimentConfig& cfg)
{
    ResolvedExperiment ex;
    ex.eta = resolve_eta(cfg);

    double initial_mean = 0.0;
    if (cfg.initial.delta_n)
        initial_mean = *cfg.initial.delta_n;
    if (cfg.n_max) {
        ex.n_max = *cfg.n_max;
    } else {
        const double max_up = cfg.regime == Regime::incoherent ? 0.5 : 1.0;
        const double step = 1.0 + heating_per_step(cfg.recoil);
        ex.n_max = default_n_max(initial_mean + cfg.cycles * max_up * step);
    }

    if (cfg.initial.file) {
        ex.initial = csv::read_distribution(csv::read_file(*cfg.initial.file), ex.n_max);
        const double mass = ex.initial.total();
        if (!(mass > 0.0))
            throw ConfigError("initial distribution file carries no probability");
        for (double& p : ex.initial.probs)
            p /= mass;
    } else {
        const int n0 = cfg.initial.delta_n.value_or(0);
        if (n0 > ex.n_max)
            throw ConfigError("initial.delta_n exceeds n_max");
        ex.initial = NumberDistribution::delta(n0, ex.n_max);
    }

    const auto profile = tabulate_coupling(ex.eta, std::max(ex.n_max, 1));
    ex.rates = cfg.regime == Regime::coherent
                 ? coherent_rates(profile, resolve_pulse_area(cfg, ex.eta))
                 : incoherent_rates(profile, *cfg.G);
    if (ex.n_max == 0) {
        ex.rates.up.resize(1);
        ex.rates.stay.resize(1);
    }
    if (cfg.recoil.enabled)
        ex.recoil = RecoilParams::from_ratio(cfg.recoil.eta1, cfg.recoil.eta2,
                                             cfg.recoil.gamma1_over_gamma2);
    return ex;
}

inline std::optional<RecoilKernel> build_pump(const ResolvedExperiment& ex)
{
    if (!ex.recoil.enabled)
        return std::nullopt;
    return pump_kernel(ex.recoil.eta1, ex.recoil.eta2, ex.recoil.branch_p1, ex.n_max);
}

inline CycleKernel build_cycle_kernel(const ResolvedExperiment& ex)
{
    return cycle_kernel(ex.rates, build_pump(ex));
}

inline std::vector<int> checkpoints_or_default(const ExperimentConfig& cfg)
{
    if (!cfg.checkpoints.empty())
        return cfg.checkpoints;
    if (cfg.cycles == 0)
        return {0};
    return {0, cfg.cycles};
}

inline void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create directory `" + dir + "`: " + ec.message());
}

// ---- subcommands ---------------------------------------------------------

inline CouplingProfile cmd_coupling(double eta, int n_max, const std::string& out_path)
{
    auto profile = tabulate_coupling(eta, n_max);
    csv::write_file(out_path, csv::write_coupling(profile));
    return profile;
}

/// Coupling zeros of one trapping number: `n0,eta,root_index`.
inline std::vector<Fig5Row> cmd_zeros_for_n(int n0, int count, const std::string& out_path)
{
    std::vector<Fig5Row> rows;
    const auto roots = eta_zeros_for_n(n0, count);
    for (std::size_t i = 0; i < roots.size(); ++i)
        rows.push_back({n0, roots[i], static_cast<int>(i) + 1});
    csv::write_file(out_path, csv::write_fig5(rows));
    return rows;
}

/// Trapping numbers at fixed eta: `n0,f`.
inline std::vector<int> cmd_zeros_for_eta(double eta, int n_max, const std::string& out_path)
{
    const auto numbers = trapping_numbers_for_eta(eta, n_max);
    const int prec = csv::output_precision();
    std::string out = "n0,f\n";
    for (int n : numbers)
        out += std::to_string(n) + "," + csv::fmt(coupling_f(n, eta), prec) + "\n";
    csv::write_file(out_path, out);
    return numbers;
}

inline std::vector<Fig5Row> cmd_zeros_sweep(int n0_max, double ceiling, const std::string& out_path)
{
    auto rows = fig5_dataset(n0_max, ceiling);
    csv::write_file(out_path, csv::write_fig5(rows));
    return rows;
}

inline TransitionRates cmd_rates(const ExperimentConfig& cfg, const std::string& out_path)
{
    const auto ex = resolve(cfg);
    csv::write_file(out_path, csv::write_rates(ex.rates));
    return ex.rates;
}

/// `pump` may carry a prebuilt recoil kernel matching the configuration.
inline EvolveResult cmd_evolve(const ExperimentConfig& cfg, const std::string& out_dir,
                               const std::optional<RecoilKernel>& pump = std::nullopt)
{
    const auto ex = resolve(cfg);
    const auto kernel = cycle_kernel(ex.rates, pump ? pump : build_pump(ex));
    auto result = evolve_at(ex.initial, kernel, cfg.cycles, checkpoints_or_default(cfg),
                            cfg.leak_tolerance);
    ensure_dir(out_dir);
    csv::write_file((fs::path(out_dir) / "snapshots.csv").string(), csv::write_snapshots(result.snapshots));
    csv::write_file((fs::path(out_dir) / "moments.csv").string(), csv::write_moments(result.series));
    return result;
}

struct TrajectoriesOutput {
    EnsembleResult ensemble;
    EvolveResult engine;
    std::vector<double> tv_distance; // per checkpoint
    double tv_threshold = 0.0;
};

inline TrajectoriesOutput cmd_trajectories(const ExperimentConfig& cfg, const std::string& out_dir)
{
    const auto ex = resolve(cfg);
    TrajectoryConfig tc;
    tc.rates = ex.rates;
    tc.recoil = ex.recoil;
    tc.initial = ex.initial;
    tc.cycles = cfg.cycles;
    tc.n_trajectories = cfg.trajectories;
    tc.master_seed = cfg.seed;
    tc.checkpoints = checkpoints_or_default(cfg);

    TrajectoriesOutput out;
    out.ensemble = run_ensemble(tc);
    // the engine comparison tolerates any leak; it is reported, not enforced
    out.engine = evolve_at(ex.initial, build_cycle_kernel(ex), cfg.cycles, tc.checkpoints, 1.0);
    out.tv_threshold = 3.0 * std::sqrt(static_cast<double>(ex.n_max) / cfg.trajectories);

    nlohmann::json comparison = nlohmann::json::array();
    for (std::size_t i = 0; i < out.ensemble.snapshots.size() && i < out.engine.snapshots.size(); ++i) {
        const double tv = total_variation(out.ensemble.snapshots[i].dist, out.engine.snapshots[i].dist);
        out.tv_distance.push_back(tv);
        comparison.push_back({{"cycle", out.ensemble.snapshots[i].cycle},
                              {"tv_distance", tv},
                              {"within_threshold", tv < out.tv_threshold}});
    }
    const auto& rep = out.ensemble.report;
    nlohmann::json report = {
        {"trajectories", rep.n_trajectories},
        {"seed", cfg.seed},
        {"truncation_hits", rep.truncation_hits},
        {"cap_hits", rep.cap_hits},
        {"failed_trajectories", rep.failed_trajectories},
        {"tv_threshold", out.tv_threshold},
        {"engine_comparison", comparison},
    };

    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    csv::write_file((dir / "ensemble_snapshots.csv").string(), csv::write_snapshots(out.ensemble.snapshots));
    csv::write_file((dir / "ensemble_moments.csv").string(), csv::write_moments(out.ensemble.series));
    csv::write_file((dir / "engine_snapshots.csv").string(), csv::write_snapshots(out.engine.snapshots));
    csv::write_file((dir / "engine_moments.csv").string(), csv::write_moments(out.engine.series));
    csv::write_file((dir / "report.json").string(), report.dump(2) + "\n");
    return out;
}

// ---- figure presets ------------------------------------------------------

inline const std::vector<std::string>& figure_names()
{
    static const std::vector<std::string> names{"fig2a", "fig2b", "fig3", "fig4", "fig5"};
    return names;
}

/// Parameter file text for the incoherent runs with pump recoil at the
/// n0 = 50 coupling zero.
inline std::string recoil_preset(double G, int cycles, const std::string& checkpoints)
{
    return "regime = incoherent\n"
           "eta.trap_n0 = 50\n"
           "G = " + csv::fmt(G, 17) + "\n"
           "cycles = " + std::to_string(cycles) + "\n"
           "n_max = 500\n"
           "checkpoints = " + checkpoints + "\n"
           "[recoil]\n"
           "enabled = true\n"
           "eta1 = 0.142\n"
           "eta2 = 0.142\n"
           "gamma1_over_gamma2 = " + csv::fmt(9.5 / 3.3, 17) + "\n";
}

inline std::string g_label(double G)
{
    return csv::fmt(G, 6);
}

/// Writes the data behind one figure into out_dir and returns the files written.
inline std::vector<std::string> cmd_figure(const std::string& name, const std::string& out_dir)
{
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    std::vector<std::string> files;

    if (name == "fig2a") {
        const auto cfg = parse_config("regime = coherent\neta = 0.1\npulse_area.trap_n0 = 50\nn_max = 100\n");
        files.push_back((dir / "fig2a_rates.csv").string());
        cmd_rates(cfg, files.back());
    } else if (name == "fig2b") {
        const auto cfg = parse_config("regime = coherent\neta.trap_n0 = 50\npulse_area = "
                                      + csv::fmt(std::numbers::pi / 2.0, 17) + "\nn_max = 100\n");
        files.push_back((dir / "fig2b_rates.csv").string());
        cmd_rates(cfg, files.back());
    } else if (name == "fig3" || name == "fig4") {
        const bool fig3 = name == "fig3";
        const auto gs = fig3 ? std::vector<double>{0.2, 1.0, 2.0} : std::vector<double>{1.0, 10.0, 1000.0};
        std::optional<RecoilKernel> pump;
        for (double G : gs) {
            const auto cfg = parse_config(fig3 ? recoil_preset(G, 400, "0,400")
                                               : recoil_preset(G, 200, "0,50,100,150,200"));
            if (!pump)
                pump = build_pump(resolve(cfg)); // the recoil parameters are shared by all G
            const auto sub = (dir / (name + "_G" + g_label(G))).string();
            cmd_evolve(cfg, sub, pump);
            files.push_back((fs::path(sub) / (fig3 ? "moments.csv" : "snapshots.csv")).string());
        }
    } else if (name == "fig5") {
        files.push_back((dir / "fig5.csv").string());
        cmd_zeros_sweep(100, kDefaultEtaCeiling, files.back());
    } else {
        throw ConfigError("unknown figure `" + name + "`");
    }
    return files;
}

} // namespace trapion::cli
