// trapion: command-line front end for the trapping-state simulation library.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "trapion/commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Trapped-ion trapping-state simulator"};
    app.require_subcommand(1);

    double coupling_eta = 0.0;
    int coupling_n_max = 100;
    std::string coupling_out = "coupling.csv";
    auto* coupling = app.add_subcommand("coupling", "Tabulate f(n; eta) as `n,f`");
    coupling->add_option("--eta", coupling_eta, "Lamb-Dicke parameter")->required();
    coupling->add_option("--n-max", coupling_n_max, "Largest n")->capture_default_str();
    coupling->add_option("-o,--out", coupling_out, "Output CSV")->capture_default_str();

    std::optional<int> zeros_n0;
    int zeros_count = 1;
    std::optional<double> zeros_eta;
    int zeros_n_max = 200;
    std::optional<int> zeros_sweep;
    double zeros_ceiling = trapion::kDefaultEtaCeiling;
    std::string zeros_out = "zeros.csv";
    auto* zeros = app.add_subcommand("zeros", "Coupling zeros: eta roots for n0, trapping numbers for eta, or a sweep");
    auto* opt_n0 = zeros->add_option("--n0", zeros_n0, "Eta roots of f(n0; eta)");
    zeros->add_option("--count", zeros_count, "Number of roots for --n0")->capture_default_str();
    auto* opt_eta = zeros->add_option("--eta", zeros_eta, "Trapping numbers n0 <= n-max at this eta");
    zeros->add_option("--n-max", zeros_n_max, "Search limit for --eta")->capture_default_str();
    auto* opt_sweep = zeros->add_option("--sweep", zeros_sweep, "All roots for n0 = 1..N below the ceiling");
    zeros->add_option("--ceiling", zeros_ceiling, "Eta ceiling for --sweep")->capture_default_str();
    zeros->add_option("-o,--out", zeros_out, "Output CSV")->capture_default_str();
    opt_n0->excludes(opt_eta)->excludes(opt_sweep);
    opt_eta->excludes(opt_sweep);

    std::string rates_config;
    std::string rates_out = "rates.csv";
    auto* rates = app.add_subcommand("rates", "Per-n transition rates as `n,up,stay`");
    rates->add_option("config", rates_config, "Experiment file")->required();
    rates->add_option("-o,--out", rates_out, "Output CSV")->capture_default_str();

    std::string evolve_config;
    std::string evolve_out = "evolve_out";
    auto* evolve = app.add_subcommand("evolve", "Deterministic cycle-by-cycle evolution");
    evolve->add_option("config", evolve_config, "Experiment file")->required();
    evolve->add_option("-o,--out-dir", evolve_out, "Output directory")->capture_default_str();

    std::string traj_config;
    std::string traj_out = "trajectories_out";
    auto* traj = app.add_subcommand("trajectories", "Monte Carlo ensemble compared against the engine");
    traj->add_option("config", traj_config, "Experiment file")->required();
    traj->add_option("-o,--out-dir", traj_out, "Output directory")->capture_default_str();

    std::string figure_name;
    std::string figure_out = "figures";
    auto* figure = app.add_subcommand("figure", "Preset runs: fig2a, fig2b, fig3, fig4, fig5");
    figure->add_option("name", figure_name, "Figure preset")
        ->required()
        ->check(CLI::IsMember(trapion::cli::figure_names()));
    figure->add_option("-o,--out-dir", figure_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    namespace cli = trapion::cli;
    try {
        if (*coupling) {
            cli::cmd_coupling(coupling_eta, coupling_n_max, coupling_out);
        } else if (*zeros) {
            if (zeros_n0)
                cli::cmd_zeros_for_n(*zeros_n0, zeros_count, zeros_out);
            else if (zeros_eta)
                cli::cmd_zeros_for_eta(*zeros_eta, zeros_n_max, zeros_out);
            else if (zeros_sweep)
                cli::cmd_zeros_sweep(*zeros_sweep, zeros_ceiling, zeros_out);
            else
                throw trapion::ConfigError("zeros: give one of --n0, --eta, --sweep");
        } else if (*rates) {
            cli::cmd_rates(trapion::load_config(rates_config), rates_out);
        } else if (*evolve) {
            cli::cmd_evolve(trapion::load_config(evolve_config), evolve_out);
        } else if (*traj) {
            const auto out = cli::cmd_trajectories(trapion::load_config(traj_config), traj_out);
            const auto& rep = out.ensemble.report;
            if (rep.truncation_hits > 0 || rep.cap_hits > 0)
                std::cerr << "trajectories: " << rep.truncation_hits << " truncation hits, "
                          << rep.cap_hits << " scattering-cap hits\n";
        } else if (*figure) {
            for (const auto& f : cli::cmd_figure(figure_name, figure_out))
                std::cout << f << '\n';
        }
    } catch (const trapion::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const trapion::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
