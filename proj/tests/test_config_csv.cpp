#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "trapion/config.hpp"
#include "trapion/csv.hpp"
#include "trapion/engine.hpp"
#include "trapion/trapping.hpp"

using namespace trapion;

namespace {

const char* kIncoherent = R"(
# incoherent run with pump recoil
regime = incoherent
eta = 0.268
G = 10
n_max = 300
cycles = 200
checkpoints = 0, 50, 100, 200
seed = 12345

[recoil]
enabled = true
eta1 = 0.142
eta2 = 0.142
)";

} // namespace

TEST(Config, ParsesIncoherentWithSection)
{
    const auto cfg = parse_config(kIncoherent);
    EXPECT_EQ(cfg.regime, Regime::incoherent);
    EXPECT_EQ(cfg.eta, 0.268);
    ASSERT_TRUE(cfg.G.has_value());
    EXPECT_EQ(*cfg.G, 10.0);
    EXPECT_EQ(cfg.n_max, 300);
    EXPECT_EQ(cfg.cycles, 200);
    EXPECT_EQ(cfg.checkpoints, (std::vector<int>{0, 50, 100, 200}));
    EXPECT_EQ(cfg.seed, 12345u);
    EXPECT_TRUE(cfg.recoil.enabled);
    EXPECT_EQ(cfg.recoil.eta1, 0.142);
    EXPECT_DOUBLE_EQ(cfg.recoil.gamma1_over_gamma2, 9.5 / 3.3);
    EXPECT_EQ(cfg.leak_tolerance, 1e-3);
}

TEST(Config, DottedKeysEquivalentToSections)
{
    const auto cfg = parse_config("regime = incoherent\neta = 0.1\nG = 2\nrecoil.enabled = yes\n"
                                  "recoil.gamma1_over_gamma2 = 2.5\n");
    EXPECT_TRUE(cfg.recoil.enabled);
    EXPECT_EQ(cfg.recoil.gamma1_over_gamma2, 2.5);
}

TEST(Config, CoherentWithDerivedEtaAndArea)
{
    const auto cfg = parse_config("regime = coherent\neta.trap_n0 = 50\npulse_area.trap_n0 = 20\n"
                                  "pulse_area.m = 2\ninitial.delta_n = 3\n");
    EXPECT_EQ(cfg.regime, Regime::coherent);
    EXPECT_EQ(cfg.eta_trap_n0, 50);
    EXPECT_EQ(cfg.pulse_area_trap_n0, 20);
    EXPECT_EQ(cfg.pulse_area_m, 2);
    EXPECT_EQ(cfg.initial.delta_n, 3);
}

TEST(Config, Rejections)
{
    const char* bad[] = {
        "eta = 0.1\nG = 1\n",                                        // missing regime
        "regime = sideways\neta = 0.1\nG = 1\n",                     // unknown regime
        "regime = incoherent\nG = 1\n",                              // no eta
        "regime = incoherent\neta = 0.1\neta.trap_n0 = 50\nG = 1\n", // both eta forms
        "regime = incoherent\neta = 0.1\n",                          // no G
        "regime = incoherent\neta = 0.1\nG = 1\npulse_area = 2\n",   // wrong regime key
        "regime = coherent\neta = 0.1\n",                            // no pulse area
        "regime = coherent\neta = 0.1\npulse_area = 1\nG = 1\n",     // G in coherent
        "regime = incoherent\neta = -0.1\nG = 1\n",
        "regime = incoherent\neta = 0.1\nG = -1\n",
        "regime = incoherent\neta = 0.1\nG = 1\nrecoil.eta1 = -1\n",
        "regime = incoherent\neta = 0.1\nG = 1\nrecoil.gamma1_over_gamma2 = 0\n",
        "regime = incoherent\neta = 0.1\nG = 1\nn_max = 0\n",
        "regime = incoherent\neta = 0.1\nG = 1\ncycles = 5\ncheckpoints = 3, 1\n",
        "regime = incoherent\neta = 0.1\nG = 1\ncycles = 5\ncheckpoints = 9\n",
        "regime = incoherent\neta = 0.1\nG = 1\nbogus = 3\n",
        "regime = incoherent\neta = 0.1\neta = 0.2\nG = 1\n",
        "regime = incoherent\neta = abc\nG = 1\n",
        "regime = incoherent\neta = 0.1\nG = 1\ncycles = 2.5\n",
        "regime = incoherent\neta = 0.1\nG = 1\nrecoil.enabled = maybe\n",
        "regime = incoherent\neta = 0.1\nG = 1\n[recoil\n",
        "regime incoherent\n",
        "regime = incoherent\neta = 0.1\nG = 1\ninitial.delta_n = 1\ninitial.file = x.csv\n",
        "regime = incoherent\neta = 0.1\nG = 1\ntrajectories = 0\n",
        "regime = incoherent\neta.trap_n0 = 5\neta.root_index = 6\nG = 1\n",
    };
    for (const char* text : bad)
        EXPECT_THROW(parse_config(text), ConfigError) << text;
}

TEST(Config, MissingFile)
{
    EXPECT_THROW(load_config("/nonexistent/dir/exp.cfg"), ConfigError);
}

TEST(Csv, PrecisionDefaultAndOverride)
{
    unsetenv(csv::kPrecisionEnv);
    EXPECT_EQ(csv::output_precision(), 9);
    EXPECT_EQ(csv::fmt(1.0 / 3.0, csv::output_precision()), "0.333333333");
    setenv(csv::kPrecisionEnv, "17", 1);
    EXPECT_EQ(csv::output_precision(), 17);
    setenv(csv::kPrecisionEnv, "99", 1);
    EXPECT_EQ(csv::output_precision(), 9);
    setenv(csv::kPrecisionEnv, "x", 1);
    EXPECT_EQ(csv::output_precision(), 9);
    unsetenv(csv::kPrecisionEnv);
}

TEST(Csv, ParseErrors)
{
    EXPECT_THROW(csv::parse(""), ConfigError);
    EXPECT_THROW(csv::parse("a,b\n1\n"), ConfigError);
    EXPECT_THROW(csv::parse("a,b\n1,2\n").column("c"), ConfigError);
}

TEST(CsvRoundTrip, Coupling)
{
    setenv(csv::kPrecisionEnv, "17", 1);
    const auto p = tabulate_coupling(0.268, 120);
    const auto back = csv::read_coupling(csv::write_coupling(p), p.eta);
    EXPECT_EQ(back.values, p.values);
    unsetenv(csv::kPrecisionEnv);

    const auto coarse = csv::read_coupling(csv::write_coupling(p), p.eta);
    ASSERT_EQ(coarse.values.size(), p.values.size());
    for (std::size_t i = 0; i < p.values.size(); ++i)
        EXPECT_NEAR(coarse.values[i], p.values[i], 1e-9 * std::max(1.0, std::abs(p.values[i])));
}

TEST(CsvRoundTrip, Rates)
{
    setenv(csv::kPrecisionEnv, "17", 1);
    const auto r = incoherent_rates(tabulate_coupling(0.268, 80), 10.0);
    const auto back = csv::read_rates(csv::write_rates(r), Regime::incoherent);
    EXPECT_EQ(back.up, r.up);
    EXPECT_EQ(back.stay, r.stay);
    unsetenv(csv::kPrecisionEnv);
}

TEST(CsvRoundTrip, SnapshotsMomentsAndDistribution)
{
    setenv(csv::kPrecisionEnv, "17", 1);
    TransitionRates rates;
    rates.up.assign(31, 0.5);
    rates.stay.assign(31, 0.5);
    const auto res = evolve(NumberDistribution::delta(0, 30), cycle_kernel(rates), 40, 10, 1.0);

    const auto snaps = csv::read_snapshots(csv::write_snapshots(res.snapshots));
    ASSERT_EQ(snaps.size(), res.snapshots.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        EXPECT_EQ(snaps[i].cycle, res.snapshots[i].cycle);
        EXPECT_EQ(snaps[i].dist.probs, res.snapshots[i].dist.probs);
    }

    const auto series = csv::read_moments(csv::write_moments(res.series));
    ASSERT_EQ(series.records.size(), res.series.records.size());
    for (std::size_t i = 0; i < series.records.size(); ++i) {
        const auto& a = series.records[i];
        const auto& b = res.series.records[i];
        EXPECT_EQ(a.cycle, b.cycle);
        EXPECT_EQ(a.mean, b.mean);
        EXPECT_EQ(a.variance, b.variance);
        EXPECT_EQ(a.relvar, b.relvar);
        EXPECT_EQ(a.argmax, b.argmax);
        EXPECT_EQ(a.pmax, b.pmax);
        EXPECT_EQ(a.leak, b.leak);
    }
    EXPECT_FALSE(series.records[0].relvar.has_value());

    const auto& last = res.snapshots.back().dist;
    const auto d = csv::read_distribution(csv::write_distribution(last), last.n_max());
    EXPECT_EQ(d.probs, last.probs);
    unsetenv(csv::kPrecisionEnv);
}

TEST(CsvRoundTrip, Fig5)
{
    setenv(csv::kPrecisionEnv, "17", 1);
    const auto rows = fig5_dataset(20, 1.0);
    const auto back = csv::read_fig5(csv::write_fig5(rows));
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].n0, rows[i].n0);
        EXPECT_EQ(back[i].eta, rows[i].eta);
        EXPECT_EQ(back[i].root_index, rows[i].root_index);
    }
    unsetenv(csv::kPrecisionEnv);
}

TEST(Csv, SparseDistributionInput)
{
    const auto d = csv::read_distribution("n,prob\n2,0.25\n5,0.75\n", 8);
    EXPECT_EQ(d.probs.size(), 9u);
    EXPECT_EQ(d.probs[2], 0.25);
    EXPECT_EQ(d.probs[5], 0.75);
    EXPECT_THROW(csv::read_distribution("n,prob\n9,1\n", 8), ConfigError);
    EXPECT_THROW(csv::read_distribution("n,prob\n1,-0.5\n", 8), ConfigError);
}

TEST(Csv, FileHelpers)
{
    const auto path = (std::filesystem::temp_directory_path() / "trapion_csv_helper.csv").string();
    csv::write_file(path, "n,f\n0,1\n");
    EXPECT_EQ(csv::read_file(path), "n,f\n0,1\n");
    std::filesystem::remove(path);
    EXPECT_THROW(csv::read_file(path), ConfigError);
    EXPECT_THROW(csv::write_file("/nonexistent/dir/x.csv", "x"), std::runtime_error);
}
