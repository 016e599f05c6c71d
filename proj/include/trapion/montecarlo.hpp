#pragma once

// Single-ion trajectory sampling through the same cycle model as the engine,
// drawn event by event: a Bernoulli sideband step, a geometric number of
// pump scatterings back to |1>, and dipole-distributed recoil kicks.
// Serves as an independent check on the deterministic kernels.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapion/engine.hpp"
#include "trapion/errors.hpp"
#include "trapion/parallel.hpp"
#include "trapion/rates.hpp"
#include "trapion/specfun.hpp"

namespace trapion {

/// Random stream for trajectory `index`, derived from the master seed alone
/// so any trajectory can be replayed without generating the others.
class TrajectoryStream {
public:
    TrajectoryStream(std::uint64_t master_seed, std::uint64_t index)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                          static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Inverse CDF of w(s) = 3/8 (1 + s^2) on [-1, 1]. F(s) = u reduces to
/// s^3 + 3 s = 8 (u - 1/2), whose real root is 2 sinh(asinh(4 (u - 1/2)) / 3).
inline double sample_dipole_s(double uniform)
{
    const double c = 4.0 * (uniform - 0.5);
    double s = 2.0 * std::sinh(std::asinh(c) / 3.0);
    // one Newton step on s^3 + 3s - 2c
    s -= (s * s * s + 3.0 * s - 2.0 * c) / (3.0 * s * s + 3.0);
    return s;
}

/// Mass within [0, n_max] below which a recoil draw counts as truncated.
inline constexpr double kTruncationMass = 1.0 - 1e-9;

/// Draws s from the dipole pattern, then m from |<m|exp(i s beta (a+a^dagger))|n>|^2
/// by an inverse-CDF walk visiting n, n+1, n-1, n+2, n-2, ...
inline int sample_recoil(int n, double beta, int n_max, TrajectoryStream& rng)
{
    if (beta == 0.0)
        return n;
    const double kick = sample_dipole_s(rng.uniform()) * beta;
    const double u = rng.uniform();

    double cum = 0.0;
    for (int d = 0; n + d <= n_max || n - d >= 0; ++d) {
        if (n + d <= n_max) {
            cum += displacement_prob(n + d, n, kick);
            if (u < cum)
                return n + d;
        }
        if (d > 0 && n - d >= 0) {
            cum += displacement_prob(n - d, n, kick);
            if (u < cum)
                return n - d;
        }
    }
    if (cum >= kTruncationMass)
        return n; // u fell in the rounding gap of a complete distribution
    throw TruncationHit("sample_recoil: displaced distribution of n = " + std::to_string(n)
                        + " extends beyond n_max = " + std::to_string(n_max));
}

struct RecoilParams {
    bool enabled = false;
    double eta1 = 0.0;     // kick of |3> -> |1> emissions
    double eta2 = 0.0;     // kick of the terminating |3> -> |2> emission
    double branch_p1 = 0.0; // gamma1 / (gamma1 + gamma2)

    static RecoilParams from_ratio(double eta1, double eta2, double gamma1_over_gamma2)
    {
        if (!(gamma1_over_gamma2 > 0.0))
            throw std::invalid_argument("RecoilParams: gamma1/gamma2 must be > 0");
        return {true, eta1, eta2, gamma1_over_gamma2 / (1.0 + gamma1_over_gamma2)};
    }
};

inline constexpr int kScatteringCap = 10'000;

struct CycleCounters {
    std::uint64_t cap_hits = 0;
};

/// One pump + sideband cycle for a single ion in |2>|n>.
inline int sample_cycle(int n, const TransitionRates& rates, const RecoilParams& recoil, int n_max,
                        TrajectoryStream& rng, CycleCounters& counters)
{
    if (n < 0 || n > rates.n_max())
        throw TruncationHit("sample_cycle: n = " + std::to_string(n) + " outside tabulated rates");
    if (!(rng.uniform() < rates.up[static_cast<std::size_t>(n)]))
        return n;
    int m = n + 1;
    if (m > n_max)
        throw TruncationHit("sample_cycle: sideband step beyond n_max = " + std::to_string(n_max));
    if (!recoil.enabled)
        return m;

    int returns = 0;
    while (rng.uniform() < recoil.branch_p1) {
        if (++returns >= kScatteringCap) {
            ++counters.cap_hits;
            break;
        }
    }
    for (int i = 0; i < returns; ++i)
        m = sample_recoil(m, recoil.eta1, n_max, rng);
    return sample_recoil(m, recoil.eta2, n_max, rng);
}

struct TrajectoryConfig {
    TransitionRates rates;
    RecoilParams recoil;
    NumberDistribution initial;
    int cycles = 0;
    int n_trajectories = 1;
    std::uint64_t master_seed = 0;
    std::vector<int> checkpoints;
    unsigned threads = 0; // 0: one per hardware thread; results do not depend on it

    int n_max() const { return rates.n_max(); }
};

struct RunReport {
    std::uint64_t n_trajectories = 0;
    std::uint64_t truncation_hits = 0;
    std::uint64_t cap_hits = 0;
    std::uint64_t failed_trajectories = 0;
};

struct EnsembleResult {
    std::vector<Snapshot> snapshots; // empirical distributions, leak = failed fraction
    MomentSeries series;
    RunReport report;
};

namespace detail {

inline int sample_initial(const NumberDistribution& p, TrajectoryStream& rng)
{
    const double u = rng.uniform() * p.total();
    double cum = 0.0;
    for (std::size_t n = 0; n < p.probs.size(); ++n) {
        cum += p.probs[n];
        if (u < cum)
            return static_cast<int>(n);
    }
    for (std::size_t n = p.probs.size(); n-- > 0;)
        if (p.probs[n] > 0.0)
            return static_cast<int>(n);
    throw EmptyDistribution("run_ensemble: initial distribution is empty");
}

} // namespace detail

/// Runs n_trajectories independent ions. Histograms are integer counts, so
/// the result depends only on (master_seed, n_trajectories), not on threading.
inline EnsembleResult run_ensemble(const TrajectoryConfig& cfg)
{
    if (cfg.n_trajectories < 1)
        throw std::invalid_argument("run_ensemble: n_trajectories must be >= 1");
    if (cfg.cycles < 0)
        throw std::invalid_argument("run_ensemble: cycles must be >= 0");
    for (std::size_t i = 1; i < cfg.checkpoints.size(); ++i)
        if (cfg.checkpoints[i] < cfg.checkpoints[i - 1])
            throw std::invalid_argument("run_ensemble: checkpoints must be sorted");
    if (cfg.initial.n_max() != cfg.n_max())
        throw DimensionMismatch("run_ensemble: initial distribution and rates differ in n_max");

    const int n_max = cfg.n_max();
    const auto width = static_cast<std::size_t>(n_max) + 1;
    const auto rows = static_cast<std::size_t>(cfg.cycles) + 1;
    const auto n_traj = static_cast<std::size_t>(cfg.n_trajectories);

    struct Partial {
        std::vector<std::uint32_t> counts; // rows x width
        RunReport report;
    };
    const unsigned workers = detail::worker_count(n_traj, cfg.threads);
    std::vector<Partial> partials(workers);
    for (auto& part : partials)
        part.counts.assign(rows * width, 0);

    detail::parallel_for(workers, [&](std::size_t w) {
        Partial& part = partials[w];
        for (std::size_t i = w; i < n_traj; i += workers) {
            TrajectoryStream rng(cfg.master_seed, i);
            CycleCounters counters;
            int n = detail::sample_initial(cfg.initial, rng);
            ++part.counts[static_cast<std::size_t>(n)];
            for (std::size_t k = 1; k < rows; ++k) {
                try {
                    n = sample_cycle(n, cfg.rates, cfg.recoil, n_max, rng, counters);
                } catch (const TruncationHit&) {
                    ++part.report.truncation_hits;
                    ++part.report.failed_trajectories;
                    break;
                }
                ++part.counts[k * width + static_cast<std::size_t>(n)];
            }
            part.report.cap_hits += counters.cap_hits;
        }
    }, workers);

    std::vector<std::uint64_t> counts(rows * width, 0);
    EnsembleResult result;
    result.report.n_trajectories = n_traj;
    for (const auto& part : partials) {
        for (std::size_t j = 0; j < counts.size(); ++j)
            counts[j] += part.counts[j];
        result.report.truncation_hits += part.report.truncation_hits;
        result.report.cap_hits += part.report.cap_hits;
        result.report.failed_trajectories += part.report.failed_trajectories;
    }

    std::size_t next_cp = 0;
    const double inv = 1.0 / static_cast<double>(n_traj);
    for (std::size_t k = 0; k < rows; ++k) {
        NumberDistribution dist;
        dist.probs.resize(width);
        double kept = 0.0;
        for (std::size_t n = 0; n < width; ++n) {
            dist.probs[n] = static_cast<double>(counts[k * width + n]) * inv;
            kept += static_cast<double>(counts[k * width + n]);
        }
        dist.leak = (static_cast<double>(n_traj) - kept) * inv;
        if (kept > 0.0)
            result.series.records.push_back(moment_record(static_cast<int>(k), dist));
        while (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] < static_cast<int>(k))
            ++next_cp;
        if (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] == static_cast<int>(k)) {
            result.snapshots.push_back({static_cast<int>(k), std::move(dist)});
            ++next_cp;
        }
    }
    return result;
}

/// Total-variation distance, counting leaked mass as one extra outcome.
inline double total_variation(const NumberDistribution& a, const NumberDistribution& b)
{
    if (a.probs.size() != b.probs.size())
        throw DimensionMismatch("total_variation: supports differ");
    double sum = std::abs(a.leak - b.leak);
    for (std::size_t n = 0; n < a.probs.size(); ++n)
        sum += std::abs(a.probs[n] - b.probs[n]);
    return 0.5 * sum;
}

} // namespace trapion
