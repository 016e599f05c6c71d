#pragma once

// Deterministic propagation of the vibrational number distribution over
// pump/sideband cycles, P(t_{k+1}) = T P(t_k), with explicit bookkeeping of
// probability lost past the Fock cutoff.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapion/errors.hpp"
#include "trapion/kernel.hpp"

namespace trapion {

struct NumberDistribution {
    std::vector<double> probs;
    double leak = 0.0; // cumulative probability beyond n_max

    int n_max() const { return static_cast<int>(probs.size()) - 1; }
    double total() const
    {
        double s = 0.0;
        for (double p : probs)
            s += p;
        return s;
    }

    static NumberDistribution delta(int n, int n_max)
    {
        if (n < 0 || n > n_max)
            throw std::invalid_argument("NumberDistribution::delta: n outside [0, n_max]");
        NumberDistribution d;
        d.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
        d.probs[static_cast<std::size_t>(n)] = 1.0;
        return d;
    }
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> relvar; // variance / mean, only when mean > 0
    bool truncated = false;       // leak > 0: moments cover the retained support only
};

/// First and second central moments over the retained support, normalized
/// by the retained mass.
inline Moments moments(const NumberDistribution& p)
{
    const double mass = p.total();
    if (!(mass > 0.0))
        throw EmptyDistribution("moments: distribution carries no probability");
    double mean = 0.0;
    for (std::size_t n = 0; n < p.probs.size(); ++n)
        mean += static_cast<double>(n) * p.probs[n];
    mean /= mass;
    double var = 0.0;
    for (std::size_t n = 0; n < p.probs.size(); ++n) {
        const double d = static_cast<double>(n) - mean;
        var += d * d * p.probs[n];
    }
    var /= mass;

    Moments m;
    m.mean = mean;
    m.variance = var;
    if (mean > 0.0)
        m.relvar = var / mean;
    m.truncated = p.leak > 0.0;
    return m;
}

struct MomentRecord {
    int cycle = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> relvar;
    int argmax = 0;
    double pmax = 0.0;
    double leak = 0.0;
};

struct MomentSeries {
    std::vector<MomentRecord> records;
};

inline MomentRecord moment_record(int cycle, const NumberDistribution& p)
{
    const Moments m = moments(p);
    MomentRecord r;
    r.cycle = cycle;
    r.mean = m.mean;
    r.variance = m.variance;
    r.relvar = m.relvar;
    const auto it = std::max_element(p.probs.begin(), p.probs.end());
    r.argmax = static_cast<int>(it - p.probs.begin());
    r.pmax = *it;
    r.leak = p.leak;
    return r;
}

struct Snapshot {
    int cycle = 0;
    NumberDistribution dist;
};

struct EvolveResult {
    std::vector<Snapshot> snapshots;
    MomentSeries series;
};

inline constexpr double kDefaultLeakTolerance = 1e-3;

/// Applies the cycle kernel `cycles` times. Moments are recorded every
/// cycle; snapshots at the listed cycles (sorted, within [0, cycles]).
inline EvolveResult evolve_at(const NumberDistribution& p0, const CycleKernel& kernel, int cycles,
                              const std::vector<int>& checkpoints,
                              double leak_tolerance = kDefaultLeakTolerance)
{
    if (cycles < 0)
        throw std::invalid_argument("evolve: cycles must be >= 0");
    if (p0.n_max() != kernel.n_max())
        throw DimensionMismatch("evolve: distribution covers n <= " + std::to_string(p0.n_max())
                                + " but kernel covers n <= " + std::to_string(kernel.n_max()));

    EvolveResult result;
    NumberDistribution cur = p0;
    std::size_t next_cp = 0;
    auto take_snapshot = [&](int k) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] < k)
            ++next_cp;
        if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
            result.snapshots.push_back({k, cur});
            ++next_cp;
        }
    };

    result.series.records.reserve(static_cast<std::size_t>(cycles) + 1);
    result.series.records.push_back(moment_record(0, cur));
    take_snapshot(0);

    Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(cur.probs.data(),
                                                           static_cast<Eigen::Index>(cur.probs.size()));
    Eigen::VectorXd next(vec.size());
    for (int k = 1; k <= cycles; ++k) {
        double lost = 0.0;
        for (Eigen::Index n = 0; n < vec.size(); ++n)
            lost += kernel.deficit[static_cast<std::size_t>(n)] * vec[n];
        next.noalias() = kernel.matrix * vec;
        vec.swap(next);
        cur.leak += lost;
        std::copy(vec.data(), vec.data() + vec.size(), cur.probs.begin());
        if (cur.leak > leak_tolerance)
            throw LeakExceeded("evolve: truncation leak " + std::to_string(cur.leak)
                               + " exceeds tolerance " + std::to_string(leak_tolerance)
                               + " at cycle " + std::to_string(k) + "; increase n_max");
        result.series.records.push_back(moment_record(k, cur));
        take_snapshot(k);
    }
    return result;
}

/// Snapshots at every multiple of `checkpoint_every` (and the final cycle);
/// checkpoint_every = 0 keeps only the initial and final distributions.
inline EvolveResult evolve(const NumberDistribution& p0, const CycleKernel& kernel, int cycles,
                           int checkpoint_every, double leak_tolerance = kDefaultLeakTolerance)
{
    if (cycles < 0)
        throw std::invalid_argument("evolve: cycles must be >= 0");
    if (checkpoint_every < 0)
        throw std::invalid_argument("evolve: checkpoint_every must be >= 0");
    std::vector<int> cps;
    if (checkpoint_every == 0) {
        cps.push_back(0);
    } else {
        for (int k = 0; k <= cycles; k += checkpoint_every)
            cps.push_back(k);
    }
    if (cps.back() != cycles)
        cps.push_back(cycles);
    return evolve_at(p0, kernel, cycles, cps, leak_tolerance);
}

/// Binomial weights C(k, j) / 2^k, j = 0..k.
/// Built outward from the central term so nothing overflows before underflowing.
inline std::vector<double> binomial_half_row(int k)
{
    if (k < 0)
        throw std::invalid_argument("binomial_half_row: k must be >= 0");
    std::vector<double> row(static_cast<std::size_t>(k) + 1);
    const int m = k / 2;
    double centre = 1.0; // C(2m, m) / 4^m
    for (int i = 1; i <= m; ++i)
        centre *= (2.0 * i - 1.0) / (2.0 * i);
    if (k % 2 == 1)
        centre *= (2.0 * m + 1.0) / (2.0 * (m + 1.0));
    row[static_cast<std::size_t>(m)] = centre;
    for (int j = m; j < k; ++j)
        row[static_cast<std::size_t>(j) + 1] = row[static_cast<std::size_t>(j)] * (k - j) / (j + 1.0);
    for (int j = m; j > 0; --j)
        row[static_cast<std::size_t>(j) - 1] = row[static_cast<std::size_t>(j)] * j / (k - j + 1.0);
    return row;
}

/// Exact solution of P_n(t_{k+1}) = (P_n(t_k) + P_{n-1}(t_k)) / 2:
///   P_n(t_k) = sum_l C(k, n-l) 2^-k P_l(t_0).
/// Mass that would land beyond n_max is added to the leak.
inline NumberDistribution binomial_closed_form(const NumberDistribution& p0, int k)
{
    if (k < 0)
        throw std::invalid_argument("binomial_closed_form: k must be >= 0");
    if (k == 0)
        return p0;
    const auto row = binomial_half_row(k);
    const int n_max = p0.n_max();
    NumberDistribution out;
    out.probs.assign(p0.probs.size(), 0.0);
    out.leak = p0.leak;
    for (int l = 0; l <= n_max; ++l) {
        const double pl = p0.probs[static_cast<std::size_t>(l)];
        if (pl == 0.0)
            continue;
        for (int j = 0; j <= k; ++j) {
            const double w = row[static_cast<std::size_t>(j)] * pl;
            if (l + j <= n_max)
                out.probs[static_cast<std::size_t>(l + j)] += w;
            else
                out.leak += w;
        }
    }
    return out;
}

/// Default Fock cutoff: eight times the expected final mean plus 50.
inline int default_n_max(double expected_final_mean)
{
    return static_cast<int>(std::ceil(8.0 * std::max(0.0, expected_final_mean))) + 50;
}

} // namespace trapion
