#pragma once

// Trapping-state conditions: pulse areas for micro-maser-type trapping and
// Lamb-Dicke parameters at which the coupling f(n0;eta) vanishes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapion/errors.hpp"
#include "trapion/specfun.hpp"

namespace trapion {

/// Below this |f(n0;eta)| the pulse-area condition is singular.
inline constexpr double kDegenerateCoupling = 1e-8;

/// First zero of the Bessel function J_1.
inline constexpr double kBesselJ1FirstZero = 3.8317059702075123;

enum class TrappingKind { pulse_area, coupling_zero };

struct TrappingSolution {
    int n0 = 0;
    double eta = 0.0;
    TrappingKind kind = TrappingKind::coupling_zero;
    std::optional<double> pulse_area; // |Omega_s| tau_s in radians
    double residual = 0.0;
};

/// Pulse area |Omega_s| tau_s = 2 pi m / (|f(n0;eta)| sqrt(n0+1)) completing
/// m full Rabi cycles out of |n0>.
inline double pulse_area_for_state(int n0, double eta, int m)
{
    if (n0 < 0)
        throw std::invalid_argument("pulse_area_for_state: n0 must be >= 0");
    if (m < 1)
        throw std::invalid_argument("pulse_area_for_state: m must be a positive integer");
    const double f = coupling_f(n0, eta);
    if (std::abs(f) <= kDegenerateCoupling)
        throw DegenerateCoupling("pulse_area_for_state: f(" + std::to_string(n0) + ";eta) = "
                                 + std::to_string(f)
                                 + " vanishes; the state already traps by coupling zero");
    return 2.0 * std::numbers::pi * m / (std::abs(f) * std::sqrt(n0 + 1.0));
}

inline TrappingSolution pulse_area_solution(int n0, double eta, int m)
{
    TrappingSolution sol;
    sol.n0 = n0;
    sol.eta = eta;
    sol.kind = TrappingKind::pulse_area;
    sol.pulse_area = pulse_area_for_state(n0, eta, m);
    const double f = coupling_f(n0, eta);
    sol.residual = std::abs(std::sin(*sol.pulse_area * f * std::sqrt(n0 + 1.0) / 2.0));
    return sol;
}

namespace detail {

/// Estimate of the smallest positive root (in x = eta^2) of L_n^(1)(x),
/// from the Bessel asymptotics f ~ 2 J_1(2 eta sqrt(n+1)) / (2 eta sqrt(n+1)).
inline double first_root_estimate(int n0)
{
    return kBesselJ1FirstZero * kBesselJ1FirstZero / (4.0 * n0 + 4.0);
}

/// Bisection on eta over a bracket [lo, hi] of a sign change of L_n0^(1)(eta^2).
inline double bisect_eta(int n0, double lo, double hi)
{
    auto g = [n0](double eta) { return laguerre<double>(n0, 1, eta * eta); };
    double glo = g(lo);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double gmid = g(mid);
        if (gmid == 0.0)
            return mid;
        if ((gmid < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Positive roots of L_n0^(1)(eta^2) with eta <= eta_max, at most `limit` of them.
inline std::vector<double> scan_eta_roots(int n0, double eta_max, std::size_t limit)
{
    std::vector<double> roots;
    if (limit == 0)
        return roots;
    // all zeros of L_n^(1) lie below 4n + 6
    const double x_max = std::min(eta_max * eta_max, 4.0 * n0 + 6.0);
    const double step = first_root_estimate(n0) / 50.0;

    double x_lo = 0.0;
    double g_lo = laguerre<double>(n0, 1, 0.0);
    while (x_lo < x_max && roots.size() < limit) {
        const double x_hi = std::min(x_lo + step, x_max);
        const double g_hi = laguerre<double>(n0, 1, x_hi);
        if (g_hi == 0.0) {
            roots.push_back(std::sqrt(x_hi));
            // step past the exact zero so it is not bracketed twice
            x_lo = x_hi + step * 1e-6;
            g_lo = laguerre<double>(n0, 1, x_lo);
            continue;
        }
        if ((g_lo < 0.0) != (g_hi < 0.0))
            roots.push_back(bisect_eta(n0, std::sqrt(x_lo), std::sqrt(x_hi)));
        x_lo = x_hi;
        g_lo = g_hi;
    }
    return roots;
}

} // namespace detail

/// The `count` smallest positive eta with f(n0;eta) = 0, ascending.
inline std::vector<double> eta_zeros_for_n(int n0, int count)
{
    if (n0 == 0)
        throw NoZeros("eta_zeros_for_n: L_0^(1) has no zeros");
    if (n0 < 0)
        throw std::invalid_argument("eta_zeros_for_n: n0 must be >= 1");
    if (count < 1 || count > n0)
        throw std::invalid_argument("eta_zeros_for_n: count must lie in [1, n0]");

    auto roots = detail::scan_eta_roots(n0, std::sqrt(4.0 * n0 + 6.0),
                                        static_cast<std::size_t>(count));
    if (roots.size() < static_cast<std::size_t>(count))
        throw NonConvergent("eta_zeros_for_n: bracketing found only "
                            + std::to_string(roots.size()) + " roots");
    return roots;
}

inline std::vector<TrappingSolution> coupling_zero_solutions(int n0, int count)
{
    std::vector<TrappingSolution> out;
    for (double eta : eta_zeros_for_n(n0, count)) {
        TrappingSolution sol;
        sol.n0 = n0;
        sol.eta = eta;
        sol.kind = TrappingKind::coupling_zero;
        sol.residual = std::abs(coupling_f(n0, eta));
        out.push_back(sol);
    }
    return out;
}

/// Integer trapping numbers at fixed eta: every sign change of f(n;eta)
/// between n and n+1 contributes the member with smaller |f|.
inline std::vector<int> trapping_numbers_for_eta(double eta, int n_max)
{
    if (n_max < 1)
        throw std::invalid_argument("trapping_numbers_for_eta: n_max must be >= 1");
    if (!(eta > 0.0))
        throw std::invalid_argument("trapping_numbers_for_eta: eta must be > 0");

    const auto profile = tabulate_coupling(eta, n_max + 1);
    std::vector<int> out;
    for (int n = 0; n < n_max + 1; ++n) {
        const double a = profile[n];
        const double b = profile[n + 1];
        if (a * b > 0.0)
            continue;
        const int pick = std::abs(a) <= std::abs(b) ? n : n + 1;
        if (pick > n_max)
            continue;
        if (out.empty() || out.back() != pick)
            out.push_back(pick);
    }
    return out;
}

struct Fig5Row {
    int n0 = 0;
    double eta = 0.0;
    int root_index = 0; // 1-based
};

inline constexpr double kDefaultEtaCeiling = 1.0;

/// All (n0, eta) pairs with f(n0;eta) = 0 for n0 in [1, n0_max], eta <= ceiling.
inline std::vector<Fig5Row> fig5_dataset(int n0_max, double eta_ceiling = kDefaultEtaCeiling)
{
    if (n0_max < 1)
        throw std::invalid_argument("fig5_dataset: n0_max must be >= 1");
    std::vector<Fig5Row> rows;
    for (int n0 = 1; n0 <= n0_max; ++n0) {
        const auto roots = detail::scan_eta_roots(n0, eta_ceiling, static_cast<std::size_t>(n0));
        for (std::size_t i = 0; i < roots.size(); ++i)
            rows.push_back({n0, roots[i], static_cast<int>(i) + 1});
    }
    return rows;
}

} // namespace trapion
