#pragma once

// Per-cycle excitation (n -> n+1) and survival (n -> n) probabilities of the
// red-sideband interaction, coherent and dephasing-dominated.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "trapion/specfun.hpp"

namespace trapion {

enum class Regime { coherent, incoherent };

struct TransitionRates {
    Regime regime = Regime::incoherent;
    std::vector<double> up;   // w(n+1|n)
    std::vector<double> stay; // w(n|n) == 1 - up[n]
    double eta = 0.0;
    std::optional<double> pulse_area; // coherent: |Omega_s| tau_s
    std::optional<double> G;          // incoherent: gamma s tau_s

    int n_max() const { return static_cast<int>(up.size()) - 1; }
};

namespace detail {

/// sin^2(theta), exactly zero when theta is an integer multiple of pi up to
/// a few ulps of rounding in theta.
inline double sin_squared_snapped(double theta)
{
    const double k = std::round(theta / std::numbers::pi);
    const double r = theta - k * std::numbers::pi;
    if (std::abs(r) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(theta))
        return 0.0;
    const double s = std::sin(r);
    return s * s;
}

inline void fill_stay(TransitionRates& rates)
{
    rates.stay.resize(rates.up.size());
    for (std::size_t n = 0; n < rates.up.size(); ++n)
        rates.stay[n] = 1.0 - rates.up[n];
}

} // namespace detail

/// up[n] = sin^2( area f(n;eta) sqrt(n+1) / 2 ).
inline TransitionRates coherent_rates(const CouplingProfile& profile, double pulse_area)
{
    if (!(pulse_area >= 0.0) || !std::isfinite(pulse_area))
        throw std::invalid_argument("coherent_rates: pulse area must be finite and >= 0");
    TransitionRates rates;
    rates.regime = Regime::coherent;
    rates.eta = profile.eta;
    rates.pulse_area = pulse_area;
    rates.up.resize(profile.values.size());
    for (std::size_t n = 0; n < profile.values.size(); ++n) {
        const double theta = 0.5 * pulse_area * profile.values[n] * std::sqrt(n + 1.0);
        rates.up[n] = detail::sin_squared_snapped(theta);
    }
    detail::fill_stay(rates);
    return rates;
}

/// Dimensionless damping exponent gamma_n(eta) tau_s = 2 G (n+1) f(n;eta)^2,
/// G being the saturation-time product gamma s tau_s.
inline double gamma_n(int n, double eta, double G)
{
    const double f = coupling_f(n, eta);
    return 2.0 * G * (n + 1.0) * f * f;
}

/// up[n] = (1 - exp(-gamma_n tau_s)) / 2.
inline TransitionRates incoherent_rates(const CouplingProfile& profile, double G)
{
    if (!(G >= 0.0))
        throw std::invalid_argument("incoherent_rates: G must be >= 0");
    TransitionRates rates;
    rates.regime = Regime::incoherent;
    rates.eta = profile.eta;
    rates.G = G;
    rates.up.resize(profile.values.size());
    for (std::size_t n = 0; n < profile.values.size(); ++n) {
        const double f = profile.values[n];
        const double exponent = 2.0 * G * (n + 1.0) * f * f;
        rates.up[n] = 0.5 * (1.0 - std::exp(-exponent));
    }
    detail::fill_stay(rates);
    return rates;
}

/// Saturation-time product G = gamma s tau_s with s = 2 |Omega_s|^2 / gamma^2.
inline double saturation_time_product(double omega_s, double gamma, double tau_s)
{
    if (!(gamma > 0.0))
        throw std::invalid_argument("saturation_time_product: gamma must be > 0");
    const double s = 2.0 * omega_s * omega_s / (gamma * gamma);
    return gamma * s * tau_s;
}

/// Whether |Omega_s| < gamma < nu holds; writes a warning to `warn` when it does not.
/// The incoherent rates are still evaluated outside the window.
inline bool check_incoherent_window(double omega_s, double gamma, double nu, std::ostream* warn)
{
    const bool ok = std::abs(omega_s) < gamma && gamma < nu;
    if (!ok && warn)
        *warn << "warning: incoherent regime requires |Omega_s| < gamma < nu (got |Omega_s| = "
              << std::abs(omega_s) << ", gamma = " << gamma << ", nu = " << nu << ")\n";
    return ok;
}

} // namespace trapion
