#pragma once

// Special functions behind the vibronic coupling of a trapped ion:
// generalized Laguerre polynomials, the Franck-Condon coupling f(n;eta),
// displaced-Fock transition probabilities and averages over the dipole
// emission pattern w(s) = 3/8 (1 + s^2).

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace trapion {

inline constexpr int kLaguerreMaxDegree = 1'000'000;

/// Generalized Laguerre polynomial L_n^(alpha)(x) by the ascending
/// three-term recurrence. Exact binomial C(n+alpha, n) at x = 0.
template <std::floating_point T>
T laguerre(int n, int alpha, T x)
{
    if (n < 0 || alpha < 0)
        throw std::domain_error("laguerre: negative degree or order");
    if (n > kLaguerreMaxDegree)
        throw std::domain_error("laguerre: degree " + std::to_string(n) + " above guard");
    if (!(x >= T(0)) || !std::isfinite(x))
        throw std::domain_error("laguerre: argument must be finite and >= 0");

    if (x == T(0)) {
        // C(alpha+k, k) = C(alpha+k-1, k-1) (alpha+k) / k, exact in integers
        T c = 1;
        for (int k = 1; k <= n; ++k)
            c = c * T(alpha + k) / T(k);
        return c;
    }
    if (n == 0)
        return T(1);

    T prev = 1;
    T cur = T(1 + alpha) - x;
    for (int k = 1; k < n; ++k) {
        const T next = ((T(2 * k + 1 + alpha) - x) * cur - T(k + alpha) * prev) / T(k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Diagonal element f(n;eta) = L_n^(1)(eta^2) exp(-eta^2/2) / (n+1) of the
/// nonlinear coupling operator.
template <std::floating_point T>
T coupling_f(int n, T eta)
{
    const T x = eta * eta;
    return laguerre<T>(n, 1, x) * std::exp(-x / 2) / T(n + 1);
}

/// f(n;eta) tabulated for n = 0..n_max at fixed Lamb-Dicke parameter.
struct CouplingProfile {
    double eta = 0.0;
    std::vector<double> values;

    int n_max() const { return static_cast<int>(values.size()) - 1; }
    double operator[](int n) const { return values.at(static_cast<std::size_t>(n)); }
};

/// One recurrence sweep over n; values[n] agrees with coupling_f(n, eta).
inline CouplingProfile tabulate_coupling(double eta, int n_max)
{
    if (n_max < 1)
        throw std::invalid_argument("tabulate_coupling: n_max must be >= 1");
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw std::domain_error("tabulate_coupling: eta must be finite and >= 0");

    CouplingProfile profile;
    profile.eta = eta;
    profile.values.resize(static_cast<std::size_t>(n_max) + 1);

    const double x = eta * eta;
    if (x == 0.0) {
        std::fill(profile.values.begin(), profile.values.end(), 1.0);
        return profile;
    }
    const double damp = std::exp(-x / 2);
    double prev = 1.0;        // L_0^(1)
    double cur = 2.0 - x;     // L_1^(1)
    profile.values[0] = damp;
    profile.values[1] = cur * damp / 2.0;
    for (int k = 1; k < n_max; ++k) {
        const double next = ((2.0 * k + 2.0 - x) * cur - (k + 1.0) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        profile.values[static_cast<std::size_t>(k) + 1] = cur * damp / (k + 2.0);
    }
    return profile;
}

/// |<m| exp(i beta (a + a^dagger)) |n>|^2.
///
/// With p = min(m,n), q = max(m,n), d = q - p:
///   P = exp(-beta^2) beta^(2d) (p!/q!) [L_p^(d)(beta^2)]^2,
/// evaluated in log space so the factorial ratio never overflows.
inline double displacement_prob(int m, int n, double beta)
{
    if (m < 0 || n < 0)
        throw std::domain_error("displacement_prob: negative quantum number");
    if (!std::isfinite(beta))
        throw std::domain_error("displacement_prob: beta must be finite");

    const double x = beta * beta;
    if (x == 0.0)
        return m == n ? 1.0 : 0.0;

    const int p = std::min(m, n);
    const int q = std::max(m, n);
    const int d = q - p;
    const double lag = laguerre<double>(p, d, x);
    if (lag == 0.0)
        return 0.0;

    double log_ratio = 0.0; // log(p!/q!)
    for (int k = p + 1; k <= q; ++k)
        log_ratio -= std::log(static_cast<double>(k));

    return std::exp(-x + d * std::log(x) + log_ratio + 2.0 * std::log(std::abs(lag)));
}

inline constexpr int kDipoleQuadratureOrder = 32;

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::array<double, kDipoleQuadratureOrder> nodes{};
    std::array<double, kDipoleQuadratureOrder> weights{};
};

namespace detail {

inline QuadratureRule make_gauss_legendre()
{
    constexpr int n = kDipoleQuadratureOrder;
    QuadratureRule rule;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace detail

inline const QuadratureRule& gauss_legendre_32()
{
    static const QuadratureRule rule = detail::make_gauss_legendre();
    return rule;
}

/// Dipole emission pattern, normalized on [-1, 1].
inline double dipole_weight(double s) { return 0.375 * (1.0 + s * s); }

/// Integral over [-1, 1] of w(s) g(s) by 32-point Gauss-Legendre.
template <std::invocable<double> G>
double dipole_average(G&& g)
{
    const auto& rule = gauss_legendre_32();
    double sum = 0.0;
    for (int i = 0; i < kDipoleQuadratureOrder; ++i) {
        const double s = rule.nodes[i];
        sum += rule.weights[i] * dipole_weight(s) * static_cast<double>(g(s));
    }
    return sum;
}

} // namespace trapion
