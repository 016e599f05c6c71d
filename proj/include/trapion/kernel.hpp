#pragma once

// Population-level transition operators over the truncated Fock basis
// 0..n_max. All matrices are column-stochastic up to truncation: column n
// holds the distribution of the next quantum number given n, and the column
// deficit is probability lost past n_max.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapion/errors.hpp"
#include "trapion/parallel.hpp"
#include "trapion/rates.hpp"
#include "trapion/specfun.hpp"

namespace trapion {

using Matrix = Eigen::MatrixXd;

enum class RecoilKind { single_emission, pump_composite };

struct RecoilKernel {
    Matrix matrix; // K(m|n) = matrix(m, n)
    double beta = 0.0;
    RecoilKind description = RecoilKind::single_emission;

    int n_max() const { return static_cast<int>(matrix.cols()) - 1; }
};

/// Half-width of the row band kept around the diagonal of a recoil column.
/// Mass outside is far below double precision for the kicks considered.
inline int recoil_band(double beta, int n)
{
    return 50 + static_cast<int>(std::ceil(10.0 * (beta * beta + beta)))
         + static_cast<int>(std::ceil(8.0 * beta * std::sqrt(2.0 * n + 1.0)));
}

/// K(m|n) = int ds w(s) |<m| exp(i s beta (a + a^dagger)) |n>|^2 for one
/// spontaneous photon emitted with the dipole pattern.
inline RecoilKernel single_emission_kernel(double beta, int n_max)
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("single_emission_kernel: beta must be finite and >= 0");
    if (n_max < 0)
        throw std::invalid_argument("single_emission_kernel: n_max must be >= 0");

    RecoilKernel kernel;
    kernel.beta = beta;
    kernel.description = RecoilKind::single_emission;
    const auto size = static_cast<Eigen::Index>(n_max) + 1;
    if (beta == 0.0) {
        kernel.matrix = Matrix::Identity(size, size);
        return kernel;
    }
    kernel.matrix = Matrix::Zero(size, size);
    detail::parallel_for(static_cast<std::size_t>(size), [&](std::size_t col) {
        const int n = static_cast<int>(col);
        const int band = recoil_band(beta, n);
        const int lo = std::max(0, n - band);
        const int hi = std::min(n_max, n + band);
        for (int m = lo; m <= hi; ++m) {
            kernel.matrix(m, n) =
                dipole_average([&](double s) { return displacement_prob(m, n, s * beta); });
        }
    });
    return kernel;
}

enum class PumpMethod { linear_solve, geometric_series };

inline constexpr double kSeriesTolerance = 1e-12;

/// Composite recoil of one optical-pumping sequence: k >= 0 emissions back
/// to |1> (probability p1 each, kick eta1) and one terminating emission to
/// |2> (probability p2 = 1 - p1, kick eta2):
///   R = sum_k p1^k p2 K(eta1)^k K(eta2),
/// i.e. the solution X of (I - p1 K1) X = p2 K2.
inline RecoilKernel pump_kernel(double eta1, double eta2, double branch_p1, int n_max,
                                PumpMethod method = PumpMethod::linear_solve)
{
    if (!(branch_p1 >= 0.0))
        throw std::invalid_argument("pump_kernel: branching probability must be >= 0");
    if (branch_p1 >= 1.0)
        throw NonConvergent("pump_kernel: branching probability back to |1> must be < 1");

    const double p1 = branch_p1;
    const double p2 = 1.0 - p1;
    const RecoilKernel k2 = single_emission_kernel(eta2, n_max);
    const RecoilKernel k1 = eta1 == eta2 ? k2 : single_emission_kernel(eta1, n_max);

    RecoilKernel out;
    out.beta = eta2;
    out.description = RecoilKind::pump_composite;

    if (p1 == 0.0) {
        out.matrix = k2.matrix;
        return out;
    }

    const auto size = k1.matrix.rows();
    if (method == PumpMethod::linear_solve) {
        const Matrix system = Matrix::Identity(size, size) - p1 * k1.matrix;
        out.matrix = system.partialPivLu().solve(p2 * k2.matrix);
        // rounding in the solve can leave entries of order -1e-20
        out.matrix = out.matrix.cwiseMax(0.0);
        return out;
    }

    Matrix term = p2 * k2.matrix;
    out.matrix = term;
    for (int iter = 0;; ++iter) {
        if (iter > 100000)
            throw NonConvergent("pump_kernel: geometric series did not converge");
        term = p1 * (k1.matrix * term);
        out.matrix += term;
        if (term.cwiseAbs().colwise().sum().maxCoeff() < kSeriesTolerance)
            break;
    }
    return out;
}

/// One full pump + sideband cycle:
///   T(m|n) = stay[n] delta_{m,n} + up[n] R(m|n+1),
/// with R the pump recoil kernel (identity when recoil is off).
struct CycleKernel {
    Matrix matrix;
    TransitionRates rates;
    std::optional<RecoilKernel> recoil;
    std::vector<double> deficit; // per-column probability lost past n_max, >= 0

    int n_max() const { return static_cast<int>(matrix.cols()) - 1; }
};

inline CycleKernel cycle_kernel(const TransitionRates& rates,
                                const std::optional<RecoilKernel>& pump = std::nullopt)
{
    const int n_max = rates.n_max();
    if (n_max < 0 || rates.stay.size() != rates.up.size())
        throw DimensionMismatch("cycle_kernel: malformed transition rates");
    if (pump && pump->n_max() != n_max)
        throw DimensionMismatch("cycle_kernel: rates cover n <= " + std::to_string(n_max)
                                + " but pump kernel covers n <= " + std::to_string(pump->n_max()));

    const auto size = static_cast<Eigen::Index>(n_max) + 1;
    CycleKernel kernel;
    kernel.rates = rates;
    kernel.recoil = pump;
    kernel.matrix = Matrix::Zero(size, size);
    for (int n = 0; n <= n_max; ++n) {
        kernel.matrix(n, n) = rates.stay[static_cast<std::size_t>(n)];
        const double up = rates.up[static_cast<std::size_t>(n)];
        if (up == 0.0 || n == n_max)
            continue; // at n_max the up-branch leaves the basis
        if (pump)
            kernel.matrix.col(n) += up * pump->matrix.col(n + 1);
        else
            kernel.matrix(n + 1, n) += up;
    }
    kernel.deficit.resize(static_cast<std::size_t>(size));
    for (Eigen::Index n = 0; n < size; ++n)
        kernel.deficit[static_cast<std::size_t>(n)] = std::max(0.0, 1.0 - kernel.matrix.col(n).sum());
    return kernel;
}

} // namespace trapion
