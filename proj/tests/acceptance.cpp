// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "trapion/trapion.hpp"

using namespace trapion;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

constexpr double kRecoilEta = 0.142;
constexpr double kGammaRatio = 9.5 / 3.3;
constexpr int kRecoilNMax = 500;

double branch_p1() { return kGammaRatio / (1.0 + kGammaRatio); }

/// Coupling zero of n0 = 50; quoted to three decimals as 0.268.
double trap_eta() { return eta_zeros_for_n(50, 1)[0]; }

const RecoilKernel& shared_pump()
{
    static const RecoilKernel k = pump_kernel(kRecoilEta, kRecoilEta, branch_p1(), kRecoilNMax);
    return k;
}

EvolveResult recoil_run(double G, int cycles, const std::vector<int>& checkpoints)
{
    const auto rates = incoherent_rates(tabulate_coupling(trap_eta(), kRecoilNMax), G);
    return evolve_at(NumberDistribution::delta(0, kRecoilNMax), cycle_kernel(rates, shared_pump()), cycles,
                     checkpoints);
}

Outcome pulse_area()
{
    const double a = pulse_area_for_state(50, 0.1, 1);
    return {std::abs(a - 1.149) <= 1e-3, fmt("area=%.6f (target 1.149 +- 0.001)", a)};
}

Outcome coupling_zero()
{
    const double eta = eta_zeros_for_n(50, 1)[0];
    return {std::abs(eta - 0.268) <= 1e-3, fmt("eta=%.8f (target 0.268 +- 0.001)", eta)};
}

Outcome lamb_dicke_limits()
{
    bool ok = true;
    const auto profile = tabulate_coupling(0.0, 200);
    for (int n = 0; n <= 200; ++n) {
        ok &= coupling_f(n, 0.0) == 1.0 && profile[n] == 1.0;
        for (double G : {0.2, 1.0, 2.0, 10.0, 1000.0})
            ok &= gamma_n(n, 0.0, G) == 2.0 * G * (n + 1);
    }
    return {ok, "f(n;0) == 1 and gamma_n(0) tau_s == 2G(n+1) bit-exact for n <= 200"};
}

Outcome binomial_regime()
{
    const int n_max = 250;
    const int cycles = 200;
    if (!trapping_numbers_for_eta(0.05, 200).empty())
        return {false, "eta = 0.05 unexpectedly has a trapping number below 200"};
    double worst_mean = 0.0, worst_var = 0.0, worst_relvar = 0.0, worst_closed = 0.0;
    for (double G : {1e3, 1e4}) {
        const auto rates = incoherent_rates(tabulate_coupling(0.05, n_max), G);
        const auto p0 = NumberDistribution::delta(0, n_max);
        const auto res = evolve(p0, cycle_kernel(rates), cycles, 1);
        for (const auto& r : res.series.records) {
            worst_mean = std::max(worst_mean, std::abs(r.mean - r.cycle / 2.0));
            worst_var = std::max(worst_var, std::abs(r.variance - r.cycle / 4.0));
            if (r.cycle > 0)
                worst_relvar = std::max(worst_relvar, r.relvar ? std::abs(*r.relvar - 0.5) : INFINITY);
        }
        for (const auto& snap : res.snapshots) {
            const auto closed = binomial_closed_form(p0, snap.cycle);
            for (int n = 0; n <= n_max; ++n)
                worst_closed = std::max(worst_closed, std::abs(closed.probs[static_cast<std::size_t>(n)]
                                                               - snap.dist.probs[static_cast<std::size_t>(n)]));
        }
    }
    const bool ok = worst_mean <= 1e-4 && worst_var <= 1e-4 && worst_relvar <= 1e-4 && worst_closed <= 1e-12;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "G in {1e3,1e4}, 200 cycles: max|mean-k/2|=%.2e max|var-k/4|=%.2e max|relvar-0.5|=%.2e "
                  "max|closed-evolve|=%.2e",
                  worst_mean, worst_var, worst_relvar, worst_closed);
    return {ok, buf};
}

Outcome incoherent_trapping()
{
    const int n_max = 150;
    const double eta = trap_eta();
    const auto rates = incoherent_rates(tabulate_coupling(eta, n_max), 10.0);
    const auto res = evolve(NumberDistribution::delta(0, n_max), cycle_kernel(rates), 500, 1);
    double above = 0.0;
    for (const auto& snap : res.snapshots)
        for (int m = 51; m <= n_max; ++m)
            above = std::max(above, snap.dist.probs[static_cast<std::size_t>(m)]);
    const double p50 = res.snapshots.back().dist.probs[50];
    char buf[200];
    std::snprintf(buf, sizeof buf, "eta=%.7f G=10: P50(500)=%.7f, max P(m>50) over all cycles=%.1e", eta, p50,
                  above);
    return {p50 >= 0.999 && above == 0.0, buf};
}

Outcome coherent_trapping()
{
    const int n_max = 120;
    const double area = pulse_area_for_state(50, 0.1, 1);
    const auto kernel = cycle_kernel(coherent_rates(tabulate_coupling(0.1, n_max), area));
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<NumberDistribution> starts{NumberDistribution::delta(0, n_max), NumberDistribution::delta(50, n_max)};
    for (int t = 0; t < 8; ++t) {
        NumberDistribution d;
        d.probs.assign(n_max + 1, 0.0);
        double s = 0.0;
        for (int n = 0; n <= 50; ++n)
            s += d.probs[static_cast<std::size_t>(n)] = u(rng);
        for (double& p : d.probs)
            p /= s;
        starts.push_back(d);
    }
    double above = 0.0;
    for (const auto& p0 : starts) {
        const auto res = evolve(p0, kernel, 1000, 1);
        for (const auto& snap : res.snapshots)
            for (int m = 51; m <= n_max; ++m)
                above = std::max(above, snap.dist.probs[static_cast<std::size_t>(m)]);
    }
    return {above == 0.0, fmt("10 starts on [0,50], 1000 cycles each: max P(m>50)=%.1e", above)};
}

Outcome recoil_relvar()
{
    std::string detail;
    bool ok = true;
    for (double G : {1.0, 2.0}) {
        const auto res = recoil_run(G, 400, {});
        const auto& rec = res.series.records;
        auto rv = [&](int k) { return *rec[static_cast<std::size_t>(k)].relvar; };

        int first_band = -1;
        for (int k = 1; k < 100 && first_band < 0; ++k)
            if (rv(k) >= 0.45 && rv(k) <= 0.65)
                first_band = k;

        int kmin = -1;
        for (int k = 1; k < 400; ++k) {
            if (std::abs(rec[static_cast<std::size_t>(k)].argmax - 50) > 3)
                continue;
            if (kmin < 0 || rv(k) < rv(kmin))
                kmin = k;
        }
        bool local = kmin > 0 && kmin < 400 && rv(kmin) <= rv(kmin - 1) && rv(kmin) <= rv(kmin + 1);
        int rising = 0;
        if (kmin > 0)
            while (kmin + rising + 1 <= 400 && rv(kmin + rising + 1) >= rv(kmin + rising))
                ++rising;
        const bool g_ok = first_band >= 0 && local && rv(kmin) < 0.55 && rising >= 50;
        ok &= g_ok;
        char buf[240];
        std::snprintf(buf, sizeof buf,
                      "%sG=%g: first relvar in [0.45,0.65] at k=%d; min %.3f at k=%d (argmax %d); rises %d cycles",
                      detail.empty() ? "" : "; ", G, first_band, kmin > 0 ? rv(kmin) : NAN, kmin,
                      kmin > 0 ? rec[static_cast<std::size_t>(kmin)].argmax : -1, rising);
        detail += buf;
    }
    return {ok, detail};
}

Outcome recoil_peak()
{
    std::vector<int> every(401);
    for (int k = 0; k <= 400; ++k)
        every[static_cast<std::size_t>(k)] = k;
    const auto res = recoil_run(1000.0, 400, every);
    double best = 0.0;
    int at = 0;
    for (const auto& snap : res.snapshots)
        if (snap.dist.probs[50] > best) {
            best = snap.dist.probs[50];
            at = snap.cycle;
        }
    char buf[160];
    std::snprintf(buf, sizeof buf, "G=1000: max_k P50=%.4f at k=%d (target [0.45, 0.70])", best, at);
    return {best >= 0.45 && best <= 0.70, buf};
}

Outcome oracle_equivalence()
{
    std::string detail;
    bool ok = true;
    const std::vector<int> cps{50, 100, 200};
    for (double G : {1.0, 2.0}) {
        TrajectoryConfig cfg;
        cfg.rates = incoherent_rates(tabulate_coupling(trap_eta(), kRecoilNMax), G);
        cfg.recoil = RecoilParams::from_ratio(kRecoilEta, kRecoilEta, kGammaRatio);
        cfg.initial = NumberDistribution::delta(0, kRecoilNMax);
        cfg.cycles = 200;
        cfg.n_trajectories = 20000;
        cfg.master_seed = 20240917;
        cfg.checkpoints = cps;
        const auto ens = run_ensemble(cfg);
        const auto eng = recoil_run(G, 200, cps);
        for (std::size_t i = 0; i < cps.size(); ++i) {
            const double tv = total_variation(ens.snapshots[i].dist, eng.snapshots[i].dist);
            ok &= tv <= 0.02;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%sG=%g k=%d TV=%.4f", detail.empty() ? "" : ", ", G, cps[i], tv);
            detail += buf;
        }
        ok &= ens.report.failed_trajectories == 0;
    }
    return {ok, detail + " (2e4 trajectories, bound 0.02)"};
}

Outcome heating_identities()
{
    const auto single = single_emission_kernel(kRecoilEta, 200);
    const auto& pump = shared_pump();
    const double single_target = 0.4 * kRecoilEta * kRecoilEta;
    const double pump_target = 0.4 * (kRecoilEta * kRecoilEta + kGammaRatio * kRecoilEta * kRecoilEta);
    double worst_single = 0.0, worst_pump = 0.0;
    for (int n : {0, 1, 10, 50, 100}) {
        double s = 0.0, p = 0.0;
        for (int m = 0; m <= 200; ++m)
            s += (m - n) * single.matrix(m, n);
        for (int m = 0; m <= kRecoilNMax; ++m)
            p += (m - n) * pump.matrix(m, n);
        worst_single = std::max(worst_single, std::abs(s - single_target));
        worst_pump = std::max(worst_pump, std::abs(p - pump_target));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "single |err|=%.2e (tol 1e-6), pump |err|=%.2e (tol 1e-4), pump target %.6f",
                  worst_single, worst_pump, pump_target);
    return {worst_single <= 1e-6 && worst_pump <= 1e-4, buf};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"pulse-area reproduction", pulse_area},
        {"coupling-zero reproduction", coupling_zero},
        {"Lamb-Dicke limits", lamb_dicke_limits},
        {"binomial regime", binomial_regime},
        {"incoherent trapping without recoil", incoherent_trapping},
        {"coherent trapping cutoff", coherent_trapping},
        {"recoil relative-variance shape", recoil_relvar},
        {"peak trapping population with recoil", recoil_peak},
        {"ensemble vs engine equivalence", oracle_equivalence},
        {"heating identities", heating_identities},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += out.pass ? 0 : 1;
        std::printf("%s  %2zu  %-38s %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
