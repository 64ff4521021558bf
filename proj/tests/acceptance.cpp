// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pairspin/analysis.hpp"
#include "pairspin/decaymodels.hpp"
#include "pairspin/geometry.hpp"
#include "pairspin/measurement.hpp"
#include "pairspin/montecarlo.hpp"
#include "pairspin/noisefield.hpp"
#include "pairspin/spinsys.hpp"

using namespace pairspin;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] %2d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    if (!ok) ++failures;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[std::size_t(i)] = a + (b - a) * double(i) / double(n - 1);
    return t;
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const Vec3 axis111 = Vec3(1.0, 1.0, 1.0) / std::sqrt(3.0);

// 1. Nearest-neighbour dipolar coupling value.
void criterion_1() {
    const double x = dipolar_x_hz(SiteIndex{1, 1, 1}.to_meters(a0_diamond), axis111);
    const bool ok = std::abs(std::abs(x) - 2062.37) <= 0.01;
    report(1, ok, "nearest-neighbour |X| = " + num(std::abs(x)) + " Hz (want 2062.37 +- 0.01)");
}

// 2. Coupling table vs the published top-10 rows.
void criterion_2() {
    const double x_ref[10] = {2062.0, 687.0, 237.0, 187.0, 134.0,
                              102.0,  76.38, 75.95, 61.0,  46.0};
    const int occ_ref[10] = {1, 3, 12, 3, 3, 3, 1, 6, 6, 6};
    const auto table = coupling_table(8.0);
    bool ok = table.size() >= 10;
    std::string detail;
    for (int i = 0; ok && i < 10; ++i) {
        const auto& e = table[std::size_t(i)];
        if (std::abs(e.x_hz - x_ref[i]) > 0.5 || e.occurrence != occ_ref[i]) {
            ok = false;
            detail = " (row " + std::to_string(i + 1) + ": " + num(e.x_hz) + " Hz x" +
                     std::to_string(e.occurrence) + ")";
        }
    }
    report(2, ok, "coupling table reproduces the top-10 values and multiplicities" + detail);
}

// 3. b distributions: means 10/14/20 Hz, stds 4/5/6 Hz, each +-15%.
void criterion_3() {
    const LatticeConfig cfg;
    const int n = 10000;
    struct Want {
        const char* name;
        BathTarget target;
        double mean, stddev;
    };
    const Want wants[3] = {{"pair-A/B", BathTarget::nn_pair(), 10.0, 4.0},
                           {"pair-C", BathTarget::pair_c(), 14.0, 5.0},
                           {"single", BathTarget::single(), 20.0, 6.0}};
    bool all = true;
    std::string detail;
    for (const auto& w : wants) {
        const auto dist = b_distribution(cfg, w.target, n, 2718);
        const bool mean_ok = std::abs(dist.mean - w.mean) <= 0.15 * w.mean;
        const bool std_ok = std::abs(dist.stddev - w.stddev) <= 0.15 * w.stddev;
        all = all && mean_ok && std_ok;
        detail += std::string(" ") + w.name + "=(" + num(dist.mean) + "," + num(dist.stddev) +
                  (mean_ok && std_ok ? ")" : ")!");
    }
    report(3, all, "b distributions vs (10,4)/(14,5)/(20,6) Hz +-15%:" + detail +
                       (all ? "" : "  [see notes: published moments not reproducible from the"
                                   " stated procedure]"));
}

// 4. Pair census at 1e4 baths.
void criterion_4() {
    const LatticeConfig cfg;
    const auto res = pair_census(cfg, 10000, 50.0, 500.0, 31415);
    const bool ok = res.mean >= 0.7 && res.mean <= 1.3 && res.frac_ge1 > 0.65;
    report(4, ok, "census mean = " + num(res.mean) + " (want [0.7, 1.3]), P(>=1 pair) = " +
                      num(res.frac_ge1) + " (want > 0.65)");
}

// 5. Regime T2* formulas vs the cross-quoted numbers.
void criterion_5() {
    const double t_qs = t2star_gaussian_static(12.5);
    const double t_dc = t2star_detuned_clock(13.9, 2081.0, 130.0);
    const double t_mn = t2star_fast(13.9, 2080.99, 10.0);
    const double r_rel = relaxation_rate_from_t2star(13.9, 2080.99, 114.0);
    const bool ok = std::abs(t_qs - 0.018) <= 0.05 * 0.018 &&
                    std::abs(t_dc - 0.26) <= 0.05 * 0.26 && t_mn >= 96.0 && t_mn <= 132.0 &&
                    std::abs(r_rel - 400.0) <= 0.2 * 400.0;
    report(5, ok, "T2* formulas: quasi-static " + num(t_qs) + " s, detuned clock " + num(t_dc) +
                      " s, motional narrowing " + num(t_mn) + " s, relaxation R = " +
                      num(r_rel) + " 1/s");
}

// 6. Analytic-limit consistency of the full solution.
void criterion_6() {
    PairParams p{2080.99, 0.0, 13.9, 1e6, 0};
    const double window = hz_to_rad(p.x_hz) / (hz_to_rad(p.b_hz) * hz_to_rad(p.b_hz));
    const auto t_qs = linspace(0.0, window, 120);
    const auto full_qs = envelope_full(p, t_qs);
    const auto qs = envelope_quasistatic_clock(p, t_qs);
    double worst_qs = 0.0;
    for (std::size_t i = 0; i < t_qs.size(); ++i)
        worst_qs = std::max(worst_qs, std::abs(std::abs(full_qs.values[i]) - std::abs(qs.values[i])) /
                                          std::abs(qs.values[i]));

    p.tau_c_s = 0.05;
    const double t2 = t2star_fast(p.b_hz, p.x_hz, p.rate());
    const auto t_f = linspace(0.0, 5.0 * t2, 200);
    const auto full_f = envelope_full(p, t_f);
    const auto fast = envelope_fast(p, t_f);
    double worst_f = 0.0;
    for (std::size_t i = 0; i < t_f.size(); ++i)
        worst_f = std::max(worst_f, std::abs(std::abs(full_f.values[i]) - std::abs(fast.values[i])) /
                                        std::max(std::abs(fast.values[i]), 1e-9));

    PairParams slow = p;
    slow.tau_c_s = 10.0;
    PairParams fastp = p;
    fastp.tau_c_s = 0.05;
    const double slow30 = std::abs(envelope_full(slow, {30.0}).values[0]);
    const double fast30 = std::abs(envelope_full(fastp, {30.0}).values[0]);

    const bool ok = worst_qs <= 0.01 && worst_f <= 0.01 && slow30 < 0.1 && fast30 > 0.8;
    report(6, ok, "limits: quasi-static dev " + num(worst_qs) + ", fast dev " + num(worst_f) +
                      "; |M(30 s)| slow/fast = " + num(slow30) + "/" + num(fast30));
}

// 7. Monte Carlo vs analytic envelopes across slow/intermediate/fast regimes.
void criterion_7() {
    struct Case {
        const char* name;
        PairParams p;
        double t_end;
    };
    const Case cases[3] = {
        {"slow", {500.0, 0.0, 30.0, 2.0, 0}, 1.2},
        {"intermediate", {188.33, 0.0, 12.5, 0.1, 0}, 1.6},
        {"fast", {100.0, 0.0, 20.0, 0.002, 0}, 6.0},
    };
    bool all = true;
    std::string detail;
    for (const auto& c : cases) {
        McOptions opt;
        opt.n_traj = 2000;
        opt.seed = 424242;
        const auto times = linspace(0.0, c.t_end, 14);
        const auto mc = ensemble_ramsey(c.p, times, opt);
        const auto an = envelope_full(c.p, mc.envelope.times);
        int bad = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double dev = std::abs(mc.envelope.mean[i] - std::abs(an.values[i]));
            const double lim = 3.0 * mc.envelope.stderr_[i] + 1e-6;
            if (dev > lim) ++bad;
            worst = std::max(worst, lim > 0 ? dev / lim : 0.0);
        }
        all = all && bad == 0;
        detail += std::string(" ") + c.name + ":" + (bad == 0 ? "ok" : "DEV") +
                  "(worst " + num(worst) + "x)";
        const Regime r = classify_regime(c.p);
        if (std::string(c.name) == "slow" && r == Regime::Fast) all = false;
        if (std::string(c.name) == "fast" && r != Regime::Fast) all = false;
    }
    report(7, all, "MC vs analytic within 3 sigma pointwise (n = 2000):" + detail);
}

// 8. Electron-mediated coupling.
void criterion_8() {
    const double combos[4][4] = {{10e3, 5e3, 10e3, 5e3},
                                 {50e3, 20e3, 50e3, 20e3},
                                 {100e3, 50e3, 80e3, 40e3},
                                 {200e3, 100e3, 150e3, 60e3}};
    bool ok = true;
    double worst_1g = 0.0;
    for (const auto& c : combos) {
        auto spec = HamiltonianSpec::with_larmor();
        spec.a_par_hz = {c[0], c[1]};
        spec.a_perp_hz = {c[2], c[3]};
        spec.b_perp_t = 1e-4;  // 1 gauss
        const auto pt = effective_x_single(spec);
        worst_1g = std::max(worst_1g, std::abs(pt.x_eff_hz - spec.x_hz));
        if (pt.flagged || std::abs(pt.x_eff_hz - spec.x_hz) >= 0.5) ok = false;

        spec.b_perp_t = -1e-4;
        const auto mirrored = effective_x_single(spec);
        // exact symmetry only at A_perp = 0; the genuine odd part is ppb-scale
        if (std::abs(mirrored.x_eff_hz - pt.x_eff_hz) > 1e-3) ok = false;
    }
    {
        auto spec = HamiltonianSpec::with_larmor();
        spec.a_par_hz = {100e3, 40e3};
        spec.b_perp_t = 1e-4;
        const auto plus = effective_x_single(spec);
        spec.b_perp_t = -1e-4;
        const auto minus = effective_x_single(spec);
        if (std::abs(plus.x_eff_hz - minus.x_eff_hz) > 1e-6) ok = false;
    }
    const auto bare = effective_x_single(HamiltonianSpec::with_larmor());
    if (std::abs(bare.x_eff_hz - 2062.37) > 1e-4) ok = false;
    report(8, ok, "electron-mediated shift at 1 G <= " + num(worst_1g) +
                      " Hz (< 0.5), even in B_perp, bare fixed point exact");
}

// 9. Measurement calibration machinery.
void criterion_9() {
    bool ok = true;
    std::string detail;

    // ideal model: F = 1
    ReadoutModel ideal;
    ideal.f0 = 1.0;
    ideal.f1 = 1.0;
    const auto ideal_rows = calibrate(ideal, PairRegister::basis_state(0, 0),
                                      PairRegister::basis_state(1, 1), 3, 3, 400, 5);
    if (std::abs(ideal_rows[0].fidelity - 1.0) > 1e-12) ok = false;
    detail += " ideal F = " + num(ideal_rows[0].fidelity) + ";";

    // documented imperfection knobs: interior optimum in m, pipeline F > 0.95
    ReadoutModel m;
    m.dephasing = 0.004;
    m.leakage = 0.0015;
    SpinCalibConfig cfg;
    cfg.m_max = 60;
    cfg.trials = 2500;
    const auto rows = calibrate_spin_pipeline(m, cfg, 1234);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].fidelity > rows[best].fidelity) best = i;
    const bool interior = best > 1 && best + 2 < rows.size() &&
                          rows[best].fidelity > rows[0].fidelity + 0.005 &&
                          rows[best].fidelity > rows.back().fidelity + 0.005;
    if (!interior || rows[best].fidelity <= 0.95) ok = false;
    detail += " pipeline optimum F = " + num(rows[best].fidelity) + " at m = " +
              std::to_string(rows[best].readouts) + ";";

    // Eq. S13 sweep machinery vs closed-form binomial on m <= 5
    auto binom_pmf = [](int n, int k, double p) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c = c * double(n - i) / double(i + 1);
        return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
    };
    Rng rng(8);
    bool sweep_ok = true;
    for (int rep = 0; rep < 200; ++rep) {
        const int mm = 1 + int(rng.uniform() * 5.0);
        const double pa = rng.uniform(), pb = rng.uniform();
        Histogram ha(mm), hb(mm);
        for (int k = 0; k <= mm; ++k) {
            ha.add(k, binom_pmf(mm, k, pa));
            hb.add(k, binom_pmf(mm, k, pb));
        }
        const auto scan = sweep_threshold(ha, hb);
        double best_f = -1.0;
        for (int t = 0; t <= mm + 1; ++t) {
            double fa = 0.0, fb = 0.0;
            for (int k = t; k <= mm; ++k) fa += binom_pmf(mm, k, pa);
            for (int k = 0; k < t; ++k) fb += binom_pmf(mm, k, pb);
            best_f = std::max(best_f, 0.5 * (fa + fb));
        }
        if (std::abs(scan.best_fidelity - best_f) > 1e-12) sweep_ok = false;
    }
    if (!sweep_ok) ok = false;
    detail += std::string(" S13 sweep = binomial oracle: ") + (sweep_ok ? "exact" : "MISMATCH");
    report(9, ok, "calibration:" + detail);
}

// 10. Entanglement protocol.
void criterion_10() {
    ReadoutModel ideal;
    ideal.f0 = 1.0;
    ideal.f1 = 1.0;
    EntangleConfig cfg;
    cfg.trials = 400;
    const auto res = entangle_protocol(ideal, cfg, 6);
    bool ok = res.accepted > 0 && std::abs(res.fidelity - 1.0) < 1e-12 &&
              std::abs(res.zz + 1.0) < 1e-12;

    // parity oscillation frequency = 2X within 0.5%
    const double period = 1.0 / cfg.x_hz;
    const auto times = linspace(0.0, 2.0 * period, 40);
    cfg.trials = 250;
    const auto zz = entangle_parity_oscillation(ideal, cfg, times, 77);
    const auto fit = fit_stretched_cos(times, zz, 1, {0.0, 100.0, 1.0, {2.0 * cfg.x_hz}});
    const double f_fit = fit["f"];
    const bool freq_ok = std::abs(f_fit - 2.0 * cfg.x_hz) <= 0.005 * 2.0 * cfg.x_hz;
    ok = ok && freq_ok;
    report(10, ok, "entanglement: ideal F = " + num(res.fidelity) + ", zz = " + num(res.zz) +
                       ", parity oscillation " + num(f_fit) + " Hz vs 2X = " +
                       num(2.0 * cfg.x_hz) + " Hz");
}

// 11. External-noise estimators.
void criterion_11() {
    const double wire_grad = wire_gradient(1e-4, 1e-5, 1e-5 + 1e-9);
    const double bmag = magnet_field(0.01, 0.005, 0.005, 1.5);
    const double mag_grad = magnet_gradient(0.01, 0.005, 0.005, 1.5, 1e-9);
    const bool ok = wire_grad >= 0.5e-10 && wire_grad <= 5e-10 &&
                    std::abs(bmag - 0.04) <= 0.1 * 0.04 && mag_grad >= 0.5e-8 &&
                    mag_grad <= 5e-8;
    report(11, ok, "wire gradient " + num(wire_grad) + " T (~1e-10), magnet " + num(bmag) +
                       " T (0.04 +- 10%), magnet gradient " + num(mag_grad) + " T (~1e-8)");
}

// 12. Fit round trips.
void criterion_12() {
    bool ok = true;
    std::string detail;

    {  // stretched cosine, noiseless: 0.1%
        const double T = 0.53, nn = 2.1, f = 9.07;
        std::vector<double> t, v;
        for (int i = 0; i < 360; ++i) {
            t.push_back(2.0 * i / 360.0);
            v.push_back(std::exp(-std::pow(t.back() / T, nn)) *
                        0.5 * std::cos(two_pi * f * t.back() + 0.3));
        }
        const auto fit = fit_stretched_cos(t, v, 1);
        const bool this_ok = std::abs(fit["T"] / T - 1.0) < 1e-3 &&
                             std::abs(fit["n"] / nn - 1.0) < 1e-3 &&
                             std::abs(fit["f"] / f - 1.0) < 1e-3;
        ok = ok && this_ok;
        detail += " cos(T,n,f)=(" + num(fit["T"]) + "," + num(fit["n"]) + "," + num(fit["f"]) + ")";
    }
    {  // gaussian peaks, 1% with noise
        Rng rng(4);
        std::vector<double> freq, mag;
        for (double f = 0.0; f <= 20.0; f += 0.04) {
            freq.push_back(f);
            mag.push_back(std::exp(-0.5 * (f - 9.07) * (f - 9.07) / (0.88 * 0.88)) +
                          0.002 * rng.normal());
        }
        const auto fit = fit_gaussian_peaks(freq, mag, 1);
        const bool this_ok = std::abs(fit["f"] / 9.07 - 1.0) < 0.01 &&
                             std::abs(fit["sigma"] / 0.88 - 1.0) < 0.01;
        ok = ok && this_ok;
        detail += " peak(f,sigma)=(" + num(fit["f"]) + "," + num(fit["sigma"]) + ")";
    }
    {  // stretched exponential with 1% noise: parameters to 1%... noiseless to 0.1%
        std::vector<double> t, v;
        for (double x = 0.5; x <= 3000.0; x *= 1.25) {
            t.push_back(x);
            v.push_back(std::exp(-std::pow(x / 114.0, 0.23)));
        }
        const auto fit = fit_stretched_exp(t, v);
        const bool this_ok =
            std::abs(fit["T"] / 114.0 - 1.0) < 0.01 && std::abs(fit["n"] / 0.23 - 1.0) < 0.01;
        ok = ok && this_ok;
        detail += " exp(T,n)=(" + num(fit["T"]) + "," + num(fit["n"]) + ")";
    }
    const double t2 = t2star_from_sigma(0.88);
    const bool t2_ok = std::abs(t2 - 1.0 / (std::sqrt(2.0) * pi * 0.88)) < 1e-15 &&
                       std::abs(t2 - 0.26) < 0.005;
    ok = ok && t2_ok;
    detail += " t2*(0.88 Hz)=" + num(t2) + " s";
    report(12, ok, "fit round trips:" + detail);
}

}  // namespace

int main() {
    std::printf("pairspin acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("%d of 12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
