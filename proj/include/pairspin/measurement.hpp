#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pairspin/constants.hpp"
#include "pairspin/linalg.hpp"
#include "pairspin/parallel.hpp"
#include "pairspin/rng.hpp"

namespace pairspin {

// ---------------------------------------------------------------------------
// Readout model
//
// Each repetition maps pair phases onto the NV spin and reads it optically.
// A pair in |up-pseudo> contributes +phi, |down-pseudo> contributes -phi, a
// pair in its parallel subspace contributes nothing. Spin readout (NV along
// y) clicks with (1 + sin phi)/2; parity readout (NV along -x) clicks with
// (1 - cos phi)/2, so even parity is bright and odd parity and parallel
// states are dark, matching the published heralding directions.
// ---------------------------------------------------------------------------

enum class ReadoutBasis { Spin, Parity };

struct ReadoutModel {
    double phi_spin_a = pi / 4, phi_spin_b = pi / 4;      // per repetition [rad]
    double phi_parity_a = pi / 2, phi_parity_b = pi / 2;
    double f0 = 0.905;            // P(click | ideal click)
    double f1 = 0.986;            // P(no click | ideal no click)
    double dephasing = 0.0;       // per-repetition pseudo-spin z dephasing (lambda)
    double leakage = 0.0;         // per-repetition antiparallel -> parallel (kappa)
    double inter_rep_rotation = 0.0;  // residual x rotation per repetition [rad]

    double observed(double p_ideal) const {
        return p_ideal * f0 + (1.0 - p_ideal) * (1.0 - f1);
    }
    static double ideal_click(ReadoutBasis basis, double phi) {
        return basis == ReadoutBasis::Spin ? 0.5 * (1.0 + std::sin(phi))
                                           : 0.5 * (1.0 - std::cos(phi));
    }
    void validate() const {
        for (double p : {f0, f1, dephasing, leakage})
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("ReadoutModel: probabilities must be in [0,1]");
    }
};

// ---------------------------------------------------------------------------
// Registers
// ---------------------------------------------------------------------------

namespace qnd {

inline CMat rx(double angle) {
    CMat u(2);
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    u(0, 0) = c;
    u(0, 1) = cplx(0.0, -s);
    u(1, 0) = cplx(0.0, -s);
    u(1, 1) = c;
    return u;
}

inline CMat rz(double angle) {
    CMat u(2);
    u(0, 0) = std::polar(1.0, -0.5 * angle);
    u(1, 1) = std::polar(1.0, 0.5 * angle);
    return u;
}

inline CMat conjugate(const CMat& u, const CMat& rho) { return u * rho * u.adjoint(); }

// partial trace of a 4x4 two-pair operator over pair slot 0 or 1
inline CMat partial_trace(const CMat& rho4, int traced_pair) {
    CMat r(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                if (traced_pair == 0)
                    r(i, j) += rho4(2 * k + i, 2 * k + j);
                else
                    r(i, j) += rho4(2 * i + k, 2 * j + k);
            }
    return r;
}

}  // namespace qnd

// Two interacting pairs. Coherence between the antiparallel and parallel
// subspaces dephases at the Larmor scale and is dropped; the parallel
// population is tracked classically per sector:
//   rho_aa (4x4)  both pairs antiparallel, basis |s_A s_B>, 0 = up-pseudo
//   rho_ap (2x2)  pair A antiparallel, pair B parallel
//   rho_pa (2x2)  pair A parallel, pair B antiparallel
//   w_pp          both parallel
// Total mass stays 1.
struct PairRegister {
    CMat rho_aa{4};
    CMat rho_ap{2};
    CMat rho_pa{2};
    double w_pp = 0.0;

    static PairRegister thermal() {
        PairRegister r;
        for (int i = 0; i < 4; ++i) r.rho_aa(i, i) = 1.0 / 16.0;
        for (int i = 0; i < 2; ++i) {
            r.rho_ap(i, i) = 1.0 / 8.0;
            r.rho_pa(i, i) = 1.0 / 8.0;
        }
        r.w_pp = 0.25;
        return r;
    }
    static PairRegister basis_state(int s_a, int s_b) {
        PairRegister r;
        r.rho_aa(2 * s_a + s_b, 2 * s_a + s_b) = 1.0;
        return r;
    }
    static PairRegister mixed_antiparallel() {
        PairRegister r;
        for (int i = 0; i < 4; ++i) r.rho_aa(i, i) = 0.25;
        return r;
    }
    static PairRegister bell_psi_plus() {
        PairRegister r;
        r.rho_aa(1, 1) = 0.5;
        r.rho_aa(2, 2) = 0.5;
        r.rho_aa(1, 2) = 0.5;
        r.rho_aa(2, 1) = 0.5;
        return r;
    }

    double mass() const {
        return rho_aa.trace().real() + rho_ap.trace().real() + rho_pa.trace().real() + w_pp;
    }
    double parallel_prob(int pair) const {
        return pair == 0 ? rho_pa.trace().real() + w_pp : rho_ap.trace().real() + w_pp;
    }

    void scale(double f) {
        rho_aa = rho_aa * f;
        rho_ap = rho_ap * f;
        rho_pa = rho_pa * f;
        w_pp *= f;
    }

    // same single-pseudo-spin unitary on both pairs
    void rotate_both(const CMat& u) {
        rho_aa = qnd::conjugate(kron(u, u), rho_aa);
        rho_ap = qnd::conjugate(u, rho_ap);
        rho_pa = qnd::conjugate(u, rho_pa);
    }

    // z phase-flip channel with probability lambda, applied to each pair
    void dephase(double lambda) {
        if (lambda <= 0.0) return;
        const double k = 1.0 - 2.0 * lambda;
        static constexpr int sign_a[4] = {1, 1, -1, -1};
        static constexpr int sign_b[4] = {1, -1, 1, -1};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double f = 1.0;
                if (sign_a[i] != sign_a[j]) f *= k;
                if (sign_b[i] != sign_b[j]) f *= k;
                rho_aa(i, j) *= f;
            }
        rho_ap(0, 1) *= k;
        rho_ap(1, 0) *= k;
        rho_pa(0, 1) *= k;
        rho_pa(1, 0) *= k;
    }

    // antiparallel -> parallel leakage with probability kappa per pair
    void leak(double kappa) {
        if (kappa <= 0.0) return;
        const double keep = 1.0 - kappa;
        // pair A leaks
        rho_pa += qnd::partial_trace(rho_aa, 0) * kappa;
        w_pp += kappa * rho_ap.trace().real();
        rho_aa = rho_aa * keep;
        rho_ap = rho_ap * keep;
        // pair B leaks
        rho_ap += qnd::partial_trace(rho_aa, 1) * kappa;
        w_pp += kappa * rho_pa.trace().real();
        rho_aa = rho_aa * keep;
        rho_pa = rho_pa * keep;
    }

    double min_eigenvalue() const { return pairspin::min_eigenvalue(rho_aa); }

    // <sigma_x sigma_x>, <sigma_y sigma_y>, <sigma_z sigma_z> over the full
    // register; a parallel pair contributes zero pseudo-spin.
    std::array<double, 3> pauli_correlations() const {
        const double xx = 2.0 * (rho_aa(0, 3) + rho_aa(1, 2)).real();
        const double yy = 2.0 * (rho_aa(1, 2) - rho_aa(0, 3)).real();
        const double zz = (rho_aa(0, 0) - rho_aa(1, 1) - rho_aa(2, 2) + rho_aa(3, 3)).real();
        return {xx, yy, zz};
    }
};

// One pair (the Z >> X layout). The NV couples to the pseudo-spin x
// component, so spin readout is diagonal in the x basis of the pseudo-spin,
// and parity readout distinguishes antiparallel from parallel.
struct SinglePairRegister {
    CMat rho{2};  // pseudo-spin z basis
    double w_par = 0.0;

    static SinglePairRegister thermal() {
        SinglePairRegister r;
        r.rho(0, 0) = 0.25;
        r.rho(1, 1) = 0.25;
        r.w_par = 0.5;
        return r;
    }
    static SinglePairRegister x_state(int sign) {  // (|up> + sign |down>)/sqrt2
        SinglePairRegister r;
        r.rho(0, 0) = 0.5;
        r.rho(1, 1) = 0.5;
        r.rho(0, 1) = 0.5 * sign;
        r.rho(1, 0) = 0.5 * sign;
        return r;
    }
    double mass() const { return rho.trace().real() + w_par; }
    void dephase(double lambda) {
        if (lambda <= 0.0) return;
        rho(0, 1) *= 1.0 - 2.0 * lambda;
        rho(1, 0) *= 1.0 - 2.0 * lambda;
    }
    void leak(double kappa) {
        if (kappa <= 0.0) return;
        w_par += kappa * rho.trace().real();
        rho = rho * (1.0 - kappa);
    }
};

// ---------------------------------------------------------------------------
// Repeated non-destructive measurement blocks
// ---------------------------------------------------------------------------

namespace qnd {

struct TwoPairProbs {
    std::array<double, 4> p_aa;  // per |s_A s_B| basis state
    std::array<double, 2> p_ap;  // pair A antiparallel, B parallel
    std::array<double, 2> p_pa;
    double p_pp = 0.0;
};

inline TwoPairProbs click_probs(const ReadoutModel& m, ReadoutBasis basis) {
    const double pa = basis == ReadoutBasis::Spin ? m.phi_spin_a : m.phi_parity_a;
    const double pb = basis == ReadoutBasis::Spin ? m.phi_spin_b : m.phi_parity_b;
    TwoPairProbs pr;
    for (int ia = 0; ia < 2; ++ia) {
        const double sa = ia == 0 ? 1.0 : -1.0;
        pr.p_ap[std::size_t(ia)] = m.observed(ReadoutModel::ideal_click(basis, sa * pa));
        pr.p_pa[std::size_t(ia)] = m.observed(ReadoutModel::ideal_click(basis, sa * pb));
        for (int ib = 0; ib < 2; ++ib) {
            const double sb = ib == 0 ? 1.0 : -1.0;
            pr.p_aa[std::size_t(2 * ia + ib)] =
                m.observed(ReadoutModel::ideal_click(basis, sa * pa + sb * pb));
        }
    }
    pr.p_pp = m.observed(ReadoutModel::ideal_click(basis, 0.0));
    return pr;
}

// diagonal two-outcome Kraus update; returns the outcome probability
inline double apply_measurement(PairRegister& reg, const TwoPairProbs& pr, bool click) {
    auto outcome = [&](double p) { return click ? p : 1.0 - p; };
    double prob = 0.0;
    for (int i = 0; i < 4; ++i) prob += outcome(pr.p_aa[std::size_t(i)]) * reg.rho_aa(i, i).real();
    for (int i = 0; i < 2; ++i) {
        prob += outcome(pr.p_ap[std::size_t(i)]) * reg.rho_ap(i, i).real();
        prob += outcome(pr.p_pa[std::size_t(i)]) * reg.rho_pa(i, i).real();
    }
    prob += outcome(pr.p_pp) * reg.w_pp;
    if (prob <= 0.0) return 0.0;

    std::array<double, 4> ka;
    std::array<double, 2> kap, kpa;
    for (int i = 0; i < 4; ++i) ka[std::size_t(i)] = std::sqrt(outcome(pr.p_aa[std::size_t(i)]));
    for (int i = 0; i < 2; ++i) {
        kap[std::size_t(i)] = std::sqrt(outcome(pr.p_ap[std::size_t(i)]));
        kpa[std::size_t(i)] = std::sqrt(outcome(pr.p_pa[std::size_t(i)]));
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            reg.rho_aa(i, j) *= ka[std::size_t(i)] * ka[std::size_t(j)];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            reg.rho_ap(i, j) *= kap[std::size_t(i)] * kap[std::size_t(j)];
            reg.rho_pa(i, j) *= kpa[std::size_t(i)] * kpa[std::size_t(j)];
        }
    reg.w_pp *= outcome(pr.p_pp);
    reg.scale(1.0 / prob);
    return prob;
}

}  // namespace qnd

// Runs m repetitions of the chosen readout on the two-pair register,
// sampling each NV outcome; returns the click count. The posterior is left
// in reg.
inline int qnd_block(PairRegister& reg, const ReadoutModel& m, ReadoutBasis basis, int reps,
                     Rng& rng) {
    m.validate();
    const auto pr = qnd::click_probs(m, basis);
    const CMat rot = qnd::rx(m.inter_rep_rotation);
    int clicks = 0;
    for (int k = 0; k < reps; ++k) {
        // click probability before sampling
        double p = 0.0;
        for (int i = 0; i < 4; ++i) p += pr.p_aa[std::size_t(i)] * reg.rho_aa(i, i).real();
        for (int i = 0; i < 2; ++i) {
            p += pr.p_ap[std::size_t(i)] * reg.rho_ap(i, i).real();
            p += pr.p_pa[std::size_t(i)] * reg.rho_pa(i, i).real();
        }
        p += pr.p_pp * reg.w_pp;
        const bool click = rng.uniform() < p;
        qnd::apply_measurement(reg, pr, click);
        if (click) ++clicks;
        reg.dephase(m.dephasing);
        reg.leak(m.leakage);
        if (m.inter_rep_rotation != 0.0) reg.rotate_both(rot);
    }
    return clicks;
}

// Single-pair variant (pair C): spin readout diagonal in the pseudo-spin x
// basis with phases +-phi, parity readout separates antiparallel (bright)
// from parallel (dark).
struct SinglePairPhases {
    double phi_spin = pi / 2;
    double phi_parity = pi;
};

inline int qnd_block(SinglePairRegister& reg, const ReadoutModel& m, ReadoutBasis basis,
                     int reps, Rng& rng, const SinglePairPhases& phases = {}) {
    m.validate();
    int clicks = 0;
    const double h = 1.0 / std::sqrt(2.0);
    CMat hada(2);
    hada(0, 0) = h; hada(0, 1) = h; hada(1, 0) = h; hada(1, 1) = -h;

    double p_plus, p_minus, p_par;
    if (basis == ReadoutBasis::Spin) {
        p_plus = m.observed(ReadoutModel::ideal_click(basis, phases.phi_spin));
        p_minus = m.observed(ReadoutModel::ideal_click(basis, -phases.phi_spin));
        p_par = m.observed(ReadoutModel::ideal_click(basis, 0.0));
    } else {
        const double p_anti = m.observed(ReadoutModel::ideal_click(basis, phases.phi_parity));
        p_plus = p_anti;
        p_minus = p_anti;
        p_par = m.observed(ReadoutModel::ideal_click(basis, 0.0));
    }

    for (int k = 0; k < reps; ++k) {
        CMat rho_x = qnd::conjugate(hada, reg.rho);  // x basis
        const double pop_plus = rho_x(0, 0).real(), pop_minus = rho_x(1, 1).real();
        const double p = p_plus * pop_plus + p_minus * pop_minus + p_par * reg.w_par;
        const bool click = rng.uniform() < p;
        const double q_plus = click ? p_plus : 1.0 - p_plus;
        const double q_minus = click ? p_minus : 1.0 - p_minus;
        const double q_par = click ? p_par : 1.0 - p_par;
        const double prob = click ? p : 1.0 - p;
        if (prob > 0.0) {
            const double s0 = std::sqrt(q_plus), s1 = std::sqrt(q_minus);
            rho_x(0, 0) *= s0 * s0;
            rho_x(0, 1) *= s0 * s1;
            rho_x(1, 0) *= s1 * s0;
            rho_x(1, 1) *= s1 * s1;
            reg.rho = qnd::conjugate(hada, rho_x);  // back to z basis
            reg.w_par *= q_par;
            reg.rho = reg.rho * (1.0 / prob);
            reg.w_par /= prob;
        }
        if (click) ++clicks;
        reg.dephase(m.dephasing);
        reg.leak(m.leakage);
    }
    return clicks;
}

// ---------------------------------------------------------------------------
// Heralding
// ---------------------------------------------------------------------------

struct HeraldCondition {
    enum Kind { AtLeast, AtMost } kind = AtLeast;
    int threshold = 0;
    bool accepts(int clicks) const {
        return kind == AtLeast ? clicks >= threshold : clicks <= threshold;
    }
};

struct HeraldOutcome {
    bool accepted = false;
    int clicks = 0;
};

template <typename Register>
HeraldOutcome herald(Register& reg, const ReadoutModel& m, ReadoutBasis basis, int reps,
                     HeraldCondition cond, Rng& rng) {
    if (cond.threshold > reps && cond.kind == HeraldCondition::AtLeast)
        return {false, qnd_block(reg, m, basis, reps, rng)};
    const int clicks = qnd_block(reg, m, basis, reps, rng);
    return {cond.accepts(clicks), clicks};
}

// ---------------------------------------------------------------------------
// Threshold calibration (combined initialisation and readout fidelity)
//   F = 1/2 P(N >= T | a) + 1/2 P(N < T | b)
// ---------------------------------------------------------------------------

struct Histogram {
    std::vector<double> weight;  // index = click count
    double trials = 0.0;

    explicit Histogram(int max_count = 0) : weight(std::size_t(max_count) + 1, 0.0) {}
    void add(int n, double w = 1.0) {
        if (n >= int(weight.size())) weight.resize(std::size_t(n) + 1, 0.0);
        weight[std::size_t(n)] += w;
        trials += w;
    }
};

struct ThresholdScan {
    int best_threshold = 0;
    double best_fidelity = 0.0;
    double stderr_ = 0.0;
    std::vector<double> fidelity_of_threshold;
};

inline ThresholdScan sweep_threshold(const Histogram& a, const Histogram& b) {
    if (a.trials <= 0.0 || b.trials <= 0.0)
        throw std::invalid_argument("sweep_threshold: empty histogram");
    const int m = int(std::max(a.weight.size(), b.weight.size())) - 1;
    ThresholdScan scan;
    scan.fidelity_of_threshold.resize(std::size_t(m) + 2);
    double best = -1.0;
    for (int t = 0; t <= m + 1; ++t) {
        double pa = 0.0;  // P(N >= t | a)
        for (int n = t; n <= m; ++n)
            if (n < int(a.weight.size())) pa += a.weight[std::size_t(n)];
        pa /= a.trials;
        double pb = 0.0;  // P(N < t | b)
        for (int n = 0; n < t; ++n)
            if (n < int(b.weight.size())) pb += b.weight[std::size_t(n)];
        pb /= b.trials;
        const double f = 0.5 * (pa + pb);
        scan.fidelity_of_threshold[std::size_t(t)] = f;
        if (f > best) {
            best = f;
            scan.best_threshold = t;
            const double se2 =
                pa * (1.0 - pa) / a.trials + pb * (1.0 - pb) / b.trials;
            scan.stderr_ = 0.5 * std::sqrt(std::max(0.0, se2));
        }
    }
    scan.best_fidelity = best;
    return scan;
}

struct CalibrationRow {
    int readouts = 0;
    int best_threshold = 0;
    double fidelity = 0.0;
    double stderr_ = 0.0;
};

// Readout calibration for two given prepared registers: run m_max readouts
// per trial, histogram every prefix count, and optimize the threshold per m.
inline std::vector<CalibrationRow> calibrate(const ReadoutModel& m, const PairRegister& prep_a,
                                             const PairRegister& prep_b, int m_min, int m_max,
                                             long trials, std::uint64_t seed,
                                             ReadoutBasis basis = ReadoutBasis::Spin) {
    if (trials < 1) throw std::invalid_argument("calibrate: trials must be >= 1");
    if (m_min < 1 || m_max < m_min) throw std::invalid_argument("calibrate: bad m range");

    const int n_m = m_max - m_min + 1;
    std::vector<Histogram> hist_a(static_cast<std::size_t>(n_m), Histogram(m_max));
    std::vector<Histogram> hist_b(static_cast<std::size_t>(n_m), Histogram(m_max));

    for (long trial = 0; trial < trials; ++trial) {
        for (int which = 0; which < 2; ++which) {
            Rng rng(derive_seed(seed, std::uint64_t(2 * trial + which)));
            PairRegister reg = which == 0 ? prep_a : prep_b;
            auto& hists = which == 0 ? hist_a : hist_b;
            int clicks = 0;
            int mi = 0;
            for (int k = 1; k <= m_max; ++k) {
                clicks += qnd_block(reg, m, basis, 1, rng);
                if (k >= m_min) hists[std::size_t(mi++)].add(clicks);
            }
        }
    }

    std::vector<CalibrationRow> rows(static_cast<std::size_t>(n_m));
    for (int i = 0; i < n_m; ++i) {
        const auto scan = sweep_threshold(hist_a[std::size_t(i)], hist_b[std::size_t(i)]);
        rows[std::size_t(i)] = {m_min + i, scan.best_threshold, scan.best_fidelity,
                                scan.stderr_};
    }
    return rows;
}

// Full two-step spin calibration pipeline: thermal register, parity
// initialisation (herald even), spin initialisation into up-up or down-down,
// then the readout block being calibrated. Trials failing a herald are
// discarded, as in the experiment.
struct SpinCalibConfig {
    int parity_reps = 20;
    int parity_min_clicks = 15;  // "> 14/20"
    int spin_reps = 30;
    int spin_hi = 26;  // "> 25/30"
    int spin_lo = 2;   // "< 3/30"
    int m_min = 1;
    int m_max = 50;
    long trials = 4000;
};

inline std::vector<CalibrationRow> calibrate_spin_pipeline(const ReadoutModel& m,
                                                           const SpinCalibConfig& cfg,
                                                           std::uint64_t seed) {
    const int n_m = cfg.m_max - cfg.m_min + 1;
    std::vector<Histogram> hist_a(static_cast<std::size_t>(n_m), Histogram(cfg.m_max));
    std::vector<Histogram> hist_b(static_cast<std::size_t>(n_m), Histogram(cfg.m_max));

    long attempts = 0;
    long accepted = 0;
    const long wanted = cfg.trials;
    while (accepted < 2 * wanted && attempts < 100 * wanted) {
        Rng rng(derive_seed(seed, std::uint64_t(attempts)));
        ++attempts;
        PairRegister reg = PairRegister::thermal();
        const auto parity = herald(reg, m, ReadoutBasis::Parity, cfg.parity_reps,
                                   {HeraldCondition::AtLeast, cfg.parity_min_clicks}, rng);
        if (!parity.accepted) continue;
        const int n_spin = qnd_block(reg, m, ReadoutBasis::Spin, cfg.spin_reps, rng);
        std::vector<Histogram>* hists = nullptr;
        if (n_spin >= cfg.spin_hi)
            hists = &hist_a;
        else if (n_spin <= cfg.spin_lo)
            hists = &hist_b;
        else
            continue;
        ++accepted;
        int clicks = 0, mi = 0;
        for (int k = 1; k <= cfg.m_max; ++k) {
            clicks += qnd_block(reg, m, ReadoutBasis::Spin, 1, rng);
            if (k >= cfg.m_min) (*hists)[std::size_t(mi++)].add(clicks);
        }
    }
    if (accepted == 0) throw std::runtime_error("calibrate_spin_pipeline: no trial heralded");

    std::vector<CalibrationRow> rows(static_cast<std::size_t>(n_m));
    for (int i = 0; i < n_m; ++i) {
        const auto scan = sweep_threshold(hist_a[std::size_t(i)], hist_b[std::size_t(i)]);
        rows[std::size_t(i)] = {cfg.m_min + i, scan.best_threshold, scan.best_fidelity,
                                scan.stderr_};
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Entanglement by sequential parity measurements (Fig. 4)
// ---------------------------------------------------------------------------

struct EntangleConfig {
    int yy_reps = 20;
    int yy_min_clicks = 15;  // sigma_y sigma_y = +1 herald (bright)
    int zz_reps = 4;
    int zz_max_clicks = 0;   // sigma_z sigma_z = -1 herald (dark, "< 1/4")
    int meas_reps = 18;
    int meas_threshold = 7;  // clicks >= threshold classify even parity (+1)
    double x_hz = 2080.99;   // sets the free-evolution x-rotation rate
    long trials = 2000;
};

struct EntangleResult {
    double herald_rate = 0.0;
    double xx = 0.0, yy = 0.0, zz = 0.0;
    double fidelity = 0.0;
    long accepted = 0;
};

namespace qnd {

// Prepares (|ud> + |du>)/sqrt2 by heralding sigma_yy = +1 then sigma_zz = -1.
template <typename Prep>
bool herald_bell(PairRegister& reg, const ReadoutModel& m, const EntangleConfig& cfg, Rng& rng,
                 Prep&& prep) {
    reg = prep();
    reg.rotate_both(rx(0.5 * pi));
    const auto h1 = herald(reg, m, ReadoutBasis::Parity, cfg.yy_reps,
                           {HeraldCondition::AtLeast, cfg.yy_min_clicks}, rng);
    reg.rotate_both(rx(-0.5 * pi));
    if (!h1.accepted) return false;
    const auto h2 = herald(reg, m, ReadoutBasis::Parity, cfg.zz_reps,
                           {HeraldCondition::AtMost, cfg.zz_max_clicks}, rng);
    return h2.accepted;
}

}  // namespace qnd

// Measures <xx>, <yy>, <zz> of the heralded state through basis rotations
// followed by a z-parity block, exactly as run: x rotations are free
// evolution (angle 2 pi X t), z rotations are treated as ideal.
inline EntangleResult entangle_protocol(const ReadoutModel& m, const EntangleConfig& cfg,
                                        std::uint64_t seed) {
    m.validate();
    EntangleResult res;
    long attempts = 0;
    const CMat rx_p = qnd::rx(0.5 * pi), rx_m = qnd::rx(-0.5 * pi);
    const CMat rz_p = qnd::rz(0.5 * pi), rz_m = qnd::rz(-0.5 * pi);

    std::array<double, 3> sums{0.0, 0.0, 0.0};
    std::array<long, 3> counts{0, 0, 0};
    for (int obs = 0; obs < 3; ++obs) {  // 0 = zz, 1 = yy, 2 = xx
        for (long trial = 0; trial < cfg.trials; ++trial) {
            Rng rng(derive_seed(seed, std::uint64_t(obs) * 0x10000000ULL + std::uint64_t(trial)));
            ++attempts;
            PairRegister reg;
            if (!qnd::herald_bell(reg, m, cfg, rng, [] { return PairRegister::thermal(); }))
                continue;
            if (obs == 1) {
                reg.rotate_both(rx_p);  // y -> z
            } else if (obs == 2) {
                reg.rotate_both(rz_m);
                reg.rotate_both(rx_m);
                reg.rotate_both(rz_p);  // x -> z
            }
            const int n = qnd_block(reg, m, ReadoutBasis::Parity, cfg.meas_reps, rng);
            const double value = n >= cfg.meas_threshold ? 1.0 : -1.0;  // bright = even
            sums[std::size_t(obs)] += value;
            ++counts[std::size_t(obs)];
            ++res.accepted;
        }
    }
    res.herald_rate = attempts > 0 ? double(res.accepted) / double(attempts) : 0.0;
    res.zz = counts[0] > 0 ? sums[0] / double(counts[0]) : 0.0;
    res.yy = counts[1] > 0 ? sums[1] / double(counts[1]) : 0.0;
    res.xx = counts[2] > 0 ? sums[2] / double(counts[2]) : 0.0;
    res.fidelity = 0.25 * (1.0 - res.zz + res.yy + res.xx);
    return res;
}

// Parity oscillation: herald the Bell state, evolve freely for t (x rotation
// by 2 pi X t on both pairs), then measure the z parity.
inline std::vector<double> entangle_parity_oscillation(const ReadoutModel& m,
                                                       const EntangleConfig& cfg,
                                                       const std::vector<double>& times_s,
                                                       std::uint64_t seed) {
    std::vector<double> zz(times_s.size(), 0.0);
    parallel_for(times_s.size(), [&](std::size_t ti) {
        double sum = 0.0;
        long n_ok = 0;
        for (long trial = 0; trial < cfg.trials; ++trial) {
            Rng rng(derive_seed(seed, (std::uint64_t(ti) << 24) + std::uint64_t(trial)));
            PairRegister reg;
            if (!qnd::herald_bell(reg, m, cfg, rng, [] { return PairRegister::thermal(); }))
                continue;
            reg.rotate_both(qnd::rx(two_pi * cfg.x_hz * times_s[ti]));
            const int n = qnd_block(reg, m, ReadoutBasis::Parity, cfg.meas_reps, rng);
            sum += n >= cfg.meas_threshold ? 1.0 : -1.0;
            ++n_ok;
        }
        zz[ti] = n_ok > 0 ? sum / double(n_ok) : 0.0;
    });
    return zz;
}

// ---------------------------------------------------------------------------
// Repetition synchronization
// ---------------------------------------------------------------------------

// Smallest padding >= 0 making the total repetition duration a multiple of
// the pseudo-spin period: 1/X for spin readout, 1/(2X) for parity.
inline double sync_padding(double duration_s, double x_hz, ReadoutBasis kind) {
    if (duration_s < 0.0) throw std::invalid_argument("sync_padding: negative duration");
    if (!(x_hz > 0.0)) throw std::invalid_argument("sync_padding: X must be > 0");
    const double period = kind == ReadoutBasis::Spin ? 1.0 / x_hz : 0.5 / x_hz;
    const double r = std::fmod(duration_s, period);
    if (r <= 1e-9 * period || period - r <= 1e-9 * period) return 0.0;
    return period - r;
}

}  // namespace pairspin
