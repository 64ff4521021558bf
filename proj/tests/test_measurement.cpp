#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pairspin/measurement.hpp"

using namespace pairspin;
using Catch::Approx;

namespace {

ReadoutModel ideal_model() {
    ReadoutModel m;
    m.f0 = 1.0;
    m.f1 = 1.0;
    return m;
}

ReadoutModel paper_model() {
    ReadoutModel m;  // defaults carry the published readout fidelities
    m.dephasing = 0.004;
    m.leakage = 0.0015;
    return m;
}

double binom_pmf(int n, int k, double p) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * double(n - i) / double(i + 1);
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace

TEST_CASE("ideal spin readout separates the polarized states", "[measurement]") {
    const auto m = ideal_model();
    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        auto up = PairRegister::basis_state(0, 0);
        CHECK(qnd_block(up, m, ReadoutBasis::Spin, 25, rng) == 25);
        auto down = PairRegister::basis_state(1, 1);
        CHECK(qnd_block(down, m, ReadoutBasis::Spin, 25, rng) == 0);
    }
}

TEST_CASE("basis states are fixed points of the ideal measurement", "[measurement]") {
    const auto m = ideal_model();
    Rng rng(7);
    auto reg = PairRegister::basis_state(0, 1);
    qnd_block(reg, m, ReadoutBasis::Spin, 30, rng);
    CHECK(reg.rho_aa(1, 1).real() == Approx(1.0).margin(1e-12));
    CHECK(reg.mass() == Approx(1.0).margin(1e-12));
}

TEST_CASE("parity readout is a QND fixed point on the Bell state", "[measurement]") {
    const auto m = ideal_model();
    auto reg = PairRegister::bell_psi_plus();

    // hand-built 4x4 no-click Kraus for phi_A = phi_B = pi/2:
    // p(s) = (1 - cos(sA pi/2 + sB pi/2))/2 -> even states 1, odd states 0
    const double p[4] = {1.0, 0.0, 0.0, 1.0};
    CMat kraus(4);
    for (int i = 0; i < 4; ++i) kraus(i, i) = std::sqrt(1.0 - p[i]);
    const CMat expected = kraus * reg.rho_aa * kraus;  // odd projector: state unchanged

    Rng rng(3);
    const int clicks = qnd_block(reg, m, ReadoutBasis::Parity, 20, rng);
    CHECK(clicks == 0);  // odd parity is dark, deterministically
    CHECK((reg.rho_aa - expected).frobenius_norm() < 1e-12);
    CHECK(reg.mass() == Approx(1.0).margin(1e-12));
}

TEST_CASE("register stays normalized and positive under the full channel", "[measurement]") {
    auto m = paper_model();
    m.inter_rep_rotation = 0.07;
    Rng rng(11);
    auto reg = PairRegister::thermal();
    for (int k = 0; k < 60; ++k) {
        qnd_block(reg, m, k % 2 ? ReadoutBasis::Spin : ReadoutBasis::Parity, 1, rng);
        CHECK(reg.mass() == Approx(1.0).margin(1e-10));
        CHECK(reg.min_eigenvalue() >= -1e-10);
    }
}

TEST_CASE("leakage moves antiparallel weight to the parallel sector", "[measurement]") {
    ReadoutModel m = ideal_model();
    m.leakage = 0.1;
    Rng rng(5);
    auto reg = PairRegister::basis_state(0, 0);
    qnd_block(reg, m, ReadoutBasis::Spin, 1, rng);
    CHECK(reg.parallel_prob(0) == Approx(0.1).margin(1e-12));
    CHECK(reg.mass() == Approx(1.0).margin(1e-12));
}

TEST_CASE("heralding conditions", "[measurement]") {
    const auto m = ideal_model();
    Rng rng(2);
    auto reg = PairRegister::basis_state(0, 0);
    const auto ok = herald(reg, m, ReadoutBasis::Spin, 30, {HeraldCondition::AtLeast, 25}, rng);
    CHECK(ok.accepted);

    auto reg2 = PairRegister::basis_state(0, 0);
    const auto never =
        herald(reg2, m, ReadoutBasis::Spin, 30, {HeraldCondition::AtLeast, 31}, rng);
    CHECK_FALSE(never.accepted);
}

TEST_CASE("heralded posterior fidelity from the mixed antiparallel register", "[measurement]") {
    const auto m = paper_model();
    double accepted = 0.0, fid = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        Rng rng(derive_seed(17, trial));
        auto reg = PairRegister::mixed_antiparallel();
        const auto h = herald(reg, m, ReadoutBasis::Spin, 30, {HeraldCondition::AtLeast, 25}, rng);
        if (!h.accepted) continue;
        accepted += 1.0;
        fid += reg.rho_aa(0, 0).real();  // P(up-up | heralded)
    }
    REQUIRE(accepted > 30.0);
    CHECK(fid / accepted > 0.99);
}

TEST_CASE("threshold sweep matches the closed-form binomial", "[measurement]") {
    Rng rng(2024);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 1 + int(rng.uniform() * 5.0);
        const double pa = 0.05 + 0.9 * rng.uniform();
        const double pb = 0.05 + 0.9 * rng.uniform();
        Histogram ha(m), hb(m);
        for (int k = 0; k <= m; ++k) {
            ha.add(k, 1000.0 * binom_pmf(m, k, pa));
            hb.add(k, 1000.0 * binom_pmf(m, k, pb));
        }
        const auto scan = sweep_threshold(ha, hb);
        // brute-force oracle straight from the binomial tail sums
        double best = -1.0;
        for (int t = 0; t <= m + 1; ++t) {
            double fa = 0.0, fb = 0.0;
            for (int k = t; k <= m; ++k) fa += binom_pmf(m, k, pa);
            for (int k = 0; k < t; ++k) fb += binom_pmf(m, k, pb);
            best = std::max(best, 0.5 * (fa + fb));
        }
        CHECK(scan.best_fidelity == Approx(best).margin(1e-12));
    }
}

TEST_CASE("degenerate threshold sweeps", "[measurement]") {
    Histogram sep_a(10), sep_b(10);
    sep_a.add(9, 50.0);
    sep_b.add(1, 50.0);
    CHECK(sweep_threshold(sep_a, sep_b).best_fidelity == Approx(1.0));

    Histogram same_a(4), same_b(4);
    for (int k = 0; k <= 4; ++k) {
        same_a.add(k, binom_pmf(4, k, 0.5));
        same_b.add(k, binom_pmf(4, k, 0.5));
    }
    const auto scan = sweep_threshold(same_a, same_b);
    for (double f : scan.fidelity_of_threshold) CHECK(f == Approx(0.5).margin(1e-12));
}

TEST_CASE("readout calibration with an ideal model saturates", "[measurement]") {
    const auto rows = calibrate(ideal_model(), PairRegister::basis_state(0, 0),
                                PairRegister::basis_state(1, 1), 1, 5, 200, 3);
    for (const auto& r : rows) CHECK(r.fidelity == Approx(1.0));
}

TEST_CASE("full pipeline fidelity has an interior optimum", "[measurement]") {
    SpinCalibConfig cfg;
    cfg.m_max = 60;
    cfg.trials = 800;
    const auto rows = calibrate_spin_pipeline(paper_model(), cfg, 4);
    REQUIRE(rows.size() == 60);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].fidelity > rows[best].fidelity) best = i;
    CHECK(best > 2);                    // rises first (NV readout noise averages out)
    CHECK(best < rows.size() - 4);      // then decays (pair decoheres)
    CHECK(rows[best].fidelity > 0.95);
    CHECK(rows[best].fidelity <= 1.0);
}

TEST_CASE("entanglement protocol on the ideal model", "[measurement]") {
    EntangleConfig cfg;
    cfg.trials = 150;
    const auto res = entangle_protocol(ideal_model(), cfg, 6);
    REQUIRE(res.accepted > 0);
    CHECK(res.zz == Approx(-1.0));
    CHECK(res.yy == Approx(1.0));
    CHECK(res.xx == Approx(1.0));
    CHECK(res.fidelity == Approx(1.0));
    CHECK(res.herald_rate > 0.01);
}

TEST_CASE("parity oscillation phase relation", "[measurement]") {
    EntangleConfig cfg;
    cfg.trials = 120;
    const double period = 1.0 / cfg.x_hz;
    const auto zz = entangle_parity_oscillation(ideal_model(), cfg,
                                                {0.0, 0.25 * period, 0.5 * period}, 9);
    CHECK(zz[0] == Approx(-1.0));  // -cos(0)
    CHECK(zz[1] == Approx(1.0));   // -cos(pi)
    CHECK(zz[2] == Approx(-1.0));  // -cos(2 pi)
}

TEST_CASE("entanglement fidelity degrades with decoherence knobs", "[measurement]") {
    EntangleConfig cfg;
    cfg.trials = 400;
    const auto res = entangle_protocol(paper_model(), cfg, 12);
    REQUIRE(res.accepted > 50);
    CHECK(res.fidelity < 0.98);
    CHECK(res.fidelity > 0.5);  // still witnesses entanglement
    CHECK(res.zz < -0.5);
}

TEST_CASE("single-pair spin readout distinguishes the x states", "[measurement]") {
    const auto m = ideal_model();
    Rng rng(3);
    auto plus = SinglePairRegister::x_state(+1);
    CHECK(qnd_block(plus, m, ReadoutBasis::Spin, 6, rng) == 6);
    auto minus = SinglePairRegister::x_state(-1);
    CHECK(qnd_block(minus, m, ReadoutBasis::Spin, 6, rng) == 0);
}

TEST_CASE("single-pair parity readout separates the subspaces", "[measurement]") {
    const auto m = ideal_model();
    Rng rng(5);
    auto anti = SinglePairRegister::x_state(+1);
    CHECK(qnd_block(anti, m, ReadoutBasis::Parity, 10, rng) == 10);

    SinglePairRegister par;
    par.w_par = 1.0;
    CHECK(qnd_block(par, m, ReadoutBasis::Parity, 10, rng) == 0);

    // thermal register: parity heralding projects out the parallel part
    auto thermal = SinglePairRegister::thermal();
    const int n = qnd_block(thermal, m, ReadoutBasis::Parity, 10, rng);
    if (n == 10) CHECK(thermal.w_par == Approx(0.0).margin(1e-12));
    if (n == 0) CHECK(thermal.rho.trace().real() == Approx(0.0).margin(1e-12));
}

TEST_CASE("repetition synchronization padding", "[measurement]") {
    const double period = 1.0 / 2080.99;
    CHECK(sync_padding(3.0 * period, 2080.99, ReadoutBasis::Spin) == Approx(0.0).margin(1e-12));
    const double pad = sync_padding(157e-6, 2080.99, ReadoutBasis::Spin);
    CHECK(pad == Approx(323.54e-6).margin(0.02e-6));
    // parity period is half the spin period
    const double pad_parity = sync_padding(157e-6, 2080.99, ReadoutBasis::Parity);
    CHECK(pad_parity == Approx(period / 2.0 - 157e-6).margin(1e-9));
    CHECK_THROWS_AS(sync_padding(-1.0, 2081.0, ReadoutBasis::Spin), std::invalid_argument);
}
