#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "pairspin/geometry.hpp"
#include "pairspin/noisefield.hpp"

using namespace pairspin;
using Catch::Approx;

namespace {
const Vec3 field_axis = Vec3(1.0, 1.0, 1.0) / std::sqrt(3.0);
}

TEST_CASE("dipolar coupling on the nearest-neighbour bond", "[geometry]") {
    const double x = dipolar_x_hz(SiteIndex{1, 1, 1}.to_meters(a0_diamond), field_axis);
    CHECK(std::abs(x) == Approx(2062.37).margin(0.01));
    CHECK(x < 0.0);  // (1 - 3cos^2) = -2 on axis
}

TEST_CASE("dipolar coupling vanishes at the magic angle", "[geometry]") {
    // rotate a unit vector to cos(theta) = 1/sqrt(3) relative to [1,1,1]
    const double ct = 1.0 / std::sqrt(3.0);
    const double st = std::sqrt(1.0 - ct * ct);
    const Vec3 e1 = field_axis;
    const Vec3 e2 = Vec3{1.0, -1.0, 0.0} / std::sqrt(2.0);
    const Vec3 r = (e1 * ct + e2 * st) * 1e-9;
    CHECK(dipolar_x_hz(r, field_axis) == Approx(0.0).margin(1e-9));
}

TEST_CASE("dipolar coupling of the pair-C bond class", "[geometry]") {
    const double x = dipolar_x_hz(SiteIndex{-1, -1, -3}.to_meters(a0_diamond), field_axis);
    CHECK(std::abs(x) == Approx(186.92).margin(0.05));
}

TEST_CASE("dipolar coupling angular pattern and radial scaling", "[geometry]") {
    const Vec3 on_axis = field_axis * 2e-9;
    const Vec3 transverse = Vec3{1.0, -1.0, 0.0} / std::sqrt(2.0) * 2e-9;
    const double x_par = dipolar_x_hz(on_axis, field_axis);
    const double x_perp = dipolar_x_hz(transverse, field_axis);
    CHECK(x_par == Approx(-2.0 * x_perp).epsilon(1e-12));
    CHECK(dipolar_x_hz(on_axis * 2.0, field_axis) == Approx(x_par / 8.0).epsilon(1e-12));
    CHECK_THROWS_AS(dipolar_x_hz(Vec3{}, field_axis), std::domain_error);
}

TEST_CASE("hyperfine point-dipole components", "[geometry]") {
    const auto on_axis = hyperfine_dipolar_hz(field_axis * 2e-9, field_axis);
    CHECK(on_axis.a_perp_hz == Approx(0.0).margin(1e-9));
    // frozen from an independent evaluation of the point-dipole formula
    CHECK(on_axis.a_par_hz == Approx(4971.2424).margin(1e-3));

    const double ct = 1.0 / std::sqrt(3.0);
    const double st = std::sqrt(1.0 - ct * ct);
    const Vec3 magic = (field_axis * ct + Vec3{1.0, -1.0, 0.0} / std::sqrt(2.0) * st) * 2e-9;
    CHECK(hyperfine_dipolar_hz(magic, field_axis).a_par_hz == Approx(0.0).margin(1e-9));
    CHECK_THROWS_AS(hyperfine_dipolar_hz(Vec3{}, field_axis), std::domain_error);
}

TEST_CASE("hyperfine field difference Z", "[geometry]") {
    CHECK(pair_z_hz({130.0, 50.0}, {130.0, 50.0}, 432140.0) == 0.0);
    CHECK(pair_z_hz({130.0, 0.0}, {0.0, 0.0}, 1e5) == Approx(130.0));
    CHECK(pair_z_hz({100.0, 50.0}, {0.0, 30.0}, 432140.0) == Approx(100.0037023).margin(1e-6));
    CHECK_THROWS_AS(pair_z_hz({1.0, 0.0}, {0.0, 0.0}, 0.0), std::domain_error);
}

TEST_CASE("coupling table reproduces the published multiplicities", "[geometry]") {
    const auto table = coupling_table(8.0);
    REQUIRE(table.size() >= 10);
    const double x_vals[10] = {2062.37, 687.46, 236.8, 186.92, 133.52,
                               102.15,  76.38,  75.95, 61.29,  45.57};
    const int occ[10] = {1, 3, 12, 3, 3, 3, 1, 6, 6, 6};
    for (int i = 0; i < 10; ++i) {
        CHECK(table[std::size_t(i)].x_hz == Approx(x_vals[i]).margin(0.02));
        CHECK(table[std::size_t(i)].occurrence == occ[i]);
    }
    CHECK(table[0].representative == SiteIndex{1, 1, 1});
    CHECK_THROWS_AS(coupling_table(1.0), std::invalid_argument);
}

TEST_CASE("coupling magnitude is invariant under component permutation", "[geometry]") {
    const auto table = coupling_table(6.0);
    for (std::size_t i = 0; i < std::min<std::size_t>(table.size(), 8); ++i) {
        const auto r = table[i].representative;
        const int perms[6][3] = {{r.x, r.y, r.z}, {r.x, r.z, r.y}, {r.y, r.x, r.z},
                                 {r.y, r.z, r.x}, {r.z, r.x, r.y}, {r.z, r.y, r.x}};
        for (const auto& p : perms) {
            const SiteIndex s{p[0], p[1], p[2]};
            if (!is_lattice_site(s)) continue;
            const double x = std::abs(dipolar_x_hz(s.to_meters(a0_diamond), field_axis));
            CHECK(x == Approx(table[i].x_hz).margin(1e-6));
        }
    }
}

TEST_CASE("bath sampling is reproducible and respects the abundance", "[geometry]") {
    LatticeConfig cfg;
    const auto a = sample_bath(cfg, BathTarget::nn_pair(), 42);
    const auto b = sample_bath(cfg, BathTarget::nn_pair(), 42);
    REQUIRE(a.sites.size() == b.sites.size());
    for (std::size_t i = 0; i < a.sites.size(); ++i) {
        CHECK(a.couplings_1[i] == b.couplings_1[i]);
        CHECK(a.couplings_2[i] == b.couplings_2[i]);
    }

    cfg.abundance = 0.0;
    CHECK(sample_bath(cfg, BathTarget::nn_pair(), 1).sites.empty());

    // binomial mean over seeds: abundance * (site count - 2 central spins)
    cfg.abundance = 0.011;
    cfg.exclusion_cutoff_hz = 1e12;  // count occupancy only
    const int n_seeds = 200;
    double total = 0.0;
    for (int s = 0; s < n_seeds; ++s)
        total += double(sample_bath(cfg, BathTarget::nn_pair(), derive_seed(7, s)).sites.size());
    const double n_sites = 8.0 * 15 * 15 * 15 - 2.0;
    const double expect = cfg.abundance * n_sites;
    const double se = std::sqrt(expect * (1.0 - cfg.abundance) / n_seeds);
    CHECK(std::abs(total / n_seeds - expect) < 5.0 * se);
}

TEST_CASE("bath excludes strongly coupled sites", "[geometry]") {
    LatticeConfig cfg;
    for (int s = 0; s < 20; ++s) {
        const auto bath = sample_bath(cfg, BathTarget::pair_c(1), derive_seed(3, s));
        for (std::size_t k = 0; k < bath.couplings_1.size(); ++k) {
            CHECK(std::abs(bath.couplings_1[k]) <= cfg.exclusion_cutoff_hz);
            CHECK(std::abs(bath.couplings_2[k]) <= cfg.exclusion_cutoff_hz);
        }
    }
}

TEST_CASE("pair census statistics", "[geometry]") {
    LatticeConfig cfg;
    const auto res = pair_census(cfg, 400, 50.0, 500.0, 99);
    CHECK(res.mean > 0.9);
    CHECK(res.mean < 1.7);
    CHECK(res.frac_ge1 > 0.55);
    CHECK(res.frac_ge1 < 0.9);

    LatticeConfig empty = cfg;
    empty.abundance = 0.0;
    const auto zero = pair_census(empty, 50, 50.0, 500.0, 1);
    CHECK(zero.mean == 0.0);
    CHECK(zero.frac_ge1 == 0.0);

    CHECK_THROWS_AS(pair_census(cfg, 10, 500.0, 50.0, 1), std::invalid_argument);
}
