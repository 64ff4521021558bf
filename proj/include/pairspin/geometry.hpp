#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pairspin/constants.hpp"
#include "pairspin/parallel.hpp"
#include "pairspin/rng.hpp"
#include "pairspin/vec3.hpp"

namespace pairspin {

// ---------------------------------------------------------------------------
// Diamond lattice
//
// FCC + two-atom basis, 8 atoms per conventional cell. Coordinates are in
// units of a0/4, so sublattice A sites have even components with
// x+y+z = 0 (mod 4) and sublattice B sites (A + [1,1,1]) have odd components
// with x+y+z = 3 (mod 4).
// ---------------------------------------------------------------------------

inline bool is_lattice_site(const SiteIndex& s) {
    const bool even = (s.x % 2 == 0) && (s.y % 2 == 0) && (s.z % 2 == 0);
    const bool odd = (s.x % 2 != 0) && (s.y % 2 != 0) && (s.z % 2 != 0);
    const int m = ((s.x + s.y + s.z) % 4 + 4) % 4;
    if (even) return m == 0;
    if (odd) return m == 3;
    return false;
}

struct LatticeConfig {
    double a0 = a0_diamond;          // lattice constant [m]
    int cells_per_axis = 15;         // conventional cells per axis
    double abundance = 0.011;        // 13C occupation probability
    Vec3 b_field_axis = Vec3(1.0, 1.0, 1.0) / std::sqrt(3.0);
    double exclusion_cutoff_hz = 50.0;  // drop bath spins with |A| above this

    void validate() const {
        if (!(abundance >= 0.0 && abundance < 1.0))
            throw std::invalid_argument("LatticeConfig: abundance must be in [0, 1)");
        if (cells_per_axis < 1)
            throw std::invalid_argument("LatticeConfig: cells_per_axis must be >= 1");
        if (!(exclusion_cutoff_hz > 0.0))
            throw std::invalid_argument("LatticeConfig: exclusion_cutoff must be > 0");
        if (b_field_axis.norm() == 0.0)
            throw std::invalid_argument("LatticeConfig: zero field axis");
    }
};

// All sites of an N x N x N block of conventional cells, fixed enumeration
// order (cell-major, then basis offset). Sampling a bath walks this order
// with one RNG stream, so a (config, seed) pair is reproducible bit-for-bit.
inline std::vector<SiteIndex> enumerate_sites(int cells_per_axis, SiteIndex origin = {0, 0, 0}) {
    static constexpr int offsets[8][3] = {
        {0, 0, 0}, {0, 2, 2}, {2, 0, 2}, {2, 2, 0},
        {1, 1, 1}, {1, 3, 3}, {3, 1, 3}, {3, 3, 1},
    };
    std::vector<SiteIndex> sites;
    sites.reserve(std::size_t(8) * cells_per_axis * cells_per_axis * cells_per_axis);
    for (int cx = 0; cx < cells_per_axis; ++cx)
        for (int cy = 0; cy < cells_per_axis; ++cy)
            for (int cz = 0; cz < cells_per_axis; ++cz)
                for (const auto& o : offsets)
                    sites.push_back({origin.x + 4 * cx + o[0], origin.y + 4 * cy + o[1],
                                     origin.z + 4 * cz + o[2]});
    return sites;
}

// A-sublattice site nearest the block center; used as the reference spin.
inline SiteIndex center_site(int cells_per_axis) {
    const int c = 4 * (cells_per_axis / 2);
    return {c, c, c};
}

// ---------------------------------------------------------------------------
// Couplings
// ---------------------------------------------------------------------------

// Secular 13C-13C dipolar coupling X/2pi in Hz, signed:
//   X = mu0 gamma_c^2 hbar / (8 pi r^3) * (1 - 3 cos^2 theta)
// theta measured from the field axis. Note (1 - 3cos^2) = -2 on axis, so the
// on-axis nearest-neighbour value is -2062.37 Hz; the literature quotes |X|.
inline double dipolar_x_hz(const Vec3& r, const Vec3& axis) {
    const double rn = r.norm();
    if (rn <= 0.0) throw std::domain_error("dipolar_x_hz: zero separation");
    const double ct = r.dot(axis) / (rn * axis.norm());
    const double pref = mu0 * gamma_c13 * gamma_c13 * hbar / (8.0 * pi * rn * rn * rn);
    return pref * (1.0 - 3.0 * ct * ct) / two_pi;
}

struct HyperfineComponents {
    double a_par_hz = 0.0;
    double a_perp_hz = 0.0;
};

// Point-dipole NV-13C hyperfine components in Hz:
//   A_par  = p (3 cos^2 theta - 1),  A_perp = 3 p |sin theta cos theta|,
//   p = mu0 gamma_e gamma_c hbar / (4 pi r^3) / 2pi.
inline HyperfineComponents hyperfine_dipolar_hz(const Vec3& r_nv_to_c, const Vec3& axis) {
    const double rn = r_nv_to_c.norm();
    if (rn <= 0.0) throw std::domain_error("hyperfine_dipolar_hz: zero separation");
    const double ct = r_nv_to_c.dot(axis) / (rn * axis.norm());
    const double st2 = std::max(0.0, 1.0 - ct * ct);
    const double p = mu0 * gamma_e * gamma_c13 * hbar / (4.0 * pi * rn * rn * rn) / two_pi;
    return {p * (3.0 * ct * ct - 1.0), 3.0 * p * std::sqrt(st2) * std::abs(ct)};
}

// Hyperfine field difference Z in Hz (Methods):
//   Z = A1_par - A2_par + (A1_perp^2 - A2_perp^2) / f_larmor
inline double pair_z_hz(const HyperfineComponents& a1, const HyperfineComponents& a2,
                        double larmor_hz) {
    if (!(larmor_hz > 0.0)) throw std::domain_error("pair_z_hz: larmor must be > 0");
    return a1.a_par_hz - a2.a_par_hz +
           (a1.a_perp_hz * a1.a_perp_hz - a2.a_perp_hz * a2.a_perp_hz) / larmor_hz;
}

// ---------------------------------------------------------------------------
// Bath sampling
// ---------------------------------------------------------------------------

// Central spin configuration a bath is generated around.
struct BathTarget {
    enum Kind { NearestNeighbourPair, PairC, SingleSpin };
    Kind kind = NearestNeighbourPair;
    int pair_c_orientation = 0;  // which of the three [-1,-1,-3] permutations

    static BathTarget nn_pair() { return {NearestNeighbourPair, 0}; }
    static BathTarget pair_c(int orientation = 0) { return {PairC, orientation}; }
    static BathTarget single() { return {SingleSpin, 0}; }

    bool has_second_spin() const { return kind != SingleSpin; }

    SiteIndex second_spin_offset() const {
        switch (kind) {
            case NearestNeighbourPair: return {1, 1, 1};
            case PairC: {
                static constexpr int perms[3][3] = {{-1, -1, -3}, {-1, -3, -1}, {-3, -1, -1}};
                const auto& p = perms[((pair_c_orientation % 3) + 3) % 3];
                return {p[0], p[1], p[2]};
            }
            default: return {0, 0, 0};
        }
    }
};

struct SpinBath {
    std::vector<Vec3> sites;          // meters, relative to spin 1
    std::vector<double> couplings_1;  // zz Ising coupling to pair spin 1 [Hz]
    std::vector<double> couplings_2;  // zz Ising coupling to pair spin 2 [Hz]; 0 for single
    std::uint64_t seed = 0;
};

// Ising zz coefficient of the secular dipolar Hamiltonian X(3IzIz - I.I) is 2X.
inline double bath_coupling_hz(const Vec3& r, const Vec3& axis) {
    return 2.0 * dipolar_x_hz(r, axis);
}

// Populates the 13C bath around the target: every lattice site is occupied
// independently with probability `abundance`; the central spin sites are
// skipped and sites with |A| > exclusion_cutoff to either central spin are
// dropped (they would break the pair description).
inline SpinBath sample_bath(const LatticeConfig& cfg, const BathTarget& target,
                            std::uint64_t seed) {
    cfg.validate();
    const SiteIndex s1 = center_site(cfg.cells_per_axis);
    const SiteIndex s2 = s1 + target.second_spin_offset();
    if (target.has_second_spin() && s1 == s2)
        throw std::invalid_argument("sample_bath: pair spins on the same site");

    const auto sites = enumerate_sites(cfg.cells_per_axis);
    const Vec3 p1 = s1.to_meters(cfg.a0);
    const Vec3 p2 = s2.to_meters(cfg.a0);

    SpinBath bath;
    bath.seed = seed;
    Rng rng(seed);
    for (const auto& s : sites) {
        const bool occupied = rng.bernoulli(cfg.abundance);
        if (!occupied) continue;
        if (s == s1 || (target.has_second_spin() && s == s2)) continue;
        const Vec3 pos = s.to_meters(cfg.a0);
        const double a1 = bath_coupling_hz(pos - p1, cfg.b_field_axis);
        const double a2 =
            target.has_second_spin() ? bath_coupling_hz(pos - p2, cfg.b_field_axis) : 0.0;
        if (std::abs(a1) > cfg.exclusion_cutoff_hz || std::abs(a2) > cfg.exclusion_cutoff_hz)
            continue;
        bath.sites.push_back(pos - p1);
        bath.couplings_1.push_back(a1);
        bath.couplings_2.push_back(a2);
    }
    return bath;
}

// ---------------------------------------------------------------------------
// Coupling table (Table S1)
// ---------------------------------------------------------------------------

struct CouplingEntry {
    double x_hz = 0.0;       // |X|; sites with equal |X| merge
    int occurrence = 0;
    SiteIndex representative;
};

// Fixes one A-sublattice spin at the origin and groups all lattice vectors
// within max_radius (units a0/4) by coupling magnitude. Groups within tol_hz
// merge; the paper lists 75.95 and 76.38 Hz as distinct rows.
inline std::vector<CouplingEntry> coupling_table(double max_radius_lu, double tol_hz = 0.005,
                                                 double a0 = a0_diamond,
                                                 Vec3 axis = Vec3(1, 1, 1) / std::sqrt(3.0)) {
    if (max_radius_lu < std::sqrt(3.0))
        throw std::invalid_argument("coupling_table: radius below nearest neighbour");
    const int r = int(std::ceil(max_radius_lu));
    const double r2max = max_radius_lu * max_radius_lu;

    std::vector<std::pair<double, SiteIndex>> values;  // (|X|, r)
    for (int x = -r; x <= r; ++x)
        for (int y = -r; y <= r; ++y)
            for (int z = -r; z <= r; ++z) {
                const SiteIndex s{x, y, z};
                if ((x == 0 && y == 0 && z == 0) || !is_lattice_site(s)) continue;
                if (double(x) * x + double(y) * y + double(z) * z > r2max) continue;
                values.emplace_back(std::abs(dipolar_x_hz(s.to_meters(a0), axis)), s);
            }
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<CouplingEntry> table;
    for (const auto& [x, site] : values) {
        if (!table.empty() && std::abs(table.back().x_hz - x) <= tol_hz) {
            ++table.back().occurrence;
        } else {
            table.push_back({x, 1, site});
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Pair census
// ---------------------------------------------------------------------------

struct CensusResult {
    std::vector<int> counts;  // in-window pairs per bath
    double mean = 0.0;
    double stddev = 0.0;
    double frac_ge1 = 0.0;
};

// Expected number of nearest-neighbour pairs (bonds along the field axis,
// displacement [1,1,1] a0/4) with |Z| inside (z_lo, z_hi), per generated
// bath. The NV sits on the central lattice site, hyperfine is point-dipole.
//
// Volume note: sites span +-cells_per_axis conventional cells around the NV.
// With the 15-cell box taken literally the |Z| > 50 Hz shell is clipped and
// the occupancy statistics cannot reach the published values; see README.
inline CensusResult pair_census(const LatticeConfig& cfg, int n_baths, double z_lo_hz,
                                double z_hi_hz, std::uint64_t seed,
                                double larmor_hz = default_larmor_hz) {
    cfg.validate();
    if (n_baths < 1) throw std::invalid_argument("pair_census: n_baths must be >= 1");
    if (!(z_lo_hz < z_hi_hz)) throw std::invalid_argument("pair_census: empty z range");

    const int half = cfg.cells_per_axis;
    const int n_axis = 2 * half + 1;
    const auto sites = enumerate_sites(n_axis);
    const SiteIndex nv = center_site(n_axis);
    const Vec3 nv_pos = nv.to_meters(cfg.a0);
    const int span = 4 * n_axis;

    auto flat = [&](const SiteIndex& s) -> std::int64_t {
        if (s.x < 0 || s.y < 0 || s.z < 0 || s.x >= span || s.y >= span || s.z >= span)
            return -1;
        return (std::int64_t(s.x) * span + s.y) * span + s.z;
    };

    // Precompute the bonds whose |Z| falls in the window; the per-bath loop
    // then only tests occupancy of their endpoints.
    std::vector<std::int64_t> bond_a, bond_b;
    for (const auto& s : sites) {
        const SiteIndex partner = s + SiteIndex{1, 1, 1};
        const auto ia = flat(s), ib = flat(partner);
        if (ia < 0 || ib < 0 || !is_lattice_site(partner)) continue;
        if (s == nv || partner == nv) continue;
        const auto h1 = hyperfine_dipolar_hz(s.to_meters(cfg.a0) - nv_pos, cfg.b_field_axis);
        const auto h2 =
            hyperfine_dipolar_hz(partner.to_meters(cfg.a0) - nv_pos, cfg.b_field_axis);
        const double z = std::abs(pair_z_hz(h1, h2, larmor_hz));
        if (z > z_lo_hz && z < z_hi_hz) {
            bond_a.push_back(ia);
            bond_b.push_back(ib);
        }
    }

    CensusResult res;
    res.counts.assign(std::size_t(n_baths), 0);
    const std::size_t n_sites = sites.size();
    const std::size_t total = std::size_t(span) * span * span;

    parallel_for(std::size_t(n_baths), [&](std::size_t i) {
        thread_local std::vector<char> occ;
        if (occ.size() != total) occ.assign(total, 0);
        Rng rng(derive_seed(seed, i));
        std::vector<std::int64_t> occupied;
        occupied.reserve(std::size_t(cfg.abundance * double(n_sites) * 1.3) + 16);
        for (std::size_t k = 0; k < n_sites; ++k) {
            if (!rng.bernoulli(cfg.abundance)) continue;
            const auto id = flat(sites[k]);
            occ[std::size_t(id)] = 1;
            occupied.push_back(id);
        }
        occ[std::size_t(flat(nv))] = 0;
        int count = 0;
        for (std::size_t b = 0; b < bond_a.size(); ++b) {
            if (occ[std::size_t(bond_a[b])] && occ[std::size_t(bond_b[b])]) ++count;
        }
        res.counts[i] = count;
        for (const auto id : occupied) occ[std::size_t(id)] = 0;
    });

    double sum = 0.0, sum2 = 0.0;
    int ge1 = 0;
    for (const int c : res.counts) {
        sum += c;
        sum2 += double(c) * c;
        if (c >= 1) ++ge1;
    }
    res.mean = sum / n_baths;
    res.stddev = std::sqrt(std::max(0.0, sum2 / n_baths - res.mean * res.mean));
    res.frac_ge1 = double(ge1) / n_baths;
    return res;
}

}  // namespace pairspin
