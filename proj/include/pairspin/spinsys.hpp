#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pairspin/constants.hpp"
#include "pairspin/linalg.hpp"
#include "pairspin/parallel.hpp"

namespace pairspin {

// NV (spin 1) + two 13C (spin 1/2): 3 x 2 x 2 = 12 dimensional space.
// Basis order |m_s> x |m1> x |m2| with m_s in {+1, 0, -1} and m in {up, down}.
struct HamiltonianSpec {
    double d_hz = nv_zfs_hz;         // zero-field splitting
    double b_par_t = 0.0;            // field along the NV axis [T]
    double b_perp_t = 0.0;           // transverse field [T]
    std::array<double, 2> a_par_hz{0.0, 0.0};   // hyperfine per carbon
    std::array<double, 2> a_perp_hz{0.0, 0.0};
    double x_hz = 2062.37;           // bare intra-pair coupling

    static HamiltonianSpec with_larmor(double larmor_hz = default_larmor_hz) {
        HamiltonianSpec s;
        s.b_par_t = hz_to_rad(larmor_hz) / gamma_c13;
        return s;
    }
};

namespace spinops {

inline CMat sz3() {
    CMat m(3);
    m(0, 0) = 1.0;
    m(2, 2) = -1.0;
    return m;
}
inline CMat sx3() {
    CMat m(3);
    const double v = 1.0 / std::sqrt(2.0);
    m(0, 1) = v; m(1, 0) = v; m(1, 2) = v; m(2, 1) = v;
    return m;
}
inline CMat iz2() {
    CMat m(2);
    m(0, 0) = 0.5;
    m(1, 1) = -0.5;
    return m;
}
inline CMat ix2() {
    CMat m(2);
    m(0, 1) = 0.5; m(1, 0) = 0.5;
    return m;
}
inline CMat iy2() {
    CMat m(2);
    m(0, 1) = cplx(0.0, -0.5);
    m(1, 0) = cplx(0.0, 0.5);
    return m;
}

}  // namespace spinops

// Full system Hamiltonian in rad/s:
//   H = D Sz^2 + gamma_e (Bpar Sz + Bperp Sx)
//     + sum_i Sz (Apar_i Iz_i + Aperp_i Ix_i)
//     + gamma_c B.(I1 + I2) + X (3 Iz1 Iz2 - I1.I2)
inline CMat build_hamiltonian(const HamiltonianSpec& spec) {
    using namespace spinops;
    const CMat i3 = CMat::identity(3), i2 = CMat::identity(2);
    const CMat sz = kron(sz3(), kron(i2, i2));
    const CMat sz2 = kron(sz3() * sz3(), kron(i2, i2));
    const CMat sx = kron(sx3(), kron(i2, i2));
    const CMat iz1 = kron(i3, kron(iz2(), i2)), iz2_ = kron(i3, kron(i2, iz2()));
    const CMat ix1 = kron(i3, kron(ix2(), i2)), ix2_ = kron(i3, kron(i2, ix2()));
    const CMat iy1 = kron(i3, kron(iy2(), i2)), iy2_ = kron(i3, kron(i2, iy2()));

    CMat h(12);
    h += sz2 * hz_to_rad(spec.d_hz);
    h += sz * (gamma_e * spec.b_par_t);
    h += sx * (gamma_e * spec.b_perp_t);
    h += (sz * iz1) * hz_to_rad(spec.a_par_hz[0]);
    h += (sz * ix1) * hz_to_rad(spec.a_perp_hz[0]);
    h += (sz * iz2_) * hz_to_rad(spec.a_par_hz[1]);
    h += (sz * ix2_) * hz_to_rad(spec.a_perp_hz[1]);
    h += (iz1 + iz2_) * (gamma_c13 * spec.b_par_t);
    h += (ix1 + ix2_) * (gamma_c13 * spec.b_perp_t);
    const CMat hd = (iz1 * iz2_) * 3.0 - (ix1 * ix2_ + iy1 * iy2_ + iz1 * iz2_);
    h += hd * hz_to_rad(spec.x_hz);
    return h;
}

inline EigenDecomposition eigendecompose(const CMat& h) { return jacobi_eigh(h); }

struct EffectiveXPoint {
    double b_perp_t = 0.0;
    double x_eff_hz = 0.0;
    double overlap = 0.0;  // worst of the two state identifications
    bool flagged = false;  // overlap below threshold: avoided-crossing region
};

// Effective pair coupling from the full spectrum: the splitting between the
// two m_s = 0 eigenstates of maximal overlap with (|ud> +- |du>)/sqrt(2).
// With no perturbation the singlet/triplet-0 gap of H_D is exactly X, so the
// extraction returns the bare coupling in that limit by construction.
inline EffectiveXPoint effective_x_single(const HamiltonianSpec& spec,
                                          double overlap_threshold = 0.6) {
    const CMat h = build_hamiltonian(spec);
    const auto eig = jacobi_eigh(h);

    // m_s = 0 manifold: the four eigenvectors with the least <Sz^2> character
    const CMat sz2 = kron(spinops::sz3() * spinops::sz3(),
                          kron(CMat::identity(2), CMat::identity(2)));
    std::array<double, 12> character{};
    for (int k = 0; k < 12; ++k) {
        cplx c = 0.0;
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j)
                c += std::conj(eig.eigenvectors(i, k)) * sz2(i, j) * eig.eigenvectors(j, k);
        character[std::size_t(k)] = c.real();
    }
    std::array<int, 12> order{};
    for (int i = 0; i < 12; ++i) order[std::size_t(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return character[std::size_t(a)] < character[std::size_t(b)]; });

    // |0,ud> = index 5, |0,du> = index 6 in the basis ordering
    const double inv = 1.0 / std::sqrt(2.0);
    auto overlap_with = [&](int k, double sign) {
        const cplx amp = inv * (eig.eigenvectors(5, k) + sign * eig.eigenvectors(6, k));
        return std::norm(amp);
    };
    int best_plus = -1, best_minus = -1;
    double ov_plus = -1.0, ov_minus = -1.0;
    for (int m = 0; m < 4; ++m) {
        const int k = order[std::size_t(m)];
        const double op = overlap_with(k, 1.0);
        const double om = overlap_with(k, -1.0);
        if (op > ov_plus) { ov_plus = op; best_plus = k; }
        if (om > ov_minus) { ov_minus = om; best_minus = k; }
    }

    // Rayleigh quotients recover the small m_s = 0 splittings to much better
    // absolute accuracy than the raw Jacobi diagonal (||H|| ~ 1e10 rad/s).
    auto rayleigh = [&](int k) {
        cplx e = 0.0;
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j)
                e += std::conj(eig.eigenvectors(i, k)) * h(i, j) * eig.eigenvectors(j, k);
        return e.real();
    };

    EffectiveXPoint pt;
    pt.b_perp_t = spec.b_perp_t;
    pt.x_eff_hz = std::abs(rayleigh(best_plus) - rayleigh(best_minus)) / two_pi;
    pt.overlap = std::min(ov_plus, ov_minus);
    pt.flagged = best_plus == best_minus || pt.overlap < overlap_threshold;
    return pt;
}

inline std::vector<EffectiveXPoint> effective_x(const HamiltonianSpec& spec,
                                                const std::vector<double>& b_perp_values_t,
                                                double overlap_threshold = 0.6) {
    std::vector<EffectiveXPoint> out(b_perp_values_t.size());
    parallel_for(b_perp_values_t.size(), [&](std::size_t i) {
        HamiltonianSpec s = spec;
        s.b_perp_t = b_perp_values_t[i];
        out[i] = effective_x_single(s, overlap_threshold);
    });
    return out;
}

}  // namespace pairspin
