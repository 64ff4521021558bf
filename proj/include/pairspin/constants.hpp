#pragma once

// Physical constants and unit conventions.
//
// All frequencies cross module boundaries as ordinary frequencies in Hz.
// Angular factors of 2*pi are applied only inside propagators and the
// closed-form envelopes.

namespace pairspin {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// vacuum permeability [H/m]
inline constexpr double mu0 = 4.0 * pi * 1e-7;

// gyromagnetic ratios [rad s^-1 T^-1]
inline constexpr double gamma_c13 = 67.2828e6;
inline constexpr double gamma_e = 1.760859e11;

// reduced Planck constant [J s]
inline constexpr double hbar = 1.054571817e-34;

// diamond lattice constant at cryogenic temperature [m]
inline constexpr double a0_diamond = 3.5668e-10;

// NV ground-state zero-field splitting [Hz]
inline constexpr double nv_zfs_hz = 2.87e9;

// 13C Larmor frequency at the working field [Hz]
inline constexpr double default_larmor_hz = 432140.0;

inline constexpr double hz_to_rad(double f) { return two_pi * f; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }

}  // namespace pairspin
