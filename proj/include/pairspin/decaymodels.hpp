#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairspin/constants.hpp"

namespace pairspin {

// Physical record parameterizing every decay model. Frequencies in Hz;
// the closed forms below convert to angular units internally.
struct PairParams {
    double x_hz = 0.0;     // intra-pair dipolar coupling
    double z_hz = 0.0;     // hyperfine field difference
    double b_hz = 0.0;     // bath noise strength
    double tau_c_s = 0.1;  // bath correlation time
    int ms = 0;            // NV projection, 0 or -1

    double rate() const { return 1.0 / tau_c_s; }
    void validate() const {
        if (!(tau_c_s > 0.0)) throw std::invalid_argument("PairParams: tau_c must be > 0");
        if (b_hz < 0.0) throw std::invalid_argument("PairParams: b must be >= 0");
    }
};

struct Envelope {
    std::vector<double> times;                // s
    std::vector<std::complex<double>> values; // M(t), M(0) = 1
    std::string regime;
};

// ---------------------------------------------------------------------------
// General m_s = 0 solution:
//   [M(t)]^-2 = e^{-Rt}[cosh(Pt) + (R/P) sinh(Pt)] - i (b^2/XP) e^{-Rt} sinh(Pt)
//   P = sqrt(R^2 - 2 i b^2 R / X),  all symbols angular.
// The signal is <S_z(t)> = Re[M(t) e^{iXt}]/2.
// ---------------------------------------------------------------------------

namespace detail {

inline std::complex<double> m_inverse_squared(double b, double x, double r, double t) {
    const std::complex<double> p = std::sqrt(std::complex<double>(r * r, -2.0 * b * b * r / x));
    const std::complex<double> q = std::complex<double>(r, -b * b / x) / p;  // cosh + q sinh
    const std::complex<double> pt = p * t;
    // cosh/sinh are even/odd over P, so the branch of P itself is irrelevant.
    if (std::abs(pt.real()) < 300.0 && r * t < 300.0) {
        return std::exp(-r * t) * (std::cosh(pt) + q * std::sinh(pt));
    }
    // exponential split; folding e^{-rt} in keeps cosh(Pt) from overflowing
    return 0.5 * ((1.0 + q) * std::exp(pt - r * t) + (1.0 - q) * std::exp(-pt - r * t));
}

}  // namespace detail

// M(t) = ([M]^-2)^(-1/2) with the branch chosen continuously in t from
// M(0) = 1. The phase of [M]^-2 winds at a rate of order b^2/X, so the
// evaluation grid is refined internally before unwrapping.
inline Envelope envelope_full(const PairParams& p, const std::vector<double>& times) {
    p.validate();
    if (!(p.x_hz > 0.0)) throw std::domain_error("envelope_full: requires X > 0");
    if (p.ms != 0) throw std::domain_error("envelope_full: m_s = 0 model");
    const double b = hz_to_rad(p.b_hz);
    const double x = hz_to_rad(p.x_hz);
    const double r = p.rate();

    Envelope env;
    env.regime = "full";
    env.times = times;
    env.values.resize(times.size());
    if (times.empty()) return env;

    const double phase_rate = std::max(b * b / x, 1e-12);
    const double dt_max = 0.25 / phase_rate;

    double t_prev = 0.0;
    double phase_prev = 0.0;  // unwrapped arg of [M]^-2, 0 at t = 0
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < t_prev) throw std::invalid_argument("envelope_full: times must be sorted");
        const int substeps = std::max(1, int(std::ceil((t - t_prev) / dt_max)));
        std::complex<double> minv2(1.0, 0.0);
        for (int k = 1; k <= substeps; ++k) {
            const double tk = t_prev + (t - t_prev) * double(k) / substeps;
            minv2 = detail::m_inverse_squared(b, x, r, tk);
            double ph = std::arg(minv2);
            while (ph - phase_prev > pi) ph -= two_pi;
            while (ph - phase_prev < -pi) ph += two_pi;
            phase_prev = ph;
        }
        t_prev = t;
        const double mag = std::abs(minv2);
        env.values[i] = std::polar(1.0 / std::sqrt(mag), -0.5 * phase_prev);
        if (t == 0.0) env.values[i] = 1.0;
    }
    return env;
}

// Quasi-static clock decay (m_s = 0, R -> 0): M = (1 + (b^2 t / X)^2)^(-1/4).
inline Envelope envelope_quasistatic_clock(const PairParams& p, const std::vector<double>& times) {
    p.validate();
    if (!(p.x_hz > 0.0)) throw std::domain_error("envelope_quasistatic_clock: requires X > 0");
    const double b = hz_to_rad(p.b_hz);
    const double x = hz_to_rad(p.x_hz);
    Envelope env;
    env.regime = "quasi-static";
    env.times = times;
    env.values.reserve(times.size());
    for (const double t : times) {
        const double u = b * b * t / x;
        env.values.emplace_back(std::pow(1.0 + u * u, -0.25), 0.0);
    }
    return env;
}

// Slow-bath decay (R << b^2/X): M = exp(-b t sqrt(R / 4X)).
inline Envelope envelope_slow(const PairParams& p, const std::vector<double>& times) {
    p.validate();
    if (!(p.x_hz > 0.0)) throw std::domain_error("envelope_slow: requires X > 0");
    const double b = hz_to_rad(p.b_hz);
    const double x = hz_to_rad(p.x_hz);
    const double decay = b * std::sqrt(p.rate() / (4.0 * x));
    Envelope env;
    env.regime = "slow";
    env.times = times;
    env.values.reserve(times.size());
    for (const double t : times) env.values.emplace_back(std::exp(-decay * t), 0.0);
    return env;
}

// Fast-bath / motional-narrowing decay (R >> b^2/X):
//   M = exp(i b^2 t / 2X - b^4 t / 4X^2 R).
inline Envelope envelope_fast(const PairParams& p, const std::vector<double>& times) {
    p.validate();
    if (!(p.x_hz > 0.0)) throw std::domain_error("envelope_fast: requires X > 0");
    const double b = hz_to_rad(p.b_hz);
    const double x = hz_to_rad(p.x_hz);
    const double r = p.rate();
    const double shift = b * b / (2.0 * x);
    const double decay = b * b * b * b / (4.0 * x * x * r);
    Envelope env;
    env.regime = "fast";
    env.times = times;
    env.values.reserve(times.size());
    for (const double t : times)
        env.values.push_back(std::polar(std::exp(-decay * t), shift * t));
    return env;
}

// Static Gaussian dephasing: M = exp(-(2 pi b_eff)^2 t^2 / 2), b_eff = scale*b.
// scale = 1 reproduces the bare quasi-static case (pair C, m_s = -1);
// scale = Z/omega_-1 gives the detuned-clock case of pairs A/B.
inline Envelope envelope_gaussian_static(double b_hz, double scale,
                                         const std::vector<double>& times) {
    if (b_hz < 0.0) throw std::invalid_argument("envelope_gaussian_static: b must be >= 0");
    const double beff = hz_to_rad(scale * b_hz);
    Envelope env;
    env.regime = "gaussian-static";
    env.times = times;
    env.values.reserve(times.size());
    for (const double t : times)
        env.values.emplace_back(std::exp(-0.5 * beff * beff * t * t), 0.0);
    return env;
}

inline double detuned_clock_scale(double x_hz, double z_hz) {
    const double w = std::hypot(x_hz, z_hz);
    if (w == 0.0) throw std::domain_error("detuned_clock_scale: X = Z = 0");
    return z_hz / w;
}

// Relaxation out of the dressed pair states multiplies M by
// exp(-b^2 R t / 2 X^2); T2* = 2 X^2 / (b^2 R).
inline Envelope relaxation_factor(const PairParams& p, const std::vector<double>& times) {
    p.validate();
    if (!(p.x_hz > 0.0)) throw std::domain_error("relaxation_factor: requires X > 0");
    const double b = hz_to_rad(p.b_hz);
    const double x = hz_to_rad(p.x_hz);
    const double rate = b * b * p.rate() / (2.0 * x * x);
    Envelope env;
    env.regime = "relaxation";
    env.times = times;
    env.values.reserve(times.size());
    for (const double t : times) env.values.emplace_back(std::exp(-rate * t), 0.0);
    return env;
}

// ---------------------------------------------------------------------------
// 1/e times (exact algebraic inverses of the envelopes above)
// ---------------------------------------------------------------------------

inline double t2star_gaussian_static(double b_hz, double scale = 1.0) {
    const double beff = hz_to_rad(scale * b_hz);
    if (!(beff > 0.0)) throw std::domain_error("t2star_gaussian_static: b_eff must be > 0");
    return std::sqrt(2.0) / beff;
}

inline double t2star_detuned_clock(double b_hz, double x_hz, double z_hz) {
    return t2star_gaussian_static(b_hz, detuned_clock_scale(x_hz, z_hz));
}

inline double t2star_slow(double b_hz, double x_hz, double rate) {
    const double b = hz_to_rad(b_hz), x = hz_to_rad(x_hz);
    return std::sqrt(4.0 * x / rate) / b;
}

inline double t2star_fast(double b_hz, double x_hz, double rate) {
    const double b = hz_to_rad(b_hz), x = hz_to_rad(x_hz);
    return 4.0 * x * x * rate / (b * b * b * b);
}

inline double rate_from_t2star_fast(double b_hz, double x_hz, double t2star_s) {
    const double b = hz_to_rad(b_hz), x = hz_to_rad(x_hz);
    return t2star_s * b * b * b * b / (4.0 * x * x);
}

inline double t2star_relaxation(double b_hz, double x_hz, double rate) {
    const double b = hz_to_rad(b_hz), x = hz_to_rad(x_hz);
    return 2.0 * x * x / (b * b * rate);
}

inline double relaxation_rate_from_t2star(double b_hz, double x_hz, double t2star_s) {
    const double b = hz_to_rad(b_hz), x = hz_to_rad(x_hz);
    return 2.0 * x * x / (b * b * t2star_s);
}

// Motional-narrowing line shift on top of X, in Hz: b^2 / 2X.
inline double clock_frequency_shift_hz(double b_hz, double x_hz) {
    return b_hz * b_hz / (2.0 * x_hz);
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

enum class Regime { QuasiStatic, Slow, Fast, Intermediate };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::QuasiStatic: return "quasi-static";
        case Regime::Slow: return "slow";
        case Regime::Fast: return "fast";
        default: return "intermediate";
    }
}

struct RegimeThresholds {
    double factor = 10.0;        // ">>" means this factor in R vs b^2/X
    double static_margin = 10.0; // quasi-static requires T2*(static) * margin < tau_c
};

inline Regime classify_regime(const PairParams& p, const RegimeThresholds& th = {}) {
    p.validate();
    const double b = hz_to_rad(p.b_hz);
    const double x = hz_to_rad(p.x_hz);
    if (!(x > 0.0) || b == 0.0) return Regime::QuasiStatic;
    const double coupling_rate = b * b / x;
    const double r = p.rate();
    if (r > th.factor * coupling_rate) return Regime::Fast;
    if (r < coupling_rate / th.factor) {
        // static decay time: Gaussian for m_s = -1, quasi-static clock for m_s = 0
        double t_static;
        if (p.ms == 0 || p.z_hz == 0.0) {
            t_static = std::sqrt(std::exp(4.0) - 1.0) * x / (b * b);
        } else {
            t_static = t2star_detuned_clock(p.b_hz, p.x_hz, p.z_hz);
        }
        return t_static * th.static_margin < p.tau_c_s ? Regime::QuasiStatic : Regime::Slow;
    }
    return Regime::Intermediate;
}

}  // namespace pairspin
