#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairspin/constants.hpp"
#include "pairspin/montecarlo.hpp"
#include "pairspin/rng.hpp"

namespace pairspin {

// ---------------------------------------------------------------------------
// Discrete Fourier transform
// ---------------------------------------------------------------------------

struct Spectrum {
    std::vector<double> freq_hz;                 // k/(N dt), folded to +-Nyquist
    std::vector<std::complex<double>> amplitude; // V_k = sum_j v_j e^{-2 pi i jk/N}
    double dt = 0.0;
};

inline Spectrum dft(const std::vector<double>& values, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dft: dt must be > 0");
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("dft: empty input");
    Spectrum s;
    s.dt = dt;
    s.freq_hz.resize(n);
    s.amplitude.resize(n);
    const double w0 = -two_pi / double(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += values[j] * std::polar(1.0, w0 * double(j) * double(k));
        s.amplitude[k] = acc;
        const double kk = k <= n / 2 ? double(k) : double(k) - double(n);
        s.freq_hz[k] = kk / (double(n) * dt);
    }
    return s;
}

inline Spectrum dft(const DecayCurve& curve) {
    if (curve.times.size() < 2) throw std::invalid_argument("dft: need >= 2 samples");
    const double dt = curve.times[1] - curve.times[0];
    for (std::size_t i = 1; i < curve.times.size(); ++i) {
        const double step = curve.times[i] - curve.times[i - 1];
        if (std::abs(step - dt) > 1e-6 * std::max(dt, 1e-30))
            throw std::invalid_argument("dft: non-uniform sampling");
    }
    return dft(curve.mean, dt);
}

inline std::vector<std::complex<double>> idft(const Spectrum& s) {
    const std::size_t n = s.amplitude.size();
    std::vector<std::complex<double>> out(n);
    const double w0 = two_pi / double(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            acc += s.amplitude[k] * std::polar(1.0, w0 * double(j) * double(k));
        out[j] = acc / double(n);
    }
    return out;
}

// magnitude spectrum restricted to f >= 0, for peak fitting; zero-padding
// refines the frequency axis (presentation only)
inline void one_sided_magnitude(const std::vector<double>& values, double dt, int pad_factor,
                                std::vector<double>& freq, std::vector<double>& mag) {
    std::vector<double> padded = values;
    const double mean = [&] {
        double s = 0.0;
        for (double v : values) s += v;
        return s / double(values.size());
    }();
    for (auto& v : padded) v -= mean;
    padded.resize(values.size() * std::size_t(std::max(1, pad_factor)), 0.0);
    const auto s = dft(padded, dt);
    freq.clear();
    mag.clear();
    for (std::size_t k = 0; k <= padded.size() / 2; ++k) {
        freq.push_back(s.freq_hz[k] >= 0.0 ? s.freq_hz[k] : 0.0);
        mag.push_back(std::abs(s.amplitude[k]));
    }
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex (derivative-free), deterministic
// ---------------------------------------------------------------------------

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x0,
                                 const std::vector<double>& step, int max_iter = 6000,
                                 double ftol = 1e-13) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i] != 0.0 ? step[i] : 1e-4;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    SimplexResult res;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(n + 1);
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(fv[worst] - fv[best]) <=
            ftol * (std::abs(fv[best]) + std::abs(fv[worst]) + 1e-30)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d];
        }
        for (auto& c : centroid) c /= double(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return p;
        };
        const auto refl = blend(-1.0);
        const double f_refl = f(refl);
        if (f_refl < fv[best]) {
            const auto exp_ = blend(-2.0);
            const double f_exp = f(exp_);
            if (f_exp < f_refl) {
                pts[worst] = exp_;
                fv[worst] = f_exp;
            } else {
                pts[worst] = refl;
                fv[worst] = f_refl;
            }
        } else if (f_refl < fv[second]) {
            pts[worst] = refl;
            fv[worst] = f_refl;
        } else {
            const auto con = blend(0.5);
            const double f_con = f(con);
            if (f_con < fv[worst]) {
                pts[worst] = con;
                fv[worst] = f_con;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {  // shrink toward best
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    std::size_t ibest = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[ibest]) ibest = i;
    res.x = pts[ibest];
    res.value = fv[ibest];
    res.iterations = iter;
    return res;
}

// ---------------------------------------------------------------------------
// Fit results and uncertainty machinery
// ---------------------------------------------------------------------------

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> sigmas;  // 1-sigma from the local quadratic model
    double residual_norm = 0.0;  // sqrt(SSR)
    bool converged = false;
    bool flagged = false;  // degenerate or non-converged fit
    int iterations = 0;

    double operator[](const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return values[i];
        throw std::out_of_range("FitResult: unknown parameter " + name);
    }
    double sigma(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return sigmas[i];
        throw std::out_of_range("FitResult: unknown parameter " + name);
    }
};

struct FitOptions {
    bool bootstrap = false;
    int n_bootstrap = 200;
    std::uint64_t seed = 1234;
};

namespace fitdetail {

// invert a small symmetric positive-ish matrix by Gauss-Jordan with partial
// pivoting; returns false if singular
inline bool invert(std::vector<double>& a, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[piv * n + c], a[col * n + c]);
                std::swap(inv[piv * n + c], inv[col * n + c]);
            }
        const double d = a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double m = a[r * n + col];
            if (m == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r * n + c] -= m * a[col * n + c];
                inv[r * n + c] -= m * inv[col * n + c];
            }
        }
    }
    a = inv;
    return true;
}

// 1-sigma uncertainties from the quadratic expansion of the SSR surface:
// cov = 2 s^2 H^-1 with s^2 = SSR/(N-p)
inline std::vector<double> quadratic_sigmas(
    const std::function<double(const std::vector<double>&)>& ssr, const std::vector<double>& x,
    double ssr0, std::size_t n_data) {
    const std::size_t p = x.size();
    std::vector<double> h(p * p, 0.0);
    std::vector<double> steps(p);
    for (std::size_t i = 0; i < p; ++i)
        steps[i] = std::max(1e-6 * std::abs(x[i]), 1e-9);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            auto shifted = [&](double si, double sj) {
                auto y = x;
                y[i] += si;
                y[j] += sj;
                return ssr(y);
            };
            double hij;
            if (i == j) {
                hij = (shifted(steps[i], 0.0) - 2.0 * ssr0 + shifted(-steps[i], 0.0)) /
                      (steps[i] * steps[i]);
            } else {
                hij = (shifted(steps[i], steps[j]) - shifted(steps[i], -steps[j]) -
                       shifted(-steps[i], steps[j]) + shifted(-steps[i], -steps[j])) /
                      (4.0 * steps[i] * steps[j]);
            }
            h[i * p + j] = hij;
            h[j * p + i] = hij;
        }
    }
    std::vector<double> sig(p, 0.0);
    const double dof = n_data > p ? double(n_data - p) : 1.0;
    const double s2 = ssr0 / dof;
    auto hinv = h;
    if (invert(hinv, p)) {
        for (std::size_t i = 0; i < p; ++i)
            sig[i] = std::sqrt(std::max(0.0, 2.0 * s2 * hinv[i * p + i]));
    }
    return sig;
}

}  // namespace fitdetail

// ---------------------------------------------------------------------------
// Model fits (Methods)
// ---------------------------------------------------------------------------

// F(t) = a + exp(-(t/T)^n) [ A cos(2 pi fA t + phiA) (+ B cos(2 pi fB t + phiB)) ]
struct StretchedCosGuess {
    double offset = 0.0;
    double t_decay = 0.0;  // 0 = use the data span
    double exponent = 1.0;
    std::vector<double> freqs_hz;  // one per tone; empty = take DFT peaks
};

namespace fitdetail {

inline double stretched_cos_model(const std::vector<double>& q, double t, int n_tones) {
    // q = [a, T, n, (A, f, phi) x tones], all raw
    const double a = q[0];
    const double T = q[1], nn = q[2];
    double env = 1.0;
    if (t > 0.0 && T > 0.0) env = std::exp(-std::pow(t / T, nn));
    double s = a;
    for (int k = 0; k < n_tones; ++k) {
        const double amp = q[std::size_t(3 + 3 * k)];
        const double f = q[std::size_t(4 + 3 * k)];
        const double ph = q[std::size_t(5 + 3 * k)];
        s += env * amp * std::cos(two_pi * f * t + ph);
    }
    return s;
}

}  // namespace fitdetail

inline FitResult fit_stretched_cos(const std::vector<double>& times,
                                   const std::vector<double>& values, int n_tones,
                                   StretchedCosGuess guess = {}, FitOptions opt = {}) {
    if (n_tones != 1 && n_tones != 2)
        throw std::invalid_argument("fit_stretched_cos: n_tones must be 1 or 2");
    if (times.size() != values.size() || times.size() < std::size_t(4 + 3 * n_tones))
        throw std::invalid_argument("fit_stretched_cos: not enough points");

    const double span = times.back() - times.front();
    if (guess.t_decay <= 0.0) guess.t_decay = span > 0.0 ? span : 1.0;
    if (int(guess.freqs_hz.size()) < n_tones) {
        // peaks of the magnitude spectrum as frequency seeds
        std::vector<double> freq, mag;
        const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
        one_sided_magnitude(values, dt, 4, freq, mag);
        std::vector<std::size_t> order(mag.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
        const double min_sep = freq.size() > 1 ? 4.0 * (freq[1] - freq[0]) : 0.0;
        for (std::size_t i = 0; i < order.size() && int(guess.freqs_hz.size()) < n_tones; ++i) {
            const double f = freq[order[i]];
            if (f <= 0.0) continue;
            bool close = false;
            for (double g : guess.freqs_hz)
                if (std::abs(g - f) < min_sep) close = true;
            if (!close) guess.freqs_hz.push_back(f);
        }
        while (int(guess.freqs_hz.size()) < n_tones) guess.freqs_hz.push_back(1.0 / (dt * 8.0));
    }

    double vmin = values[0], vmax = values[0], vsum = 0.0;
    for (double v : values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        vsum += v;
    }
    const double amp0 = 0.5 * (vmax - vmin) / double(n_tones);
    const double a0 = vsum / double(values.size());

    // optimize with T and n log-transformed to keep them positive
    auto unpack = [&](const std::vector<double>& q) {
        std::vector<double> raw = q;
        raw[1] = std::exp(q[1]);
        raw[2] = std::exp(q[2]);
        return raw;
    };
    auto ssr_of = [&](const std::vector<double>& raw) {
        double s = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double d = fitdetail::stretched_cos_model(raw, times[i], n_tones) - values[i];
            s += d * d;
        }
        return s;
    };
    auto obj = [&](const std::vector<double>& q) { return ssr_of(unpack(q)); };

    std::vector<double> base{a0, std::log(guess.t_decay), std::log(std::max(guess.exponent, 1e-3))};
    for (int k = 0; k < n_tones; ++k) {
        base.push_back(amp0 != 0.0 ? amp0 : 1.0);
        base.push_back(guess.freqs_hz[std::size_t(k)]);
        base.push_back(0.0);
    }
    std::vector<double> step(base.size(), 0.1);
    step[0] = std::max(0.05 * std::abs(amp0), 1e-3);
    for (int k = 0; k < n_tones; ++k) {
        step[std::size_t(3 + 3 * k)] = std::max(0.2 * std::abs(amp0), 1e-3);
        step[std::size_t(4 + 3 * k)] = span > 0.0 ? 0.25 / span : 0.01;
        step[std::size_t(5 + 3 * k)] = 0.3;
    }

    // deterministic multi-start grid over the decay scale and exponent
    static constexpr double t_scales[] = {1.0, 0.3, 3.0, 1.0, 1.0, 0.3, 3.0};
    static constexpr double n_scales[] = {1.0, 1.0, 1.0, 0.5, 2.0, 2.0, 0.5};
    SimplexResult best;
    best.value = 1e300;
    for (std::size_t s = 0; s < sizeof(t_scales) / sizeof(t_scales[0]); ++s) {
        auto x0 = base;
        x0[1] += std::log(t_scales[s]);
        x0[2] += std::log(n_scales[s]);
        const auto r = nelder_mead(obj, x0, step);
        if (r.value < best.value || (r.value == best.value && !best.converged)) best = r;
    }

    const auto raw = unpack(best.x);
    FitResult fit;
    fit.names = {"a", "T", "n"};
    for (int k = 0; k < n_tones; ++k) {
        const std::string sfx = n_tones == 1 ? "" : (k == 0 ? "_A" : "_B");
        fit.names.push_back("A" + sfx);
        fit.names.push_back("f" + sfx);
        fit.names.push_back("phi" + sfx);
    }
    fit.values = raw;
    fit.residual_norm = std::sqrt(best.value);
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.sigmas = fitdetail::quadratic_sigmas(ssr_of, raw, best.value, times.size());

    double amp_scale = 0.0;
    for (int k = 0; k < n_tones; ++k)
        amp_scale = std::max(amp_scale, std::abs(raw[std::size_t(3 + 3 * k)]));
    fit.flagged = !fit.converged || amp_scale < 1e-3 * std::max(1.0, std::abs(vmax - vmin)) ||
                  amp_scale < 2.0 * fit.residual_norm / std::sqrt(double(times.size()));

    if (opt.bootstrap) {
        // residual resampling around the fit
        std::vector<double> model(times.size());
        for (std::size_t i = 0; i < times.size(); ++i)
            model[i] = fitdetail::stretched_cos_model(raw, times[i], n_tones);
        std::vector<std::vector<double>> samples;
        Rng rng(opt.seed);
        for (int bi = 0; bi < opt.n_bootstrap; ++bi) {
            std::vector<double> vb(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) {
                const std::size_t j = std::size_t(rng.uniform() * double(times.size()));
                const double res = values[j] - model[j];
                vb[i] = model[i] + res;
            }
            auto obj_b = [&](const std::vector<double>& q) {
                const auto rawq = unpack(q);
                double s = 0.0;
                for (std::size_t i = 0; i < times.size(); ++i) {
                    const double d =
                        fitdetail::stretched_cos_model(rawq, times[i], n_tones) - vb[i];
                    s += d * d;
                }
                return s;
            };
            const auto r = nelder_mead(obj_b, best.x, step, 1500);
            samples.push_back(unpack(r.x));
        }
        for (std::size_t pi = 0; pi < fit.values.size(); ++pi) {
            double s1 = 0.0, s2 = 0.0;
            for (const auto& smp : samples) {
                s1 += smp[pi];
                s2 += smp[pi] * smp[pi];
            }
            const double mu = s1 / double(samples.size());
            fit.sigmas[pi] = std::sqrt(std::max(0.0, s2 / double(samples.size()) - mu * mu));
        }
    }
    return fit;
}

// F(f) = a + sum_i A_i exp(-(f - f_i)^2 / 2 sigma_i^2)
inline FitResult fit_gaussian_peaks(const std::vector<double>& freq_hz,
                                    const std::vector<double>& magnitude, int n_peaks) {
    if (n_peaks < 1) throw std::invalid_argument("fit_gaussian_peaks: n_peaks must be >= 1");
    if (freq_hz.size() != magnitude.size() || freq_hz.size() < std::size_t(1 + 3 * n_peaks))
        throw std::invalid_argument("fit_gaussian_peaks: not enough points");

    // seed with the highest separated local maxima
    std::vector<std::size_t> order(magnitude.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return magnitude[a] > magnitude[b]; });
    const double df = freq_hz.size() > 1 ? std::abs(freq_hz[1] - freq_hz[0]) : 1.0;
    std::vector<double> peak_f, peak_a;
    for (std::size_t i = 0; i < order.size() && int(peak_f.size()) < n_peaks; ++i) {
        const double f = freq_hz[order[i]];
        bool close = false;
        for (double g : peak_f)
            if (std::abs(g - f) < 5.0 * df) close = true;
        if (!close) {
            peak_f.push_back(f);
            peak_a.push_back(magnitude[order[i]]);
        }
    }
    while (int(peak_f.size()) < n_peaks) {
        peak_f.push_back(freq_hz[freq_hz.size() / 2]);
        peak_a.push_back(1.0);
    }

    auto model = [&](const std::vector<double>& q, double f) {
        double s = q[0];
        for (int k = 0; k < n_peaks; ++k) {
            const double amp = q[std::size_t(1 + 3 * k)];
            const double f0 = q[std::size_t(2 + 3 * k)];
            const double sg = q[std::size_t(3 + 3 * k)];
            const double u = (f - f0) / sg;
            s += amp * std::exp(-0.5 * u * u);
        }
        return s;
    };
    auto ssr = [&](const std::vector<double>& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < freq_hz.size(); ++i) {
            const double d = model(q, freq_hz[i]) - magnitude[i];
            s += d * d;
        }
        return s;
    };

    std::vector<double> x0{0.0};
    std::vector<double> step{0.05 * peak_a[0]};
    for (int k = 0; k < n_peaks; ++k) {
        x0.push_back(peak_a[std::size_t(k)]);
        x0.push_back(peak_f[std::size_t(k)]);
        x0.push_back(3.0 * df);
        step.push_back(0.2 * peak_a[std::size_t(k)]);
        step.push_back(2.0 * df);
        step.push_back(2.0 * df);
    }
    SimplexResult best;
    best.value = 1e300;
    for (double w : {1.0, 0.5, 2.0, 4.0, 0.25}) {
        auto x = x0;
        for (int k = 0; k < n_peaks; ++k) x[std::size_t(3 + 3 * k)] = 3.0 * df * w;
        const auto r = nelder_mead(ssr, x, step);
        if (r.value < best.value) best = r;
    }

    FitResult fit;
    fit.names = {"a"};
    for (int k = 0; k < n_peaks; ++k) {
        const std::string sfx = n_peaks == 1 ? "" : (k == 0 ? "_A" : "_B");
        fit.names.push_back("A" + sfx);
        fit.names.push_back("f" + sfx);
        fit.names.push_back("sigma" + sfx);
    }
    fit.values = best.x;
    for (int k = 0; k < n_peaks; ++k)
        fit.values[std::size_t(3 + 3 * k)] = std::abs(fit.values[std::size_t(3 + 3 * k)]);
    fit.residual_norm = std::sqrt(best.value);
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.sigmas = fitdetail::quadratic_sigmas(ssr, fit.values, best.value, freq_hz.size());
    fit.flagged = !fit.converged;
    return fit;
}

// T2* from the Gaussian linewidth: T = 1 / (sqrt(2) pi sigma)
inline double t2star_from_sigma(double sigma_hz) {
    if (!(sigma_hz > 0.0)) throw std::domain_error("t2star_from_sigma: sigma must be > 0");
    return 1.0 / (std::sqrt(2.0) * pi * sigma_hz);
}

// y = exp(-(t/T)^n)
inline FitResult fit_stretched_exp(const std::vector<double>& times,
                                   const std::vector<double>& values, FitOptions opt = {}) {
    if (times.size() != values.size() || times.size() < 4)
        throw std::invalid_argument("fit_stretched_exp: need at least 4 points");

    auto ssr_raw = [&](const std::vector<double>& q) {  // q = [T, n]
        double s = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            const double m = t <= 0.0 ? 1.0 : std::exp(-std::pow(t / q[0], q[1]));
            const double d = m - values[i];
            s += d * d;
        }
        return s;
    };
    auto obj = [&](const std::vector<double>& q) {
        return ssr_raw({std::exp(q[0]), std::exp(q[1])});
    };

    const double span = std::max(times.back(), 1e-12);
    SimplexResult best;
    best.value = 1e300;
    for (double ts : {1.0, 0.1, 10.0, 0.01, 100.0})
        for (double ns : {1.0, 0.25, 2.0}) {
            const auto r = nelder_mead(obj, {std::log(span * ts), std::log(ns)}, {0.4, 0.3});
            if (r.value < best.value) best = r;
        }

    FitResult fit;
    fit.names = {"T", "n"};
    fit.values = {std::exp(best.x[0]), std::exp(best.x[1])};
    fit.residual_norm = std::sqrt(best.value);
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.sigmas = fitdetail::quadratic_sigmas(ssr_raw, fit.values, best.value, times.size());
    fit.flagged = !fit.converged;

    if (opt.bootstrap) {
        std::vector<double> model(times.size());
        for (std::size_t i = 0; i < times.size(); ++i)
            model[i] = times[i] <= 0.0
                           ? 1.0
                           : std::exp(-std::pow(times[i] / fit.values[0], fit.values[1]));
        Rng rng(opt.seed);
        std::vector<std::array<double, 2>> samples;
        for (int bi = 0; bi < opt.n_bootstrap; ++bi) {
            std::vector<double> vb(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) {
                const std::size_t j = std::size_t(rng.uniform() * double(times.size()));
                vb[i] = model[i] + (values[j] - model[j]);
            }
            auto obj_b = [&](const std::vector<double>& q) {
                double s = 0.0;
                for (std::size_t i = 0; i < times.size(); ++i) {
                    const double t = times[i];
                    const double mm =
                        t <= 0.0 ? 1.0 : std::exp(-std::pow(t / std::exp(q[0]), std::exp(q[1])));
                    const double d = mm - vb[i];
                    s += d * d;
                }
                return s;
            };
            const auto r = nelder_mead(obj_b, best.x, {0.2, 0.2}, 1500);
            samples.push_back({std::exp(r.x[0]), std::exp(r.x[1])});
        }
        for (int pi = 0; pi < 2; ++pi) {
            double s1 = 0.0, s2 = 0.0;
            for (const auto& s : samples) {
                s1 += s[std::size_t(pi)];
                s2 += s[std::size_t(pi)] * s[std::size_t(pi)];
            }
            const double mu = s1 / double(samples.size());
            fit.sigmas[std::size_t(pi)] =
                std::sqrt(std::max(0.0, s2 / double(samples.size()) - mu * mu));
        }
    }
    return fit;
}

}  // namespace pairspin
