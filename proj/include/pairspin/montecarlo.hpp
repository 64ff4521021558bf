#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pairspin/constants.hpp"
#include "pairspin/decaymodels.hpp"
#include "pairspin/noisefield.hpp"
#include "pairspin/parallel.hpp"
#include "pairspin/rng.hpp"
#include "pairspin/vec3.hpp"

namespace pairspin {

enum class Axis { X, Y, Z };

inline Vec3 axis_vector(Axis a) {
    switch (a) {
        case Axis::X: return {1, 0, 0};
        case Axis::Y: return {0, 1, 0};
        default: return {0, 0, 1};
    }
}

struct PulseSequence {
    enum Kind { Ramsey, Echo };
    Kind kind = Ramsey;
    double total_time = 0.0;
    Vec3 init{0.0, 0.0, 1.0};      // initial pseudo-spin Bloch vector
    Axis readout = Axis::Z;
    Axis echo_axis = Axis::Z;      // pi pulse at total_time/2 for Echo

    void validate() const {
        if (!(total_time >= 0.0)) throw std::invalid_argument("PulseSequence: negative time");
        if (init.norm() > 1.0 + 1e-9) throw std::invalid_argument("PulseSequence: |init| > 1");
    }
};

namespace detail {

// Rotation of v about unit axis n by angle a (Rodrigues).
inline Vec3 rotate(const Vec3& v, const Vec3& n, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return v * c + n.cross(v) * s + n * (n.dot(v) * (1.0 - c));
}

// One propagation step under H = w_x I_x + w_z I_z: precession
// dr/dt = omega x r with omega = (w_x, 0, w_z).
inline Vec3 step(const Vec3& v, double wx, double wz, double dt) {
    const double om = std::hypot(wx, wz);
    if (om == 0.0) return v;
    return rotate(v, Vec3{wx / om, 0.0, wz / om}, om * dt);
}

}  // namespace detail

// Piecewise-constant exact evolution of the pseudo-spin Bloch vector under
// H = X I_x + (m_s Z + dZ(t)) I_z, with the noise held at trace.samples[i]
// during step i. Echo sequences insert an instantaneous pi rotation at t/2.
inline Vec3 propagate(const PairParams& p, const NoiseTrace& trace, const PulseSequence& seq) {
    p.validate();
    seq.validate();
    if (!(trace.dt > 0.0)) throw std::invalid_argument("propagate: trace.dt must be > 0");
    const int nsteps = int(std::llround(seq.total_time / trace.dt));
    if (std::abs(nsteps * trace.dt - seq.total_time) > 1e-9 * std::max(1.0, seq.total_time))
        throw std::invalid_argument("propagate: total_time must be a multiple of trace.dt");
    if (std::size_t(nsteps) > trace.samples.size())
        throw std::invalid_argument("propagate: trace too short for total_time");

    const double wx = hz_to_rad(p.x_hz);
    const double wz0 = hz_to_rad(double(p.ms) * p.z_hz);
    const int pulse_at = seq.kind == PulseSequence::Echo ? nsteps / 2 : -1;

    Vec3 v = seq.init;
    for (int i = 0; i < nsteps; ++i) {
        if (i == pulse_at) v = detail::rotate(v, axis_vector(seq.echo_axis), pi);
        v = detail::step(v, wx, wz0 + trace.samples[std::size_t(i)], trace.dt);
    }
    if (nsteps == pulse_at) v = detail::rotate(v, axis_vector(seq.echo_axis), pi);
    return v;
}

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> mean;     // in [-1, 1]
    std::vector<double> stderr_;  // sample std / sqrt(n_traj)
    int n_traj = 0;
};

struct McOptions {
    int n_traj = 2000;
    std::uint64_t seed = 1;
    double dt_override = 0.0;             // 0 = use the dt caps below
    bool apply_relaxation_factor = false; // multiply means by exp(-b^2 R t / 2X^2)
};

// dt <= min(tau_c/20, 1/(20 X)) resolves both the noise correlation and the
// coherent rotation.
inline double default_dt(const PairParams& p) {
    double dt = p.tau_c_s / 20.0;
    const double f = std::max(std::abs(p.x_hz), std::abs(double(p.ms) * p.z_hz));
    if (f > 0.0) dt = std::min(dt, 1.0 / (20.0 * f));
    return dt;
}

struct RamseyResult {
    DecayCurve signal;    // projection on the readout axis
    DecayCurve envelope;  // |<e1> + i <e2>| in the precession plane
};

namespace detail {

struct Accum {
    std::vector<double> s1, s2;  // readout projection sums
    std::vector<double> e1, e2;  // precession-plane component sums
    std::vector<double> e1sq, e2sq;
    void init(std::size_t n) {
        s1.assign(n, 0.0); s2.assign(n, 0.0);
        e1.assign(n, 0.0); e2.assign(n, 0.0);
        e1sq.assign(n, 0.0); e2sq.assign(n, 0.0);
    }
    void add(const Accum& o) {
        for (std::size_t i = 0; i < s1.size(); ++i) {
            s1[i] += o.s1[i]; s2[i] += o.s2[i];
            e1[i] += o.e1[i]; e2[i] += o.e2[i];
            e1sq[i] += o.e1sq[i]; e2sq[i] += o.e2sq[i];
        }
    }
};

// Orthonormal frame spanning the plane the coherence precesses in: n0 is the
// noise-free rotation axis, e1 the in-plane component of the initial state.
struct Frame {
    Vec3 n0, e1, e2;
};

inline Frame precession_frame(const PairParams& p, const Vec3& init) {
    const double wx = hz_to_rad(p.x_hz);
    const double wz0 = hz_to_rad(double(p.ms) * p.z_hz);
    Vec3 n0{1, 0, 0};
    if (wx != 0.0 || wz0 != 0.0) n0 = Vec3{wx, 0.0, wz0}.normalized();
    Vec3 e1 = init - n0 * n0.dot(init);
    if (e1.norm() < 1e-12) {
        // init along the rotation axis; pick any transverse direction
        e1 = std::abs(n0.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
        e1 = e1 - n0 * n0.dot(e1);
    }
    e1 = e1.normalized();
    return {n0, e1, n0.cross(e1)};
}

}  // namespace detail

// Free-evolution ensemble: averages the readout projection of n_traj
// trajectories with independent OU noise over the requested sample times.
// One trajectory covers all sample times (no pulses in between). Block sums
// are combined in fixed order, so results do not depend on the thread count.
inline RamseyResult ensemble_ramsey(const PairParams& p, const std::vector<double>& times,
                                    const McOptions& opt, Vec3 init = {0, 0, 1},
                                    Axis readout = Axis::Z) {
    p.validate();
    if (opt.n_traj < 1) throw std::invalid_argument("ensemble_ramsey: n_traj must be >= 1");
    if (times.empty()) throw std::invalid_argument("ensemble_ramsey: no sample times");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("ensemble_ramsey: times must be sorted");

    const double t_max = times.back();
    double dt = opt.dt_override > 0.0 ? opt.dt_override : default_dt(p);
    const long nsteps = std::max<long>(1, long(std::ceil(t_max / dt - 1e-12)));
    dt = t_max > 0.0 ? t_max / double(nsteps) : dt;

    std::vector<long> sample_step(times.size());
    std::vector<double> actual_times(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        sample_step[i] = long(std::llround(times[i] / dt));
        actual_times[i] = double(sample_step[i]) * dt;  // grid-snapped, bias-free
    }

    const auto frame = detail::precession_frame(p, init);
    const Vec3 raxis = axis_vector(readout);
    const double wx = hz_to_rad(p.x_hz);
    const double wz0 = hz_to_rad(double(p.ms) * p.z_hz);
    const OUParams ou{p.b_hz, p.tau_c_s};
    const OUStepper stepper(ou, dt);

    constexpr int block_size = 32;
    const int n_blocks = (opt.n_traj + block_size - 1) / block_size;
    std::vector<detail::Accum> blocks(static_cast<std::size_t>(n_blocks));

    parallel_for(std::size_t(n_blocks), [&](std::size_t bi) {
        auto& acc = blocks[bi];
        acc.init(times.size());
        const int lo = int(bi) * block_size;
        const int hi = std::min(opt.n_traj, lo + block_size);
        for (int traj = lo; traj < hi; ++traj) {
            Rng rng(derive_seed(opt.seed, std::uint64_t(traj)));
            double z = stepper.initial(rng);
            Vec3 v = init;
            std::size_t ptr = 0;
            for (long istep = 0; ptr < times.size(); ++istep) {
                while (ptr < times.size() && sample_step[ptr] == istep) {
                    const double s = v.dot(raxis);
                    const double c1 = v.dot(frame.e1), c2 = v.dot(frame.e2);
                    acc.s1[ptr] += s;
                    acc.s2[ptr] += s * s;
                    acc.e1[ptr] += c1;
                    acc.e2[ptr] += c2;
                    acc.e1sq[ptr] += c1 * c1;
                    acc.e2sq[ptr] += c2 * c2;
                    ++ptr;
                }
                if (ptr >= times.size()) break;
                v = detail::step(v, wx, wz0 + z, dt);
                z = stepper.step(z, rng);
            }
        }
    });

    detail::Accum total;
    total.init(times.size());
    for (const auto& b : blocks) total.add(b);

    const double n = double(opt.n_traj);
    RamseyResult out;
    out.signal.times = actual_times;
    out.envelope.times = actual_times;
    out.signal.n_traj = opt.n_traj;
    out.envelope.n_traj = opt.n_traj;
    out.signal.mean.resize(times.size());
    out.signal.stderr_.resize(times.size());
    out.envelope.mean.resize(times.size());
    out.envelope.stderr_.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double m = total.s1[i] / n;
        const double var = std::max(0.0, total.s2[i] / n - m * m);
        out.signal.mean[i] = m;
        out.signal.stderr_[i] = std::sqrt(var / n);
        const double m1 = total.e1[i] / n, m2 = total.e2[i] / n;
        const double v1 = std::max(0.0, total.e1sq[i] / n - m1 * m1);
        const double v2 = std::max(0.0, total.e2sq[i] / n - m2 * m2);
        const double env = std::hypot(m1, m2);
        out.envelope.mean[i] = env;
        // error propagated through sqrt(m1^2 + m2^2)
        out.envelope.stderr_[i] =
            env > 1e-12 ? std::sqrt((m1 * m1 * v1 + m2 * m2 * v2) / n) / env
                        : std::sqrt(std::max(v1, v2) / n);
    }
    if (opt.apply_relaxation_factor && p.x_hz > 0.0) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double f = std::exp(-hz_to_rad(p.b_hz) * hz_to_rad(p.b_hz) * p.rate() *
                                      actual_times[i] /
                                      (2.0 * hz_to_rad(p.x_hz) * hz_to_rad(p.x_hz)));
            out.signal.mean[i] *= f;
            out.envelope.mean[i] *= f;
        }
    }
    return out;
}

// Echo ensemble: one full evolution per requested total time, pi pulse about
// echo_axis at the midpoint, readout along the initial state direction.
inline DecayCurve ensemble_echo(const PairParams& p, const std::vector<double>& total_times,
                                const McOptions& opt, Vec3 init = {0, 0, 1},
                                Axis echo_axis = Axis::Z) {
    p.validate();
    if (opt.n_traj < 1) throw std::invalid_argument("ensemble_echo: n_traj must be >= 1");
    if (total_times.empty()) throw std::invalid_argument("ensemble_echo: no times");

    const double wx = hz_to_rad(p.x_hz);
    const double wz0 = hz_to_rad(double(p.ms) * p.z_hz);
    const OUParams ou{p.b_hz, p.tau_c_s};
    const Vec3 raxis = init.norm() > 0.0 ? init.normalized() : Vec3{0, 0, 1};
    const Vec3 pulse_axis = axis_vector(echo_axis);

    DecayCurve curve;
    curve.times = total_times;
    curve.n_traj = opt.n_traj;
    curve.mean.assign(total_times.size(), 0.0);
    curve.stderr_.assign(total_times.size(), 0.0);

    parallel_for(total_times.size(), [&](std::size_t ti) {
        const double t_total = total_times[ti];
        if (t_total <= 0.0) {
            curve.mean[ti] = 1.0;
            return;
        }
        double dt = opt.dt_override > 0.0 ? opt.dt_override : default_dt(p);
        long half = std::max<long>(1, long(std::ceil(0.5 * t_total / dt - 1e-12)));
        dt = 0.5 * t_total / double(half);
        const OUStepper stepper(ou, dt);
        double sum = 0.0, sum2 = 0.0;
        for (int traj = 0; traj < opt.n_traj; ++traj) {
            Rng rng(derive_seed(opt.seed, (std::uint64_t(ti) << 32) + std::uint64_t(traj)));
            double z = stepper.initial(rng);
            Vec3 v = init;
            for (long i = 0; i < 2 * half; ++i) {
                if (i == half) v = detail::rotate(v, pulse_axis, pi);
                v = detail::step(v, wx, wz0 + z, dt);
                z = stepper.step(z, rng);
            }
            const double s = v.dot(raxis);
            sum += s;
            sum2 += s * s;
        }
        const double n = double(opt.n_traj);
        const double m = sum / n;
        curve.mean[ti] = m;
        curve.stderr_[ti] = std::sqrt(std::max(0.0, sum2 / n - m * m) / n);
    });
    return curve;
}

}  // namespace pairspin
