#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pairspin/constants.hpp"
#include "pairspin/geometry.hpp"
#include "pairspin/parallel.hpp"
#include "pairspin/rng.hpp"

namespace pairspin {

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck noise
// ---------------------------------------------------------------------------

struct OUParams {
    double b_hz = 0.0;     // stationary standard deviation [Hz]
    double tau_c_s = 0.1;  // correlation time [s]

    double rate() const { return 1.0 / tau_c_s; }
    void validate() const {
        if (b_hz < 0.0) throw std::invalid_argument("OUParams: b must be >= 0");
        if (!(tau_c_s > 0.0)) throw std::invalid_argument("OUParams: tau_c must be > 0");
    }
};

struct NoiseTrace {
    double dt = 0.0;              // sample spacing [s]
    std::vector<double> samples;  // values in rad/s
    std::uint64_t seed = 0;
};

// One-step exact OU update; no discretization bias at any dt. sigma is the
// stationary standard deviation in rad/s.
class OUStepper {
public:
    OUStepper(const OUParams& p, double dt)
        : sigma_(hz_to_rad(p.b_hz)),
          decay_(std::exp(-dt / p.tau_c_s)),
          kick_(std::sqrt(std::max(0.0, 1.0 - decay_ * decay_))) {}

    double initial(Rng& rng) const { return sigma_ * rng.normal(); }
    double step(double z, Rng& rng) const { return z * decay_ + sigma_ * kick_ * rng.normal(); }

private:
    double sigma_, decay_, kick_;
};

inline NoiseTrace ou_trace(const OUParams& p, double dt, int n, std::uint64_t seed) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("ou_trace: dt must be > 0");
    if (n < 1) throw std::invalid_argument("ou_trace: n must be >= 1");
    NoiseTrace trace;
    trace.dt = dt;
    trace.seed = seed;
    trace.samples.resize(std::size_t(n));
    Rng rng(seed);
    const OUStepper stepper(p, dt);
    double z = stepper.initial(rng);
    trace.samples[0] = z;
    for (int i = 1; i < n; ++i) {
        z = stepper.step(z, rng);
        trace.samples[std::size_t(i)] = z;
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Noise strength b from a sampled bath:  b^2 = 1/4 sum_k (A1_k - A2_k)^2
// ---------------------------------------------------------------------------

inline double b_of_bath(const SpinBath& bath) {
    double s = 0.0;
    for (std::size_t k = 0; k < bath.couplings_1.size(); ++k) {
        const double d = bath.couplings_1[k] - bath.couplings_2[k];
        s += d * d;
    }
    return 0.5 * std::sqrt(s);
}

struct BDistribution {
    std::vector<double> values;  // Hz, one per bath
    double mean = 0.0;
    double stddev = 0.0;
};

inline BDistribution b_distribution(const LatticeConfig& cfg, const BathTarget& target,
                                    int n_baths, std::uint64_t seed) {
    cfg.validate();
    if (n_baths < 1) throw std::invalid_argument("b_distribution: n_baths must be >= 1");
    BDistribution dist;
    dist.values.assign(std::size_t(n_baths), 0.0);
    parallel_for(std::size_t(n_baths), [&](std::size_t i) {
        dist.values[i] = b_of_bath(sample_bath(cfg, target, derive_seed(seed, i)));
    });
    double sum = 0.0, sum2 = 0.0;
    for (const double v : dist.values) {
        sum += v;
        sum2 += v * v;
    }
    dist.mean = sum / n_baths;
    dist.stddev = std::sqrt(std::max(0.0, sum2 / n_baths - dist.mean * dist.mean));
    return dist;
}

// ---------------------------------------------------------------------------
// External noise sources (order-of-magnitude estimators)
// ---------------------------------------------------------------------------

// Infinite-wire field B = mu0 I / (2 pi r) [T].
inline double wire_field(double current_a, double distance_m) {
    if (!(distance_m > 0.0)) throw std::domain_error("wire_field: distance must be > 0");
    return mu0 * current_a / (two_pi * distance_m);
}

inline double wire_gradient(double current_a, double r_a_m, double r_b_m) {
    return std::abs(wire_field(current_a, r_a_m) - wire_field(current_a, r_b_m));
}

// Current that produces field delta_b at distance r.
inline double wire_current_for_field(double delta_b_t, double distance_m) {
    if (!(distance_m > 0.0)) throw std::domain_error("wire_current_for_field: distance must be > 0");
    return two_pi * distance_m * delta_b_t / mu0;
}

// On-axis field of a cylindrical permanent magnet of radius R, length L and
// remanence Br at distance r from its face.
inline double magnet_field(double r_m, double radius_m, double length_m, double br_t) {
    if (!(r_m > 0.0 && radius_m > 0.0 && length_m > 0.0))
        throw std::domain_error("magnet_field: geometry must be positive");
    const double lr = length_m + r_m;
    return 0.5 * br_t *
           (lr / std::sqrt(radius_m * radius_m + lr * lr) -
            r_m / std::sqrt(radius_m * radius_m + r_m * r_m));
}

inline double magnet_gradient(double r_m, double radius_m, double length_m, double br_t,
                              double step_m) {
    return std::abs(magnet_field(r_m, radius_m, length_m, br_t) -
                    magnet_field(r_m + step_m, radius_m, length_m, br_t));
}

}  // namespace pairspin
