#pragma once

#include <Eigen/Core>

#include "ajwave/rng.hpp"

// Tone-jammer synthesis and the Gaussian model of imperfect jammer-frequency
// estimation.

namespace ajwave {

struct JammerSpec {
  double fj_hz = 0.0;      // tone frequency
  double theta_rad = 0.0;  // tone phase
  double power_w = 0.0;    // average tone power; amplitude is √(2·power)
  bool enabled = false;

  void validate() const;
};

// Samples of √(2P)·cos(2πf(t0 + k·dt) + θ), k = 0..n−1. Requires enabled.
Eigen::VectorXd stj_samples(const JammerSpec& spec, double t0_s, int n, double dt_s);

struct FreqEstimatorModel {
  double mu_hz = 0.0;     // mean of the estimation error
  double sigma_hz = 0.0;  // standard deviation of the estimation error
};

struct FhatDraw {
  double fhat_hz = 0.0;
  bool clamped = false;
};

// Estimated frequency f_J + ε, ε ~ N(mu, sigma²); sigma = 0 draws nothing
// from the stream. The result is clamped into [f_min, band_max − f_min]
// (f_min = 1 MHz) so it always satisfies the designer's band precondition;
// clamping is reported so callers can count it.
FhatDraw sample_fhat(const FreqEstimatorModel& model, double fj_hz, double band_max_hz,
                     RngStream& rng);

}  // namespace ajwave
