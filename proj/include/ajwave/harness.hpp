#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ajwave/designer.hpp"
#include "ajwave/jamming.hpp"
#include "ajwave/txrx.hpp"

// Seeded Monte Carlo BER engine: power calibration from SJR and E_b/N_0,
// one-bit trials with per-trial rng streams (bit-identical results for any
// worker count), instrumented correlator breakdowns, and parameter sweeps.

namespace ajwave {

enum class WaveformMode { Optimized, GaussianDoublet };

struct SimConfig {
  ThConfig th;
  double fj_hz = 1.5e9;
  double theta_rad = 0.0;
  bool jam_enabled = true;
  double sjr_db = -10.0;   // +inf is expressed as jam_enabled = false
  double ebn0_db = 15.0;   // +inf → noiseless
  WaveformMode mode = WaveformMode::Optimized;
  int n_coeffs = 5;        // rectangular segments in Optimized mode
  double tm_s = 0.25e-9;   // doublet center in GaussianDoublet mode
  bool clip_enabled = false;
  double clip_k = 1.2;
  FreqEstimatorModel estimator;
  bool random_theta = false;  // draw θ_J uniform [0, 2π) per trial
  // Fixed design frequency, bypassing the estimator (2-D grid sweeps).
  std::optional<double> fhat_override_hz;
  long long n_bits = 200000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 → hardware concurrency

  void validate() const;
};

struct PowerCalibration {
  double eb = 0.0;           // bit energy α²·N_f (unit-energy pulses)
  double ps = 0.0;           // average signal power E_b/T_b
  double n0 = 0.0;           // noise spectral density (0 when noiseless)
  double jam_power_w = 0.0;  // tone power from SJR (0 when jammer off)
  double noise_sigma = 0.0;  // per-sample standard deviation √(N_0/(2·dt))
};

PowerCalibration calibrate_powers(const SimConfig& cfg);

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

// 95% Wilson score interval; zero (or all) errors fall back to the
// one-sided rule-of-three bound.
WilsonInterval wilson95(long long errors, long long n);

struct BerPoint {
  double swept_value = 0.0;
  long long n_bits = 0;  // completed trials
  long long n_errors = 0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  long long clamp_count = 0;  // clamped f̂ evaluations (per trial when
                              // σ_ε > 0, the single design otherwise)
  long long design_failures = 0;  // aborted trials, excluded from n_bits
};

struct InstrumentRecord {
  long long bit_index = 0;
  double r = 0.0, s = 0.0, j = 0.0, n = 0.0;
  double tau_s = 0.0;
};

struct RunStats {
  BerPoint point;
  double mean_abs_s = 0.0;
  double mean_abs_j = 0.0;
  double mean_abs_n = 0.0;
};

BerPoint run_ber(const SimConfig& cfg);

// As run_ber, additionally correlating the signal/jammer/noise components
// separately (components of the unclipped window). Per-trial records are
// written to `dump` in trial order when given.
RunStats run_ber_instrumented(const SimConfig& cfg, std::vector<InstrumentRecord>* dump = nullptr);

enum class SweepAxis { FJ, SJR, EBN0, MU_EPS, SIGMA_EPS };

const char* axis_name(SweepAxis axis);
std::optional<SweepAxis> axis_from_name(const std::string& name);

// One BerPoint per grid value; grid units are hertz for FJ/MU_EPS/SIGMA_EPS
// and decibels for SJR/EBN0 (a non-finite SJR value disables the jammer).
// Every point runs with cfg.seed, so points share their noise realizations.
std::vector<BerPoint> sweep(const SimConfig& cfg, SweepAxis axis, const std::vector<double>& grid);

struct GridBerPoint {
  double fhat_hz = 0.0;  // design frequency (row)
  double fj_hz = 0.0;    // actual jammer frequency (column)
  BerPoint point;
};

// Design-frequency × jammer-frequency matrix, row-major order.
std::vector<GridBerPoint> sweep_grid2d(const SimConfig& cfg,
                                       const std::vector<double>& fhat_grid_hz,
                                       const std::vector<double>& fj_grid_hz);

}  // namespace ajwave
