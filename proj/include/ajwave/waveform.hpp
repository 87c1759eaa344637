#pragma once

#include <Eigen/Core>

// Transmit-pulse construction and spectral analysis. Waveforms live on a
// uniform sampling grid; all segment boundaries must land on grid points so
// the modulator and correlator stay sample-exact.

namespace ajwave {

// Number of grid steps in `span`, validated: span must be an integer
// multiple of dt (relative tolerance 1e-6 on the step count).
int samples_on_grid(double span_s, double dt_s);

enum class WaveformKind { RectComposite, GaussianDoublet };

struct Waveform {
  WaveformKind kind = WaveformKind::RectComposite;
  // Per-segment levels for RectComposite (same scale as `samples`);
  // empty for the doublet.
  Eigen::VectorXd coeffs;
  double amplitude = 1.0;  // doublet peak amplitude (same scale as samples)
  double tp_s = 0.0;       // pulse duration; support is [0, tp_s)
  double tc_s = 0.0;       // chip duration; 0 when the pulse has no natural
                           // chip (doublet) — callers set it before
                           // make_template.
  double tm_s = 0.0;       // doublet center time
  double dt_s = 0.0;
  Eigen::VectorXd samples;  // samples[k] = w(k·dt), k = 0..round(tp/dt)-1

  double energy() const { return dt_s * samples.squaredNorm(); }
};

struct Template {
  // v(t) = w(t) − w(t−delta) sampled over one chip [0, tc); zero outside.
  Eigen::VectorXd samples;
  double dt_s = 0.0;
  double delta_s = 0.0;

  double energy() const { return dt_s * samples.squaredNorm(); }
};

struct Spectrum {
  Eigen::VectorXd freqs_hz;  // one-sided, ascending from 0
  Eigen::VectorXd psd;       // power per hertz; Σ psd·df = mean power
  double df_hz = 0.0;
};

// Piecewise-constant waveform: segment i of width tc/(2N) carries level
// coeffs[i]; support [0, tc/2). Levels are stored unscaled — apply
// normalize() to get unit energy.
Waveform make_rect_composite(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                             double tc_s, double dt_s);

// Second-derivative-of-Gaussian monocycle centered at tm, truncated to
// [0, tp): w(t) = A·(1 − 4π(2(t−tm)/tp)²)·exp(−2π(2(t−tm)/tp)²).
Waveform gaussian_doublet(double amplitude, double tp_s, double tm_s, double dt_s);

// Rescale so dt·Σ samples² = 1. Idempotent; rejects zero-energy input.
Waveform normalize(Waveform w);

// PPM template over one chip; requires delta ≥ 0, delta + tp ≤ tc, and both
// delta and tc on the sampling grid. Uses w.tc_s.
Template make_template(const Waveform& w, double delta_s);

// One-sided periodogram of x zero-padded to nfft (power of two ≥ x.size()).
// Normalized so Σ psd·df equals the mean power of the original record.
Spectrum psd(const Eigen::Ref<const Eigen::VectorXd>& x, double dt_s, int nfft);

}  // namespace ajwave
