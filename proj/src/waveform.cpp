#include "ajwave/waveform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ajwave/fft.hpp"

namespace ajwave {

int samples_on_grid(double span_s, double dt_s) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("sampling step must be positive");
  if (span_s < 0.0) throw std::invalid_argument("span must be nonnegative");
  const double ratio = span_s / dt_s;
  const double snapped = std::round(ratio);
  if (std::abs(ratio - snapped) > 1e-6 * std::max(1.0, ratio)) {
    throw std::invalid_argument("sampling-grid error: " + std::to_string(span_s) +
                                " s is not a multiple of dt = " + std::to_string(dt_s) + " s");
  }
  return static_cast<int>(snapped);
}

Waveform make_rect_composite(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                             double tc_s, double dt_s) {
  const int n = static_cast<int>(coeffs.size());
  if (n < 1) throw std::invalid_argument("make_rect_composite: need at least one segment");
  if (!coeffs.allFinite()) throw std::invalid_argument("make_rect_composite: coefficients must be finite");
  if (!(tc_s > 0.0)) throw std::invalid_argument("make_rect_composite: chip duration must be positive");
  const int per_seg = samples_on_grid(tc_s / (2.0 * n), dt_s);
  if (per_seg < 1) throw std::invalid_argument("make_rect_composite: dt too coarse for a segment");

  Waveform w;
  w.kind = WaveformKind::RectComposite;
  w.coeffs = coeffs;
  w.tc_s = tc_s;
  w.tp_s = tc_s / 2.0;
  w.dt_s = dt_s;
  w.samples.resize(static_cast<Eigen::Index>(n) * per_seg);
  for (int i = 0; i < n; ++i) w.samples.segment(static_cast<Eigen::Index>(i) * per_seg, per_seg).setConstant(coeffs[i]);
  return w;
}

Waveform gaussian_doublet(double amplitude, double tp_s, double tm_s, double dt_s) {
  if (!(tp_s > 0.0)) throw std::invalid_argument("gaussian_doublet: pulse duration must be positive");
  if (!(dt_s > 0.0)) throw std::invalid_argument("gaussian_doublet: dt must be positive");
  const int n = static_cast<int>(std::round(tp_s / dt_s));
  if (n < 1) throw std::invalid_argument("gaussian_doublet: dt too coarse for the pulse");

  Waveform w;
  w.kind = WaveformKind::GaussianDoublet;
  w.amplitude = amplitude;
  w.tp_s = tp_s;
  w.tm_s = tm_s;
  w.dt_s = dt_s;
  w.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    const double u = 2.0 * (k * dt_s - tm_s) / tp_s;
    w.samples[k] = amplitude * (1.0 - 4.0 * M_PI * u * u) * std::exp(-2.0 * M_PI * u * u);
  }
  return w;
}

Waveform normalize(Waveform w) {
  const double e = w.energy();
  if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("normalize: waveform has no energy");
  const double s = 1.0 / std::sqrt(e);
  w.samples *= s;
  w.amplitude *= s;
  if (w.coeffs.size() > 0) w.coeffs *= s;
  return w;
}

Template make_template(const Waveform& w, double delta_s) {
  if (delta_s < 0.0) throw std::invalid_argument("make_template: delta must be nonnegative");
  if (!(w.tc_s > 0.0)) throw std::invalid_argument("make_template: waveform has no chip duration set");
  if (delta_s + w.tp_s > w.tc_s * (1.0 + 1e-9)) {
    throw std::invalid_argument("make_template: shifted pulse exceeds the chip duration");
  }
  const int shift = samples_on_grid(delta_s, w.dt_s);
  const int len = samples_on_grid(w.tc_s, w.dt_s);
  const int nw = static_cast<int>(w.samples.size());

  Template v;
  v.dt_s = w.dt_s;
  v.delta_s = delta_s;
  v.samples = Eigen::VectorXd::Zero(len);
  for (int k = 0; k < len; ++k) {
    const double a = (k < nw) ? w.samples[k] : 0.0;
    const int j = k - shift;
    const double b = (j >= 0 && j < nw) ? w.samples[j] : 0.0;
    v.samples[k] = a - b;
  }
  return v;
}

Spectrum psd(const Eigen::Ref<const Eigen::VectorXd>& x, double dt_s, int nfft) {
  if (x.size() == 0) throw std::invalid_argument("psd: empty signal");
  if (!(dt_s > 0.0)) throw std::invalid_argument("psd: dt must be positive");
  const Eigen::VectorXcd spec = fft_forward(x, nfft);  // validates nfft
  const auto n = static_cast<double>(x.size());
  const int half = nfft / 2;

  Spectrum s;
  s.df_hz = 1.0 / (nfft * dt_s);
  s.freqs_hz.resize(half + 1);
  s.psd.resize(half + 1);
  // Two-sided periodogram dt·|X|²/n folded onto [0, f_Nyquist]; the fold
  // keeps Σ psd·df equal to the mean power of the original record exactly.
  s.psd[0] = dt_s * std::norm(spec[0]) / n;
  for (int m = 1; m < half; ++m) {
    s.psd[m] = dt_s * (std::norm(spec[m]) + std::norm(spec[nfft - m])) / n;
  }
  s.psd[half] = dt_s * std::norm(spec[half]) / n;
  for (int m = 0; m <= half; ++m) s.freqs_hz[m] = m * s.df_hz;
  return s;
}

}  // namespace ajwave
