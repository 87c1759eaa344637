#include "ajwave/jamming.hpp"

#include <cmath>
#include <stdexcept>

namespace ajwave {

void JammerSpec::validate() const {
  if (power_w < 0.0) throw std::invalid_argument("jammer: power must be nonnegative");
  if (enabled && !(fj_hz > 0.0)) throw std::invalid_argument("jammer: frequency must be positive when enabled");
}

Eigen::VectorXd stj_samples(const JammerSpec& spec, double t0_s, int n, double dt_s) {
  if (!spec.enabled) throw std::invalid_argument("stj_samples: jammer is disabled");
  if (n < 1) throw std::invalid_argument("stj_samples: need at least one sample");
  spec.validate();
  const double amp = std::sqrt(2.0 * spec.power_w);
  const double w = 2.0 * M_PI * spec.fj_hz;
  // Reduce the phase first so that congruent phases (θ vs θ+2π) produce
  // bit-identical sample streams.
  const double theta = std::remainder(spec.theta_rad, 2.0 * M_PI);
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out[k] = amp * std::cos(w * (t0_s + k * dt_s) + theta);
  return out;
}

FhatDraw sample_fhat(const FreqEstimatorModel& model, double fj_hz, double band_max_hz,
                     RngStream& rng) {
  if (model.sigma_hz < 0.0) throw std::invalid_argument("sample_fhat: sigma must be nonnegative");
  if (!(band_max_hz > 0.0)) throw std::invalid_argument("sample_fhat: band must be positive");
  double fhat = fj_hz + model.mu_hz;
  if (model.sigma_hz > 0.0) fhat += model.sigma_hz * rng.normal();

  constexpr double f_min = 1e6;
  const double lo = f_min;
  const double hi = band_max_hz - f_min;
  FhatDraw d;
  d.clamped = (fhat < lo || fhat > hi);
  d.fhat_hz = std::min(std::max(fhat, lo), hi);
  return d;
}

}  // namespace ajwave
