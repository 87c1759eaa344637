#include "ajwave/txrx.hpp"

#include <cmath>
#include <stdexcept>

#include "ajwave/fft.hpp"

namespace ajwave {

void ThConfig::validate() const {
  if (nf < 1 || nc < 1) throw std::invalid_argument("th: frame and chip counts must be positive");
  if (!(tc_s > 0.0) || !(tf_s > 0.0) || !(tp_s > 0.0) || !(dt_s > 0.0)) {
    throw std::invalid_argument("th: durations must be positive");
  }
  if (std::abs(tf_s - nc * tc_s) > 1e-9 * tf_s) {
    throw std::invalid_argument("th: frame duration must equal nc chip durations");
  }
  if (tp_s > tc_s * (1.0 + 1e-9)) throw std::invalid_argument("th: pulse exceeds the chip");
  if (delta_s < 0.0 || delta_s + tp_s > tc_s * (1.0 + 1e-9)) {
    throw std::invalid_argument("th: PPM shift plus pulse exceeds the chip");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("th: channel gain must be positive");
  samples_on_grid(tc_s, dt_s);
  samples_on_grid(tf_s, dt_s);
  samples_on_grid(delta_s, dt_s);
}

ThCode gen_th_code(int n_frames, int nc, RngStream& rng) {
  if (n_frames < 0) throw std::invalid_argument("gen_th_code: negative frame count");
  if (nc < 1) throw std::invalid_argument("gen_th_code: need at least one chip");
  ThCode code;
  code.codes.resize(static_cast<std::size_t>(n_frames));
  for (auto& c : code.codes) c = rng.uniform_int(nc);
  return code;
}

Eigen::VectorXd modulate(const std::vector<int>& bits, const ThCode& code, const Waveform& w,
                         const ThConfig& cfg) {
  cfg.validate();
  if (code.codes.size() != bits.size() * static_cast<std::size_t>(cfg.nf)) {
    throw std::invalid_argument("modulate: code length must be bits x frames-per-bit");
  }
  if (w.dt_s != cfg.dt_s) throw std::invalid_argument("modulate: waveform and config grids differ");
  const int spc = cfg.spc();
  const int spf = cfg.spf();
  const int spb = cfg.spb();
  const int shift = samples_on_grid(cfg.delta_s, cfg.dt_s);
  const int nw = static_cast<int>(w.samples.size());
  if (nw + shift > spc) throw std::invalid_argument("modulate: pulse with PPM shift overflows the chip");

  Eigen::VectorXd tx = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bits.size()) * spb);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const int d = bits[k];
    if (d != 0 && d != 1) throw std::invalid_argument("modulate: bits must be 0 or 1");
    for (int m = 0; m < cfg.nf; ++m) {
      const std::size_t frame = k * cfg.nf + m;
      const int c = code.codes[frame];
      if (c < 0 || c >= cfg.nc) throw std::invalid_argument("modulate: TH code out of range");
      const Eigen::Index base =
          static_cast<Eigen::Index>(frame) * spf + static_cast<Eigen::Index>(c) * spc + d * shift;
      tx.segment(base, nw) += w.samples;
    }
  }
  return tx;
}

Eigen::VectorXd apply_channel(const Eigen::Ref<const Eigen::VectorXd>& tx, const ThConfig& cfg,
                              double tau_s, const JammerSpec& jammer, double noise_sigma,
                              RngStream& rng) {
  if (tau_s < 0.0) throw std::invalid_argument("apply_channel: delay must be nonnegative");
  const int delay = samples_on_grid(tau_s, cfg.dt_s);
  const Eigen::Index n = tx.size() + delay;
  const double amp = jammer.enabled ? std::sqrt(2.0 * jammer.power_w) : 0.0;
  const double w = jammer.enabled ? 2.0 * M_PI * jammer.fj_hz : 0.0;
  // Same phase reduction as stj_samples, keeping the inlined tone
  // bit-identical to the reference generator.
  const double theta = jammer.enabled ? std::remainder(jammer.theta_rad, 2.0 * M_PI) : 0.0;
  if (jammer.enabled) jammer.validate();

  Eigen::VectorXd rx(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double sig = (k >= delay) ? cfg.alpha * tx[k - delay] : 0.0;
    const double jam = jammer.enabled ? amp * std::cos(w * (k * cfg.dt_s) + theta) : 0.0;
    const double noise = (noise_sigma > 0.0) ? noise_sigma * rng.normal() : 0.0;
    rx[k] = (sig + jam) + noise;
  }
  return rx;
}

CorrelatorOutput correlate(const Eigen::Ref<const Eigen::VectorXd>& rx, const Template& tmpl,
                           const ThCode& code, const ThConfig& cfg, double tau_s, int bit_index) {
  if (bit_index < 0) throw std::invalid_argument("correlate: negative bit index");
  if (tmpl.dt_s != cfg.dt_s) throw std::invalid_argument("correlate: template and config grids differ");
  const int delay = samples_on_grid(tau_s, cfg.dt_s);
  const int spc = cfg.spc();
  const int spf = cfg.spf();
  const int spb = cfg.spb();
  if (tmpl.samples.size() != spc) throw std::invalid_argument("correlate: template must span one chip");
  if (code.codes.size() < static_cast<std::size_t>(bit_index + 1) * cfg.nf) {
    throw std::invalid_argument("correlate: TH code shorter than the requested bit");
  }
  if (rx.size() < delay + static_cast<Eigen::Index>(bit_index + 1) * spb) {
    throw std::invalid_argument("correlate: received vector shorter than the bit span");
  }

  double acc = 0.0;
  for (int m = bit_index * cfg.nf; m < (bit_index + 1) * cfg.nf; ++m) {
    const Eigen::Index off = delay + static_cast<Eigen::Index>(m) * spf +
                             static_cast<Eigen::Index>(code.codes[static_cast<std::size_t>(m)]) * spc;
    acc += rx.segment(off, spc).dot(tmpl.samples);
  }
  CorrelatorOutput out;
  out.r = cfg.dt_s * acc;
  return out;
}

int decide(const CorrelatorOutput& out) { return out.r >= 0.0 ? 0 : 1; }

Eigen::VectorXd clip(const Eigen::Ref<const Eigen::VectorXd>& rx,
                     const Eigen::Ref<const Eigen::VectorXd>& clean_tx, double k,
                     const ThConfig& cfg) {
  if (!(k > 0.0)) throw std::invalid_argument("clip: threshold factor must be positive");
  if (rx.size() != clean_tx.size()) throw std::invalid_argument("clip: block lengths differ");
  const int spb = cfg.spb();
  if (rx.size() == 0 || rx.size() % spb != 0) {
    throw std::invalid_argument("clip: input must be a whole number of bit blocks");
  }
  const Eigen::Index n_blocks = rx.size() / spb;
  const int nfft = next_pow2(spb);

  // Reference spectrum: squared magnitudes of the clean transmitted blocks
  // under the same transform, averaged over the blocks in this call.
  Eigen::VectorXd p_ref = Eigen::VectorXd::Zero(nfft);
  for (Eigen::Index b = 0; b < n_blocks; ++b) {
    const Eigen::VectorXcd spec = fft_forward(clean_tx.segment(b * spb, spb), nfft);
    p_ref += spec.cwiseAbs2();
  }
  p_ref /= static_cast<double>(n_blocks);
  const double lambda_c = k * p_ref.maxCoeff();

  Eigen::VectorXd out(rx.size());
  for (Eigen::Index b = 0; b < n_blocks; ++b) {
    Eigen::VectorXcd spec = fft_forward(rx.segment(b * spb, spb), nfft);
    for (int m = 0; m < nfft; ++m) {
      const double p = std::norm(spec[m]);
      if (p > lambda_c) spec[m] *= std::sqrt(lambda_c / p);
    }
    out.segment(b * spb, spb) = fft_inverse_real(spec, spb);
  }
  return out;
}

}  // namespace ajwave
