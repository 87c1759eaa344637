#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ajwave/jamming.hpp"
#include "ajwave/rng.hpp"
#include "ajwave/waveform.hpp"

// TH-PPM transmitter, channel combiner, correlator receiver with optional
// frequency-domain clipper, and hard bit decision.

namespace ajwave {

struct ThConfig {
  double tc_s = 1e-9;      // chip duration
  double tf_s = 4e-9;      // frame duration = nc·tc
  int nf = 3;              // frames per bit
  int nc = 4;              // chips per frame
  double delta_s = 0.5e-9; // PPM shift
  double tp_s = 0.5e-9;    // pulse duration
  double dt_s = 0.02e-9;   // sampling interval
  double alpha = 1.0;      // channel gain

  double tb_s() const { return nf * tf_s; }
  int spc() const { return samples_on_grid(tc_s, dt_s); }  // samples per chip
  int spf() const { return samples_on_grid(tf_s, dt_s); }  // samples per frame
  int spb() const { return nf * spf(); }                    // samples per bit
  void validate() const;
};

struct ThCode {
  std::vector<int> codes;  // chip index per frame, each in {0, ..., nc−1}
};

struct CorrelatorComponents {
  double s = 0.0;  // signal part
  double j = 0.0;  // jammer part
  double n = 0.0;  // noise part
};

struct CorrelatorOutput {
  double r = 0.0;
  std::optional<CorrelatorComponents> components;  // instrumented mode only
};

// Uniform i.i.d. chip indices in {0, ..., nc−1}, one per frame.
ThCode gen_th_code(int n_frames, int nc, RngStream& rng);

// Sampled TH-PPM signal: pulse m at offset m·T_f + c_m·T_c + δ·d_{⌊m/N_f⌋}.
// Requires code length = bits length × N_f and the pulse to fit a chip
// together with the PPM shift.
Eigen::VectorXd modulate(const std::vector<int>& bits, const ThCode& code, const Waveform& w,
                         const ThConfig& cfg);

// r = α·s(t−τ) + j(t) + n(t): output has delay + tx.size() samples; noise is
// i.i.d. Gaussian with the given per-sample standard deviation (no draws
// when sigma = 0), the jammer tone is evaluated at absolute sample times.
Eigen::VectorXd apply_channel(const Eigen::Ref<const Eigen::VectorXd>& tx, const ThConfig& cfg,
                              double tau_s, const JammerSpec& jammer, double noise_sigma,
                              RngStream& rng);

// Correlator output for bit k: dt·Σ rx·v accumulated over the bit's N_f
// frames, template aligned at τ + m·T_f + c_m·T_c.
CorrelatorOutput correlate(const Eigen::Ref<const Eigen::VectorXd>& rx, const Template& tmpl,
                           const ThCode& code, const ThConfig& cfg, double tau_s, int bit_index);

// Hard decision: bit 0 iff R_k ≥ 0.
int decide(const CorrelatorOutput& out);

// Frequency-domain clipper: per bit-block, bins of the received spectrum
// whose squared magnitude exceeds λ_C = K·max|P_TH(f)| are scaled down to
// λ_C with phase preserved. P_TH is the squared-magnitude spectrum of the
// clean transmitted blocks under the identical transform, averaged over all
// blocks in the call.
Eigen::VectorXd clip(const Eigen::Ref<const Eigen::VectorXd>& rx,
                     const Eigen::Ref<const Eigen::VectorXd>& clean_tx, double k,
                     const ThConfig& cfg);

}  // namespace ajwave
