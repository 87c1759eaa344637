#include "ajwave/harness.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace ajwave {

void SimConfig::validate() const {
  th.validate();
  if (n_bits < 1) throw std::invalid_argument("sim: need at least one bit");
  if (n_coeffs < 1) throw std::invalid_argument("sim: need at least one segment coefficient");
  if (jam_enabled && !(fj_hz > 0.0)) throw std::invalid_argument("sim: jammer frequency must be positive");
  if (estimator.sigma_hz < 0.0) throw std::invalid_argument("sim: estimator sigma must be nonnegative");
  if (!(clip_k > 0.0)) throw std::invalid_argument("sim: clipper threshold factor must be positive");
  if (workers < 0) throw std::invalid_argument("sim: worker count must be nonnegative");
  if (mode == WaveformMode::Optimized) {
    // The rectangular composite spans exactly half a chip.
    if (std::abs(th.tp_s - th.tc_s / 2.0) > 1e-9 * th.tc_s) {
      throw std::invalid_argument("sim: optimized mode requires tp = tc/2");
    }
    const double band = 2.0 * n_coeffs / th.tc_s;
    if (fhat_override_hz && !(*fhat_override_hz > 0.0 && *fhat_override_hz < band)) {
      throw std::invalid_argument("sim: design-frequency override outside the design band");
    }
  }
}

PowerCalibration calibrate_powers(const SimConfig& cfg) {
  PowerCalibration cal;
  cal.eb = cfg.th.alpha * cfg.th.alpha * cfg.th.nf;
  cal.ps = cal.eb / cfg.th.tb_s();
  if (cfg.jam_enabled && std::isfinite(cfg.sjr_db)) {
    cal.jam_power_w = cal.ps * std::pow(10.0, -cfg.sjr_db / 10.0);
  }
  if (std::isfinite(cfg.ebn0_db)) {
    cal.n0 = cal.eb * std::pow(10.0, -cfg.ebn0_db / 10.0);
    cal.noise_sigma = std::sqrt(cal.n0 / (2.0 * cfg.th.dt_s));
  }
  return cal;
}

WilsonInterval wilson95(long long errors, long long n) {
  if (n < 1 || errors < 0 || errors > n) throw std::invalid_argument("wilson95: invalid counts");
  const auto nn = static_cast<double>(n);
  if (errors == 0) return {0.0, std::min(1.0, 3.0 / nn)};
  if (errors == n) return {std::max(0.0, 1.0 - 3.0 / nn), 1.0};
  constexpr double z = 1.959963984540054;
  const double p = static_cast<double>(errors) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

struct TrialContext {
  const SimConfig* cfg = nullptr;
  PowerCalibration cal;
  JammerSpec jam;
  Waveform wf;     // prebuilt waveform (unless designed per trial)
  Template tmpl;
  bool per_trial_design = false;
  long long fixed_clamp = 0;  // clamping of the one-time design frequency
  int spf = 0, spb = 0;
  double band_max_hz = 0.0;
};

void build_waveform(const SimConfig& cfg, double fhat_hz, Waveform& wf, Template& tmpl) {
  if (cfg.mode == WaveformMode::Optimized) {
    DesignProblem p{fhat_hz, cfg.th.tc_s, cfg.n_coeffs};
    const DesignResult d = design_eigen(p);
    wf = normalize(make_rect_composite(d.coeffs, cfg.th.tc_s, cfg.th.dt_s));
  } else {
    wf = normalize(gaussian_doublet(1.0, cfg.th.tp_s, cfg.tm_s, cfg.th.dt_s));
    wf.tc_s = cfg.th.tc_s;
  }
  tmpl = make_template(wf, cfg.th.delta_s);
}

TrialContext make_context(const SimConfig& cfg) {
  cfg.validate();
  TrialContext ctx;
  ctx.cfg = &cfg;
  ctx.cal = calibrate_powers(cfg);
  ctx.jam.enabled = cfg.jam_enabled;
  ctx.jam.fj_hz = cfg.fj_hz;
  ctx.jam.theta_rad = cfg.theta_rad;
  ctx.jam.power_w = ctx.cal.jam_power_w;
  ctx.spf = cfg.th.spf();
  ctx.spb = cfg.th.spb();
  ctx.band_max_hz = 2.0 * cfg.n_coeffs / cfg.th.tc_s;
  ctx.per_trial_design =
      cfg.mode == WaveformMode::Optimized && cfg.estimator.sigma_hz > 0.0 && !cfg.fhat_override_hz;
  if (!ctx.per_trial_design) {
    double fhat = cfg.fj_hz;  // unused in doublet mode
    if (cfg.mode == WaveformMode::Optimized) {
      if (cfg.fhat_override_hz) {
        fhat = *cfg.fhat_override_hz;
      } else {
        RngStream unused(0);  // σ = 0 draws nothing
        const FhatDraw d = sample_fhat(cfg.estimator, cfg.fj_hz, ctx.band_max_hz, unused);
        fhat = d.fhat_hz;
        ctx.fixed_clamp = d.clamped ? 1 : 0;
      }
    }
    build_waveform(cfg, fhat, ctx.wf, ctx.tmpl);
  }
  return ctx;
}

struct TrialResult {
  bool completed = false;
  bool error = false;
  bool clamped = false;
  double r = 0.0, s = 0.0, j = 0.0, n = 0.0;
  double tau_s = 0.0;
};

// One Monte Carlo bit. Stream consumption order (fixed; changing it breaks
// every seeded regression): data bit, TH code, delay, optional θ_J,
// optional f̂ estimate, then channel noise.
TrialResult run_trial(const TrialContext& ctx, long long trial, bool instrumented) {
  const SimConfig& cfg = *ctx.cfg;
  RngStream rng = trial_stream(cfg.seed, static_cast<std::uint64_t>(trial));

  TrialResult res;
  const int bit = rng.uniform_int(2);
  const ThCode code = gen_th_code(cfg.th.nf, cfg.th.nc, rng);
  const int delay = rng.uniform_int(ctx.spf);
  const double tau_s = delay * cfg.th.dt_s;
  res.tau_s = tau_s;

  JammerSpec jam = ctx.jam;
  if (cfg.random_theta && jam.enabled) jam.theta_rad = 2.0 * M_PI * rng.uniform();

  const Waveform* wf = &ctx.wf;
  const Template* tmpl = &ctx.tmpl;
  Waveform wf_local;
  Template tmpl_local;
  if (ctx.per_trial_design) {
    const FhatDraw d = sample_fhat(cfg.estimator, cfg.fj_hz, ctx.band_max_hz, rng);
    res.clamped = d.clamped;
    try {
      build_waveform(cfg, d.fhat_hz, wf_local, tmpl_local);
    } catch (const std::exception&) {
      return res;  // aborted trial: counted as a design failure
    }
    wf = &wf_local;
    tmpl = &tmpl_local;
  }

  const Eigen::VectorXd tx = modulate({bit}, code, *wf, cfg.th);
  Eigen::VectorXd window(ctx.spb);
  Eigen::VectorXd s_win, j_win, n_win;
  if (!instrumented) {
    const Eigen::VectorXd rx = apply_channel(tx, cfg.th, tau_s, jam, ctx.cal.noise_sigma, rng);
    window = rx.segment(delay, ctx.spb);
  } else {
    // Assemble the channel from its components (same sample arithmetic and
    // draw order as apply_channel) so each part can be correlated alone.
    const Eigen::Index full = tx.size() + delay;
    Eigen::VectorXd sig = Eigen::VectorXd::Zero(full);
    sig.tail(tx.size()) = cfg.th.alpha * tx;
    Eigen::VectorXd jamv = Eigen::VectorXd::Zero(full);
    if (jam.enabled) jamv = stj_samples(jam, 0.0, static_cast<int>(full), cfg.th.dt_s);
    Eigen::VectorXd noisev = Eigen::VectorXd::Zero(full);
    if (ctx.cal.noise_sigma > 0.0) {
      for (Eigen::Index k = 0; k < full; ++k) noisev[k] = ctx.cal.noise_sigma * rng.normal();
    }
    s_win = sig.segment(delay, ctx.spb);
    j_win = jamv.segment(delay, ctx.spb);
    n_win = noisev.segment(delay, ctx.spb);
    window = (s_win + j_win) + n_win;
  }

  if (cfg.clip_enabled) {
    window = clip(window, cfg.th.alpha * tx, cfg.clip_k, cfg.th);
  }
  const CorrelatorOutput out = correlate(window, *tmpl, code, cfg.th, 0.0, 0);
  res.r = out.r;
  if (instrumented) {
    res.s = correlate(s_win, *tmpl, code, cfg.th, 0.0, 0).r;
    res.j = correlate(j_win, *tmpl, code, cfg.th, 0.0, 0).r;
    res.n = correlate(n_win, *tmpl, code, cfg.th, 0.0, 0).r;
  }
  res.completed = true;
  res.error = (decide(out) != bit);
  return res;
}

struct WorkerAccum {
  long long completed = 0;
  long long errors = 0;
  long long clamped = 0;
  long long failures = 0;
  double abs_s = 0.0, abs_j = 0.0, abs_n = 0.0;
  std::exception_ptr failure_exc;
};

RunStats run_impl(const SimConfig& cfg, bool instrumented, std::vector<InstrumentRecord>* dump) {
  const TrialContext ctx = make_context(cfg);
  const long long n = cfg.n_bits;
  int n_workers = cfg.workers > 0 ? cfg.workers
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_workers = static_cast<int>(std::min<long long>(n_workers, n));

  if (dump) dump->assign(static_cast<std::size_t>(n), InstrumentRecord{});
  std::vector<WorkerAccum> acc(static_cast<std::size_t>(n_workers));

  const auto worker = [&](int w) {
    WorkerAccum& a = acc[static_cast<std::size_t>(w)];
    try {
      const long long lo = n * w / n_workers;
      const long long hi = n * (w + 1) / n_workers;
      for (long long t = lo; t < hi; ++t) {
        const TrialResult r = run_trial(ctx, t, instrumented);
        if (r.clamped) ++a.clamped;
        if (!r.completed) {
          ++a.failures;
          continue;
        }
        ++a.completed;
        if (r.error) ++a.errors;
        if (instrumented) {
          a.abs_s += std::abs(r.s);
          a.abs_j += std::abs(r.j);
          a.abs_n += std::abs(r.n);
          if (dump) {
            (*dump)[static_cast<std::size_t>(t)] = InstrumentRecord{t, r.r, r.s, r.j, r.n, r.tau_s};
          }
        }
      }
    } catch (...) {
      a.failure_exc = std::current_exception();
    }
  };

  if (n_workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }

  RunStats stats;
  long long completed = 0, errors = 0, clamped = ctx.fixed_clamp, failures = 0;
  double abs_s = 0.0, abs_j = 0.0, abs_n = 0.0;
  for (const auto& a : acc) {
    if (a.failure_exc) std::rethrow_exception(a.failure_exc);
    completed += a.completed;
    errors += a.errors;
    clamped += a.clamped;
    failures += a.failures;
    abs_s += a.abs_s;
    abs_j += a.abs_j;
    abs_n += a.abs_n;
  }

  BerPoint& p = stats.point;
  p.n_bits = completed;
  p.n_errors = errors;
  p.ber = completed > 0 ? static_cast<double>(errors) / static_cast<double>(completed) : 0.0;
  if (completed > 0) {
    const WilsonInterval ci = wilson95(errors, completed);
    p.ci_low = ci.low;
    p.ci_high = ci.high;
  }
  p.seed = cfg.seed;
  p.clamp_count = clamped;
  p.design_failures = failures;
  if (instrumented && completed > 0) {
    stats.mean_abs_s = abs_s / static_cast<double>(completed);
    stats.mean_abs_j = abs_j / static_cast<double>(completed);
    stats.mean_abs_n = abs_n / static_cast<double>(completed);
  }
  return stats;
}

}  // namespace

BerPoint run_ber(const SimConfig& cfg) { return run_impl(cfg, false, nullptr).point; }

RunStats run_ber_instrumented(const SimConfig& cfg, std::vector<InstrumentRecord>* dump) {
  return run_impl(cfg, true, dump);
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::FJ: return "f_J";
    case SweepAxis::SJR: return "SJR";
    case SweepAxis::EBN0: return "EbN0";
    case SweepAxis::MU_EPS: return "mu_eps";
    case SweepAxis::SIGMA_EPS: return "sigma_eps";
  }
  return "?";
}

std::optional<SweepAxis> axis_from_name(const std::string& name) {
  if (name == "f_J") return SweepAxis::FJ;
  if (name == "SJR") return SweepAxis::SJR;
  if (name == "EbN0") return SweepAxis::EBN0;
  if (name == "mu_eps") return SweepAxis::MU_EPS;
  if (name == "sigma_eps") return SweepAxis::SIGMA_EPS;
  return std::nullopt;
}

std::vector<BerPoint> sweep(const SimConfig& cfg, SweepAxis axis, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<BerPoint> points;
  points.reserve(grid.size());
  for (const double v : grid) {
    SimConfig c = cfg;
    switch (axis) {
      case SweepAxis::FJ:
        c.fj_hz = v;
        break;
      case SweepAxis::SJR:
        c.sjr_db = v;
        c.jam_enabled = std::isfinite(v);
        break;
      case SweepAxis::EBN0:
        c.ebn0_db = v;
        break;
      case SweepAxis::MU_EPS:
        c.estimator.mu_hz = v;
        break;
      case SweepAxis::SIGMA_EPS:
        c.estimator.sigma_hz = v;
        break;
    }
    BerPoint p = run_ber(c);
    p.swept_value = v;
    points.push_back(p);
  }
  return points;
}

std::vector<GridBerPoint> sweep_grid2d(const SimConfig& cfg,
                                       const std::vector<double>& fhat_grid_hz,
                                       const std::vector<double>& fj_grid_hz) {
  if (fhat_grid_hz.empty() || fj_grid_hz.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<GridBerPoint> points;
  points.reserve(fhat_grid_hz.size() * fj_grid_hz.size());
  for (const double fhat : fhat_grid_hz) {
    SimConfig c = cfg;
    c.fhat_override_hz = fhat;
    for (const double fj : fj_grid_hz) {
      SimConfig cc = c;
      cc.fj_hz = fj;
      GridBerPoint g;
      g.fhat_hz = fhat;
      g.fj_hz = fj;
      g.point = run_ber(cc);
      g.point.swept_value = fj;
      points.push_back(g);
    }
  }
  return points;
}

}  // namespace ajwave
