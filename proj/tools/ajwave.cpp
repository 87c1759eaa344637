// ajwave: anti-jamming TH-PPM waveform design and link simulation.
//
// Subcommands:
//   design       solve for the minimum-correlation pulse at one frequency
//   cost         evaluate closed-form vs numerically maximized correlation
//   spectrogram  design across a frequency grid, PSD row per design
//   psd          power spectral density of a single pulse
//   ber          Monte Carlo bit-error-rate sweeps
//   verify       run the library's full self-check suite
//
// Surface units are nanoseconds / gigahertz / decibels; the library works
// in SI units throughout.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"

#include "ajwave/config.hpp"
#include "ajwave/designer.hpp"
#include "ajwave/harness.hpp"
#include "ajwave/io.hpp"
#include "ajwave/jamming.hpp"
#include "ajwave/rng.hpp"
#include "ajwave/selfcheck.hpp"
#include "ajwave/units.hpp"
#include "ajwave/waveform.hpp"

namespace {

using namespace ajwave;

// Grid syntax: "a:step:b" (inclusive arithmetic range) or a comma list.
// The token "inf" is accepted for dB axes (jam-free / noiseless points).
double parse_grid_value(const std::string& token) {
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("bad grid value '" + token + "'");
  }
  if (pos != token.size()) throw std::runtime_error("bad grid value '" + token + "'");
  return v;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos || spec.find(':', c2 + 1) != std::string::npos)
      throw std::runtime_error("range grid must be 'start:step:stop'");
    const double a = parse_grid_value(spec.substr(0, c1));
    const double step = parse_grid_value(spec.substr(c1 + 1, c2 - c1 - 1));
    const double b = parse_grid_value(spec.substr(c2 + 1));
    if (!(std::isfinite(a) && std::isfinite(step) && std::isfinite(b)))
      throw std::runtime_error("range grid endpoints must be finite");
    if (!(step > 0.0)) throw std::runtime_error("range grid step must be positive");
    if (b < a) throw std::runtime_error("range grid stop must be >= start");
    const double slack = step * 1e-9;
    for (long long k = 0;; ++k) {
      const double v = a + static_cast<double>(k) * step;
      if (v > b + slack) break;
      grid.push_back(std::min(v, b));
    }
  } else {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto comma = spec.find(',', start);
      const auto end = (comma == std::string::npos) ? spec.size() : comma;
      std::string token = spec.substr(start, end - start);
      const auto l = token.find_first_not_of(" \t");
      if (l == std::string::npos) throw std::runtime_error("empty grid value");
      const auto r = token.find_last_not_of(" \t");
      grid.push_back(parse_grid_value(token.substr(l, r - l + 1)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (grid.empty()) throw std::runtime_error("empty grid");
  return grid;
}

// Run `fn(ostream)` against the file at `path`, or stdout when empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  fn(os);
  os.flush();
  if (!os) throw std::runtime_error("failed writing output file: " + path);
}

Eigen::VectorXd powell_init(int n, std::uint64_t seed) {
  RngStream rng(mix64(seed ^ 0xA11CE5EEDull));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  if (norm < 1e-12) return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  return v / norm;
}

int cmd_design(double fhat_ghz, int n, double tc_ns, const std::string& method,
               std::uint64_t seed, double tol, int max_outer, const std::string& out) {
  DesignProblem problem;
  problem.fhat_hz = ghz_to_hz(fhat_ghz);
  problem.tc_s = ns_to_s(tc_ns);
  problem.n = n;
  problem.validate();

  DesignResult result;
  if (method == "eigen") {
    result = design_eigen(problem);
  } else {
    result = design_powell(problem, powell_init(n, seed), tol, max_outer, seed);
  }

  CoeffFile file;
  file.n = n;
  file.fhat_hz = problem.fhat_hz;
  file.tc_s = problem.tc_s;
  file.coeffs = result.coeffs;
  file.cost = result.cost;
  file.method = method;
  file.seed = seed;

  if (out.empty()) {
    std::cout << coeff_file_text(file);
    std::cout.flush();
  } else {
    write_coeff_file(out, file);
  }
  std::fprintf(stderr, "designed n=%d fhat=%.6f GHz cost=%s ns (%s, %d iterations)\n",
               n, fhat_ghz, fmt_real(s_to_ns(result.cost)).c_str(), method.c_str(),
               result.iterations);
  if (!result.converged) {
    std::fprintf(stderr, "error: %s did not converge (kkt residual %.3e)\n",
                 method.c_str(), result.kkt_residual);
    return 2;
  }
  return 0;
}

int cmd_cost(const std::string& coeffs_path, double fj_ghz, double theta_rad) {
  const CoeffFile file = read_coeff_file(coeffs_path);
  const double fj = ghz_to_hz(fj_ghz);
  if (!(fj > 0.0)) throw std::runtime_error("--fj must be positive");

  const double closed_ns = s_to_ns(cost_F(fj, file.coeffs, file.tc_s));

  // Numerical maximization on a fine template grid; the closed form is
  // exact for the piecewise-constant pulse, so agreement is limited only
  // by the oracle's own discretization.
  const double seg = file.tc_s / (2.0 * file.n);
  const Waveform w = make_rect_composite(file.coeffs, file.tc_s, seg / 500000.0);
  const Template v = make_template(w, file.tc_s / 2.0);
  const double oracle_ns = s_to_ns(oracle_max_correlation(v, fj, theta_rad, (1.0 / fj) / 256.0));

  const double rel = std::abs(closed_ns - oracle_ns) / std::max(oracle_ns, 1e-6);
  std::cout << "closed_form_ns " << fmt_real(closed_ns) << "\n";
  std::cout << "oracle_ns " << fmt_real(oracle_ns) << "\n";
  std::cout << "rel_diff " << fmt_real(rel) << "\n";
  std::cout.flush();
  return 0;
}

int cmd_spectrogram(const std::string& grid_spec, int n, double tc_ns, int nfft,
                    double dt_ns, const std::string& out) {
  const std::vector<double> grid_ghz = parse_grid(grid_spec);
  Eigen::VectorXd fgrid(static_cast<Eigen::Index>(grid_ghz.size()));
  for (std::size_t i = 0; i < grid_ghz.size(); ++i) {
    if (!std::isfinite(grid_ghz[i])) throw std::runtime_error("spectrogram grid must be finite");
    fgrid[static_cast<Eigen::Index>(i)] = ghz_to_hz(grid_ghz[i]);
  }
  DesignProblem base;
  base.fhat_hz = fgrid[0];
  base.tc_s = ns_to_s(tc_ns);
  base.n = n;
  base.validate();

  const SpectrogramResult sg = design_spectrogram(fgrid, base, nfft, ns_to_s(dt_ns));
  with_output(out, [&](std::ostream& os) { write_spectrogram_csv(os, sg); });
  return 0;
}

int cmd_psd(const std::string& coeffs_path, bool doublet, double tp_ns, double tm_ns,
            int nfft, double dt_ns, const std::string& out) {
  const double dt = ns_to_s(dt_ns);
  Waveform w;
  if (doublet) {
    w = normalize(gaussian_doublet(1.0, ns_to_s(tp_ns), ns_to_s(tm_ns), dt));
  } else {
    if (coeffs_path.empty()) throw std::runtime_error("psd needs --coeffs or --doublet");
    const CoeffFile file = read_coeff_file(coeffs_path);
    w = normalize(make_rect_composite(file.coeffs, file.tc_s, dt));
  }
  const Spectrum s = psd(w.samples, dt, nfft);
  with_output(out, [&](std::ostream& os) { write_psd_csv(os, s); });
  return 0;
}

void apply_axis_value(SimConfig& cfg, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::FJ: cfg.fj_hz = v; break;
    case SweepAxis::SJR:
      cfg.sjr_db = v;
      cfg.jam_enabled = std::isfinite(v);
      break;
    case SweepAxis::EBN0: cfg.ebn0_db = v; break;
    case SweepAxis::MU_EPS: cfg.estimator.mu_hz = v; break;
    case SweepAxis::SIGMA_EPS: cfg.estimator.sigma_hz = v; break;
  }
}

int cmd_ber(const std::string& config_path, const std::string& axis_str,
            const std::string& grid_spec, const std::string& out, int workers,
            long long bits, long long seed_override, bool random_theta,
            const std::string& instrument_out) {
  SimConfig cfg = load_config_file(config_path);
  if (workers > 0) cfg.workers = workers;
  if (bits > 0) cfg.n_bits = bits;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (random_theta) cfg.random_theta = true;
  cfg.validate();

  const std::vector<double> grid = parse_grid(grid_spec);

  if (axis_str == "fhat_vs_fJ_grid") {
    if (!instrument_out.empty())
      throw std::runtime_error("--instrument-csv is not available for 2-D grids");
    std::vector<double> hz(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!std::isfinite(grid[i])) throw std::runtime_error("frequency grid must be finite");
      hz[i] = ghz_to_hz(grid[i]);
    }
    const std::vector<GridBerPoint> points = sweep_grid2d(cfg, hz, hz);
    with_output(out, [&](std::ostream& os) { write_grid_csv(os, points); });
    return 0;
  }

  const std::optional<SweepAxis> axis = axis_from_name(axis_str);
  if (!axis) throw std::runtime_error("unknown axis '" + axis_str + "'");

  // Frequency axes are specified in GHz on the command line.
  std::vector<double> values = grid;
  if (*axis == SweepAxis::FJ || *axis == SweepAxis::MU_EPS || *axis == SweepAxis::SIGMA_EPS) {
    for (double& v : values) {
      if (!std::isfinite(v)) throw std::runtime_error("frequency grid must be finite");
      v = ghz_to_hz(v);
    }
  }

  if (!instrument_out.empty()) {
    if (values.size() != 1)
      throw std::runtime_error("--instrument-csv requires a single-point grid");
    SimConfig c = cfg;
    apply_axis_value(c, *axis, values[0]);
    std::vector<InstrumentRecord> records;
    RunStats stats = run_ber_instrumented(c, &records);
    stats.point.swept_value = values[0];
    with_output(instrument_out, [&](std::ostream& os) { write_instrument_csv(os, records); });
    if (!out.empty()) {
      with_output(out, [&](std::ostream& os) {
        write_sweep_csv(os, axis_name(*axis), {stats.point});
      });
    }
    std::fprintf(stderr, "mean |S|=%.6e |J|=%.6e |N|=%.6e ber=%.6e\n", stats.mean_abs_s,
                 stats.mean_abs_j, stats.mean_abs_n, stats.point.ber);
    return 0;
  }

  const std::vector<BerPoint> points = sweep(cfg, *axis, values);
  with_output(out, [&](std::ostream& os) { write_sweep_csv(os, axis_name(*axis), points); });
  return 0;
}

int cmd_verify(double tol_scale) {
  const std::vector<CheckResult> results = run_self_checks(tol_scale);
  int failures = 0;
  for (const CheckResult& c : results) {
    std::printf("[%s] %-32s residual %.6e  tol %.6e\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.residual, c.tolerance);
    if (!c.pass) ++failures;
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  std::fflush(stdout);
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-jamming TH-PPM waveform design and link simulation"};
  app.require_subcommand(1);
  int rc = 0;

  // --- design ---------------------------------------------------------
  auto* design = app.add_subcommand("design", "Design a minimum-correlation pulse");
  double d_fhat = 0.0, d_tc = 1.0, d_tol = 1e-8;
  int d_n = 5, d_max_outer = 200;
  std::uint64_t d_seed = 0;
  std::string d_method = "eigen", d_out;
  design->add_option("--fhat", d_fhat, "design frequency (GHz)")->required();
  design->add_option("--n", d_n, "number of pulse segments")->default_val(5);
  design->add_option("--tc", d_tc, "chip duration (ns)")->default_val(1.0);
  design->add_option("--method", d_method, "solver")
      ->check(CLI::IsMember({"eigen", "powell"}))
      ->default_val("eigen");
  design->add_option("--seed", d_seed, "rng seed (powell restarts)")->default_val(0);
  design->add_option("--tol", d_tol, "powell convergence tolerance")->default_val(1e-8);
  design->add_option("--max-outer", d_max_outer, "powell outer iteration cap")->default_val(200);
  design->add_option("--out", d_out, "coefficient file path (stdout if omitted)");
  design->callback([&]() { rc = cmd_design(d_fhat, d_n, d_tc, d_method, d_seed, d_tol, d_max_outer, d_out); });

  // --- cost -----------------------------------------------------------
  auto* cost = app.add_subcommand("cost", "Evaluate the jammer-correlation cost of a pulse");
  std::string c_coeffs;
  double c_fj = 0.0, c_theta = 0.0;
  cost->add_option("--coeffs", c_coeffs, "coefficient file")->required();
  cost->add_option("--fj", c_fj, "jammer frequency (GHz)")->required();
  cost->add_option("--theta", c_theta, "jammer phase (rad) for the numerical check")
      ->default_val(0.0);
  cost->callback([&]() { rc = cmd_cost(c_coeffs, c_fj, c_theta); });

  // --- spectrogram ----------------------------------------------------
  auto* sg = app.add_subcommand("spectrogram", "Design across a frequency grid, one PSD row each");
  std::string g_grid, g_out;
  int g_n = 5, g_nfft = 16384;
  double g_tc = 1.0, g_dt = 0.02;
  sg->add_option("--grid", g_grid, "frequency grid, GHz ('a:step:b' or comma list)")->required();
  sg->add_option("--n", g_n, "number of pulse segments")->default_val(5);
  sg->add_option("--tc", g_tc, "chip duration (ns)")->default_val(1.0);
  sg->add_option("--nfft", g_nfft, "FFT size")->default_val(16384);
  sg->add_option("--dt", g_dt, "sampling step (ns)")->default_val(0.02);
  sg->add_option("--out", g_out, "output CSV (stdout if omitted)");
  sg->callback([&]() { rc = cmd_spectrogram(g_grid, g_n, g_tc, g_nfft, g_dt, g_out); });

  // --- psd ------------------------------------------------------------
  auto* ps = app.add_subcommand("psd", "Power spectral density of a single pulse");
  std::string p_coeffs, p_out;
  bool p_doublet = false;
  double p_tp = 0.5, p_tm = 0.25, p_dt = 0.02;
  int p_nfft = 16384;
  ps->add_option("--coeffs", p_coeffs, "coefficient file");
  ps->add_flag("--doublet", p_doublet, "use the Gaussian doublet instead of a coefficient file");
  ps->add_option("--tp", p_tp, "doublet duration (ns)")->default_val(0.5);
  ps->add_option("--tm", p_tm, "doublet center (ns)")->default_val(0.25);
  ps->add_option("--nfft", p_nfft, "FFT size")->default_val(16384);
  ps->add_option("--dt", p_dt, "sampling step (ns)")->default_val(0.02);
  ps->add_option("--out", p_out, "output CSV (stdout if omitted)");
  ps->callback([&]() { rc = cmd_psd(p_coeffs, p_doublet, p_tp, p_tm, p_nfft, p_dt, p_out); });

  // --- ber ------------------------------------------------------------
  auto* ber = app.add_subcommand("ber", "Monte Carlo BER sweep");
  std::string b_config, b_axis, b_grid, b_out, b_instrument;
  int b_workers = 0;
  long long b_bits = 0, b_seed = -1;
  bool b_random_theta = false;
  ber->add_option("--config", b_config, "simulation config file")->required();
  ber->add_option("--axis", b_axis,
                  "sweep axis: f_J | SJR | EbN0 | mu_eps | sigma_eps | fhat_vs_fJ_grid")
      ->required();
  ber->add_option("--grid", b_grid, "axis grid ('a:step:b' or comma list; GHz or dB)")->required();
  ber->add_option("--out", b_out, "output CSV (stdout if omitted)");
  ber->add_option("--workers", b_workers, "worker threads (0 = config/hardware)")->default_val(0);
  ber->add_option("--bits", b_bits, "override bits per point (0 = config value)")->default_val(0);
  ber->add_option("--seed", b_seed, "override mc seed (negative = config value)")->default_val(-1);
  ber->add_flag("--random-theta", b_random_theta, "draw the jammer phase per trial");
  ber->add_option("--instrument-csv", b_instrument,
                  "per-bit correlator dump (single-point grids only)");
  ber->callback([&]() {
    rc = cmd_ber(b_config, b_axis, b_grid, b_out, b_workers, b_bits, b_seed, b_random_theta,
                 b_instrument);
  });

  // --- verify ---------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Run the library self-check suite");
  double v_scale = 1.0;
  verify->add_option("--tol-scale", v_scale, "multiply every tolerance by this factor")
      ->default_val(1.0);
  verify->callback([&]() { rc = cmd_verify(v_scale); });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
