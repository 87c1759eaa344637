#include "ajwave/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ajwave/designer.hpp"
#include "ajwave/harness.hpp"
#include "ajwave/io.hpp"
#include "ajwave/jamming.hpp"
#include "ajwave/rng.hpp"
#include "ajwave/txrx.hpp"
#include "ajwave/waveform.hpp"

namespace ajwave {

namespace {

// Template grid for the correlation-oracle checks: fine enough that the
// trapezoid end correction (an absolute O(dt) term) stays far below the
// 1e-3 relative tolerance even near the envelope nulls.
constexpr double kOracleDt = 2e-16;

Eigen::VectorXd random_unit(int n, RngStream& rng) {
  Eigen::VectorXd a(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) a[i] = rng.normal();
    norm = a.norm();
  } while (norm < 1e-6);
  return a / norm;
}

double oracle_cost(const Eigen::Ref<const Eigen::VectorXd>& a, double f_hz, double theta,
                   double tc_s) {
  const Waveform w = make_rect_composite(a, tc_s, kOracleDt);
  const Template v = make_template(w, tc_s / 2.0);
  return oracle_max_correlation(v, f_hz, theta, (1.0 / f_hz) / 256.0);
}

struct Suite {
  std::vector<CheckResult> results;
  double scale = 1.0;

  void add(const std::string& name, double residual, double tol) {
    const double t = tol * scale;
    results.push_back({name, residual, t, residual <= t});
  }
};

void check_waveform(Suite& s) {
  const double tc = 1e-9;
  RngStream rng(0x5EED0001u);

  {  // make_template(c·w, δ) = c·make_template(w, δ)
    const Eigen::VectorXd a = random_unit(5, rng);
    const Waveform w = make_rect_composite(a, tc, 2e-11);
    const Template t1 = make_template(w, tc / 2.0);
    double worst = 0.0;
    for (const double c : {-2.5, 0.3}) {
      Waveform wc = w;
      wc.samples *= c;
      wc.coeffs *= c;
      const Template t2 = make_template(wc, tc / 2.0);
      const double peak = t2.samples.cwiseAbs().maxCoeff();
      worst = std::max(worst, (t2.samples - c * t1.samples).cwiseAbs().maxCoeff() / peak);
    }
    s.add("waveform.template_linearity", worst, 1e-12);
  }

  {  // raw composite energy = (T_c/2N)·Σ a²
    double worst = 0.0;
    for (const int n : {3, 5, 8}) {
      const Eigen::VectorXd a = 2.0 * random_unit(n, rng);
      const Waveform w = make_rect_composite(a, tc, tc / (2.0 * n * 10.0));
      const double expect = tc / (2.0 * n) * a.squaredNorm();
      worst = std::max(worst, std::abs(w.energy() - expect) / expect);
    }
    s.add("waveform.rect_energy", worst, 1e-12);
  }

  {  // PSD of a unit-power tone integrates to 1
    const int nrec = 4096;
    const double dt = 2e-11;
    const double f = 204.0 / (nrec * dt);  // integer periods in the record
    Eigen::VectorXd x(nrec);
    for (int k = 0; k < nrec; ++k) x[k] = std::sqrt(2.0) * std::cos(2.0 * M_PI * f * (k * dt));
    const Spectrum spec = psd(x, dt, nrec);
    s.add("waveform.tone_psd_integral", std::abs(spec.psd.sum() * spec.df_hz - 1.0), 1e-3);
  }

  {  // resampling on compatible grids preserves the composite's energy
    const Eigen::VectorXd a = 1.7 * random_unit(5, rng);
    const double expect = tc / 10.0 * a.squaredNorm();
    double worst = 0.0;
    for (const double dt : {2e-11, 1e-11, 5e-12, 4e-12, 2.5e-12, 2e-12}) {
      worst = std::max(worst, std::abs(make_rect_composite(a, tc, dt).energy() - expect) / expect);
    }
    s.add("waveform.rect_resample_energy", worst, 1e-9);
  }
}

void check_designer(Suite& s) {
  const double tc = 1e-9;

  {  // cost_F(f, c·a) = |c|·cost_F(f, a)
    RngStream rng(0x5EED0002u);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double f = (0.1 + 9.8 * rng.uniform()) * 1e9;
      const Eigen::VectorXd a = random_unit(5, rng);
      const double base = cost_F(f, a, tc);
      for (const double c : {-3.7, 0.2}) {
        worst = std::max(worst, std::abs(cost_F(f, c * a, tc) - std::abs(c) * base) /
                                    (std::abs(c) * base));
      }
    }
    s.add("designer.scale_equivariance", worst, 1e-12);
  }

  {  // cost_F² = A_N²·(aᵀCa)
    RngStream rng(0x5EED0003u);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double f = (0.1 + 9.8 * rng.uniform()) * 1e9;
      const Eigen::VectorXd a = random_unit(5, rng);
      const DesignProblem p{f, tc, 5};
      const CosineGram c = build_gram(p);
      const double an = cost_A(f, tc, 5);
      const double lhs = std::pow(cost_F(f, a, tc), 2);
      const double rhs = an * an * a.dot(c * a);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-300}));
    }
    s.add("designer.quadratic_identity", worst, 1e-12);
  }

  {  // closed form vs brute-force correlation oracle, 100 random pairs
    RngStream rng(0x5EED0004u);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double f = (0.1 + 9.8 * rng.uniform()) * 1e9;
      const Eigen::VectorXd a = random_unit(5, rng);
      const double closed_ns = cost_F(f, a, tc) * 1e9;
      const double oracle_ns = oracle_cost(a, f, 0.0, tc) * 1e9;
      worst = std::max(worst, std::abs(closed_ns - oracle_ns) / std::max(oracle_ns, 1e-6));
    }
    s.add("designer.oracle_equivalence", worst, 1e-3);
  }

  {  // Gram matrix: exact structure and PSD rank-≤2 spectrum
    RngStream rng(0x5EED0005u);
    double worst_struct = 0.0, worst_neg = 0.0, worst_null = 0.0;
    const int sizes[] = {3, 5, 8};
    for (int i = 0; i < 99; ++i) {
      const int n = sizes[i % 3];
      const double band = 2.0 * n / tc;
      const DesignProblem p{band * (1e-4 + 0.9997 * rng.uniform()), tc, n};
      const CosineGram c = build_gram(p);
      worst_struct = std::max(worst_struct, (c - c.transpose()).cwiseAbs().maxCoeff());
      worst_struct =
          std::max(worst_struct, (c.diagonal().array() - 1.0).cwiseAbs().maxCoeff());
      for (int d = 1; d < n; ++d) {  // Toeplitz: constant diagonals
        for (int r = 0; r + d < n; ++r) {
          worst_struct = std::max(worst_struct, std::abs(c(r, r + d) - c(0, d)));
        }
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
      const double lmax = es.eigenvalues()[n - 1];
      worst_neg = std::max(worst_neg, -es.eigenvalues()[0] / lmax);
      worst_null = std::max(worst_null, es.eigenvalues()[n - 3] / lmax);
    }
    s.add("designer.gram_structure", worst_struct, 0.0);
    s.add("designer.gram_min_eig", worst_neg, 1e-12);
    s.add("designer.gram_null_count", worst_null, 1e-10);
  }

  {  // Powell reaches the eigen-route objective value
    RngStream rng(0x5EED0006u);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const DesignProblem p{(0.1 + 9.8 * rng.uniform()) * 1e9, tc, 5};
      const DesignResult ev = design_eigen(p);
      const DesignResult pw =
          design_powell(p, random_unit(5, rng), 1e-8, 200, 42u + static_cast<std::uint64_t>(i));
      worst = std::max(worst, std::abs(pw.lagrange_lambda - ev.lagrange_lambda));
    }
    s.add("designer.solver_agreement", worst, 1e-8);
  }

  {  // the oracle maximum does not depend on the jammer phase
    RngStream rng(0x5EED0007u);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double f = (0.1 + 9.8 * rng.uniform()) * 1e9;
      const Eigen::VectorXd a = random_unit(5, rng);
      const double ref = oracle_cost(a, f, 0.0, tc);
      for (const double th : {0.7, 2.1, M_PI, 5.5}) {
        worst = std::max(worst, std::abs(oracle_cost(a, f, th, tc) - ref) / std::max(ref, 1e-15));
      }
    }
    s.add("designer.oracle_theta_invariance", worst, 1e-6);
  }
}

void check_jamming(Suite& s) {
  const double dt = 2e-11;

  {  // θ and θ+2π produce bit-identical streams
    double worst = 0.0;
    for (const double th : {0.0, 0.5, 1.25, -0.75}) {
      JammerSpec j1;
      j1.fj_hz = 1.7e9;
      j1.theta_rad = th;
      j1.power_w = 1.0;
      j1.enabled = true;
      JammerSpec j2 = j1;
      j2.theta_rad = th + 2.0 * M_PI;
      for (const double t0 : {0.0, 3.1e-10}) {
        worst = std::max(
            worst,
            (stj_samples(j1, t0, 257, dt) - stj_samples(j2, t0, 257, dt)).cwiseAbs().maxCoeff());
      }
    }
    s.add("jamming.theta_2pi_exact", worst, 0.0);
  }

  {  // shifting t0 is the same as advancing the phase by 2πfΔ
    JammerSpec j1;
    j1.fj_hz = 2.3e9;
    j1.theta_rad = 0.4;
    j1.power_w = 1.0;
    j1.enabled = true;
    const double shift = 3.3e-10;
    JammerSpec j2 = j1;
    j2.theta_rad = j1.theta_rad + 2.0 * M_PI * j1.fj_hz * shift;
    const Eigen::VectorXd a = stj_samples(j1, shift, 200, dt);
    const Eigen::VectorXd b = stj_samples(j2, 0.0, 200, dt);
    s.add("jamming.time_shift", (a - b).cwiseAbs().maxCoeff() / std::sqrt(2.0), 1e-12);
  }

  {  // estimate draws are reproducible from the seed
    const FreqEstimatorModel m{0.1e9, 0.3e9};
    RngStream r1(99u), r2(99u);
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
      const FhatDraw d1 = sample_fhat(m, 3e9, 1e10, r1);
      const FhatDraw d2 = sample_fhat(m, 3e9, 1e10, r2);
      if (d1.fhat_hz != d2.fhat_hz || d1.clamped != d2.clamped) ++mismatches;
    }
    s.add("jamming.fhat_reproducible", mismatches, 0.0);
  }
}

void check_txrx(Suite& s) {
  const ThConfig th;

  {  // R_k equals the sum of the per-component correlator outputs
    SimConfig cfg;
    cfg.mode = WaveformMode::GaussianDoublet;
    cfg.sjr_db = -10.0;
    cfg.ebn0_db = 10.0;
    cfg.random_theta = true;
    cfg.n_bits = 40;
    cfg.seed = 7701;
    cfg.workers = 1;
    std::vector<InstrumentRecord> recs;
    run_ber_instrumented(cfg, &recs);
    double worst = 0.0;
    for (const auto& r : recs) {
      const double scl =
          std::max({std::abs(r.r), std::abs(r.s), std::abs(r.j), std::abs(r.n), 1e-300});
      worst = std::max(worst, std::abs(r.r - (r.s + r.j + r.n)) / scl);
    }
    s.add("txrx.decomposition", worst, 1e-9);
  }

  Waveform wf = normalize(gaussian_doublet(1.0, th.tp_s, 0.25e-9, th.dt_s));
  wf.tc_s = th.tc_s;
  const Template tmpl = make_template(wf, th.delta_s);

  {  // scaling α scales S_k and leaves the jammer/noise parts untouched
    RngStream crng(5u);
    const std::vector<int> bits{0, 1, 0};
    const ThCode code = gen_th_code(static_cast<int>(bits.size()) * th.nf, th.nc, crng);
    const Eigen::VectorXd tx = modulate(bits, code, wf, th);
    const double tau = 57 * th.dt_s;
    JammerSpec jam;
    jam.fj_hz = 2.2e9;
    jam.theta_rad = 0.9;
    jam.power_w = 5e9;
    jam.enabled = true;
    JammerSpec off;
    ThConfig th2 = th;
    th2.alpha = 2.0;
    RngStream r1(11u), r2(11u), r3(11u);
    const Eigen::VectorXd rx1 = apply_channel(tx, th, tau, jam, 4.8e4, r1);
    const Eigen::VectorXd rx2 = apply_channel(tx, th2, tau, jam, 4.8e4, r2);
    const Eigen::VectorXd rxs = apply_channel(tx, th, tau, off, 0.0, r3);
    double worst = 0.0;
    for (int k = 0; k < static_cast<int>(bits.size()); ++k) {
      const double d1 = correlate(rx1, tmpl, code, th, tau, k).r;
      const double d2 = correlate(rx2, tmpl, code, th, tau, k).r;
      const double ds = correlate(rxs, tmpl, code, th, tau, k).r;
      worst = std::max(worst, std::abs(d2 - d1 - ds) / std::max(std::abs(ds), 1e-300));
    }
    s.add("txrx.amplitude_equivariance", worst, 1e-9);
  }

  {  // jam-free noiseless R_k does not depend on the TH code
    RngStream rng(0x5EED0008u);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const int bit = i % 2;
      const ThCode c1 = gen_th_code(th.nf, th.nc, rng);
      const ThCode c2 = gen_th_code(th.nf, th.nc, rng);
      const double r1 = correlate(modulate({bit}, c1, wf, th), tmpl, c1, th, 0.0, 0).r;
      const double r2 = correlate(modulate({bit}, c2, wf, th), tmpl, c2, th, 0.0, 0).r;
      worst = std::max(worst, std::abs(r1 - r2) / std::max(std::abs(r1), 1e-300));
    }
    s.add("txrx.th_transparency", worst, 1e-9);
  }

  {  // J_k decomposes into per-frame tone correlations at Δ_m mod T_J
    RngStream rng(0x5EED0009u);
    JammerSpec jam;
    jam.fj_hz = 2.7e9;
    jam.theta_rad = 0.3;
    jam.power_w = 1.0;
    jam.enabled = true;
    const double tj = 1.0 / jam.fj_hz;
    const int spc = th.spc(), spf = th.spf(), spb = th.spb();
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const int delay = rng.uniform_int(spf);
      const double tau = delay * th.dt_s;
      const ThCode code = gen_th_code(th.nf, th.nc, rng);
      RngStream quiet(0u);
      const Eigen::VectorXd rx =
          apply_channel(Eigen::VectorXd::Zero(spb), th, tau, jam, 0.0, quiet);
      const double j_sim = correlate(rx, tmpl, code, th, tau, 0).r;
      const double amp = std::sqrt(2.0 * jam.power_w);
      double j_rec = 0.0, mag = 0.0;
      for (int m = 0; m < th.nf; ++m) {
        const double offset = (delay + m * spf + code.codes[m] * spc) * th.dt_s;
        const double term =
            amp * correlation_at(tmpl, jam.fj_hz, jam.theta_rad, std::fmod(offset, tj));
        j_rec += term;
        mag += std::abs(term);
      }
      worst =
          std::max(worst, std::abs(j_sim - j_rec) / std::max({std::abs(j_sim), mag, 1e-300}));
    }
    s.add("txrx.delta_m_structure", worst, 1e-6);
  }
}

void check_harness(Suite& s) {
  {  // identical results for any worker count; counts conserved
    SimConfig cfg;
    cfg.estimator.sigma_hz = 0.2e9;
    cfg.sjr_db = -10.0;
    cfg.ebn0_db = 12.0;
    cfg.random_theta = true;
    cfg.n_bits = 500;
    cfg.seed = 2024;
    cfg.workers = 1;
    const BerPoint p1 = run_ber(cfg);
    cfg.workers = 3;
    const BerPoint p3 = run_ber(cfg);
    int mismatches = 0;
    mismatches += p1.n_bits != p3.n_bits;
    mismatches += p1.n_errors != p3.n_errors;
    mismatches += p1.ber != p3.ber;
    mismatches += p1.ci_low != p3.ci_low;
    mismatches += p1.ci_high != p3.ci_high;
    mismatches += p1.clamp_count != p3.clamp_count;
    mismatches += p1.design_failures != p3.design_failures;
    s.add("harness.worker_determinism", mismatches, 0.0);

    const double conserve = std::abs(static_cast<double>(p1.n_bits + p1.design_failures -
                                                         cfg.n_bits)) +
                            std::max(0.0, static_cast<double>(p1.n_errors - p1.n_bits));
    s.add("harness.conservation", conserve, 0.0);
  }

  {  // jam-free BER is smaller at the higher E_b/N_0
    SimConfig cfg;
    cfg.mode = WaveformMode::GaussianDoublet;
    cfg.jam_enabled = false;
    cfg.n_bits = 100000;
    cfg.seed = 31;
    cfg.ebn0_db = 15.0;
    const BerPoint b15 = run_ber(cfg);
    cfg.ebn0_db = 5.0;
    const BerPoint b5 = run_ber(cfg);
    s.results.push_back(
        {"harness.monotonicity", b15.ber - b5.ber, 0.0, b15.ber < b5.ber});
  }

  {  // designed null transfers to the link: |J_k| ≪ |S_k|
    SimConfig cfg;
    cfg.fj_hz = 3.0e9;
    cfg.sjr_db = -30.0;
    cfg.ebn0_db = 15.0;
    cfg.n_bits = 500;
    cfg.seed = 5150;
    const RunStats st = run_ber_instrumented(cfg);
    s.add("harness.linearity_audit", st.mean_abs_j / st.mean_abs_s, 1e-3);
  }
}

void check_io(Suite& s) {
  int bad = 0;

  std::vector<BerPoint> pts(2);
  pts[0].swept_value = 1.5e9;
  pts[0].n_bits = 1000;
  pts[0].n_errors = 3;
  pts[0].ber = 3e-3;
  pts[0].ci_low = 1.0243e-3;
  pts[0].ci_high = 8.7e-3;
  pts[0].seed = 42;
  pts[0].clamp_count = 1;
  pts[1].swept_value = 0.0;
  pts[1].n_bits = 5;
  pts[1].ci_high = 0.6;
  pts[1].seed = 7;

  {  // sweep CSV
    std::ostringstream o1;
    write_sweep_csv(o1, "f_J", pts);
    std::istringstream i1(o1.str());
    std::string axis;
    const std::vector<BerPoint> back = read_sweep_csv(i1, &axis);
    std::ostringstream o2;
    write_sweep_csv(o2, axis, back);
    bad += o1.str() != o2.str();
  }

  {  // 2-D grid CSV
    std::vector<GridBerPoint> gpts(2);
    gpts[0].fhat_hz = 1.5e9;
    gpts[0].fj_hz = 3.0e9;
    gpts[0].point = pts[0];
    gpts[1].fhat_hz = 6.6e9;
    gpts[1].fj_hz = 0.3e9;
    gpts[1].point = pts[1];
    std::ostringstream o1;
    write_grid_csv(o1, gpts);
    std::istringstream i1(o1.str());
    const std::vector<GridBerPoint> back = read_grid_csv(i1);
    std::ostringstream o2;
    write_grid_csv(o2, back);
    bad += o1.str() != o2.str();
  }

  {  // spectrogram CSV
    SpectrogramResult sg;
    sg.fhat_hz = Eigen::Vector2d(1.5e9, 3.0e9);
    sg.freqs_hz = Eigen::Vector3d(0.0, 5e8, 1e9);
    sg.psd_rows.resize(2, 3);
    sg.psd_rows << 1.25e-10, 3.5e-11, 0.0, 7.5e-12, 2.5e-10, 4.447e-13;
    std::ostringstream o1;
    write_spectrogram_csv(o1, sg);
    std::istringstream i1(o1.str());
    const SpectrogramResult back = read_spectrogram_csv(i1);
    std::ostringstream o2;
    write_spectrogram_csv(o2, back);
    bad += o1.str() != o2.str();
  }

  {  // PSD CSV from a real spectrum
    Eigen::VectorXd x(64);
    for (int k = 0; k < 64; ++k) x[k] = std::sin(0.37 * k);
    const Spectrum spec = psd(x, 2e-11, 64);
    std::ostringstream o1;
    write_psd_csv(o1, spec);
    std::istringstream i1(o1.str());
    const Spectrum back = read_psd_csv(i1);
    std::ostringstream o2;
    write_psd_csv(o2, back);
    bad += o1.str() != o2.str();
  }

  {  // instrumented correlator CSV
    std::vector<InstrumentRecord> recs(2);
    recs[0] = {0, 1.5, 1.0, 0.25, 0.25, 3.1e-9};
    recs[1] = {1, -0.75, -1.0, 0.125, 0.125, 0.0};
    std::ostringstream o1;
    write_instrument_csv(o1, recs);
    std::istringstream i1(o1.str());
    const std::vector<InstrumentRecord> back = read_instrument_csv(i1);
    std::ostringstream o2;
    write_instrument_csv(o2, back);
    bad += o1.str() != o2.str();
  }

  {  // coefficient file
    CoeffFile f;
    f.n = 5;
    f.fhat_hz = 1.5e9;
    f.tc_s = 1e-9;
    f.coeffs = Eigen::VectorXd::LinSpaced(5, -0.441, 0.157);
    f.cost = 1.132102e-13;
    f.method = "eigen";
    f.seed = 7;
    const std::string t1 = coeff_file_text(f);
    const std::string t2 = coeff_file_text(parse_coeff_file_text(t1));
    bad += t1 != t2;
  }

  s.add("cli.csv_roundtrip", bad, 0.0);

  {  // the designers are deterministic functions of their arguments
    const DesignProblem p{6.6e9, 1e-9, 5};
    int mism = 0;
    const DesignResult e1 = design_eigen(p);
    const DesignResult e2 = design_eigen(p);
    mism += (e1.coeffs - e2.coeffs).cwiseAbs().maxCoeff() != 0.0 || e1.cost != e2.cost;
    const Eigen::VectorXd init = Eigen::VectorXd::Ones(5) / std::sqrt(5.0);
    const DesignResult w1 = design_powell(p, init, 1e-8, 200, 7u);
    const DesignResult w2 = design_powell(p, init, 1e-8, 200, 7u);
    mism += (w1.coeffs - w2.coeffs).cwiseAbs().maxCoeff() != 0.0 || w1.cost != w2.cost;
    s.add("cli.design_determinism", mism, 0.0);
  }
}

}  // namespace

std::vector<CheckResult> run_self_checks(double tol_scale) {
  Suite s;
  s.scale = tol_scale;
  check_waveform(s);
  check_designer(s);
  check_jamming(s);
  check_txrx(s);
  check_harness(s);
  check_io(s);
  return s.results;
}

}  // namespace ajwave
