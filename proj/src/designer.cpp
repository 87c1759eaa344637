#include "ajwave/designer.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ajwave/rng.hpp"

namespace ajwave {

void DesignProblem::validate() const {
  if (n < 1) throw std::invalid_argument("design: need at least one segment");
  if (!(tc_s > 0.0)) throw std::invalid_argument("design: chip duration must be positive");
  if (!(fhat_hz > 0.0) || !(fhat_hz < band_max_hz())) {
    throw std::invalid_argument("design: frequency outside the design band (0, 2N/T_c)");
  }
}

double cost_A(double f_hz, double tc_s, int n) {
  if (f_hz < 0.0) throw std::invalid_argument("cost_A: frequency must be nonnegative");
  if (n < 1 || !(tc_s > 0.0)) throw std::invalid_argument("cost_A: invalid parameters");
  if (f_hz == 0.0) return 0.0;  // limit value: both sines vanish linearly against one 1/f pole
  return 2.0 / (M_PI * f_hz) * std::sin(M_PI * f_hz * tc_s / 2.0) *
         std::sin(M_PI * f_hz * tc_s / (2.0 * n));
}

double cost_F(double fhat_hz, const Eigen::Ref<const Eigen::VectorXd>& coeffs, double tc_s) {
  const int n = static_cast<int>(coeffs.size());
  if (n < 1) throw std::invalid_argument("cost_F: need at least one coefficient");
  double x = 0.0, y = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double phi = (n - 1 + 2.0 * i) / (2.0 * n) * M_PI * fhat_hz * tc_s;
    x += coeffs[i - 1] * std::cos(phi);
    y += coeffs[i - 1] * std::sin(phi);
  }
  return std::abs(cost_A(fhat_hz, tc_s, n)) * std::sqrt(x * x + y * y);
}

CosineGram build_gram(const DesignProblem& problem) {
  problem.validate();
  const int n = problem.n;
  CosineGram c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c(i, j) = std::cos(M_PI * problem.fhat_hz * problem.tc_s * std::abs(i - j) / n);
    }
  }
  return c;
}

namespace {

// Sign convention shared by both solvers: largest-magnitude coefficient
// positive, lowest index breaking ties.
void canonical_sign(Eigen::VectorXd& a) {
  int imax = 0;
  for (int i = 1; i < a.size(); ++i) {
    if (std::abs(a[i]) > std::abs(a[imax])) imax = i;
  }
  if (a[imax] < 0.0) a = -a;
}

DesignResult finalize(const DesignProblem& problem, const CosineGram& c, Eigen::VectorXd a,
                      DesignMethod method, int iterations, double min_eig, bool converged) {
  canonical_sign(a);
  DesignResult r;
  r.coeffs = a;
  r.fhat_hz = problem.fhat_hz;
  r.cost = cost_F(problem.fhat_hz, a, problem.tc_s);
  r.method = method;
  r.iterations = iterations;
  r.min_eigenvalue = min_eig;
  r.lagrange_lambda = a.dot(c * a);
  r.kkt_residual = (c * a - r.lagrange_lambda * a).norm();
  r.converged = converged;
  return r;
}

}  // namespace

DesignResult design_eigen(const DesignProblem& problem) {
  const CosineGram c = build_gram(problem);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw std::runtime_error("design_eigen: eigen-decomposition failed");
  // Eigenvalues come back ascending; the first column is the canonical
  // representative of the minimizing eigenspace.
  Eigen::VectorXd a = es.eigenvectors().col(0);
  a /= a.norm();
  return finalize(problem, c, std::move(a), DesignMethod::Eigen, 1, es.eigenvalues()[0], true);
}

namespace {

// Golden-section minimization of the restriction γ ↦ h(p + γu). Brackets by
// doubling from ±1e-3; γ tolerance 1e-12. Returns 0 when the restriction is
// flat (u in the null space through p), which is a correct no-op move.
double line_minimize(const CosineGram& c, const Eigen::VectorXd& p, const Eigen::VectorXd& u) {
  const auto h = [&](double g) {
    const Eigen::VectorXd x = p + g * u;
    return x.dot(c * x);
  };
  const double f0 = h(0.0);
  double step = 1e-3;
  double fs = h(step);
  if (fs > f0) {
    step = -step;
    fs = h(step);
    if (fs > f0) {
      // Both neighbours above: (−|s|, 0, |s|) already brackets the minimum.
      double lo = -std::abs(step), hi = std::abs(step);
      const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double g1 = hi - inv_phi * (hi - lo), g2 = lo + inv_phi * (hi - lo);
      double f1 = h(g1), f2 = h(g2);
      while (hi - lo > 1e-12) {
        if (f1 < f2) {
          hi = g2; g2 = g1; f2 = f1;
          g1 = hi - inv_phi * (hi - lo); f1 = h(g1);
        } else {
          lo = g1; g1 = g2; f1 = f2;
          g2 = lo + inv_phi * (hi - lo); f2 = h(g2);
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  // Descent at `step`; expand until the function turns upward.
  double a = 0.0, fa = f0;
  double b = step, fb = fs;
  double cc = 2.0 * step, fc = h(cc);
  int expansions = 0;
  while (fc <= fb) {
    if (++expansions > 60) return 0.0;  // flat restriction: no move
    a = b; fa = fb;
    b = cc; fb = fc;
    cc *= 2.0; fc = h(cc);
  }
  (void)fa;
  double lo = std::min(a, cc), hi = std::max(a, cc);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double g1 = hi - inv_phi * (hi - lo), g2 = lo + inv_phi * (hi - lo);
  double f1 = h(g1), f2 = h(g2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      hi = g2; g2 = g1; f2 = f1;
      g1 = hi - inv_phi * (hi - lo); f1 = h(g1);
    } else {
      lo = g1; g1 = g2; f1 = f2;
      g2 = lo + inv_phi * (hi - lo); f2 = h(g2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DesignResult design_powell(const DesignProblem& problem,
                           const Eigen::Ref<const Eigen::VectorXd>& init, double tol,
                           int max_outer, std::uint64_t rng_seed) {
  problem.validate();
  const int n = problem.n;
  if (init.size() != n) throw std::invalid_argument("design_powell: init has wrong length");
  if (!(init.norm() > 0.0)) throw std::invalid_argument("design_powell: init must be nonzero");
  if (!(tol > 0.0)) throw std::invalid_argument("design_powell: tol must be positive");
  if (max_outer < 1) throw std::invalid_argument("design_powell: max_outer must be >= 1");

  const CosineGram c = build_gram(problem);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const double min_eig = es.eigenvalues()[0];

  RngStream rng(mix64(rng_seed));
  Eigen::MatrixXd dirs = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd a = init / init.norm();

  int iter = 0;
  bool converged = false;
  while (iter < max_outer) {
    ++iter;
    const Eigen::VectorXd p0 = a;
    Eigen::VectorXd p = a;
    for (int k = 0; k < n; ++k) {
      const double gamma = line_minimize(c, p, dirs.col(k));
      p += gamma * dirs.col(k);
    }
    Eigen::VectorXd u_new = p - p0;
    if (u_new.norm() < 1e-14) {
      dirs.setIdentity();  // degenerate cycle: restart the direction set
    } else {
      for (int k = 0; k + 1 < n; ++k) dirs.col(k) = dirs.col(k + 1);
      dirs.col(n - 1) = u_new;
      const double gamma = line_minimize(c, p, u_new);
      p += gamma * u_new;
    }
    if (p.norm() < 1e-150) {
      // Iterate collapsed onto the origin (only possible when the descent
      // direction passes through it); restart from a perturbed point.
      for (int k = 0; k < n; ++k) p[k] = a[k] + 1e-3 * rng.normal();
      dirs.setIdentity();
    }
    a = p / p.norm();
    const double lambda = a.dot(c * a);
    if ((c * a - lambda * a).norm() < tol) {
      converged = true;
      break;
    }
  }
  return finalize(problem, c, std::move(a), DesignMethod::Powell, iter, min_eig, converged);
}

double correlation_at(const Template& tmpl, double fj_hz, double theta_rad, double z_s) {
  if (tmpl.samples.size() == 0) throw std::invalid_argument("correlation_at: empty template");
  if (!(fj_hz > 0.0)) throw std::invalid_argument("correlation_at: frequency must be positive");
  const double w = 2.0 * M_PI * fj_hz;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < tmpl.samples.size(); ++k) {
    acc += tmpl.samples[k] * std::cos(w * (z_s + k * tmpl.dt_s) + theta_rad);
  }
  return tmpl.dt_s * acc;
}

double oracle_max_correlation(const Template& tmpl, double fj_hz, double theta_rad,
                              double grid_step_s) {
  if (tmpl.samples.size() == 0) throw std::invalid_argument("oracle: empty template");
  if (!(fj_hz > 0.0)) throw std::invalid_argument("oracle: frequency must be positive");
  const double tj = 1.0 / fj_hz;
  if (!(grid_step_s > 0.0) || grid_step_s > tj / 200.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("oracle: offset grid too coarse (need grid_step <= T_J/200)");
  }

  const Eigen::Index nv = tmpl.samples.size();
  const double dt = tmpl.dt_s;
  const double w = 2.0 * M_PI * fj_hz;

  // Left-endpoint rectangle rule on the template grid. For a piecewise-
  // constant template whose discontinuities lie on the grid this sum equals
  // the exact integral shifted by half a sample and scaled by
  // (wh/2)/sin(wh/2) ≈ 1 + (wh)²/24 — a ~1e-11 relative effect at the finest
  // grids used here, and the shift is absorbed by maximizing over the
  // offset. The per-offset sum R(z) = dt·Σ_k v_k·cos(w(z+t_k)+θ) expands by
  // the angle-addition identity into two fixed inner products,
  //   R(z) = C·cos(wz+θ) − S·sin(wz+θ),
  // making each offset O(1) after a single pass over the template.
  double ccoef, scoef;
  {
    Eigen::ArrayXd phase(nv);
    for (Eigen::Index k = 0; k < nv; ++k) phase[k] = w * (k * dt);
    ccoef = dt * (tmpl.samples.array() * phase.cos()).sum();
    scoef = dt * (tmpl.samples.array() * phase.sin()).sum();
  }

  const auto value = [&](double z) {
    const double ph = w * z + theta_rad;
    return std::abs(ccoef * std::cos(ph) - scoef * std::sin(ph));
  };

  const int m = static_cast<int>(std::ceil(tj / grid_step_s));
  double best = -1.0, best_z = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = i * grid_step_s;
    if (z >= tj) break;
    const double v = value(z);
    if (v > best) {
      best = v;
      best_z = z;
    }
  }

  // Golden-section refinement of the grid maximum (|R| is sinusoidal in z,
  // hence unimodal within one grid step of the peak). This removes the
  // grid-quantization deficit and makes the maximum phase-invariant.
  double lo = best_z - grid_step_s, hi = best_z + grid_step_s;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double g1 = hi - inv_phi * (hi - lo), g2 = lo + inv_phi * (hi - lo);
  double f1 = value(g1), f2 = value(g2);
  while (hi - lo > tj * 1e-10) {
    if (f1 > f2) {
      hi = g2; g2 = g1; f2 = f1;
      g1 = hi - inv_phi * (hi - lo); f1 = value(g1);
    } else {
      lo = g1; g1 = g2; f1 = f2;
      g2 = lo + inv_phi * (hi - lo); f2 = value(g2);
    }
  }
  return std::max(best, value(0.5 * (lo + hi)));
}

SpectrogramResult design_spectrogram(const Eigen::Ref<const Eigen::VectorXd>& fgrid_hz,
                                     const DesignProblem& base, int nfft, double dt_s) {
  if (fgrid_hz.size() == 0) throw std::invalid_argument("design_spectrogram: empty frequency grid");
  SpectrogramResult out;
  out.fhat_hz = fgrid_hz;
  for (Eigen::Index r = 0; r < fgrid_hz.size(); ++r) {
    DesignProblem p = base;
    p.fhat_hz = fgrid_hz[r];
    const DesignResult d = design_eigen(p);  // validates the band
    const Waveform wave = normalize(make_rect_composite(d.coeffs, p.tc_s, dt_s));
    const Spectrum s = psd(wave.samples, dt_s, nfft);
    if (r == 0) {
      out.freqs_hz = s.freqs_hz;
      out.psd_rows.resize(fgrid_hz.size(), s.psd.size());
    }
    out.psd_rows.row(r) = s.psd.transpose();
  }
  return out;
}

}  // namespace ajwave
