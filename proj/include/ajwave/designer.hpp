#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "ajwave/waveform.hpp"

// Anti-jamming waveform design: closed-form correlation cost of an
// N-segment rectangular composite against a tone at f̂, the cosine Gram
// matrix of the induced quadratic form, and two solvers for the unit-norm
// minimizer — exact eigen-decomposition and Powell's conjugate-direction
// method — cross-checked by a brute-force correlation oracle.

namespace ajwave {

struct DesignProblem {
  double fhat_hz = 0.0;  // estimated jammer frequency
  double tc_s = 0.0;     // chip duration
  int n = 0;             // number of rectangular segments

  // Design band is (0, 2N/T_c); outside it the envelope factor degenerates.
  double band_max_hz() const { return 2.0 * n / tc_s; }
  void validate() const;
};

// Gram matrix c_{i,j} = cos(π·f̂·T_c·|i−j|/N): symmetric Toeplitz, unit
// diagonal, positive semidefinite with rank ≤ 2.
using CosineGram = Eigen::MatrixXd;

enum class DesignMethod { Eigen, Powell };

struct DesignResult {
  Eigen::VectorXd coeffs;  // unit-norm segment weights
  double fhat_hz = 0.0;
  double cost = 0.0;  // achieved correlation cost, seconds
  DesignMethod method = DesignMethod::Eigen;
  int iterations = 0;           // outer iterations (1 for the eigen route)
  double min_eigenvalue = 0.0;  // smallest eigenvalue of the Gram matrix
  double lagrange_lambda = 0.0;  // aᵀCa at the returned point
  double kkt_residual = 0.0;     // ‖Ca − λa‖ at the returned point
  bool converged = true;
};

// Envelope factor A_N(f;T_c) = (2/(πf))·sin(πfT_c/2)·sin(πfT_c/(2N)),
// in seconds; 0 at f = 0 (the limit value).
double cost_A(double f_hz, double tc_s, int n);

// Worst-case (over timing offset) template–tone correlation magnitude
// |A_N|·√(X² + Y²) with X = Σ aᵢcos φᵢ, Y = Σ aᵢsin φᵢ,
// φᵢ = (N−1+2i)/(2N)·π·f̂·T_c. Scale-equivariant in the coefficients.
double cost_F(double fhat_hz, const Eigen::Ref<const Eigen::VectorXd>& coeffs, double tc_s);

CosineGram build_gram(const DesignProblem& problem);

// Unit-norm minimizer of aᵀCa via symmetric eigen-decomposition. The
// minimizing eigenspace is (N−2)-dimensional for N ≥ 3; the canonical
// representative is the eigenvector of the smallest eigenvalue (first
// column of the ascending-ordered orthonormal basis), sign-fixed so the
// largest-magnitude coefficient is positive (lowest index wins ties).
DesignResult design_eigen(const DesignProblem& problem);

// Powell's conjugate-direction minimization of h(a) = aᵀCa: N golden-section
// line minimizations per cycle, direction shift u_j ← u_{j+1}, new direction
// p_N − p_0 (directions reset to the standard basis if it degenerates),
// renormalization to the unit sphere after every outer iteration, and
// termination on the KKT residual ‖Ca − λa‖ < tol with λ = aᵀCa.
// rng_seed only feeds the degenerate-iterate restart perturbation.
DesignResult design_powell(const DesignProblem& problem,
                           const Eigen::Ref<const Eigen::VectorXd>& init, double tol,
                           int max_outer, std::uint64_t rng_seed);

// Template–tone correlation at one timing offset z, using the same
// rectangle rule dt·Σ as the link-level correlator (exact cross-check of
// simulated per-frame jammer contributions).
double correlation_at(const Template& tmpl, double fj_hz, double theta_rad, double z_s);

// Ground-truth cost oracle: rectangle-rule integration of the template–tone
// product on the template's sampling grid, |R(z)| maximized over a z grid
// spanning one tone period (grid_step ≤ T_J/200) and refined by
// golden-section around the best grid point.
double oracle_max_correlation(const Template& tmpl, double fj_hz, double theta_rad,
                              double grid_step_s);

struct SpectrogramResult {
  Eigen::VectorXd fhat_hz;   // one entry per designed frequency (rows)
  Eigen::VectorXd freqs_hz;  // PSD bin frequencies (columns)
  Eigen::MatrixXd psd_rows;  // row r: PSD of the waveform designed for fhat_hz[r]
};

// PSD of the eigen-designed unit-energy waveform for every f̂ in fgrid.
SpectrogramResult design_spectrogram(const Eigen::Ref<const Eigen::VectorXd>& fgrid_hz,
                                     const DesignProblem& base, int nfft, double dt_s);

}  // namespace ajwave
