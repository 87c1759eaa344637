#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "ajwave/designer.hpp"
#include "ajwave/rng.hpp"
#include "ajwave/waveform.hpp"

using namespace ajwave;

namespace {

DesignProblem problem(double fhat_hz, int n = 5, double tc = 1e-9) {
  DesignProblem p;
  p.fhat_hz = fhat_hz;
  p.tc_s = tc;
  p.n = n;
  return p;
}

Eigen::VectorXd random_unit(int n, RngStream& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v / v.norm();
}

Template fine_template(const Eigen::VectorXd& coeffs, double tc, double dt) {
  return make_template(make_rect_composite(coeffs, tc, dt), tc / 2.0);
}

}  // namespace

TEST_CASE("envelope factor value and limits") {
  // (2/(πf))·sin(πfTc/2)·sin(πfTc/10) at 1.5 GHz, Tc = 1 ns, N = 5.
  CHECK(cost_A(1.5e9, 1e-9, 5) / 1.3624501809861079e-10 ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cost_A(0.0, 1e-9, 5) == 0.0);
  // Zeros of sin(πfTc/2) at even multiples of 1/Tc.
  CHECK(std::abs(cost_A(2.0e9, 1e-9, 5)) < 1e-22);
  CHECK_THROWS(cost_A(-1.0, 1e-9, 5));
}

TEST_CASE("cost of the three reference coefficient sets") {
  Eigen::VectorXd w15(5), w30(5), w66(5);
  w15 << -0.441, 0.717, -0.517, 0.013, 0.157;
  w30 << 0.487, 0.523, 0.656, 0.241, 0.032;
  w66 << -0.282, 0.662, 0.197, 0.370, -0.554;
  CHECK(cost_F(1.5e9, w15, 1e-9) / 1.132101953096e-13 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cost_F(3.0e9, w30, 1e-9) / 1.298391672910e-13 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cost_F(6.6e9, w66, 1e-9) / 2.949681661129e-14 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cost is scale-equivariant and satisfies the quadratic identity") {
  RngStream rng(314);
  for (int i = 0; i < 10; ++i) {
    const double f = 0.1e9 + 9.7e9 * rng.uniform();
    Eigen::VectorXd a = random_unit(5, rng);
    const double base = cost_F(f, a, 1e-9);
    REQUIRE(base > 0.0);
    CHECK(cost_F(f, (2.5 * a).eval(), 1e-9) / (2.5 * base) ==
          doctest::Approx(1.0).epsilon(1e-12));

    const CosineGram c = build_gram(problem(f));
    const double quad = cost_A(f, 1e-9, 5);
    CHECK(base * base / (quad * quad * a.dot(c * a)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Gram matrix: explicit 2x2 case") {
  const CosineGram c = build_gram(problem(1.7e9, 2));
  REQUIRE(c.rows() == 2);
  const double off = std::cos(M_PI * 1.7e9 * 1e-9 / 2.0);  // cos(0.85π)
  CHECK(c(0, 0) == 1.0);
  CHECK(c(1, 1) == 1.0);
  CHECK(c(0, 1) == doctest::Approx(off).epsilon(1e-15));
  CHECK(c(1, 0) == c(0, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.10899347581163221).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(2.0 - 0.10899347581163221).epsilon(1e-12));
}

TEST_CASE("Gram matrix: symmetric Toeplitz, unit diagonal, rank two") {
  const CosineGram c = build_gram(problem(3.7e9));
  REQUIRE(c.rows() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(c(i, i) == 1.0);
    for (int j = 0; j < i; ++j) {
      CHECK(c(i, j) == c(j, i));
      if (i < 4 && j < 4) CHECK(c(i, j) == c(i + 1, j + 1));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const Eigen::VectorXd ev = es.eigenvalues();
  // Positive semidefinite with a three-dimensional null space.
  CHECK(ev[0] > -1e-12 * ev[4]);
  CHECK(ev[2] < 1e-10 * ev[4]);
  CHECK(ev.sum() == doctest::Approx(5.0).epsilon(1e-12));  // trace
}

TEST_CASE("eigen design reaches the null space") {
  for (const double f : {1.5e9, 3.0e9, 6.6e9, 8.3e9}) {
    const DesignResult r = design_eigen(problem(f));
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.cost < 1e-19);             // seconds; bound is 1e-10 ns
    CHECK(std::abs(r.lagrange_lambda) < 1e-14);
    CHECK(r.kkt_residual < 1e-10);
    // Sign convention: the largest-magnitude coefficient is positive.
    Eigen::Index imax;
    r.coeffs.cwiseAbs().maxCoeff(&imax);
    CHECK(r.coeffs[imax] > 0.0);
  }
}

TEST_CASE("eigen design is deterministic") {
  const DesignResult a = design_eigen(problem(4.2e9));
  const DesignResult b = design_eigen(problem(4.2e9));
  CHECK((a.coeffs.array() == b.coeffs.array()).all());
  CHECK(a.cost == b.cost);
}

TEST_CASE("Powell reaches the eigen optimum") {
  // A value-comparison line search cannot push the KKT residual below the
  // square root of the function-evaluation noise (~1e-8 here); the achieved
  // quadratic value is accurate to that residual squared.
  RngStream rng(555);
  for (const double f : {1.5e9, 3.0e9, 6.6e9}) {
    const DesignResult ev = design_eigen(problem(f));
    const DesignResult pw = design_powell(problem(f), random_unit(5, rng), 1e-8, 200, 7);
    CHECK(pw.converged);
    CHECK(pw.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pw.lagrange_lambda - ev.lagrange_lambda) < 1e-9);
    CHECK(pw.kkt_residual < 1e-8);
  }
}

TEST_CASE("Powell is reproducible for a fixed init and seed") {
  const Eigen::VectorXd init = Eigen::VectorXd::Constant(5, 1.0 / std::sqrt(5.0));
  const DesignResult a = design_powell(problem(6.6e9), init, 1e-8, 200, 7);
  const DesignResult b = design_powell(problem(6.6e9), init, 1e-8, 200, 7);
  CHECK((a.coeffs.array() == b.coeffs.array()).all());
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("design validation") {
  CHECK_THROWS(design_eigen(problem(0.0)));
  CHECK_THROWS(design_eigen(problem(10.0e9)));  // at the band edge 2N/Tc
  CHECK_THROWS(design_eigen(problem(1.5e9, 0)));
}

TEST_CASE("offset correlation is periodic in the tone period") {
  RngStream rng(808);
  const Eigen::VectorXd a = random_unit(5, rng);
  const Template v = fine_template(a, 1e-9, 2e-12);
  const double fj = 3.3e9, tj = 1.0 / fj;
  for (int i = 0; i < 8; ++i) {
    const double z = tj * rng.uniform();
    const double r1 = correlation_at(v, fj, 0.7, z);
    const double r2 = correlation_at(v, fj, 0.7, z + tj);
    // r1 may sit near a zero of the sinusoid, so use a symmetric mixed bound.
    CHECK(std::abs(r1 - r2) <= 1e-9 * (std::abs(r1) + std::abs(r2)) + 1e-22);
  }
}

TEST_CASE("the oracle dominates pointwise correlations and matches the closed form") {
  RngStream rng(909);
  const Eigen::VectorXd a = random_unit(5, rng);
  const double fj = 3.7e9, tj = 1.0 / fj;
  const Template v = fine_template(a, 1e-9, 2e-14);
  const double oracle = oracle_max_correlation(v, fj, 0.9, tj / 256.0);
  for (int i = 0; i < 20; ++i) {
    CHECK(std::abs(correlation_at(v, fj, 0.9, tj * rng.uniform())) <= oracle * (1.0 + 1e-12));
  }
  CHECK(oracle / cost_F(fj, a, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  // The maximum does not depend on the tone phase.
  CHECK(oracle_max_correlation(v, fj, 0.0, tj / 256.0) / oracle ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS(oracle_max_correlation(v, fj, 0.0, tj / 100.0));  // grid too coarse
}

TEST_CASE("spectrogram rows carry the designed nulls") {
  Eigen::VectorXd grid(3);
  grid << 1.5e9, 3.0e9, 6.6e9;
  const SpectrogramResult sg = design_spectrogram(grid, problem(1.5e9), 16384, 2e-11);
  REQUIRE(sg.psd_rows.rows() == 3);
  REQUIRE(sg.psd_rows.cols() == sg.freqs_hz.size());
  for (int r = 0; r < 3; ++r) {
    Eigen::Index bin = 0;
    (sg.freqs_hz.array() - grid[r]).abs().minCoeff(&bin);
    const double rel = sg.psd_rows(r, bin) / sg.psd_rows.row(r).maxCoeff();
    CHECK(10.0 * std::log10(rel) < -40.0);
  }
}
