#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "ajwave/harness.hpp"

using namespace ajwave;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

SimConfig small_run(long long bits, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n_bits = bits;
  cfg.seed = seed;
  cfg.workers = 1;
  return cfg;
}

bool same_point(const BerPoint& a, const BerPoint& b) {
  return a.swept_value == b.swept_value && a.n_bits == b.n_bits && a.n_errors == b.n_errors &&
         a.ber == b.ber && a.ci_low == b.ci_low && a.ci_high == b.ci_high && a.seed == b.seed &&
         a.clamp_count == b.clamp_count && a.design_failures == b.design_failures;
}
}  // namespace

TEST_CASE("power calibration ties energy, SJR, and noise density together") {
  SimConfig cfg;  // SJR −10 dB, Eb/N0 15 dB, jammer on
  const PowerCalibration cal = calibrate_powers(cfg);
  CHECK(cal.eb == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(cal.ps == doctest::Approx(2.5e8).epsilon(1e-12));
  CHECK(cal.n0 == doctest::Approx(0.094868329805051374).epsilon(1e-15));
  CHECK(cal.noise_sigma == doctest::Approx(48700.187321264835).epsilon(1e-15));
  CHECK(cal.jam_power_w == doctest::Approx(2.5e9).epsilon(1e-12));

  SimConfig strong = cfg;
  strong.sjr_db = -30.0;
  CHECK(calibrate_powers(strong).jam_power_w == doctest::Approx(2.5e11).epsilon(1e-12));

  SimConfig noiseless = cfg;
  noiseless.ebn0_db = kInf;
  CHECK(calibrate_powers(noiseless).n0 == 0.0);
  CHECK(calibrate_powers(noiseless).noise_sigma == 0.0);

  SimConfig quiet = cfg;
  quiet.jam_enabled = false;
  CHECK(calibrate_powers(quiet).jam_power_w == 0.0);

  SimConfig gain = cfg;
  gain.th.alpha = 2.0;
  CHECK(calibrate_powers(gain).eb == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("Wilson interval values and edge conventions") {
  const WilsonInterval mid = wilson95(5, 100);
  CHECK(mid.low == doctest::Approx(0.021543679154367973).epsilon(1e-13));
  CHECK(mid.high == doctest::Approx(0.11175046923191914).epsilon(1e-13));

  const WilsonInterval few = wilson95(1, 10);
  CHECK(few.low == doctest::Approx(0.017876213095072906).epsilon(1e-13));
  CHECK(few.high == doctest::Approx(0.40415002679523848).epsilon(1e-13));

  const WilsonInterval none = wilson95(0, 1000);
  CHECK(none.low == 0.0);
  CHECK(none.high == doctest::Approx(0.003).epsilon(1e-15));

  const WilsonInterval all = wilson95(1000, 1000);
  CHECK(all.low == doctest::Approx(0.997).epsilon(1e-15));
  CHECK(all.high == 1.0);

  // Intervals always bracket the point estimate.
  for (long long e : {1LL, 7LL, 42LL}) {
    const WilsonInterval w = wilson95(e, 100);
    const double p = static_cast<double>(e) / 100.0;
    CHECK(w.low < p);
    CHECK(w.high > p);
    CHECK(w.low > 0.0);
    CHECK(w.high < 1.0);
  }

  CHECK_THROWS(wilson95(-1, 10));
  CHECK_THROWS(wilson95(11, 10));
  CHECK_THROWS(wilson95(0, 0));
}

TEST_CASE("configuration validation rejects inconsistent runs") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  SimConfig bad = cfg;
  bad.n_bits = 0;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.fj_hz = 0.0;
  CHECK_THROWS(bad.validate());
  bad.jam_enabled = false;  // without the jammer an unused frequency is fine
  CHECK_NOTHROW(bad.validate());

  bad = cfg;
  bad.estimator.sigma_hz = -1.0;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.workers = -2;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.th.tp_s = 0.4e-9;  // optimized mode requires tp = tc/2
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.fhat_override_hz = 11e9;  // outside the design band (0, 2N/Tc)
  CHECK_THROWS(bad.validate());
}

TEST_CASE("a run is bit-identical for any worker count") {
  SimConfig cfg = small_run(240, 77);
  cfg.ebn0_db = 8.0;  // keep some noise so worker scheduling could matter
  cfg.workers = 1;
  const BerPoint one = run_ber(cfg);
  cfg.workers = 3;
  const BerPoint three = run_ber(cfg);
  CHECK(same_point(one, three));
  CHECK(one.n_bits == 240);
  CHECK(one.seed == 77);

  // And reruns reproduce exactly.
  cfg.workers = 1;
  CHECK(same_point(run_ber(cfg), one));
}

TEST_CASE("a clean noiseless link makes no errors") {
  SimConfig cfg = small_run(500, 5);
  cfg.jam_enabled = false;
  cfg.ebn0_db = kInf;
  const BerPoint p = run_ber(cfg);
  CHECK(p.n_bits == 500);
  CHECK(p.n_errors == 0);
  CHECK(p.ber == 0.0);
  CHECK(p.ci_low == 0.0);
  CHECK(p.ci_high == doctest::Approx(3.0 / 500.0).epsilon(1e-15));
  CHECK(p.clamp_count == 0);
  CHECK(p.design_failures == 0);
}

TEST_CASE("errors decrease as the noise budget improves") {
  SimConfig low = small_run(20000, 99);
  low.jam_enabled = false;
  low.ebn0_db = 5.0;  // expected error rate ≈ 3.8e-2 here
  SimConfig high = low;
  high.ebn0_db = 15.0;  // and ≈ 1e-8 here
  const BerPoint pl = run_ber(low);
  const BerPoint ph = run_ber(high);
  CHECK(pl.n_errors > 500);
  CHECK(pl.n_errors < 1200);
  CHECK(ph.n_errors < 5);
  CHECK(pl.ber > ph.ber);
}

TEST_CASE("instrumented runs decompose the correlator output exactly") {
  SimConfig cfg = small_run(300, 31);
  cfg.ebn0_db = 10.0;
  std::vector<InstrumentRecord> records;
  const RunStats stats = run_ber_instrumented(cfg, &records);
  REQUIRE(records.size() == 300);
  CHECK(stats.point.n_bits == 300);

  double sum_s = 0.0, sum_j = 0.0, sum_n = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const InstrumentRecord& rec = records[i];
    CHECK(rec.bit_index == static_cast<long long>(i));
    const double scale =
        std::abs(rec.s) + std::abs(rec.j) + std::abs(rec.n) + std::abs(rec.r) + 1e-300;
    CHECK(std::abs(rec.r - (rec.s + rec.j + rec.n)) <= 1e-9 * scale);
    CHECK(rec.tau_s >= 0.0);
    CHECK(rec.tau_s < cfg.th.tf_s);
    sum_s += std::abs(rec.s);
    sum_j += std::abs(rec.j);
    sum_n += std::abs(rec.n);
  }
  const double n = static_cast<double>(records.size());
  CHECK(stats.mean_abs_s == doctest::Approx(sum_s / n).epsilon(1e-12));
  CHECK(stats.mean_abs_j == doctest::Approx(sum_j / n).epsilon(1e-12));
  CHECK(stats.mean_abs_n == doctest::Approx(sum_n / n).epsilon(1e-12));
  // The designed waveform leaves the signal component dominant.
  CHECK(stats.mean_abs_s > 10.0 * stats.mean_abs_j);

  // Instrumentation must not perturb the trial outcomes.
  const BerPoint plain = run_ber(cfg);
  CHECK(same_point(stats.point, plain));
}

TEST_CASE("sweeps stamp the swept value and honor the axis semantics") {
  SimConfig cfg = small_run(60, 13);

  SUBCASE("jammer frequency axis") {
    const std::vector<double> grid = {1.5e9, 3.0e9};
    const std::vector<BerPoint> pts = sweep(cfg, SweepAxis::FJ, grid);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].swept_value == 1.5e9);
    CHECK(pts[1].swept_value == 3.0e9);
    for (const BerPoint& p : pts) CHECK(p.seed == cfg.seed);

    SimConfig direct = cfg;
    direct.fj_hz = 3.0e9;
    BerPoint ref = run_ber(direct);
    ref.swept_value = 3.0e9;
    CHECK(same_point(pts[1], ref));
  }

  SUBCASE("a non-finite SJR disables the jammer") {
    const std::vector<double> grid = {-10.0, kInf};
    const std::vector<BerPoint> pts = sweep(cfg, SweepAxis::SJR, grid);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].swept_value == kInf);

    SimConfig quiet = cfg;
    quiet.jam_enabled = false;
    BerPoint ref = run_ber(quiet);
    ref.swept_value = kInf;
    CHECK(same_point(pts[1], ref));
  }

  SUBCASE("estimator axes update the error model") {
    const std::vector<double> grid = {0.0, 0.4e9};
    const std::vector<BerPoint> pts = sweep(cfg, SweepAxis::SIGMA_EPS, grid);
    REQUIRE(pts.size() == 2);
    // With estimator jitter the design is redrawn per trial; the clamp
    // counter only then becomes meaningful.
    CHECK(pts[0].clamp_count == 0);
  }

  SUBCASE("an empty grid is rejected") {
    CHECK_THROWS(sweep(cfg, SweepAxis::FJ, {}));
  }
}

TEST_CASE("the two-dimensional sweep runs row-major over design × jammer") {
  SimConfig cfg = small_run(50, 3);
  const std::vector<double> fhat = {1.5e9, 3.0e9};
  const std::vector<double> fj = {1.5e9, 3.0e9, 6.6e9};
  const std::vector<GridBerPoint> grid = sweep_grid2d(cfg, fhat, fj);
  REQUIRE(grid.size() == 6);
  for (std::size_t i = 0; i < fhat.size(); ++i) {
    for (std::size_t j = 0; j < fj.size(); ++j) {
      const GridBerPoint& g = grid[i * fj.size() + j];
      CHECK(g.fhat_hz == fhat[i]);
      CHECK(g.fj_hz == fj[j]);
      CHECK(g.point.swept_value == fj[j]);
      CHECK(g.point.n_bits == 50);
    }
  }
  // Deterministic under rerun.
  const std::vector<GridBerPoint> again = sweep_grid2d(cfg, fhat, fj);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(same_point(grid[k].point, again[k].point));

  CHECK_THROWS(sweep_grid2d(cfg, {}, fj));
  CHECK_THROWS(sweep_grid2d(cfg, fhat, {}));
}

TEST_CASE("axis names round-trip through their parser") {
  const SweepAxis axes[] = {SweepAxis::FJ, SweepAxis::SJR, SweepAxis::EBN0, SweepAxis::MU_EPS,
                            SweepAxis::SIGMA_EPS};
  for (SweepAxis a : axes) {
    const auto back = axis_from_name(axis_name(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK(std::string(axis_name(SweepAxis::FJ)) == "f_J");
  CHECK(std::string(axis_name(SweepAxis::SJR)) == "SJR");
  CHECK(std::string(axis_name(SweepAxis::EBN0)) == "EbN0");
  CHECK(std::string(axis_name(SweepAxis::MU_EPS)) == "mu_eps");
  CHECK(std::string(axis_name(SweepAxis::SIGMA_EPS)) == "sigma_eps");
  CHECK(!axis_from_name("bogus").has_value());
  CHECK(!axis_from_name("").has_value());
}
