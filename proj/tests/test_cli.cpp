#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ajwave/io.hpp"

using namespace ajwave;

namespace {

struct CmdResult {
  int status = -1;
  std::string out;
};

// Run the installed binary through the shell, capturing stdout; stderr is
// left attached so diagnostics show up in failing test logs.
CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + AJWAVE_CLI_PATH + "\" " + args;
  CmdResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  const int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::string slurp(const std::string& path) { return read_text_file(path); }

void write_config(const std::string& path, const std::string& extra = "") {
  std::ofstream os(path);
  os << "mc.n_bits = 200\n"
     << "mc.seed = 5\n"
     << "link.ebn0_db = 10\n"
     << extra;
}

struct TempFile {
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
  std::string path;
};

}  // namespace

TEST_CASE("top-level help and subcommand requirement") {
  CHECK(run_cli("--help").status == 0);
  CHECK(run_cli("--help").out.find("design") != std::string::npos);
  CHECK(run_cli("").status != 0);           // a subcommand is required
  CHECK(run_cli("frobnicate").status != 0);  // unknown subcommand
}

TEST_CASE("design writes deterministic coefficient files") {
  TempFile a("cli_design_a.json"), b("cli_design_b.json");

  REQUIRE(run_cli("design --fhat 1.5 --out " + a.path + " 2>/dev/null").status == 0);
  REQUIRE(run_cli("design --fhat 1.5 --out " + b.path + " 2>/dev/null").status == 0);
  CHECK(slurp(a.path) == slurp(b.path));

  const CoeffFile f = read_coeff_file(a.path);
  CHECK(f.n == 5);
  CHECK(f.fhat_hz == doctest::Approx(1.5e9).epsilon(1e-12));
  CHECK(f.tc_s == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(f.method == "eigen");
  CHECK(f.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.cost >= 0.0);
  CHECK(f.cost < 1e-15);  // 1.5 GHz admits an exact null

  SUBCASE("the iterative solver is reproducible too") {
    TempFile c("cli_design_c.json"), d("cli_design_d.json");
    const std::string args = "design --fhat 6.6 --method powell --seed 3 --out ";
    REQUIRE(run_cli(args + c.path + " 2>/dev/null").status == 0);
    REQUIRE(run_cli(args + d.path + " 2>/dev/null").status == 0);
    CHECK(slurp(c.path) == slurp(d.path));
    const CoeffFile p = read_coeff_file(c.path);
    CHECK(p.method == "powell");
    CHECK(p.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.cost < 1e-12);
  }

  SUBCASE("invalid design frequencies are rejected") {
    CHECK(run_cli("design --fhat 0 2>/dev/null").status != 0);
    CHECK(run_cli("design --fhat 25 2>/dev/null").status != 0);  // outside the band
    CHECK(run_cli("design --fhat 1.5 --method simplex 2>/dev/null").status != 0);
  }
}

TEST_CASE("cost reports closed-form and numerical values that agree") {
  TempFile a("cli_cost_coeffs.json");
  REQUIRE(run_cli("design --fhat 1.5 --out " + a.path + " 2>/dev/null").status == 0);

  for (const char* fj : {"1.5", "3.7"}) {
    const CmdResult res = run_cli(std::string("cost --coeffs ") + a.path + " --fj " + fj);
    REQUIRE(res.status == 0);
    std::istringstream is(res.out);
    std::string key;
    double closed = -1.0, oracle = -1.0, rel = -1.0;
    REQUIRE((is >> key >> closed));
    CHECK(key == "closed_form_ns");
    REQUIRE((is >> key >> oracle));
    CHECK(key == "oracle_ns");
    REQUIRE((is >> key >> rel));
    CHECK(key == "rel_diff");
    CHECK(closed >= 0.0);
    CHECK(oracle >= 0.0);
    CHECK(rel < 1e-6);
  }

  CHECK(run_cli("cost --coeffs " + a.path + " --fj -1 2>/dev/null").status != 0);
  CHECK(run_cli("cost --coeffs no_such_file.json --fj 1.5 2>/dev/null").status != 0);
}

TEST_CASE("spectrogram emits one PSD row per design frequency") {
  TempFile out("cli_spectrogram.csv");
  REQUIRE(run_cli("spectrogram --grid 1.5,3.0 --nfft 4096 --out " + out.path).status == 0);
  std::ifstream is(out.path);
  const SpectrogramResult sg = read_spectrogram_csv(is);
  REQUIRE(sg.fhat_hz.size() == 2);
  CHECK(sg.fhat_hz[0] == doctest::Approx(1.5e9).epsilon(1e-12));
  CHECK(sg.fhat_hz[1] == doctest::Approx(3.0e9).epsilon(1e-12));
  CHECK(sg.freqs_hz.size() == 4096 / 2 + 1);
  CHECK(sg.psd_rows.rows() == 2);
  CHECK(sg.psd_rows.cols() == sg.freqs_hz.size());

  CHECK(run_cli("spectrogram --grid 1.5:0.5 2>/dev/null").status != 0);  // bad range
}

TEST_CASE("psd covers both pulse families") {
  TempFile out("cli_psd.csv");
  REQUIRE(run_cli("psd --doublet --nfft 4096 --out " + out.path).status == 0);
  {
    std::ifstream is(out.path);
    const Spectrum s = read_psd_csv(is);
    REQUIRE(s.freqs_hz.size() == 4096 / 2 + 1);
    CHECK(s.df_hz > 0.0);
    CHECK(s.psd.minCoeff() >= 0.0);
    CHECK(s.psd.maxCoeff() > 0.0);
  }

  TempFile coeffs("cli_psd_coeffs.json");
  REQUIRE(run_cli("design --fhat 3.0 --out " + coeffs.path + " 2>/dev/null").status == 0);
  REQUIRE(run_cli("psd --coeffs " + coeffs.path + " --nfft 4096 --out " + out.path).status == 0);
  std::ifstream is(out.path);
  CHECK(read_psd_csv(is).freqs_hz.size() == 4096 / 2 + 1);

  CHECK(run_cli("psd 2>/dev/null").status != 0);  // needs --coeffs or --doublet
}

TEST_CASE("ber sweeps are worker-count independent at the byte level") {
  TempFile cfg("cli_ber.cfg"), w1("cli_ber_w1.csv"), w3("cli_ber_w3.csv");
  write_config(cfg.path);

  const std::string base = "ber --config " + cfg.path + " --axis f_J --grid 1.5,3.0 ";
  REQUIRE(run_cli(base + "--workers 1 --out " + w1.path).status == 0);
  REQUIRE(run_cli(base + "--workers 3 --out " + w3.path).status == 0);
  CHECK(slurp(w1.path) == slurp(w3.path));

  std::ifstream is(w1.path);
  std::string axis;
  const std::vector<BerPoint> pts = read_sweep_csv(is, &axis);
  CHECK(axis == "f_J");
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].n_bits == 200);
  CHECK(pts[0].seed == 5);
  CHECK(pts[0].swept_value == doctest::Approx(1.5e9).epsilon(1e-12));
}

TEST_CASE("ber instrument dumps and option validation") {
  TempFile cfg("cli_ber_inst.cfg"), inst("cli_ber_inst.csv"), pt("cli_ber_pt.csv");
  write_config(cfg.path);

  const CmdResult ok = run_cli("ber --config " + cfg.path +
                               " --axis f_J --grid 1.5 --instrument-csv " + inst.path +
                               " --out " + pt.path + " 2>/dev/null");
  REQUIRE(ok.status == 0);
  std::ifstream is(inst.path);
  const std::vector<InstrumentRecord> recs = read_instrument_csv(is);
  CHECK(recs.size() == 200);
  std::ifstream ps(pt.path);
  const std::vector<BerPoint> pts = read_sweep_csv(ps);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].n_bits == 200);

  const std::string base = "ber --config " + cfg.path + " ";
  CHECK(run_cli(base + "--axis f_J --grid 1.5,3.0 --instrument-csv x.csv 2>/dev/null").status != 0);
  CHECK(run_cli(base + "--axis warp --grid 1.5 2>/dev/null").status != 0);
  CHECK(run_cli(base + "--axis f_J --grid nonsense 2>/dev/null").status != 0);
  CHECK(run_cli("ber --config no_such.cfg --axis f_J --grid 1.5 2>/dev/null").status != 0);
}

TEST_CASE("ber runs the design-versus-jammer grid") {
  TempFile cfg("cli_ber_grid.cfg"), out("cli_ber_grid.csv");
  write_config(cfg.path);
  REQUIRE(run_cli("ber --config " + cfg.path +
                  " --axis fhat_vs_fJ_grid --grid 1.5,3.0 --bits 50 --out " + out.path)
              .status == 0);
  std::ifstream is(out.path);
  const std::vector<GridBerPoint> grid = read_grid_csv(is);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0].fhat_hz == doctest::Approx(1.5e9).epsilon(1e-12));
  CHECK(grid[0].fj_hz == doctest::Approx(1.5e9).epsilon(1e-12));
  CHECK(grid[1].fhat_hz == doctest::Approx(1.5e9).epsilon(1e-12));
  CHECK(grid[1].fj_hz == doctest::Approx(3.0e9).epsilon(1e-12));
  CHECK(grid[2].fhat_hz == doctest::Approx(3.0e9).epsilon(1e-12));
  for (const GridBerPoint& g : grid) CHECK(g.point.n_bits == 50);
}
