#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nhqm/biortho.hpp"
#include "nhqm/cli.hpp"
#include "nhqm/errors.hpp"
#include "nhqm/io.hpp"

using namespace nhqm;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nhqm");
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (std::string& s : args) argv.push_back(s.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

struct CoutCapture {
  std::ostringstream ss;
  std::streambuf* old = std::cout.rdbuf(ss.rdbuf());
  ~CoutCapture() { std::cout.rdbuf(old); }
};

}  // namespace

TEST_CASE("validate: rejects out-of-range configurations") {
  RunConfig cfg;
  CHECK_NOTHROW(validate(cfg));

  RunConfig bad = cfg;
  bad.N = 1;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = cfg;
  bad.omega = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = cfg;
  bad.tau = -1.0;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = cfg;
  bad.dt = bad.t_end;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = cfg;
  bad.tol = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
}

TEST_CASE("random families: diagonalizable and real-spectrum constructions") {
  std::mt19937_64 rng(12345);
  for (const Eigen::Index dim : {4, 8, 12}) {
    const ComplexMatrix m = random_diagonalizable(rng, dim);
    const BiorthogonalSystem sys = biorthogonalize(m);
    CHECK(reconstruction_residual(sys, m) < 1e-8);

    const ComplexMatrix h = random_real_spectrum(rng, dim);
    const Spectrum s = eigenvalues_only(h);
    double max_imag = 0.0, min_gap = 1e30;
    for (std::size_t i = 0; i < s.size(); ++i) {
      max_imag = std::max(max_imag, std::abs(s[i].imag()));
      if (i > 0) min_gap = std::min(min_gap, s[i].real() - s[i - 1].real());
    }
    CHECK(max_imag < 1e-8);
    CHECK(min_gap > 5e-4);  // constructed with gap > 1e-3, allow roundoff
  }
}

TEST_CASE("run_measure: repeatability data") {
  const MeasureReport rep = run_measure(RunConfig{});
  CHECK(rep.identity_residuals.maxCoeff() < 1e-12);
  CHECK(rep.naive_residuals(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.norm_residual < 1e-10);
  CHECK((rep.herm_identity - rep.herm_naive).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("cmd_measure: all gates pass") {
  std::ostringstream os;
  CHECK(cmd_measure(RunConfig{}, os) == 0);
  CHECK(os.str().find("ok measure-identity") != std::string::npos);
  CHECK(os.str().find("FAIL") == std::string::npos);
}

TEST_CASE("run_example1: gated levels and cubic scaling at omega = 1") {
  RunConfig cfg;
  cfg.omega = 1.0;
  const Example1Report rep = run_example1(cfg);
  REQUIRE(rep.h_levels.size() == 8);
  REQUIRE(rep.k_levels.size() == 8);
  CHECK(rep.h_levels[0] == doctest::Approx(0.51253815).epsilon(1e-6));
  CHECK(rep.h_levels[1] == doctest::Approx(1.57560192).epsilon(1e-6));
  CHECK(rep.hermitized_levels == rep.h_levels);
  CHECK(rep.reality);
  CHECK(rep.dist == doctest::Approx(5.359556e-01).epsilon(1e-4));
  CHECK(rep.dist_half == doctest::Approx(6.323734e-02).epsilon(1e-4));
  CHECK(rep.ratio > 6.0);
  CHECK(rep.ratio < 10.0);
}

TEST_CASE("run_example1: omega flag reaches the builders") {
  RunConfig cfg;
  cfg.omega = 0.5;
  cfg.eps = 0.01;
  const Example1Report rep = run_example1(cfg);
  REQUIRE(rep.h_levels.size() == 8);
  CHECK(rep.h_levels[0] < 0.3);  // ground level ~ hbar omega / 2 = 0.25
}

TEST_CASE("cmd_example1: all gates pass at omega = 1") {
  RunConfig cfg;
  cfg.omega = 1.0;
  std::ostringstream os;
  CHECK(cmd_example1(cfg, os) == 0);
  CHECK(os.str().find("ok example1-scaling") != std::string::npos);
}

TEST_CASE("run_example2: block residuals at the default parameters") {
  const Example2Report rep = run_example2(RunConfig{});
  CHECK(rep.bch_block_residual < 1e-8);
  CHECK(rep.dehermitize_block_residual < 1e-8);
  CHECK(rep.isospectral_residual < 1e-6);
  CHECK(rep.pseudo_herm_block_residual < 1e-8);
  CHECK(rep.max_imag_lowlying < 1e-8);
  // the full-matrix defect is corner-dominated and order 0.1 at eta = 0.3
  CHECK(rep.pseudo_herm_full_residual > 1e-3);
}

TEST_CASE("cmd_example2: gates pass; eta = 0 adds the exact gate") {
  std::ostringstream os;
  CHECK(cmd_example2(RunConfig{}, os) == 0);
  CHECK(os.str().find("ok example2-bch-block") != std::string::npos);

  RunConfig flat;
  flat.eta = 0.0;
  std::ostringstream os0;
  CHECK(cmd_example2(flat, os0) == 0);
  CHECK(os0.str().find("ok example2-eta0-exact") != std::string::npos);
}

TEST_CASE("run_example3: short run reproduces the closed form") {
  RunConfig cfg;
  cfg.N = 32;
  cfg.dt = 5e-3;
  cfg.t_end = 2.0;
  const Example3Result res = run_example3(cfg);

  const double alpha = 1.0;  // hbar = m = 1, omega = 1/2
  CHECK(res.x_herm.front() == doctest::Approx(alpha).epsilon(1e-9));
  CHECK(res.x_force.front() == doctest::Approx(alpha).epsilon(1e-9));
  CHECK(res.herm_vs_closed < 1e-6);
  CHECK(res.frame_gap < 1e-3);
  CHECK(res.force_norm_drift < 1e-6);
  CHECK(res.times.size() == res.x_herm.size());
  CHECK(res.times.back() == doctest::Approx(2.0));
}

TEST_CASE("cli_main: measure subcommand end to end") {
  CoutCapture cap;
  CHECK(run_cli({"measure"}) == 0);
  CHECK(cap.ss.str().find("ok measure-unitarity") != std::string::npos);
}

TEST_CASE("cli_main: parse failures are reported as nonzero") {
  CoutCapture cap;
  CHECK(run_cli({}) != 0);                        // missing subcommand
  CHECK(run_cli({"--no-such-flag", "measure"}) != 0);
  CHECK(run_cli({"frobnicate"}) != 0);            // unknown subcommand
}

TEST_CASE("cli_main: invalid configuration surfaces the config error") {
  CoutCapture cap;
  CHECK(run_cli({"--dim", "1", "measure"}) == 64);
  CHECK(run_cli({"--dt", "20", "measure"}) == 64);  // dt >= t_end
}

TEST_CASE("cli_main: flags fall through past the subcommand") {
  CoutCapture cap;
  CHECK(run_cli({"example2", "--eta", "0.1", "--dim", "64"}) == 0);
}

TEST_CASE("cli_main: config file with key = value lines") {
  const std::string path = "cli_tmp_config.ini";
  {
    std::ofstream out(path);
    out << "# tuned run\n";
    out << "eta = 0.2\n";
    out << "dim = 64\n";
  }
  CoutCapture cap;
  CHECK(run_cli({"--config", path, "example2"}) == 0);
  std::remove(path.c_str());
}

TEST_CASE("cli_main: measure writes the report CSV") {
  const std::string path = "cli_tmp_measure.csv";
  {
    CoutCapture cap;
    REQUIRE(run_cli({"--out", path, "measure"}) == 0);
  }
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,m,overlap_psi,overlap_phi_psi,pointer_overlap,residual");
  int rows = 0;
  for (std::string line; std::getline(in, line) && !line.empty();) ++rows;
  CHECK(rows == 4);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("io: matrix text format round trip") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));

  const std::string path = "cli_tmp_matrix.txt";
  write_matrix(path, m);
  const ComplexMatrix back = read_matrix(path);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);  // 17 digits round-trip exactly
  std::remove(path.c_str());
}

TEST_CASE("io: malformed matrix files are rejected") {
  CHECK_THROWS_AS(read_matrix("definitely_missing_file.txt"), Error);

  const std::string bad_dim = "cli_tmp_bad1.txt";
  {
    std::ofstream out(bad_dim);
    out << "abc\n";
  }
  CHECK_THROWS_AS(read_matrix(bad_dim), Error);
  std::remove(bad_dim.c_str());

  const std::string truncated = "cli_tmp_bad2.txt";
  {
    std::ofstream out(truncated);
    out << "2\n1 0\n";
  }
  CHECK_THROWS_AS(read_matrix(truncated), Error);
  std::remove(truncated.c_str());
}

TEST_CASE("io: trajectory column mismatch is rejected") {
  CHECK_THROWS_AS(
      write_trajectory_csv("cli_tmp_bad3.csv", {0.0, 1.0}, {0.0}, {0.0, 1.0},
                           {0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}),
      DimensionMismatch);
  std::remove("cli_tmp_bad3.csv");
}
