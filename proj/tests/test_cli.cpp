#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pencil/cli.hpp"
#include "pencil/inverse.hpp"
#include "pencil/spectra.hpp"

using namespace pencil;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("pencil_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("spectrum subcommand finds the free Dirichlet eigenvalues") {
  TempDir dir("spectrum");
  int rc = dispatch({"spectrum", "--fn", "delta1", "--box", "0.5", "3.5", "-1",
                     "1", "--out", dir.str()});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "spectrum.csv");
  CHECK(csv.find("name,re_lambda,im_lambda,multiplicity,residual") == 0);
  int rows = 0;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  for (int n = 1; std::getline(lines, line); ++n, ++rows) {
    std::istringstream cells(line);
    std::string name, re;
    std::getline(cells, name, ',');
    std::getline(cells, re, ',');
    CHECK(std::abs(std::stod(re) - n) < 1e-8);
  }
  CHECK(rows == 3);
}

TEST_CASE("validate subcommand passes on the free problem") {
  TempDir dir("validate");
  int rc = dispatch({"validate", "--nre", "6", "--nim", "4", "--out", dir.str()});
  CHECK(rc == 0);
  CHECK(fs::exists(dir.path / "validate.csv"));
}

TEST_CASE("identical config produces byte-identical outputs") {
  TempDir a("det_a"), b("det_b");
  std::vector<std::string> args{"scan", "--fn",  "delta1", "--nre", "9",
                                "--nim", "3",    "--re",   "-4",    "--re-end",
                                "4",     "--im", "-1",     "--im-end", "1"};
  auto run = [&](const std::string& out) {
    std::vector<std::string> full = args;
    full.push_back("--out");
    full.push_back(out);
    return dispatch(full);
  };
  CHECK(run(a.str()) == 0);
  CHECK(run(b.str()) == 0);
  CHECK(slurp(a.path / "scan.csv") == slurp(b.path / "scan.csv"));

  TempDir c("det_c"), d("det_d");
  CHECK(dispatch({"validate", "--nre", "5", "--nim", "3", "--out", c.str()}) == 0);
  CHECK(dispatch({"validate", "--nre", "5", "--nim", "3", "--out", d.str()}) == 0);
  CHECK(slurp(c.path / "validate.csv") == slurp(d.path / "validate.csv"));
}

TEST_CASE("weyl subcommand marks poles") {
  TempDir dir("weyl");
  int rc = dispatch({"weyl", "--re", "0.4", "--re-end", "2.2", "--nre", "4",
                     "--im", "0", "--im-end", "0", "--nim", "1", "--out",
                     dir.str()});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "weyl.csv");
  // lambda = 1 sits on a Dirichlet eigenvalue: M must be flagged there.
  bool flagged = false;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("1,0,", 0) == 0 && line.find(",1,") != std::string::npos)
      flagged = true;
  CHECK(flagged);
}

TEST_CASE("asym subcommand writes the scan table") {
  TempDir dir("asym");
  int rc = dispatch({"asym", "--kind", "delta1", "--radii", "5", "10", "--out",
                     dir.str()});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "asym.csv");
  CHECK(csv.find("kind,arg,radius,deviation") == 0);
  // three rays, two radii
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("inverse subcommand runs a spec file end to end") {
  TempDir dir("inverse");
  InverseConfig cfg;
  cfg.param.T = kPi;
  cfg.param.p_dim = 1;
  cfg.param.q_dim = 0;
  cfg.param.free_mean = true;
  cfg.u1 = BoundaryMeasure::point(kPi, 0.0, 1.0, 1);
  cfg.u2 = BoundaryMeasure::point(kPi, kPi / 2, 1.0, 2);
  cfg.data.kind = DataKind::two_spectra;
  double c = 0.5;
  for (int n = 1; n <= 3; ++n)
    cfg.data.lambda1_targets.push_back(Complex(c + std::sqrt(c * c + n * n), 0.0));
  for (int n = 0; n < 3; ++n)
    cfg.data.lambda11_targets.push_back(
        Complex(c + std::sqrt(c * c + (n + 0.5) * (n + 0.5)), 0.0));
  cfg.start = {0.2};
  fs::path spec = dir.path / "runspec.json";
  {
    std::ofstream f(spec, std::ios::binary);
    f << inverse_config_to_json(cfg);
  }
  int rc = dispatch({"inverse", "--spec", spec.string(), "--out", dir.str()});
  CHECK(rc == 0);
  std::string result = slurp(dir.path / "inverse_result.json");
  CHECK(result.find("\"converged\": true") != std::string::npos);
  CHECK(fs::exists(dir.path / "inverse_iters.csv"));
}

TEST_CASE("problem files load through the CLI") {
  TempDir dir("probfile");
  ProblemSpec prob = oracle::const_p_problem(0.5);
  fs::path pf = dir.path / "problem.json";
  save_problem(prob, pf.string());
  int rc = dispatch({"spectrum", "--problem", pf.string(), "--fn", "delta1",
                     "--box", "1", "2", "-1", "1", "--out", dir.str()});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "spectrum.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  REQUIRE(std::getline(lines, line));
  std::istringstream cells(line);
  std::string name, re;
  std::getline(cells, name, ',');
  std::getline(cells, re, ',');
  CHECK(std::abs(std::stod(re) - (0.5 + std::sqrt(1.25))) < 1e-7);
}

TEST_CASE("worker count does not change the tables") {
  TempDir a("w1"), b("w2");
  std::vector<std::string> base{"scan", "--fn", "omega", "--nre", "7", "--nim",
                                "3", "--re", "-3", "--re-end", "3",
                                "--im", "-1", "--im-end", "1"};
  auto run = [&](const std::string& out, const char* workers) {
    std::vector<std::string> full = base;
    full.insert(full.end(), {"--workers", workers, "--out", out});
    return dispatch(full);
  };
  CHECK(run(a.str(), "1") == 0);
  CHECK(run(b.str(), "2") == 0);
  CHECK(slurp(a.path / "scan.csv") == slurp(b.path / "scan.csv"));
}

TEST_CASE("scenario subcommand writes the report and artifacts") {
  TempDir dir("scenario");
  int rc = dispatch({"scenario", "example2", "--out", dir.str()});
  CHECK(rc == 0);
  std::string rep = slurp(dir.path / "report.json");
  CHECK(rep.find("\"all_passed\": true") != std::string::npos);
  CHECK(fs::exists(dir.path / "lambda2_window.csv"));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(dispatch({"spectrum", "--no-such-flag"}) == 2);
  CHECK(dispatch({"no_such_command"}) == 2);
  CHECK(dispatch({}) == 2);
  CHECK(dispatch({"scenario", "bogus_name"}) == 2);
  TempDir dir("badprob");
  fs::path pf = dir.path / "nope.json";
  CHECK(dispatch({"validate", "--problem", pf.string()}) == 2);
}
