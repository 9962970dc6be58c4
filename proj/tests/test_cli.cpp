#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "memsq/cli.hpp"

using namespace memsq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("memsq_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const std::string kQuench = R"([mode]
mode = quench
[params]
lambda = 1
alpha = 0
beta = 1
[scheme]
grid = 40
snapshot_every = 50
)";

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.mode = Mode::Sweep;
  c.params.lambda = 0.1 + 0.2;
  c.params.alpha = 1.0 / 3.0;
  c.params.dim = 2;
  c.params.geometry = Geometry::ball(0.75);
  c.scheme.epsilon = 1e-3;
  c.scheme.freeze_mesh = true;
  c.grid = 57;
  c.sweep = SweepAxis{"lambda", {1.0, 2.5, 3.0000000000000004}, Mode::Quench};
  const RunConfig back = parse_config(format_config(c));
  CHECK(back == c);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[mode]\nmode = simulate\n[params]\nlamda = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = simulate\n[params]\nlambda = 1\nlambda = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = simulate\n[sweep]\nparameter = lambda\nvalues = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = sweep\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[params]\nlambda = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = simulate\n[params]\nlambda = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = simulate\n[params]\ngeometry = ball\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = simulate\n[scheme]\nepsilon = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mode]\nmode = warp\n"), ConfigError);
  CHECK_NOTHROW(parse_config("# comment\n[mode]\nmode = bounds  # trailing\n"));
}

TEST_CASE("format_number") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0 / 0.0) == "inf");
  CHECK(format_number(-1.0 / 0.0) == "-inf");
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  CHECK(run_text("[mode]\nmode = simulate\n[params]\nlamda = 1\n", {scratch("bad"), 1}, log) == 2);
  CHECK(log.str().find("params.lamda") != std::string::npos);
  const std::string infeasible =
      "[mode]\nmode = bifurcate\n[scheme]\nbranch_min = 0.01\nbranch_max = 0.2\nbranch_step = 0.001\n";
  CHECK(run_text(infeasible, {scratch("infeasible"), 1}, log) == 3);
  CHECK(run(scratch("missing") / "nope.cfg", {scratch("missing_out"), 1}, log) == 2);
}

TEST_CASE("bifurcate outputs") {
  const fs::path out = scratch("bifurcate");
  std::ostringstream log;
  const std::string text = "[mode]\nmode = bifurcate\n[params]\nalpha = 0\nbeta = 1\n";
  REQUIRE(run_text(text, {out, 1}, log) == 0);
  const auto branch = lines(slurp(out / "branch.csv"));
  REQUIRE(branch.size() > 100);
  CHECK(branch[0] == "M,m,lambda,mu");
  const auto fold = lines(slurp(out / "fold.csv"));
  REQUIRE(fold.size() == 3);
  CHECK(fold[1].rfind("grid,", 0) == 0);
  CHECK(fold[2].rfind("refined,", 0) == 0);
  const std::string manifest = slurp(out / "manifest.txt");
  CHECK(manifest.find("exit_code = 0") != std::string::npos);
  CHECK(parse_config(config_echo(manifest)) == parse_config(text));
  CHECK(config_echo(manifest) == text);
}

TEST_CASE("quench outputs are deterministic") {
  std::ostringstream log;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run_text(kQuench, {a, 1}, log) == 0);
  REQUIRE(run_text(kQuench, {b, 1}, log) == 0);
  for (const char* f : {"ledger.csv", "quench.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(lines(slurp(a / "ledger.csv"))[0] == "t,umax,E,K,g,dtau");
  std::size_t snaps = 0;
  for (const auto& e : fs::directory_iterator(a / "snapshots")) {
    CHECK(slurp(e.path()) == slurp(b / "snapshots" / e.path().filename()));
    ++snaps;
  }
  CHECK(snaps >= 2);
  CHECK(fs::exists(a / "snapshots" / "0000.csv"));
  CHECK(slurp(a / "quench.csv").find("quenched") != std::string::npos);
}

TEST_CASE("eigen and bounds modes") {
  std::ostringstream log;
  const fs::path e = scratch("eigen");
  REQUIRE(run_text("[mode]\nmode = eigen\n[scheme]\neigen_samples = 51\n", {e, 1}, log) == 0);
  const auto rows = lines(slurp(e / "eigen.csv"));
  CHECK(rows[0] == "x,phi");
  CHECK(rows.size() == 52);
  const fs::path b = scratch("bounds");
  REQUIRE(run_text("[mode]\nmode = bounds\n", {b, 1}, log) == 0);
  CHECK(lines(slurp(b / "bounds.csv"))[0] == "quantity,value,status");
}

TEST_CASE("sweep over lambda") {
  const std::string text = R"([mode]
mode = sweep
[params]
alpha = 1
[scheme]
grid = 40
[sweep]
parameter = lambda
values = 3, 3.5, 4
run = quench
)";
  std::ostringstream log;
  const fs::path one = scratch("sweep_1"), two = scratch("sweep_2");
  REQUIRE(run_text(text, {one, 1}, log) == 0);
  REQUIRE(run_text(text, {two, 2}, log) == 0);
  const std::string summary = slurp(one / "summary.csv");
  CHECK(summary == slurp(two / "summary.csv"));
  for (const char* run : {"run_000", "run_001", "run_002"}) {
    CHECK(slurp(one / run / "ledger.csv") == slurp(two / run / "ledger.csv"));
  }
  const auto rows = lines(summary);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "lambda,status,exit_code,headline_key,headline_value");
  std::vector<double> tq;
  for (std::size_t i = 1; i < rows.size(); ++i) tq.push_back(std::stod(rows[i].substr(rows[i].rfind(',') + 1)));
  CHECK(tq[0] > tq[1]);
  CHECK(tq[1] > tq[2]);
}
