#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracdens/commands.hpp"

using namespace fracdens;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("fracdens_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

long count_data_rows(const std::string& csv) {
  long rows = 0;
  std::istringstream is(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("run config parsing and echo") {
  fs::path dir = fresh_dir("cfg");
  {
    std::ofstream f(dir / "run.cfg");
    f << "# comment line\n";
    f << "model.hurst = 0.3\n";
    f << "y.list = -1,0,1\n";
    f << "model.drift=zero   # trailing comment\n";
  }
  auto cfg = RunConfig::from_file((dir / "run.cfg").string());
  CHECK(cfg.get_num("model.hurst", 0.0) == 0.3);
  CHECK(cfg.get_list("y.list").size() == 3);
  CHECK(cfg.get_str("model.drift", "") == "zero");
  CHECK(cfg.echo() == "model.drift=zero;model.hurst=0.3;y.list=-1,0,1");

  RunConfig bad;
  CHECK_THROWS_AS(bad.parse_line("no equal sign"), std::invalid_argument);
  bad.set("x", "abc");
  CHECK_THROWS_WITH_AS(bad.require_num("x"), doctest::Contains("'x'"), std::invalid_argument);
}

TEST_CASE("model validation names the offending field") {
  RunConfig cfg;
  cfg.set("model.hurst", "1.2");
  CHECK_THROWS_WITH_AS(build_model(cfg), doctest::Contains("model.hurst"), std::invalid_argument);

  RunConfig cfg2;
  cfg2.set("model.drift", "doublewell");
  CHECK_THROWS_WITH_AS(build_model(cfg2), doctest::Contains("model.drift"), std::invalid_argument);

  RunConfig cfg3;
  cfg3.set("model.drift", "sign");
  cfg3.set("model.hurst", "0.7");
  CHECK_THROWS_AS(build_model(cfg3), std::invalid_argument);

  RunConfig ok;
  ok.set("model.drift", "linear");
  ok.set("model.rate", "2.0");
  ok.set("model.dim", "2");
  ok.set("model.sigma", "1,0,0,1");
  auto m = build_model(ok);
  CHECK(m.dimension == 2);
  CHECK(m.drift.rate(0, 0) == 2.0);
}

TEST_CASE("simulate: csv shape and determinism") {
  fs::path dir = fresh_dir("sim");
  RunConfig cfg;
  cfg.set("model.drift", "zero");
  cfg.set("model.hurst", "0.3");
  cfg.set("sim.kind", "fbm");
  cfg.set("sim.t", "1.0");
  cfg.set("sim.dt", "0.0078125");
  cfg.set("seed", "9");
  cfg.set("out", (dir / "a").string());
  CHECK(cmd_simulate(cfg) == 0);
  std::string csv = read_file(dir / "a" / "path_0.csv");
  CHECK(csv.find("t,y1\n") != std::string::npos);
  CHECK(count_data_rows(csv) == 129);  // N + 1 nodes

  cfg.set("out", (dir / "b").string());
  CHECK(cmd_simulate(cfg) == 0);
  CHECK(read_file(dir / "b" / "path_0.csv") == csv);

  cfg.set("sim.kind", "nonsense");
  CHECK_THROWS_WITH_AS(cmd_simulate(cfg), doctest::Contains("sim.kind"), std::invalid_argument);
}

TEST_CASE("density: zero drift rows and required keys") {
  fs::path dir = fresh_dir("dens");
  RunConfig cfg;
  cfg.set("model.drift", "zero");
  cfg.set("model.hurst", "0.5");
  cfg.set("y.list", "-1,0,1,2");
  cfg.set("est.n_paths", "128");
  cfg.set("est.dt", "0.015625");
  cfg.set("out", dir.string());
  CHECK(cmd_density(cfg) == 0);
  std::string csv = read_file(dir / "density.csv");
  CHECK(count_data_rows(csv) == 4);
  // stderr column must be exactly 0 for the zero drift
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("hurst", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 10);
    CHECK(cells[6] == "0");
  }

  RunConfig missing = cfg;
  missing.set("y.list", "");
  CHECK_THROWS_WITH_AS(cmd_density(missing), doctest::Contains("y.list"), std::invalid_argument);
}

TEST_CASE("validate: verdicts map to exit codes") {
  fs::path dir = fresh_dir("val");
  RunConfig cfg;
  cfg.set("model.drift", "linear");
  cfg.set("model.rate", "1.0");
  cfg.set("model.hurst", "0.5");
  cfg.set("est.n_outer", "64");
  cfg.set("est.n_inner", "64");
  cfg.set("est.dt", "0.015625");
  cfg.set("est.dt_sim", "0.03125");
  cfg.set("y.list", "-0.5,0,0.5");
  cfg.set("out", dir.string());
  cfg.set("seed", "3");
  CHECK(cmd_validate("chapman_kolmogorov", cfg) == 0);
  CHECK(fs::exists(dir / "chapman_kolmogorov_report.json"));

  CHECK(cmd_validate("not_an_experiment", cfg) == 2);
}

TEST_CASE("cli binary: bitwise reruns and worker independence") {
  const char* cli = FRACDENS_CLI_PATH;
  REQUIRE(fs::exists(cli));
  fs::path dir = fresh_dir("bin");

  auto run = [&](const std::string& args) {
    std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  std::string common = "--set model.drift=linear --set model.rate=1 --set model.hurst=0.7 "
                       "--set y.list=0,1 --set est.n_paths=256 --set est.dt=0.015625 --seed 5";
  CHECK(run("density " + common + " --out " + (dir / "d1").string()) == 0);
  CHECK(run("density " + common + " --out " + (dir / "d2").string()) == 0);
  CHECK(read_file(dir / "d1" / "density.csv") == read_file(dir / "d2" / "density.csv"));

  // outputs are byte-identical regardless of the worker count
  CHECK(run("density " + common + " --workers 2 --out " + (dir / "d3").string()) == 0);
  CHECK(read_file(dir / "d1" / "density.csv") == read_file(dir / "d3" / "density.csv"));

  CHECK(run("simulate --set sim.kind=liouville --set model.hurst=0.3 --set sim.dt=0.0078125 --seed 2 --out " +
            (dir / "s1").string()) == 0);
  CHECK(run("simulate --set sim.kind=liouville --set model.hurst=0.3 --set sim.dt=0.0078125 --seed 2 --out " +
            (dir / "s2").string()) == 0);
  CHECK(read_file(dir / "s1" / "path_0.csv") == read_file(dir / "s2" / "path_0.csv"));
}
