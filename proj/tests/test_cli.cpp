#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vela/config.hpp"
#include "vela/error.hpp"
#include "vela/run.hpp"
#include "vela/snapshot.hpp"

using namespace vela;
namespace fs = std::filesystem;

namespace {

/// Small, quick run: 32^3, four steps, light diagnostics.
RunConfig quick_config() {
  RunConfig c;
  c.n = 32;
  c.width = 0.15;
  c.dt = 0.1;
  c.T = 0.4;
  c.cadence = 2;
  c.full_diagnostics = false;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vela_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string rows_text(const RunResult& r) {
  std::string s;
  for (const auto& row : r.rows) s += csv_row(row) + "\n";
  return s;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  CHECK(write_config(parse_config(write_config(c))) == write_config(c));
  c.n = 32;
  c.model = "oldroyd-b";
  c.nu = 0.003;
  c.dt = 0.05;
  c.seed = 12345678901ULL;
  c.nu_list = {0.0, 0.25};
  c.full_diagnostics = false;
  c.dir = "some/where";
  c.width = 0.15;
  const RunConfig d = parse_config(write_config(c));
  CHECK(write_config(d) == write_config(c));
  CHECK(d.seed == 12345678901ULL);
  CHECK(d.nu_list.size() == 2);
  CHECK(d.nu_list[1] == 0.25);
  CHECK(d.model == "oldroyd-b");
  CHECK_FALSE(d.full_diagnostics);
}

TEST_CASE("every key is written and overridable") {
  const std::string text = write_config(RunConfig{});
  for (const auto& key : config_keys()) {
    const std::string leaf = key.substr(key.find('.') + 1);
    CHECK(text.find(leaf + " =") != std::string::npos);
  }
  RunConfig c;
  apply_override(c, "material.nu=0.01");
  apply_override(c, "solver.dealias=false");
  apply_override(c, "sweep.nu=0,0.5,1");
  apply_override(c, "data.width = 0.2");
  CHECK(c.nu == 0.01);
  CHECK_FALSE(c.dealias);
  CHECK(c.nu_list.size() == 3);
  CHECK(c.width == 0.2);
}

TEST_CASE("malformed configuration is rejected") {
  RunConfig c;
  CHECK_THROWS_AS(apply_override(c, "grid.bogus=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "material.nu"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "material.nu=abc"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "grid.n=12.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nn = 32\nsize = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/vela.ini"), ConfigError);
}

TEST_CASE("validation explains the cone cap and the CFL bound") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.T = c.cone_cap() * 1.01;
  try {
    c.validate();
    FAIL("expected a cone cap error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cone cap") != std::string::npos);
  }
  c = RunConfig{};
  c.dt = c.spacing();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.n = 48;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.model = "unknown";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.c1 = 0.9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("step size divides the horizon") {
  RunConfig c;
  CHECK(c.horizon() == c.cone_cap());
  CHECK(c.steps() * c.step_size() == doctest::Approx(c.horizon()).epsilon(1e-14));
  CHECK(c.step_size() <= 0.5 * c.spacing() / c.c1);
  c.dt = c.step_size() / 2.0;
  CHECK(c.steps() == 2 * RunConfig{}.steps());
}

TEST_CASE("a sweep needs two viscosities") {
  const RunConfig c = quick_config();
  RunOptions opt;
  opt.write_files = false;
  CHECK_THROWS_AS(run_sweep(c, {0.01}, opt), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, {0.0, -1.0}, opt), ConfigError);
}

TEST_CASE("runs are deterministic and thread independent") {
  const RunConfig c = quick_config();
  RunOptions opt;
  opt.write_files = false;
  const RunResult a = run_simulation(c, opt), b = run_simulation(c, opt);
  REQUIRE(a.rows.size() == 3);
  CHECK(rows_text(a) == rows_text(b));
  CHECK(a.residuals_ok());
  CHECK(a.exit_code() == 0);
  CHECK(a.final_state->t == doctest::Approx(0.4));

  const SweepReport s1 = run_sweep(c, {0.0, 0.01}, opt, 1);
  const SweepReport s2 = run_sweep(c, {0.0, 0.01}, opt, 2);
  REQUIRE(s1.members.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(rows_text(s1.members[i].result) == rows_text(s2.members[i].result));
  CHECK(rows_text(s1.members[0].result) == rows_text(a));
  CHECK(s1.members[0].diff_from_inviscid == 0.0);
  CHECK(s1.members[1].diff_from_inviscid > 0.0);
}

TEST_CASE("runs write their outputs and snapshots read back") {
  RunConfig c = quick_config();
  const fs::path dir = scratch_dir("run");
  c.dir = dir.string();
  const RunResult r = run_simulation(c);
  CHECK(fs::exists(dir / "timeseries.csv"));
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "config.ini"));
  CHECK(write_config(load_config((dir / "config.ini").string())) == write_config(c));

  std::ifstream csv(dir / "timeseries.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == csv_header());

  std::vector<fs::path> snaps;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".vela") snaps.push_back(e.path());
  REQUIRE(snaps.size() >= 2);
  std::sort(snaps.begin(), snaps.end());
  const Snapshot s = read_snapshot(snaps.back().string());
  CHECK(s.n == 32);
  CHECK(s.t == doctest::Approx(0.4));
  const MatrixField h = from_snapshot_field<9>(s, "hdot");
  CHECK(max_abs(h - r.final_state->hdot) == 0.0);
  CHECK_THROWS_AS(from_snapshot_field<3>(s, "hdot"), ShapeError);
  std::ostringstream out;
  CHECK(inspect_snapshot(snaps.back().string(), out) == 0);
  CHECK(out.str().find("hdot") != std::string::npos);

  std::ofstream(dir / "junk.vela") << "not a snapshot";
  CHECK_THROWS_AS(read_snapshot((dir / "junk.vela").string()), ShapeError);
  CHECK(summary_text(r).find("residuals_ok = true") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("null check and inequality commands") {
  RunConfig c;
  c.null_samples = 100;
  std::ostringstream out;
  CHECK(run_nullcheck(c, out) == 0);
  c.model = "null-violating";
  CHECK(run_nullcheck(c, out) != 0);
  c = RunConfig{};
  c.inequality_n = 16;
  c.hardy_count = 5;
  c.sobolev_count = 3;
  CHECK(run_inequalities(c, out) == 0);
}
