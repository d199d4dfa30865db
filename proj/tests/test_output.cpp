#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "platetopo/error.hpp"
#include "platetopo/output.hpp"

using namespace platetopo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  RunConfig cfg = preset("test2a");
  cfg.n_divisions = 16;
  cfg.max_iters = 2;
  return cfg;
}

}  // namespace

TEST_CASE("cost history round trip is exact") {
  RunRecord rec;
  for (int k = 0; k < 4; ++k) {
    IterationRecord r;
    r.iter = k;
    r.cost.t1 = 1.0 / 3.0 + k;
    r.cost.t2 = 1e-17 * (k + 1);
    r.cost.t3 = 123456.789012345678;
    r.cost.J = std::sqrt(2.0) * (k + 1);
    r.cost.components = k + 1;
    r.lambda = std::pow(0.8, k);
    rec.history.push_back(r);
  }
  std::stringstream ss;
  write_cost_history(ss, rec);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  CHECK(header == "iter,t1,t2,t3,J,lambda,components");
  const auto rows = read_cost_history(ss);
  REQUIRE(rows.size() == 4);
  for (int k = 0; k < 4; ++k) {
    const auto& a = rec.history[k];
    CHECK(rows[k].iter == a.iter);
    CHECK(rows[k].t1 == a.cost.t1);
    CHECK(rows[k].t2 == a.cost.t2);
    CHECK(rows[k].t3 == a.cost.t3);
    CHECK(rows[k].J == a.cost.J);
    CHECK(rows[k].lambda == a.lambda);
    CHECK(rows[k].components == a.cost.components);
  }
  std::istringstream bad("iter,t1\n1,2\n");
  CHECK_THROWS_AS(read_cost_history(bad), Error);
  CHECK_THROWS_AS(read_cost_history("/nonexistent/cost.csv"), Error);
}

TEST_CASE("output writer produces snapshots, history and summary") {
  const fs::path dir = fs::path("test_output_run");
  fs::remove_all(dir);
  const RunConfig cfg = small_config();
  OutputWriter w(dir.string(), 1);
  const RunRecord rec = run(cfg, &w);
  REQUIRE(rec.stop != StopReason::Error);
  CHECK(fs::exists(dir / "cost_history.csv"));
  CHECK(fs::exists(dir / "run_summary.txt"));
  CHECK(fs::exists(dir / "boundary_0000.csv"));
  CHECK(fs::exists(dir / "fields_0000.vtk"));
  CHECK(fs::exists(dir / "boundary_0001.csv"));
  // the full variant traces orbits
  CHECK(fs::exists(dir / "orbits_0001.csv"));
  CHECK(slurp(dir / "orbits_0001.csv").rfind("component,period,steps,closure_gap", 0) == 0);

  const auto rows = read_cost_history((dir / "cost_history.csv").string());
  REQUIRE(rows.size() == rec.history.size());
  CHECK(rows.back().J == rec.history.back().cost.J);

  const std::string summary = slurp(dir / "run_summary.txt");
  CHECK(summary.find("preset: test2a") != std::string::npos);
  CHECK(summary.find("stop_reason: " + to_string(rec.stop)) != std::string::npos);
  CHECK(summary.find("slope_violations: 0") != std::string::npos);
  CHECK(summary.find("[config]") != std::string::npos);
  CHECK(summary.find("n_divisions = 16") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("stride zero writes only history and summary") {
  const fs::path dir = fs::path("test_output_nosnap");
  fs::remove_all(dir);
  OutputWriter w(dir.string(), 0);
  RunConfig cfg = small_config();
  cfg.max_iters = 1;
  run(cfg, &w);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 2);
  fs::remove_all(dir);
}
