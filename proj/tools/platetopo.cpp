#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "platetopo/platetopo.h"

namespace {

int report(pt_status s, const char* what) {
  std::fprintf(stderr, "platetopo: %s: %s (%s)\n", what, pt_status_string(s), pt_last_error());
  return 2;
}

void print_row(void*, const pt_cost_row* r) {
  std::printf("iter %4d  J=%.10g  t1=%.6g t2=%.6g t3=%.6g  lambda=%.6g  components=%d\n", r->iter, r->J, r->t1,
              r->t2, r->t3, r->lambda, r->components);
  std::fflush(stdout);
}

void print_check(void*, const char* name, int passed, const char* detail) {
  std::printf("%s %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
}

struct RunArgs {
  std::string preset = "test1";
  std::string config;
  std::string out;
  int divisions = 0;
  double dt = 0.0;
  int max_iters = -1;
};

int run_command(const RunArgs& a) {
  pt_config* cfg = nullptr;
  pt_status s = pt_config_preset(a.preset.c_str(), &cfg);
  if (s != PT_OK) return report(s, "preset");
  auto set = [&](const char* key, const std::string& value) {
    const pt_status st = pt_config_set(cfg, key, value.c_str());
    if (st != PT_OK) report(st, key);
    return st == PT_OK;
  };
  bool ok = true;
  if (!a.config.empty()) {
    s = pt_config_parse_file(cfg, a.config.c_str());
    if (s != PT_OK) ok = (report(s, "config"), false);
  }
  if (ok && a.divisions > 0) ok = set("n_divisions", std::to_string(a.divisions));
  if (ok && a.dt > 0.0) ok = set("dt", CLI::detail::to_string(a.dt));
  if (ok && a.max_iters >= 0) ok = set("max_iters", std::to_string(a.max_iters));
  if (ok && !a.out.empty()) ok = set("output_dir", a.out);
  if (ok) {
    char dir[4096];
    pt_config_get(cfg, "output_dir", dir, sizeof dir, nullptr);
    if (dir[0] == '\0') ok = set("output_dir", "out_" + a.preset);
  }
  if (!ok) {
    pt_config_free(cfg);
    return 2;
  }

  pt_run* run = nullptr;
  s = pt_run_optimizer(cfg, print_row, nullptr, &run);
  char dir[4096];
  pt_config_get(cfg, "output_dir", dir, sizeof dir, nullptr);
  pt_config_free(cfg);
  if (s != PT_OK) return report(s, "run");
  const std::string reason = pt_run_stop_reason(run);
  std::printf("stop: %s after %d iterations (%.1f s); outputs in %s\n", reason.c_str(), pt_run_iterations(run),
              pt_run_seconds(run), dir);
  if (pt_run_slope_violations(run) > 0)
    std::printf("warning: %d iterations with a non-negative predicted slope\n", pt_run_slope_violations(run));
  if (pt_run_orbit_failures(run) > 0)
    std::printf("warning: %d orbit components skipped\n", pt_run_orbit_failures(run));
  int code = 0;
  if (reason == "error") {
    std::fprintf(stderr, "platetopo: run stopped: %s\n", pt_run_error(run));
    code = 1;
  }
  pt_run_free(run);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set shape and topology optimization of clamped plates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pt_version()));

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run an optimization preset");
  run->add_option("--preset", ra.preset, "test1, test2a, test2b or test3")
      ->check(CLI::IsMember({"test1", "test2a", "test2b", "test3"}));
  run->add_option("--config", ra.config, "key = value file applied on top of the preset")->check(CLI::ExistingFile);
  run->add_option("--out", ra.out, "Output directory (default out_<preset>)");
  run->add_option("--mesh-divisions", ra.divisions, "Divisions per side of the box mesh")->check(CLI::PositiveNumber);
  run->add_option("--dt", ra.dt, "Orbit integration step")->check(CLI::PositiveNumber);
  run->add_option("--max-iters", ra.max_iters, "Iteration limit")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "Run the numerical property suite");

  CLI11_PARSE(app, argc, argv);

  if (*run) return run_command(ra);
  if (*verify) {
    int failed = 0;
    const pt_status s = pt_verify(print_check, nullptr, &failed);
    if (s != PT_OK) return report(s, "verify");
    std::printf("%d check(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
  }
  return 0;
}
