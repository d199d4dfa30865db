#pragma once

#include <string>
#include <vector>

#include "platetopo/descent.hpp"

namespace platetopo {

// Signed circle: sign +1 gives |x-c|^2 - R^2 (outer boundary), sign -1 gives
// R^2 - |x-c|^2 (hole).
struct CirclePrimitive {
  Point2 center = Point2::Zero();
  double radius = 1.0;
  int sign = 1;
};

/// Initial level set: the maximum of its circle primitives.
/// Text form: "outer cx cy R; hole cx cy R; ...".
struct LevelSetSpec {
  std::vector<CirclePrimitive> primitives;

  double operator()(const Point2& x) const;
  static LevelSetSpec parse(const std::string& text);
  std::string str() const;
};

struct RunConfig {
  std::string name = "custom";
  double domain_min = -3.0;
  double domain_max = 3.0;
  int n_divisions = 64;
  std::string mesh_file;  // overrides the generated mesh when set
  double eps = 0.8;
  double f = 0.0;
  double u0 = 1.0;
  double tol = 1e-6;
  int max_iters = 100;
  double lambda0 = 1.0;
  double rho = 0.8;
  int n_line_search = 30;
  DirectionVariant direction = DirectionVariant::Simplified;
  bool smooth = false;
  bool normalize = false;
  double dt = 1e-3;
  std::string output_dir;
  int snapshot_stride = 10;  // 0 disables boundary/field snapshots
  LevelSetSpec level_set;

  void validate() const;
};

// Defaults: domain (-3, 3)^2, 64 divisions, Test-1 annulus.
RunConfig default_config();

// test1, test2a, test2b, test3.
RunConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

const std::vector<std::string>& config_keys();
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

// "key = value" lines, '#' starts a comment. Keys override `base`.
RunConfig parse_config(const std::string& text, RunConfig base = default_config());
RunConfig parse_config_file(const std::string& path, RunConfig base = default_config());
std::string format_config(const RunConfig& cfg);

}  // namespace platetopo
