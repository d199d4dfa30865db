#include "platetopo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
    fail(ErrorCode::Argument, "config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    fail(ErrorCode::Argument, "config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::Argument, "config: '" + key + "' expects true or false, got '" + v + "'");
}

LevelSetSpec annulus() {
  return LevelSetSpec::parse("hole -0.8 -0.8 0.6; outer -0.8 -0.8 1.8");
}

}  // namespace

double LevelSetSpec::operator()(const Point2& x) const {
  double g = -INFINITY;
  for (const auto& c : primitives) {
    const double d = (x - c.center).squaredNorm() - c.radius * c.radius;
    g = std::max(g, c.sign > 0 ? d : -d);
  }
  return g;
}

LevelSetSpec LevelSetSpec::parse(const std::string& text) {
  LevelSetSpec spec;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::istringstream in(item);
    std::string kind;
    CirclePrimitive c;
    double cx = 0, cy = 0;
    in >> kind >> cx >> cy >> c.radius;
    std::string extra;
    if (!in || (in >> extra) || (kind != "outer" && kind != "hole") || !(c.radius > 0.0))
      fail(ErrorCode::Argument, "level_set: cannot parse '" + item + "' (expected 'outer|hole cx cy R')");
    c.center = Point2(cx, cy);
    c.sign = kind == "outer" ? 1 : -1;
    spec.primitives.push_back(c);
  }
  if (spec.primitives.empty()) fail(ErrorCode::Argument, "level_set: at least one primitive is required");
  return spec;
}

std::string LevelSetSpec::str() const {
  std::string s;
  for (const auto& c : primitives) {
    if (!s.empty()) s += "; ";
    s += (c.sign > 0 ? "outer " : "hole ") + fmt(c.center.x()) + " " + fmt(c.center.y()) + " " + fmt(c.radius);
  }
  return s;
}

void RunConfig::validate() const {
  require(domain_min < domain_max, "config: domain_min must be below domain_max");
  require(n_divisions >= 1, "config: n_divisions must be at least 1");
  require(eps > 0.0, "config: eps must be positive");
  require(tol > 0.0, "config: tol must be positive");
  require(max_iters >= 0, "config: max_iters must be non-negative");
  require(lambda0 > 0.0, "config: lambda0 must be positive");
  require(rho > 0.0 && rho < 1.0, "config: rho must lie in (0, 1)");
  require(n_line_search >= 1, "config: n_line_search must be at least 1");
  require(dt > 0.0, "config: dt must be positive");
  require(snapshot_stride >= 0, "config: snapshot_stride must be non-negative");
  require(!level_set.primitives.empty(), "config: level_set is empty");
}

RunConfig default_config() {
  RunConfig c;
  c.level_set = annulus();
  return c;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"test1", "test2a", "test2b", "test3"};
  return names;
}

RunConfig preset(const std::string& name) {
  RunConfig c = default_config();
  c.name = name;
  if (name == "test1") {
    c.eps = 0.8;
    c.f = 0.0;
    c.tol = 1e-6;
    c.lambda0 = 1.0;
    c.max_iters = 100;
    c.direction = DirectionVariant::Simplified;
  } else if (name == "test2a") {
    c.eps = 0.8;
    c.f = 0.1;
    c.tol = 1e-2;
    c.lambda0 = 0.5;
    c.max_iters = 200;
    c.direction = DirectionVariant::Full;
    c.smooth = true;
  } else if (name == "test2b") {
    c.eps = 0.01;
    c.f = 0.1;
    c.tol = 1e-2;
    c.lambda0 = 1.0;
    c.max_iters = 60;
    c.direction = DirectionVariant::Full;
    c.smooth = true;
    c.normalize = true;
    c.level_set = LevelSetSpec::parse("outer 0 0 2.5; hole -1 -1 0.6; hole 1 -1 0.6; hole -1 1 0.6");
  } else if (name == "test3") {
    c.eps = 0.1;
    c.f = 0.1;
    c.tol = 1e-6;
    c.lambda0 = 1.0;
    c.max_iters = 50;
    c.direction = DirectionVariant::Interpolated;
    c.level_set = LevelSetSpec::parse("outer 0 0 2.5; hole -1 -1 0.6; hole 1 -1 0.6; hole -1 1 0.6");
  } else {
    fail(ErrorCode::Argument, "unknown preset '" + name + "' (test1, test2a, test2b, test3)");
  }
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "name",      "domain_min", "domain_max", "n_divisions",   "mesh_file", "eps",       "f",
      "u0",        "tol",        "max_iters",  "lambda0",       "rho",       "n_line_search",
      "direction", "smooth",     "normalize",  "dt",            "output_dir", "snapshot_stride",
      "level_set"};
  return keys;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "name") c.name = v;
  else if (key == "domain_min") c.domain_min = to_double(key, v);
  else if (key == "domain_max") c.domain_max = to_double(key, v);
  else if (key == "n_divisions") c.n_divisions = to_int(key, v);
  else if (key == "mesh_file") c.mesh_file = v;
  else if (key == "eps") c.eps = to_double(key, v);
  else if (key == "f") c.f = to_double(key, v);
  else if (key == "u0") c.u0 = to_double(key, v);
  else if (key == "tol") c.tol = to_double(key, v);
  else if (key == "max_iters") c.max_iters = to_int(key, v);
  else if (key == "lambda0") c.lambda0 = to_double(key, v);
  else if (key == "rho") c.rho = to_double(key, v);
  else if (key == "n_line_search") c.n_line_search = to_int(key, v);
  else if (key == "direction") c.direction = parse_direction_variant(v);
  else if (key == "smooth") c.smooth = to_bool(key, v);
  else if (key == "normalize") c.normalize = to_bool(key, v);
  else if (key == "dt") c.dt = to_double(key, v);
  else if (key == "output_dir") c.output_dir = v;
  else if (key == "snapshot_stride") c.snapshot_stride = to_int(key, v);
  else if (key == "level_set") c.level_set = LevelSetSpec::parse(v);
  else {
    std::string valid;
    for (const auto& k : config_keys()) valid += (valid.empty() ? "" : ", ") + k;
    fail(ErrorCode::Argument, "config: unknown key '" + key + "'; valid keys: " + valid);
  }
}

std::string get_config_value(const RunConfig& c, const std::string& key) {
  if (key == "name") return c.name;
  if (key == "domain_min") return fmt(c.domain_min);
  if (key == "domain_max") return fmt(c.domain_max);
  if (key == "n_divisions") return std::to_string(c.n_divisions);
  if (key == "mesh_file") return c.mesh_file;
  if (key == "eps") return fmt(c.eps);
  if (key == "f") return fmt(c.f);
  if (key == "u0") return fmt(c.u0);
  if (key == "tol") return fmt(c.tol);
  if (key == "max_iters") return std::to_string(c.max_iters);
  if (key == "lambda0") return fmt(c.lambda0);
  if (key == "rho") return fmt(c.rho);
  if (key == "n_line_search") return std::to_string(c.n_line_search);
  if (key == "direction") return to_string(c.direction);
  if (key == "smooth") return c.smooth ? "true" : "false";
  if (key == "normalize") return c.normalize ? "true" : "false";
  if (key == "dt") return fmt(c.dt);
  if (key == "output_dir") return c.output_dir;
  if (key == "snapshot_stride") return std::to_string(c.snapshot_stride);
  if (key == "level_set") return c.level_set.str();
  fail(ErrorCode::Argument, "config: unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Argument, "config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const RunConfig& c) {
  std::string s;
  for (const auto& k : config_keys()) s += k + " = " + get_config_value(c, k) + "\n";
  return s;
}

}  // namespace platetopo
