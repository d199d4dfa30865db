#include "platetopo/output.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out.precision(17);
  return out;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) fail(ErrorCode::Io, "cannot create output directory '" + dir + "'");
}

}  // namespace

void write_cost_history(std::ostream& out, const RunRecord& rec) {
  out.precision(17);
  out << "iter,t1,t2,t3,J,lambda,components\n";
  for (const auto& r : rec.history)
    out << r.iter << ',' << r.cost.t1 << ',' << r.cost.t2 << ',' << r.cost.t3 << ',' << r.cost.J << ',' << r.lambda
        << ',' << r.cost.components << '\n';
}

void write_cost_history(const std::string& path, const RunRecord& rec) {
  auto out = open_out(path);
  write_cost_history(out, rec);
  if (!out) fail(ErrorCode::Io, "error writing '" + path + "'");
}

std::vector<CostRow> read_cost_history(std::istream& in) {
  std::vector<CostRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "iter,t1,t2,t3,J,lambda,components")
    fail(ErrorCode::Io, "cost history: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    CostRow r;
    if (!(ls >> r.iter >> r.t1 >> r.t2 >> r.t3 >> r.J >> r.lambda >> r.components))
      fail(ErrorCode::Io, "cost history: malformed row");
    rows.push_back(r);
  }
  return rows;
}

std::vector<CostRow> read_cost_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read '" + path + "'");
  return read_cost_history(in);
}

void write_orbit_table(const std::string& path, const std::vector<OrbitTrack>& tracks) {
  auto out = open_out(path);
  out << "component,period,steps,closure_gap\n";
  for (const auto& t : tracks)
    out << t.component << ',' << t.orbit.period << ',' << t.orbit.steps() << ',' << t.orbit.closure_gap << '\n';
}

void write_run_summary(const std::string& path, const RunRecord& rec) {
  auto out = open_out(path);
  out << "preset: " << rec.config.name << '\n';
  out << "stop_reason: " << to_string(rec.stop) << '\n';
  if (rec.stop == StopReason::Error) out << "error: " << rec.error << " (iteration " << rec.error_iter << ")\n";
  out << "iterations: " << rec.iterations() << '\n';
  if (!rec.history.empty()) {
    const auto& a = rec.history.front().cost;
    const auto& b = rec.history.back().cost;
    out << "J_initial: " << a.J << '\n';
    out << "J_final: " << b.J << '\n';
    out << "t1_final: " << b.t1 << '\n';
    out << "t2_final: " << b.t2 << '\n';
    out << "t3_final: " << b.t3 << '\n';
    out << "components_initial: " << a.components << '\n';
    out << "components_final: " << b.components << '\n';
  }
  out << "no_decrease_iterations: " << rec.no_decrease << '\n';
  out << "slope_violations: " << rec.slope_violations << '\n';
  out << "orbit_failures: " << rec.orbit_failures << '\n';
  out << "wall_seconds: " << rec.seconds << '\n';
  out << "\n[config]\n" << format_config(rec.config);
}

void emit_outputs(const RunRecord& rec, const std::string& dir) {
  make_dir(dir);
  write_cost_history(dir + "/cost_history.csv", rec);
  write_run_summary(dir + "/run_summary.txt", rec);
}

OutputWriter::OutputWriter(std::string dir, int stride) : dir_(std::move(dir)), stride_(stride) { make_dir(dir_); }

std::string OutputWriter::path(const std::string& stem, int iter, const std::string& ext) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04d.", iter);
  return dir_ + "/" + stem + buf + ext;
}

void OutputWriter::snapshot(int iter, const PlateState& s, const std::vector<OrbitTrack>& tracks) {
  write_trace_csv(path("boundary", iter, "csv"), s.trace);
  if (!tracks.empty()) write_orbit_table(path("orbits", iter, "csv"), tracks);
  write_vtk(path("fields", iter, "vtk"), s.g.space().mesh(), {{"g", &s.g}, {"u", &s.u}, {"y", &s.y}});
  last_snapshot_ = iter;
}

void OutputWriter::on_iteration(const IterationRecord& r, const PlateState& s, const std::vector<OrbitTrack>& tracks) {
  if (stride_ > 0 && r.iter % stride_ == 0) snapshot(r.iter, s, tracks);
}

void OutputWriter::on_finish(const RunRecord& rec, const PlateState* last) {
  if (stride_ > 0 && last && !rec.history.empty() && rec.history.back().iter != last_snapshot_)
    snapshot(rec.history.back().iter, *last, {});
  emit_outputs(rec, dir_);
}

}  // namespace platetopo
