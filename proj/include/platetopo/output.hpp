#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "platetopo/optimizer.hpp"

namespace platetopo {

struct CostRow {
  int iter = 0;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, J = 0.0, lambda = 0.0;
  int components = 0;
};

// "iter,t1,t2,t3,J,lambda,components", 17 significant digits.
void write_cost_history(std::ostream& out, const RunRecord& rec);
void write_cost_history(const std::string& path, const RunRecord& rec);
std::vector<CostRow> read_cost_history(std::istream& in);
std::vector<CostRow> read_cost_history(const std::string& path);

// "component,period,steps,closure_gap".
void write_orbit_table(const std::string& path, const std::vector<OrbitTrack>& tracks);

void write_run_summary(const std::string& path, const RunRecord& rec);

// Cost history and run summary into dir (created when missing).
void emit_outputs(const RunRecord& rec, const std::string& dir);

/// Writes per-iteration snapshots (boundary polylines, orbit table, VTK
/// fields) every `stride` iterations plus the final one, and the cost
/// history and summary at the end of the run.
class OutputWriter : public RunObserver {
 public:
  OutputWriter(std::string dir, int stride);
  void on_iteration(const IterationRecord& r, const PlateState& s, const std::vector<OrbitTrack>& tracks) override;
  void on_finish(const RunRecord& rec, const PlateState* last) override;

 private:
  void snapshot(int iter, const PlateState& s, const std::vector<OrbitTrack>& tracks);
  std::string path(const std::string& stem, int iter, const std::string& ext) const;

  std::string dir_;
  int stride_;
  int last_snapshot_ = -1;
};

}  // namespace platetopo
