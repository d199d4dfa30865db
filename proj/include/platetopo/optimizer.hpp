#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "platetopo/config.hpp"
#include "platetopo/descent.hpp"
#include "platetopo/error.hpp"

namespace platetopo {

struct PlateState {
  ScalarField g;  // P3 level set
  ScalarField u;  // P1 control
  ScalarField y;  // HCT state
  BoundaryTrace trace;
  CostBreakdown cost;
};

/// Mesh, spaces, factorized plate operator and the cost parameters.
class PlateProblem {
 public:
  PlateProblem(MeshPtr mesh, double eps, Load f, Integrand j = Integrand::half_square());

  const Discretization& disc() const { return *disc_; }
  const std::shared_ptr<const Discretization>& disc_ptr() const { return disc_; }
  const BiharmonicSystem& system() const { return sys_; }
  double eps() const { return eps_; }
  const Load& load() const { return f_; }
  const Integrand& integrand() const { return j_; }

  // State solve, boundary extraction and cost. Geometry errors propagate.
  PlateState evaluate(ScalarField g, ScalarField u) const;

  struct DirectionData {
    DescentDirection direction;
    GradientBlocks blocks;  // p and u pointers are cleared
    ScalarField p;
    std::vector<OrbitTrack> tracks;
    std::vector<std::string> orbit_failures;
  };
  DirectionData direction(PlateState& state, DirectionVariant variant, bool smooth, bool normalize,
                          double dt) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  BiharmonicSystem sys_;
  double eps_;
  Load f_;
  Integrand j_;
};

struct GridSearchResult {
  int index = -1;  // -1 when every candidate is invalid
  double lambda = 0.0;
  double value = 0.0;
  int rejected = 0;
};

/// Global minimum of cost(lambda0 * rho^i), i = 0..n-1; nullopt marks an
/// invalid candidate. Ties keep the largest step.
GridSearchResult grid_search(const std::function<std::optional<double>(double)>& cost, double lambda0, double rho,
                             int n);

struct LineSearchResult {
  double lambda = 0.0;
  std::optional<PlateState> state;
  bool decreased = false;
  int rejected = 0;
};

/// Candidates with a non-positive level set on the boundary of D, a
/// boundary-crossing or empty zero set, or a failed solve are rejected.
LineSearchResult line_search(const PlateProblem& problem, const PlateState& current, const DescentDirection& dir,
                             double lambda0, double rho, int n);

enum class StopReason { Tolerance, MaxIters, ZeroDirection, Error };
std::string to_string(StopReason r);

struct IterationRecord {
  int iter = 0;
  CostBreakdown cost;
  double lambda = 0.0;
  double predicted_slope = 0.0;
  bool no_decrease = false;
  int rejected = 0;
  int orbit_failures = 0;
  int reseeds = 0;
  double seconds = 0.0;
};

struct RunRecord {
  RunConfig config;
  std::vector<IterationRecord> history;  // history[0] is the initial state
  StopReason stop = StopReason::MaxIters;
  std::string error;
  ErrorCode error_code = ErrorCode::Argument;
  int error_iter = -1;
  int slope_violations = 0;
  int no_decrease = 0;
  int orbit_failures = 0;
  double seconds = 0.0;

  int iterations() const { return static_cast<int>(history.size()) - 1; }
};

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_iteration(const IterationRecord&, const PlateState&, const std::vector<OrbitTrack>&) {}
  virtual void on_finish(const RunRecord&, const PlateState*) {}
};

// Builds the mesh from the config (generated or read from mesh_file).
MeshPtr build_mesh(const RunConfig& cfg);

// Initial (g, u) of a config on the problem's spaces. Throws when g <= 0
// somewhere on the boundary of D.
std::pair<ScalarField, ScalarField> initial_fields(const RunConfig& cfg, const Discretization& disc);

// The descent loop. Module errors end the run with StopReason::Error.
RunRecord run(const RunConfig& cfg, RunObserver* observer = nullptr);

}  // namespace platetopo
