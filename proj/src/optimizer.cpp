#include "platetopo/optimizer.hpp"

#include <chrono>
#include <cmath>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PlateProblem::PlateProblem(MeshPtr mesh, double eps, Load f, Integrand j)
    : disc_(std::make_shared<const Discretization>(std::move(mesh))),
      sys_(disc_),
      eps_(eps),
      f_(std::move(f)),
      j_(std::move(j)) {
  require(eps > 0.0, "PlateProblem: eps must be positive");
}

PlateState PlateProblem::evaluate(ScalarField g, ScalarField u) const {
  ScalarField y = sys_.solve_state(f_, g, u);
  BoundaryTrace trace = extract_boundary(g);
  const CostFields fields(*disc_, y, g);
  CostBreakdown cost = evaluate_cost(fields, trace, j_, eps_);
  return PlateState{std::move(g), std::move(u), std::move(y), std::move(trace), cost};
}

PlateProblem::DirectionData PlateProblem::direction(PlateState& s, DirectionVariant variant, bool smooth,
                                                    bool normalize, double dt) const {
  const CostFields fields(*disc_, s.y, s.g);
  DirectionData out{DescentDirection{}, GradientBlocks{}, solve_adjoint(sys_, fields, s.trace, j_, eps_), {}, {}};
  GradientQ q = gradient_q(sys_, s.g, s.u, out.p);
  out.blocks.Rq = std::move(q.Rq);
  out.blocks.Vq = std::move(q.Vq);
  if (variant != DirectionVariant::Interpolated) out.blocks.Rr = gradient_r(fields, s.trace, j_, eps_);
  if (variant == DirectionVariant::Full) {
    OrbitOptions opts;
    opts.dt = dt;
    GradientW w = gradient_w(fields, s.trace, j_, eps_, opts);
    out.blocks.Rw = std::move(w.Rw);
    out.tracks = std::move(w.tracks);
    out.orbit_failures = std::move(w.failures);
  }
  out.blocks.p = &out.p;
  out.blocks.u = &s.u;
  out.direction = build_direction(out.blocks, variant, smooth, normalize, &sys_);
  out.blocks.p = nullptr;
  out.blocks.u = nullptr;
  return out;
}

GridSearchResult grid_search(const std::function<std::optional<double>(double)>& cost, double lambda0, double rho,
                             int n) {
  require(n >= 1 && lambda0 > 0.0 && rho > 0.0 && rho < 1.0, "grid_search: invalid parameters");
  GridSearchResult best;
  double lambda = lambda0;
  for (int i = 0; i < n; ++i, lambda *= rho) {
    const auto v = cost(lambda);
    if (!v || !std::isfinite(*v)) {
      ++best.rejected;
      continue;
    }
    if (best.index < 0 || *v < best.value) {
      best.index = i;
      best.lambda = lambda;
      best.value = *v;
    }
  }
  return best;
}

LineSearchResult line_search(const PlateProblem& problem, const PlateState& current, const DescentDirection& dir,
                             double lambda0, double rho, int n) {
  LineSearchResult out;
  std::optional<PlateState> best;
  const GridSearchResult gs = grid_search(
      [&](double lambda) -> std::optional<double> {
        ScalarField g(current.g.space_ptr(), current.g.coeffs() + lambda * dir.R);
        if (!positive_on_box_boundary(g)) return std::nullopt;
        ScalarField u(current.u.space_ptr(), current.u.coeffs() + lambda * dir.V);
        try {
          PlateState s = problem.evaluate(std::move(g), std::move(u));
          if (s.trace.empty()) return std::nullopt;
          const double J = s.cost.J;
          if (!best || J < best->cost.J) best = std::move(s);
          return J;
        } catch (const Error&) {
          return std::nullopt;
        }
      },
      lambda0, rho, n);
  out.rejected = gs.rejected;
  if (gs.index < 0) return out;
  out.lambda = gs.lambda;
  out.state = std::move(best);
  out.decreased = gs.value < current.cost.J;
  return out;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::ZeroDirection: return "converged_zero_direction";
    case StopReason::Error: return "error";
  }
  return "?";
}

MeshPtr build_mesh(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) return std::make_shared<const TriMesh>(read_mesh_file(cfg.mesh_file));
  return std::make_shared<const TriMesh>(generate_square_mesh(cfg.domain_min, cfg.domain_max, cfg.n_divisions));
}

std::pair<ScalarField, ScalarField> initial_fields(const RunConfig& cfg, const Discretization& disc) {
  ScalarField g = interpolate(disc.p3, [&](const Point2& x) { return cfg.level_set(x); });
  if (!positive_on_box_boundary(g))
    fail(ErrorCode::Argument, "initial level set must be positive on the boundary of D");
  ScalarField u = interpolate(disc.p1, [&](const Point2&) { return cfg.u0; });
  return {std::move(g), std::move(u)};
}

RunRecord run(const RunConfig& cfg, RunObserver* observer) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = cfg;
  std::optional<PlateState> state;
  int iter = 0;
  try {
    const PlateProblem problem(build_mesh(cfg), cfg.eps, Load(cfg.f));
    auto [g0, u0] = initial_fields(cfg, problem.disc());
    state = problem.evaluate(std::move(g0), std::move(u0));
    {
      IterationRecord r0;
      r0.cost = state->cost;
      r0.seconds = seconds_since(t_start);
      rec.history.push_back(r0);
      if (observer) observer->on_iteration(r0, *state, {});
    }
    rec.stop = StopReason::MaxIters;
    for (iter = 1; iter <= cfg.max_iters; ++iter) {
      const auto t_iter = std::chrono::steady_clock::now();
      auto dd = problem.direction(*state, cfg.direction, cfg.smooth, cfg.normalize, cfg.dt);
      const DescentDirection& d = dd.direction;
      if (d.zero) {
        rec.stop = StopReason::ZeroDirection;
        break;
      }
      if (cfg.direction != DirectionVariant::Interpolated && !(d.predicted_slope < 0.0)) ++rec.slope_violations;
      LineSearchResult ls = line_search(problem, *state, d, cfg.lambda0, cfg.rho, cfg.n_line_search);
      if (!ls.state) fail(ErrorCode::Geometry, "line search: every candidate step was rejected");

      IterationRecord r;
      r.iter = iter;
      r.cost = ls.state->cost;
      r.lambda = ls.lambda;
      r.predicted_slope = d.predicted_slope;
      r.no_decrease = !ls.decreased;
      r.rejected = ls.rejected;
      r.orbit_failures = static_cast<int>(dd.orbit_failures.size());
      for (const auto& t : dd.tracks) r.reseeds += t.reseeded ? 1 : 0;
      rec.no_decrease += r.no_decrease ? 1 : 0;
      rec.orbit_failures += r.orbit_failures;
      const double dJ = ls.state->cost.J - state->cost.J;
      state = std::move(ls.state);
      r.seconds = seconds_since(t_iter);
      rec.history.push_back(r);
      if (observer) observer->on_iteration(r, *state, dd.tracks);
      if (std::abs(dJ) < cfg.tol) {
        rec.stop = StopReason::Tolerance;
        break;
      }
    }
  } catch (const Error& e) {
    rec.stop = StopReason::Error;
    rec.error = e.what();
    rec.error_code = e.code();
    rec.error_iter = iter;
  }
  rec.seconds = seconds_since(t_start);
  if (observer) observer->on_finish(rec, state ? &*state : nullptr);
  return rec;
}

}  // namespace platetopo
