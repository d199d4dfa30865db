#include "platetopo/descent.hpp"

#include <cmath>

#include "platetopo/error.hpp"

namespace platetopo {

std::string to_string(DirectionVariant v) {
  switch (v) {
    case DirectionVariant::Full: return "full";
    case DirectionVariant::Simplified: return "simplified";
    case DirectionVariant::Interpolated: return "interpolated";
  }
  return "?";
}

DirectionVariant parse_direction_variant(const std::string& name) {
  if (name == "full") return DirectionVariant::Full;
  if (name == "simplified") return DirectionVariant::Simplified;
  if (name == "interpolated") return DirectionVariant::Interpolated;
  fail(ErrorCode::Argument, "unknown direction variant '" + name + "' (full, simplified, interpolated)");
}

GradientQ gradient_q(const BiharmonicSystem& sys, const ScalarField& g, const ScalarField& u, const ScalarField& p) {
  const Discretization& disc = sys.disc();
  const AreaQuadrature& quad = sys.quadrature();
  GradientQ out{Eigen::VectorXd::Zero(disc.p3->dof_count()), Eigen::VectorXd::Zero(disc.p1->dof_count())};
  AreaQuadrature::Values gv, uv, pv, dr, dv;
  for (int t = 0; t < disc.mesh->num_triangles(); ++t) {
    quad.values(g, t, gv);
    bool any = false;
    for (double v : gv) any = any || v > 0.0;
    if (!any) continue;
    quad.values(u, t, uv);
    quad.values(p, t, pv);
    for (int q = 0; q < AreaQuadrature::kPoints; ++q) {
      const double gp = gv[q] > 0.0 ? gv[q] : 0.0;
      dr[q] = -2.0 * gp * uv[q] * pv[q];
      dv[q] = -gp * gp * pv[q];
    }
    quad.accumulate(SpaceKind::P3, t, dr, out.Rq);
    quad.accumulate(SpaceKind::P1, t, dv, out.Vq);
  }
  return out;
}

Vec2 level_set_coefficient(const CostFields::Sample& s, const Point2& x, const Integrand& j, double eps) {
  const double gn = s.grad_g_norm;
  const double scalar = j.value(x, s.lap_y) + (s.y * s.y - s.N * s.N) / eps;
  return (2.0 / eps) * s.N * s.grad_y / gn + scalar * s.grad_g / (gn * gn);
}

Eigen::VectorXd gradient_r(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j, double eps) {
  const Discretization& disc = fields.disc();
  const int n = disc.p3->dof_count();
  Eigen::VectorXd a1 = Eigen::VectorXd::Zero(n), a2 = Eigen::VectorXd::Zero(n);
  BasisValues b;
  for_each_boundary_point(trace, [&](int, int t, const Point2& x, double w) {
    const auto s = fields.sample(t, x);
    if (s.grad_g_norm < 1e-10) fail(ErrorCode::DegenerateGradient, "gradient_r: |grad g| vanishes on the boundary");
    const Vec2 a = w * level_set_coefficient(s, x, j, eps);
    disc.p3->eval_basis(t, x, 0, b);
    const auto dofs = disc.p3->triangle_dofs(t);
    for (int i = 0; i < 10; ++i) {
      a1[dofs[i]] += a.x() * b.v[i];
      a2[dofs[i]] += a.y() * b.v[i];
    }
  });
  return -(disc.d1.transpose() * a1 + disc.d2.transpose() * a2);
}

Vec2 orbit_cost_gradient(const CostFields::Sample& s, const Point2& x, const Mat2& A, const Integrand& j,
                         double eps) {
  const double gn = s.grad_g_norm;
  Mat2 Hg;
  Hg << A(1, 0), A(1, 1), A(1, 1), -A(0, 1);
  const Mat2 Hy = s.hess_y.matrix();
  const double ds = j.ds(x, s.lap_y);
  const Vec2 grad_F = j.grad_x(x, s.lap_y) + ds * s.grad_lap_y + (2.0 / eps) * s.y * s.grad_y +
                      (2.0 / eps) * s.N * (Hy * s.n) + (2.0 / eps) * s.N * (Hg * (s.grad_y - s.N * s.n)) / gn;
  const double F = j.value(x, s.lap_y) + (s.y * s.y + s.N * s.N) / eps;
  return gn * grad_F + F * (A.transpose() * rot90(s.grad_g)) / gn;
}

OrbitTrack track_component(const CostFields& fields, const Polyline& component, const Integrand& j, double eps,
                           const OrbitOptions& opts) {
  const Discretization& disc = fields.disc();
  const ScalarField& g = fields.g();
  OrbitTrack tr;

  Point2 seed = component.seed;
  const auto ts = disc.locator.locate(seed);
  if (!ts) fail(ErrorCode::Domain, "track_component: seed outside D");
  const Vec2 gs = g.gradient_in(*ts, seed);
  if (std::abs(gs.x()) < 0.5 * gs.norm()) {
    double best = -1.0;
    for (int l = 0; l < component.segment_count(); ++l) {
      const double d1 = std::abs(g.gradient_in(component.triangles[l], component.points[l]).x());
      if (d1 > best) {
        best = d1;
        seed = component.points[l];
      }
    }
    tr.reseeded = true;
  }

  tr.orbit = trace_orbit(g, disc.locator, seed, opts);
  tr.A = orbit_jacobians(disc, g, tr.orbit);
  const int m = tr.orbit.steps();
  const double eps_grad = 1e-8;
  tr.b.assign(m + 1, Vec2::Zero());
  for (int k = 0; k < m; ++k) {
    const auto s = fields.sample(tr.orbit.tri[k], tr.orbit.Z[k], 2);
    if (s.grad_g_norm < eps_grad) fail(ErrorCode::DegenerateGradient, "track_component: |grad g| vanishes");
    tr.b[k] = orbit_cost_gradient(s, tr.orbit.Z[k], tr.A[k], j, eps);
  }
  const auto se = fields.sample(tr.orbit.tri[m], tr.orbit.Z[m], 1);
  tr.factor = period_derivative_factor(tr.orbit, tr.A, se.grad_g_norm, cost_density(se, tr.orbit.Z[m], j, eps));
  tr.M = adjoint_sweep(tr.A, tr.orbit.dt, tr.b, tr.factor.M_end);
  return tr;
}

void accumulate_w(const Discretization& disc, const OrbitTrack& track, Eigen::VectorXd& out) {
  const int n = disc.p3->dof_count();
  Eigen::VectorXd psi1 = Eigen::VectorXd::Zero(n), psi2 = Eigen::VectorXd::Zero(n);
  BasisValues b;
  const Orbit& o = track.orbit;
  for (int k = 1; k <= o.steps(); ++k) {
    disc.p3->eval_basis(o.tri[k], o.Z[k], 0, b);
    const auto dofs = disc.p3->triangle_dofs(o.tri[k]);
    for (int i = 0; i < 10; ++i) {
      psi1[dofs[i]] += b.v[i] * track.M[k].x();
      psi2[dofs[i]] += b.v[i] * track.M[k].y();
    }
  }
  out += o.dt * (disc.d2.transpose() * psi1 - disc.d1.transpose() * psi2);
}

GradientW gradient_w(const CostFields& fields, BoundaryTrace& trace, const Integrand& j, double eps,
                     const OrbitOptions& opts) {
  const Discretization& disc = fields.disc();
  GradientW out;
  out.Rw = Eigen::VectorXd::Zero(disc.p3->dof_count());
  if (trace.empty()) return out;
  component_seeds(trace, fields.g());
  for (int c = 0; c < trace.size(); ++c) {
    try {
      OrbitTrack tr = track_component(fields, trace.components[c], j, eps, opts);
      tr.component = c;
      trace.components[c].period = tr.orbit.period;
      accumulate_w(disc, tr, out.Rw);
      out.tracks.push_back(std::move(tr));
    } catch (const Error& e) {
      out.failures.push_back("component " + std::to_string(c) + ": " + e.what());
    }
  }
  return out;
}

double predicted_slope(const GradientBlocks& blocks, const Eigen::VectorXd& R, const Eigen::VectorXd& V) {
  double s = 0.0;
  if (blocks.Rq.size() == R.size()) s -= blocks.Rq.dot(R);
  if (blocks.Rr.size() == R.size()) s -= blocks.Rr.dot(R);
  if (blocks.Rw.size() == R.size()) s -= blocks.Rw.dot(R);
  if (blocks.Vq.size() == V.size()) s -= blocks.Vq.dot(V);
  return s;
}

DescentDirection build_direction(const GradientBlocks& blocks, DirectionVariant variant, bool smooth,
                                 bool normalize, const BiharmonicSystem* sys) {
  DescentDirection d;
  d.variant = variant;
  GradientBlocks used = blocks;
  switch (variant) {
    case DirectionVariant::Full:
      require(blocks.Rq.size() > 0 && blocks.Rr.size() == blocks.Rq.size() && blocks.Rw.size() == blocks.Rq.size(),
              "build_direction: the full variant needs the q, r and w blocks");
      d.R = blocks.Rq + blocks.Rr + blocks.Rw;
      d.V = blocks.Vq;
      break;
    case DirectionVariant::Simplified:
      require(blocks.Rq.size() > 0 && blocks.Rr.size() == blocks.Rq.size(),
              "build_direction: the simplified variant needs the q and r blocks");
      d.R = blocks.Rq + blocks.Rr;
      d.V = blocks.Vq;
      used.Rw.resize(0);
      break;
    case DirectionVariant::Interpolated: {
      require(blocks.p != nullptr && blocks.u != nullptr, "build_direction: the interpolated variant needs p and u");
      const ScalarField& p = *blocks.p;
      const ScalarField& u = *blocks.u;
      const auto& p3 = sys ? sys->disc().p3 : nullptr;
      const auto& p1 = sys ? sys->disc().p1 : nullptr;
      require(p3 != nullptr, "build_direction: the interpolated variant needs the biharmonic system");
      d.R.resize(p3->dof_count());
      for (int i = 0; i < p3->dof_count(); ++i) {
        const int t = p3->node_triangle(i);
        const Point2& x = p3->nodes()[i];
        d.R[i] = -p.value_in(t, x) * u.value_in(t, x);
      }
      d.V.resize(p1->dof_count());
      for (int i = 0; i < p1->dof_count(); ++i) d.V[i] = -p.value_in(p1->node_triangle(i), p1->nodes()[i]);
      used.Rr.resize(0);
      used.Rw.resize(0);
      break;
    }
  }
  if (smooth) {
    require(sys != nullptr, "build_direction: smoothing needs the biharmonic system");
    d.R = sys->smooth_direction(ScalarField(sys->disc().p3, d.R)).coeffs();
    d.smoothed = true;
  }
  if (normalize) {
    const double rn = d.R.size() ? d.R.cwiseAbs().maxCoeff() : 0.0;
    const double vn = d.V.size() ? d.V.cwiseAbs().maxCoeff() : 0.0;
    if (rn > 0.0) d.R /= rn;
    if (vn > 0.0) d.V /= vn;
    d.normalized = true;
  }
  const double rn = d.R.size() ? d.R.cwiseAbs().maxCoeff() : 0.0;
  const double vn = d.V.size() ? d.V.cwiseAbs().maxCoeff() : 0.0;
  d.zero = rn == 0.0 && vn == 0.0;
  d.predicted_slope = predicted_slope(used, d.R, d.V);
  return d;
}

}  // namespace platetopo
