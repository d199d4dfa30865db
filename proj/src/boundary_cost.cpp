#include "platetopo/boundary_cost.hpp"

#include "platetopo/error.hpp"
#include "platetopo/quadrature.hpp"

namespace platetopo {

namespace {

constexpr double kMinGradient = 1e-10;

void check_gradient(const CostFields::Sample& s) {
  if (s.grad_g_norm < kMinGradient)
    fail(ErrorCode::DegenerateGradient, "boundary cost: |grad g| vanishes on the free boundary");
}

}  // namespace

Integrand Integrand::half_square() {
  return {[](const Point2&, double s) { return 0.5 * s * s; },
          [](const Point2&, double) { return Vec2(Vec2::Zero()); },
          [](const Point2&, double s) { return s; }};
}

CostFields::CostFields(const Discretization& disc, const ScalarField& y, const ScalarField& g)
    : disc_(&disc), y_(&y), g_(&g), lap_(disc.derivative(y, Derivative::Laplacian)) {
  require(g.space().kind() == SpaceKind::P3, "CostFields: level set must be P3");
  require(g.space().mesh_ptr() == disc.mesh, "CostFields: mesh mismatch");
}

CostFields::Sample CostFields::sample(int t, const Point2& x, int order) const {
  Sample s;
  const auto jy = y_->jet_in(t, x, order >= 2 ? 2 : 1);
  s.y = jy.value;
  s.grad_y = jy.grad;
  s.hess_y = jy.hess;
  const auto jl = lap_.jet_in(t, x, 1);
  s.lap_y = jl.value;
  s.grad_lap_y = jl.grad;
  s.grad_g = g_->gradient_in(t, x);
  s.grad_g_norm = s.grad_g.norm();
  if (s.grad_g_norm > 0.0) s.n = s.grad_g / s.grad_g_norm;
  s.N = s.grad_y.dot(s.n);
  return s;
}

double cost_density(const CostFields::Sample& s, const Point2& x, const Integrand& j, double eps) {
  return j.value(x, s.lap_y) + (s.y * s.y + s.N * s.N) / eps;
}

void for_each_boundary_point(const BoundaryTrace& trace,
                             const std::function<void(int, int, const Point2&, double)>& visit) {
  const auto& rule = quadrature::gauss3();
  for (int c = 0; c < trace.size(); ++c) {
    const Polyline& poly = trace.components[c];
    for (int l = 0; l < poly.segment_count(); ++l) {
      const Point2& a = poly.points[l];
      const Point2& b = poly.points[l + 1];
      const double len = (b - a).norm();
      if (len == 0.0) continue;
      for (const auto& q : rule) visit(c, poly.triangles[l], a + q.t * (b - a), q.weight * len);
    }
  }
}

CostBreakdown evaluate_cost(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j, double eps) {
  require(eps > 0.0, "evaluate_cost: eps must be positive");
  CostBreakdown c;
  c.eps = eps;
  c.components = trace.size();
  for_each_boundary_point(trace, [&](int, int t, const Point2& x, double w) {
    const auto s = fields.sample(t, x);
    check_gradient(s);
    c.t1 += w * j.value(x, s.lap_y);
    c.t2 += w * s.y * s.y;
    c.t3 += w * s.N * s.N;
  });
  c.J = c.t1 + c.t2 / eps + c.t3 / eps;
  return c;
}

double cost_derivative_in_state(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j,
                                double eps, const ScalarField& q) {
  const ScalarField lap_q = fields.disc().derivative(q, Derivative::Laplacian);
  double d = 0.0;
  for_each_boundary_point(trace, [&](int, int t, const Point2& x, double w) {
    const auto s = fields.sample(t, x);
    check_gradient(s);
    const auto jq = q.jet_in(t, x, 1);
    d += w * (j.ds(x, s.lap_y) * lap_q.value_in(t, x) + (2.0 / eps) * s.y * jq.value +
              (2.0 / eps) * s.N * jq.grad.dot(s.n));
  });
  return d;
}

Eigen::VectorXd adjoint_rhs(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j, double eps) {
  const Discretization& disc = fields.disc();
  const FeSpace& hct = *disc.hct;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(hct.dof_count());
  Eigen::VectorXd lap_weights = Eigen::VectorXd::Zero(disc.p1->dof_count());
  BasisValues b, b1;
  for_each_boundary_point(trace, [&](int, int t, const Point2& x, double w) {
    const auto s = fields.sample(t, x);
    check_gradient(s);
    const double a = w * j.ds(x, s.lap_y);
    if (a != 0.0) {
      disc.p1->eval_basis(t, x, 0, b1);
      const auto d1 = disc.p1->triangle_dofs(t);
      for (int i = 0; i < 3; ++i) lap_weights[d1[i]] += a * b1.v[i];
    }
    hct.eval_basis(t, x, 1, b);
    const auto dofs = hct.triangle_dofs(t);
    for (int i = 0; i < 12; ++i)
      rhs[dofs[i]] += w * (2.0 / eps) * (s.y * b.v[i] + s.N * b.d[i].dot(s.n));
  });
  rhs += disc.laplacian.transpose() * lap_weights;
  return rhs;
}

ScalarField solve_adjoint(const BiharmonicSystem& sys, const CostFields& fields, const BoundaryTrace& trace,
                          const Integrand& j, double eps) {
  require(eps > 0.0, "solve_adjoint: eps must be positive");
  if (trace.empty()) return ScalarField(sys.disc().hct);
  return sys.solve(adjoint_rhs(fields, trace, j, eps));
}

}  // namespace platetopo
