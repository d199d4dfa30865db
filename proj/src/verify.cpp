#include "platetopo/verify.hpp"

#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "platetopo/descent.hpp"
#include "platetopo/error.hpp"

namespace platetopo {

namespace {

using std::numbers::pi;

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::shared_ptr<const Discretization> square_disc(double a, double b, int n) {
  return std::make_shared<const Discretization>(std::make_shared<const TriMesh>(generate_square_mesh(a, b, n)));
}

ScalarField circle_level_set(const Discretization& d, double cx, double cy, double R) {
  return interpolate(d.p3, [=](const Point2& x) { return (x.x() - cx) * (x.x() - cx) + (x.y() - cy) * (x.y() - cy) - R * R; });
}

CheckResult orbit_period() {
  const auto d = square_disc(-3, 3, 64);
  const ScalarField g = circle_level_set(*d, 0, 0, 1);
  OrbitOptions opts;
  opts.dt = 1e-4;
  const auto t0 = std::chrono::steady_clock::now();
  const Orbit o = trace_orbit(g, d->locator, Point2(1, 0), opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double err = 0.0;
  for (int k = 0; k <= o.steps(); ++k) {
    const double t = k * o.dt;
    err = std::max(err, (o.Z[k] - Point2(std::cos(2 * t), std::sin(2 * t))).norm());
  }
  const double perr = std::abs(o.period - pi);
  return {"orbit_circle_period", perr < 1e-6 && err < 1e-8 && secs < 1.0,
          "|T-pi|=" + num(perr) + " max|z-exact|=" + num(err) + " time=" + num(secs) + "s"};
}

CheckResult orbit_radius_independence() {
  const auto d = square_disc(-3, 3, 64);
  double worst = 0.0;
  for (double R : {0.5, 1.0, 2.0}) {
    const ScalarField g = circle_level_set(*d, 0, 0, R);
    OrbitOptions opts;
    opts.dt = 1e-4;
    worst = std::max(worst, std::abs(trace_orbit(g, d->locator, Point2(R, 0), opts).period - pi));
  }
  return {"orbit_period_radius_independent", worst < 1e-6, "max |T-pi|=" + num(worst)};
}

CheckResult period_derivative() {
  const auto d = square_disc(-3, 3, 64);
  const ScalarField g = circle_level_set(*d, 0, 0, 1);
  OrbitOptions opts;
  opts.dt = 1e-4;
  const Orbit o = trace_orbit(g, d->locator, Point2(1, 0), opts);
  const auto A = orbit_jacobians(*d, g, o);
  const auto W = solve_variation(A, o.dt, variation_source(*d, g, o));
  const PeriodFactor pf = period_derivative_factor(o, A, 2.0, 0.0);
  const double theta = pf.theta_scale * W.back().y();
  const double e1 = std::abs(theta + pi) / pi;
  const double e2 = std::abs(W.back().y() - 2 * pi) / (2 * pi);
  return {"period_derivative", e1 < 0.01 && e2 < 1e-3,
          "theta=" + num(theta) + " (rel err " + num(e1) + "), W_m.y=" + num(W.back().y()) + " (rel err " + num(e2) + ")"};
}

CheckResult hct_continuity() {
  const auto d = square_disc(-1, 1, 8);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  Eigen::VectorXd c(d->hct->dof_count());
  for (int i = 0; i < c.size(); ++i) c[i] = U(rng);
  const ScalarField f(d->hct, c);
  const TriMesh& m = *d->mesh;
  double jump = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& et = m.edge_triangles(e);
    if (et[1] < 0) continue;
    for (double s : {0.13, 0.5, 0.77}) {
      const Point2 x = (1 - s) * m.vertex(m.edge(e).v0) + s * m.vertex(m.edge(e).v1);
      const auto a = f.jet_in(et[0], x, 1), b = f.jet_in(et[1], x, 1);
      jump = std::max({jump, std::abs(a.value - b.value), (a.grad - b.grad).norm()});
    }
  }
  return {"hct_c1_continuity", jump < 1e-9, "max jump=" + num(jump)};
}

CheckResult stiffness_quadratic() {
  const auto d = square_disc(-3, 3, 16);
  const ScalarField w = interpolate(d->hct, [](const Point2& x) { return x.squaredNorm(); },
                                    [](const Point2& x) { return Vec2(2 * x); });
  const Eigen::SparseMatrix<double> K = assemble_full_stiffness(*d->hct);
  const double e = w.coeffs().dot(K * w.coeffs());
  const double rel = std::abs(e - 16 * 36) / (16 * 36);
  return {"stiffness_quadratic_energy", rel < 1e-8, "w'Kw=" + num(e) + " (rel err " + num(rel) + ")"};
}

double manufactured_error(int n) {
  const auto d = square_disc(0, 1, n);
  const BiharmonicSystem sys(d);
  auto S = [](double t) { return std::sin(pi * t) * std::sin(pi * t); };
  auto C = [](double t) { return std::cos(2 * pi * t); };
  const double p4 = std::pow(pi, 4);
  const PointFunction f = [&](const Point2& x) {
    return -8 * p4 * (C(x.x()) * S(x.y()) + S(x.x()) * C(x.y())) + 8 * p4 * C(x.x()) * C(x.y());
  };
  const ScalarField g = interpolate(d->p3, [](const Point2&) { return -1.0; });
  const ScalarField u(d->p1);
  const ScalarField y = sys.solve_state(Load(f), g, u);
  const AreaQuadrature& q = sys.quadrature();
  BasisValues b;
  double err = 0.0;
  for (int t = 0; t < d->mesh->num_triangles(); ++t) {
    const auto dofs = d->hct->triangle_dofs(t);
    for (int k = 0; k < AreaQuadrature::kPoints; ++k) {
      const Point2& x = q.position(t, k);
      d->hct->eval_basis(t, x, 2, b);
      double lap = 0.0;
      for (int i = 0; i < 12; ++i) lap += y.coeffs()[dofs[i]] * b.h[i].trace();
      const double exact = 2 * pi * pi * (C(x.x()) * S(x.y()) + S(x.x()) * C(x.y()));
      err += q.weight(t, k) * (lap - exact) * (lap - exact);
    }
  }
  return std::sqrt(err);
}

CheckResult manufactured_convergence() {
  const double e8 = manufactured_error(8), e16 = manufactured_error(16), e32 = manufactured_error(32);
  const double r1 = e8 / e16, r2 = e16 / e32;
  return {"biharmonic_manufactured_convergence", r1 >= 3 && r2 >= 3,
          "errors " + num(e8) + ", " + num(e16) + ", " + num(e32) + "; ratios " + num(r1) + ", " + num(r2)};
}

CheckResult duality() {
  const auto d = square_disc(-3, 3, 32);
  const BiharmonicSystem sys(d);
  const ScalarField g = interpolate(d->p3, [](const Point2& x) {
    const double r2 = (x - Point2(-0.8, -0.8)).squaredNorm();
    return std::max(0.36 - r2, r2 - 1.8 * 1.8);
  });
  const ScalarField u = interpolate(d->p1, [](const Point2& x) { return 1.0 + 0.3 * x.x() - 0.2 * x.y(); });
  const ScalarField y = sys.solve_state(Load(0.1), g, u);
  const BoundaryTrace trace = extract_boundary(g);
  const CostFields fields(*d, y, g);
  const Integrand j = Integrand::half_square();
  const double eps = 0.8;
  const ScalarField p = solve_adjoint(sys, fields, trace, j, eps);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd rc(d->p3->dof_count()), vc(d->p1->dof_count());
    for (int i = 0; i < rc.size(); ++i) rc[i] = U(rng);
    for (int i = 0; i < vc.size(); ++i) vc[i] = U(rng);
    const ScalarField r(d->p3, rc), v(d->p1, vc);
    const ScalarField q = sys.solve_sensitivity(g, u, r, v);
    const GradientQ gq = gradient_q(sys, g, u, p);
    const double lhs = -gq.Rq.dot(rc) - gq.Vq.dot(vc);
    const double rhs = cost_derivative_in_state(fields, trace, j, eps, q);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
  }
  return {"adjoint_duality_identity", worst < 1e-8, "max rel err=" + num(worst)};
}

CheckResult adjoint_recursion() {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  const int m = 50;
  const double dt = 0.05;
  std::vector<Mat2> A(m + 1);
  std::vector<Vec2> b(m + 1), c(m + 1);
  for (int k = 0; k <= m; ++k) {
    A[k] << U(rng), U(rng), U(rng), U(rng);
    b[k] = Vec2(U(rng), U(rng));
    c[k] = Vec2(U(rng), U(rng));
  }
  const Vec2 e(U(rng), U(rng));
  const auto W = solve_variation(A, dt, c);
  const Mat2 Bm = Mat2::Identity() - dt * A[m].transpose();
  const auto M = adjoint_sweep(A, dt, b, Bm.inverse() * e);
  double lhs = 0.0, rhs = e.dot(W[m]);
  for (int k = 1; k <= m; ++k) lhs += dt * c[k].dot(M[k]);
  for (int k = 1; k < m; ++k) rhs += dt * b[k].dot(W[k]);
  const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
  return {"adjoint_recursion_identity", err < 1e-10, "rel err=" + num(err)};
}

CheckResult boundary_length() {
  const auto d = square_disc(-3, 3, 64);
  double worst = 0.0;
  for (double R : {0.6, 1.0, 2.5}) {
    const BoundaryTrace tr = extract_boundary(circle_level_set(*d, 0.1, -0.2, R));
    if (tr.size() != 1) return {"boundary_length_circle", false, "expected one component"};
    worst = std::max(worst, std::abs(tr.length() - 2 * pi * R) / (2 * pi * R));
  }
  return {"boundary_length_circle", worst < 0.01, "max rel err=" + num(worst)};
}

CheckResult synthetic_cost() {
  const auto d = square_disc(-3, 3, 64);
  const ScalarField y = interpolate(d->hct, [](const Point2& x) { return x.squaredNorm(); },
                                    [](const Point2& x) { return Vec2(2 * x); });
  const ScalarField g = circle_level_set(*d, 0, 0, 1);
  const CostBreakdown c = evaluate_cost(CostFields(*d, y, g), extract_boundary(g), Integrand::half_square(), 1.0);
  const double e1 = std::abs(c.t1 - 16 * pi) / (16 * pi);
  const double e2 = std::abs(c.t2 - 2 * pi) / (2 * pi);
  const double e3 = std::abs(c.t3 - 8 * pi) / (8 * pi);
  return {"boundary_cost_circle", e1 < 0.02 && e2 < 0.02 && e3 < 0.02,
          "t1=" + num(c.t1) + " t2=" + num(c.t2) + " t3=" + num(c.t3)};
}

}  // namespace

std::vector<CheckResult> run_property_suite(const std::function<void(const CheckResult&)>& progress) {
  using Check = CheckResult (*)();
  const std::vector<std::pair<const char*, Check>> checks{
      {"orbit_circle_period", orbit_period},
      {"orbit_period_radius_independent", orbit_radius_independence},
      {"period_derivative", period_derivative},
      {"hct_c1_continuity", hct_continuity},
      {"stiffness_quadratic_energy", stiffness_quadratic},
      {"biharmonic_manufactured_convergence", manufactured_convergence},
      {"adjoint_duality_identity", duality},
      {"adjoint_recursion_identity", adjoint_recursion},
      {"boundary_length_circle", boundary_length},
      {"boundary_cost_circle", synthetic_cost},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {name, false, std::string("exception: ") + e.what()};
    }
    out.push_back(r);
    if (progress) progress(r);
  }
  return out;
}

}  // namespace platetopo
