#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "platetopo/error.hpp"
#include "platetopo/biharmonic.hpp"

using namespace platetopo;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Discretization> disc_on(double a, double b, int n) {
  return std::make_shared<const Discretization>(std::make_shared<const TriMesh>(generate_square_mesh(a, b, n)));
}

ScalarField constant(const SpacePtr& s, double v) { return interpolate(s, [v](const Point2&) { return v; }); }

}  // namespace

TEST_CASE("full stiffness reproduces the energy of quadratics") {
  auto disc = disc_on(-3, 3, 16);
  const auto K = assemble_full_stiffness(*disc->hct);
  CHECK((K - Eigen::SparseMatrix<double>(K.transpose())).norm() < 1e-9 * K.norm());
  auto energy = [&](const PointFunction& f, const GradFunction& g) {
    const Eigen::VectorXd w = interpolate(disc->hct, f, g).coeffs();
    return w.dot(K * w);
  };
  // lap(x^2 + y^2) = 4 everywhere on a 6x6 box
  CHECK(energy([](const Point2& p) { return p.squaredNorm(); }, [](const Point2& p) { return Vec2(2 * p); }) ==
        doctest::Approx(16.0 * 36.0).epsilon(1e-10));
  // harmonic quadratic carries no energy
  CHECK(std::abs(energy([](const Point2& p) { return p.x() * p.x() - p.y() * p.y() + p.x() * p.y(); },
                        [](const Point2& p) { return Vec2(2 * p.x() + p.y(), -2 * p.y() + p.x()); })) < 1e-9);
  // affine functions are in the kernel (zero up to rounding against the 576 above)
  CHECK(std::abs(energy([](const Point2& p) { return 1 + p.x() - 2 * p.y(); },
                        [](const Point2&) { return Vec2(1, -2); })) < 1e-12 * 576.0 * K.rows());
}

TEST_CASE("clamped system") {
  auto disc = disc_on(0, 1, 4);
  const BiharmonicSystem sys(disc);
  int clamped = 0;
  for (int i = 0; i < disc->hct->dof_count(); ++i) clamped += disc->hct->is_constrained(i);
  CHECK(sys.free_dof_count() == disc->hct->dof_count() - clamped);
  const auto& K = sys.stiffness();
  CHECK(K.rows() == sys.free_dof_count());
  CHECK((K - Eigen::SparseMatrix<double>(K.transpose())).norm() < 1e-9 * K.norm());
}

TEST_CASE("uniformly loaded clamped square plate") {
  // Classical plate-table value: w_max = 0.00126532 q a^4 / D.
  auto disc = disc_on(0, 1, 16);
  const BiharmonicSystem sys(disc);
  const ScalarField y = sys.solve_state(1.0, constant(disc->p3, -1.0), constant(disc->p1, 0.0));
  CHECK(sys.last_relative_residual() < 1e-10);
  CHECK(evaluate(y, disc->locator, Point2(0.5, 0.5)) == doctest::Approx(0.00126532).epsilon(2e-3));
  // clamped edges
  CHECK(std::abs(evaluate(y, disc->locator, Point2(0.0, 0.3))) < 1e-14);
  CHECK(gradient(y, disc->locator, Point2(0.37, 1.0)).norm() < 1e-13);
}

TEST_CASE("manufactured solution is recovered to high accuracy") {
  auto S = [](double t) { return std::pow(std::sin(kPi * t), 2); };
  auto C = [](double t) { return std::cos(2 * kPi * t); };
  const double p4 = std::pow(kPi, 4);
  const PointFunction f = [&](const Point2& x) {
    return -8 * p4 * (C(x.x()) * S(x.y()) + S(x.x()) * C(x.y())) + 8 * p4 * C(x.x()) * C(x.y());
  };
  auto disc = disc_on(0, 1, 16);
  const BiharmonicSystem sys(disc);
  const ScalarField y = sys.solve_state(f, constant(disc->p3, -1.0), constant(disc->p1, 0.0));
  double err = 0.0;
  for (int v = 0; v < disc->mesh->num_vertices(); ++v) {
    const Point2& x = disc->mesh->vertex(v);
    err = std::max(err, std::abs(y.coeffs()[3 * v] - S(x.x()) * S(x.y())));
  }
  CHECK(err < 5e-3);
}

TEST_CASE("control term enters through the positive part of g") {
  auto disc = disc_on(-1, 1, 8);
  const BiharmonicSystem sys(disc);
  const ScalarField u = constant(disc->p1, 2.0);
  // g <= 0 everywhere: no control contribution
  const ScalarField y0 = sys.solve_state(0.0, constant(disc->p3, -0.5), u);
  CHECK(y0.coeffs().norm() == 0.0);
  // g = 0.5 everywhere: load 0.25 * 2 = 0.5, same as a constant load
  const ScalarField y1 = sys.solve_state(0.0, constant(disc->p3, 0.5), u);
  const ScalarField y2 = sys.solve_state(0.5, constant(disc->p3, -1.0), constant(disc->p1, 0.0));
  CHECK((y1.coeffs() - y2.coeffs()).norm() < 1e-12 * y2.coeffs().norm());
  // a P1 load field equals the constant load
  const ScalarField y3 = sys.solve_state(constant(disc->p1, 0.5), constant(disc->p3, -1.0), constant(disc->p1, 0.0));
  CHECK((y3.coeffs() - y2.coeffs()).norm() < 1e-12 * y2.coeffs().norm());
}

TEST_CASE("sensitivity is the derivative of the state") {
  auto disc = disc_on(-3, 3, 12);
  const BiharmonicSystem sys(disc);
  const ScalarField g = interpolate(disc->p3, [](const Point2& x) { return x.squaredNorm() - 2.0; });
  const ScalarField u = interpolate(disc->p1, [](const Point2& x) { return 1.0 + 0.2 * x.x(); });
  const ScalarField r = interpolate(disc->p3, [](const Point2& x) { return std::sin(x.x()) + 0.3 * x.y(); });
  const ScalarField v = interpolate(disc->p1, [](const Point2& x) { return std::cos(x.y()); });
  const ScalarField q = sys.solve_sensitivity(g, u, r, v);
  const double h = 1e-5;
  auto state = [&](double l) {
    return sys
        .solve_state(0.1, ScalarField(disc->p3, g.coeffs() + l * r.coeffs()),
                     ScalarField(disc->p1, u.coeffs() + l * v.coeffs()))
        .coeffs();
  };
  const Eigen::VectorXd fd = (state(h) - state(-h)) / (2 * h);
  CHECK((fd - q.coeffs()).norm() < 1e-5 * q.coeffs().norm());
}

TEST_CASE("smoothing preserves point symmetry") {
  auto disc = disc_on(-3, 3, 16);
  const BiharmonicSystem sys(disc);
  const ScalarField src = interpolate(disc->p3, [](const Point2& x) { return x.x() * x.x() * x.x() + x.x() * x.y() * x.y(); });
  const ScalarField even =
      interpolate(disc->p3, [](const Point2& x) { return std::cos(x.x()) + x.x() * x.y() - x.y() * x.y(); });
  const ScalarField s_odd = sys.smooth_direction(src);
  const ScalarField s_even = sys.smooth_direction(even);
  CHECK(s_odd.space().kind() == SpaceKind::P3);
  double asym_odd = 0.0, asym_even = 0.0, scale = 0.0;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ud(-2.9, 2.9);
  for (int i = 0; i < 200; ++i) {
    const Point2 p(ud(rng), ud(rng));
    const double a = evaluate(s_odd, disc->locator, p), b = evaluate(s_odd, disc->locator, -p);
    asym_odd = std::max(asym_odd, std::abs(a + b));
    asym_even =
        std::max(asym_even, std::abs(evaluate(s_even, disc->locator, p) - evaluate(s_even, disc->locator, -p)));
    scale = std::max(scale, std::abs(a));
  }
  CHECK(scale > 0.0);
  CHECK(asym_odd < 1e-8 * scale);
  CHECK(asym_even < 1e-8);
  // the HCT intermediate is C1
  const ScalarField h = sys.smooth_hct(src);
  const auto& m = *disc->mesh;
  double jump = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& et = m.edge_triangles(e);
    if (et[1] < 0) continue;
    const Point2 p = 0.3 * m.vertex(m.edge(e).v0) + 0.7 * m.vertex(m.edge(e).v1);
    jump = std::max(jump, (h.gradient_in(et[0], p) - h.gradient_in(et[1], p)).norm());
  }
  CHECK(jump < 1e-9);
}

TEST_CASE("solve rejects a right-hand side of the wrong size") {
  auto disc = disc_on(0, 1, 2);
  const BiharmonicSystem sys(disc);
  CHECK_THROWS_AS(sys.solve(Eigen::VectorXd::Zero(3)), Error);
  CHECK(sys.solve(Eigen::VectorXd::Zero(disc->hct->dof_count())).coeffs().norm() == 0.0);
  CHECK(sys.last_relative_residual() == 0.0);
}
