#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <random>

#include "platetopo/error.hpp"
#include "platetopo/hamiltonian.hpp"

using namespace platetopo;

namespace {

constexpr double kPi = std::numbers::pi;

const Discretization& disc() {
  static const Discretization d(std::make_shared<const TriMesh>(generate_square_mesh(-3, 3, 32)));
  return d;
}

ScalarField field(const PointFunction& f) { return interpolate(disc().p3, f); }

ScalarField unit_circle() {
  return field([](const Point2& x) { return x.squaredNorm() - 1.0; });
}

OrbitOptions with_dt(double dt) {
  OrbitOptions o;
  o.dt = dt;
  return o;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("unit circle orbit is (cos 2t, sin 2t) with period pi") {
  const Orbit o = trace_orbit(unit_circle(), disc().locator, Point2(1, 0), with_dt(1e-4));
  CHECK(std::abs(o.period - kPi) < 1e-6);
  CHECK(o.period == doctest::Approx(o.steps() * o.dt).epsilon(1e-14));
  double err = 0.0;
  for (int k = 0; k <= o.steps(); ++k) {
    const double t = k * o.dt;
    err = std::max(err, (o.Z[k] - Point2(std::cos(2 * t), std::sin(2 * t))).norm());
  }
  CHECK(err < 1e-8);
  CHECK(o.closure_gap < 1e-8);
  CHECK(o.length() == doctest::Approx(2 * kPi).epsilon(1e-6));
}

TEST_CASE("circle period does not depend on radius or center") {
  for (double R : {0.5, 1.0, 2.0}) {
    const Point2 c(0.3, -0.1);
    const ScalarField g = field([&](const Point2& x) { return (x - c).squaredNorm() - R * R; });
    const Orbit o = trace_orbit(g, disc().locator, c + Point2(0, R), with_dt(1e-3));
    CHECK(std::abs(o.period - kPi) < 1e-6);
  }
}

TEST_CASE("ellipse period matches the harmonic-oscillator value") {
  // x' = -8y, y' = 2x  =>  x'' = -16x, period pi/2
  const ScalarField g = field([](const Point2& x) { return x.x() * x.x() + 4 * x.y() * x.y() - 1.0; });
  const Orbit o = trace_orbit(g, disc().locator, Point2(1, 0), with_dt(1e-4));
  CHECK(std::abs(o.period - kPi / 2) < 1e-5);
}

TEST_CASE("level set value is conserved along the orbit") {
  const ScalarField g = field([](const Point2& x) { return x.x() * x.x() + 2 * x.y() * x.y() + 0.3 * x.x() * x.y() - 1.5; });
  const Point2 x0(std::sqrt(1.5), 0.0);
  const Orbit o = trace_orbit(g, disc().locator, x0, with_dt(1e-3));
  double drift = 0.0;
  for (int k = 0; k <= o.steps(); ++k) drift = std::max(drift, std::abs(g.value_in(o.tri[k], o.Z[k])));
  CHECK(drift < 1e-6);
}

TEST_CASE("orbit failures are reported with their codes") {
  const ScalarField g = unit_circle();
  CHECK(code_of([&] { trace_orbit(g, disc().locator, Point2(1.2, 0), with_dt(1e-3)); }) == ErrorCode::Argument);
  CHECK(code_of([&] { trace_orbit(g, disc().locator, Point2(4, 0), with_dt(1e-3)); }) == ErrorCode::Domain);
  OrbitOptions few = with_dt(1e-3);
  few.max_steps = 100;
  CHECK(code_of([&] { trace_orbit(g, disc().locator, Point2(1, 0), few); }) == ErrorCode::NoClosure);
  // a straight line leaves the box
  const ScalarField line = field([](const Point2& x) { return x.x(); });
  CHECK(code_of([&] { trace_orbit(line, disc().locator, Point2(0, 0), with_dt(1e-2)); }) == ErrorCode::Geometry);
  CHECK(code_of([&] { trace_orbit(g, disc().locator, Point2(1, 0), with_dt(0.0)); }) == ErrorCode::Argument);
}

TEST_CASE("variation for r = g is t z'(t)") {
  const ScalarField g = unit_circle();
  const Orbit o = trace_orbit(g, disc().locator, Point2(1, 0), with_dt(1e-4));
  const auto A = orbit_jacobians(disc(), g, o);
  // circle Hessian 2I: A = [[0,-2],[2,0]]
  CHECK((A[o.steps() / 3] - (Mat2() << 0, -2, 2, 0).finished()).norm() < 1e-10);
  const auto W = solve_variation(A, o.dt, variation_source(disc(), g, o));
  CHECK(std::abs(W.back().x()) < 2e-3);
  CHECK(W.back().y() == doctest::Approx(2 * kPi).epsilon(1e-3));
  // zero source, zero variation
  const auto W0 = solve_variation(A, o.dt, variation_source(disc(), ScalarField(disc().p3), o));
  for (const auto& w : W0) CHECK(w.norm() == 0.0);
}

TEST_CASE("variation is linear in the source") {
  const ScalarField g = unit_circle();
  const Orbit o = trace_orbit(g, disc().locator, Point2(1, 0), with_dt(1e-3));
  const auto A = orbit_jacobians(disc(), g, o);
  const ScalarField r1 = field([](const Point2& x) { return std::sin(x.x()) * x.y(); });
  const ScalarField r2 = field([](const Point2& x) { return x.x() * x.x() - x.y(); });
  const ScalarField r12(disc().p3, r1.coeffs() + r2.coeffs());
  const auto a = solve_variation(A, o.dt, variation_source(disc(), r1, o));
  const auto b = solve_variation(A, o.dt, variation_source(disc(), r2, o));
  const auto c = solve_variation(A, o.dt, variation_source(disc(), r12, o));
  double err = 0.0;
  for (size_t k = 0; k < c.size(); ++k) err = std::max(err, (c[k] - a[k] - b[k]).norm());
  CHECK(err < 1e-12);
}

TEST_CASE("period derivative for r = g is -pi") {
  const ScalarField g = unit_circle();
  const Orbit o = trace_orbit(g, disc().locator, Point2(1, 0), with_dt(1e-4));
  const auto A = orbit_jacobians(disc(), g, o);
  const auto W = solve_variation(A, o.dt, variation_source(disc(), g, o));
  const PeriodFactor pf = period_derivative_factor(o, A, 2.0, 1.0);
  CHECK(pf.theta_scale * W.back().y() == doctest::Approx(-kPi).epsilon(1e-2));
  // mu carries dt |grad g| density / (Z_m - Z_{m-1}).y
  CHECK(pf.mu == doctest::Approx(-o.dt / (o.Z.back().y() - o.Z[o.steps() - 1].y()) * 2.0).epsilon(1e-12));
  const Mat2 S = Mat2::Identity() - o.dt * A.back().transpose();
  CHECK((S * pf.M_end - Vec2(0, pf.mu)).norm() < 1e-12);
  // zero density
  const PeriodFactor z = period_derivative_factor(o, A, 2.0, 0.0);
  CHECK(z.mu == 0.0);
  CHECK(z.M_end.norm() == 0.0);
}

TEST_CASE("horizontal final step is a degenerate step") {
  Orbit o;
  o.dt = 0.1;
  o.Z = {Point2(0, 0), Point2(1, 0), Point2(2, 0)};
  o.tri = {0, 0, 0};
  const std::vector<Mat2> A(3, Mat2::Zero());
  try {
    period_derivative_factor(o, A, 1.0, 1.0);
    FAIL("expected a degenerate-step error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateStep);
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("discrete adjoint identity on random data") {
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  const int m = 50;
  const double dt = 0.05;
  std::vector<Mat2> A(m + 1);
  std::vector<Vec2> b(m + 1), c(m + 1);
  for (int k = 0; k <= m; ++k) {
    A[k] << nd(rng), nd(rng), nd(rng), nd(rng);
    b[k] = Vec2(nd(rng), nd(rng));
    c[k] = Vec2(nd(rng), nd(rng));
  }
  const Vec2 Mm(nd(rng), nd(rng));
  const auto W = solve_variation(A, dt, c);
  const auto M = adjoint_sweep(A, dt, b, Mm);
  REQUIRE(W.size() == static_cast<size_t>(m + 1));
  REQUIRE(M.size() == static_cast<size_t>(m + 1));
  CHECK(W[0].norm() == 0.0);
  CHECK((M[m] - Mm).norm() == 0.0);
  // brute-force both sides
  double lhs = 0.0, rhs = 0.0;
  for (int k = 1; k <= m; ++k) lhs += dt * c[k].dot(M[k]);
  for (int k = 0; k < m; ++k) rhs += dt * b[k].dot(W[k]);
  rhs += Mm.dot((Mat2::Identity() - dt * A[m]) * W[m]);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("adjoint sweep basics") {
  const std::vector<Mat2> A(5, Mat2::Identity() * 0.3);
  const auto z = adjoint_sweep(A, 0.1, std::vector<Vec2>(5, Vec2::Zero()), Vec2::Zero());
  for (const auto& v : z) CHECK(v.norm() == 0.0);
  // one step by hand
  Mat2 A0;
  A0 << 1, 2, -1, 0.5;
  const std::vector<Mat2> A1{A0, Mat2::Zero()};
  const std::vector<Vec2> b{Vec2(1, -1), Vec2(9, 9)};
  const auto M = adjoint_sweep(A1, 0.2, b, Vec2(0.5, 2));
  const Vec2 want = (Mat2::Identity() - 0.2 * A0.transpose()).inverse() * (Vec2(0.5, 2) + 0.2 * Vec2(1, -1));
  CHECK((M[0] - want).norm() < 1e-14);
  // singular step matrix
  const std::vector<Mat2> Asing{Mat2::Identity() * 10.0, Mat2::Zero()};
  CHECK(code_of([&] { adjoint_sweep(Asing, 0.1, std::vector<Vec2>(2, Vec2::Zero()), Vec2(1, 1)); }) ==
        ErrorCode::DegenerateStep);
}
