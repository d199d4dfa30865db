#include "platetopo/hamiltonian.hpp"

#include <Eigen/LU>
#include <cmath>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {

constexpr double kMinGradient = 1e-8;

struct Field {
  const ScalarField& g;
  const PointLocator& loc;

  Vec2 operator()(const Point2& p, int* tri = nullptr) const {
    const auto t = loc.locate(p);
    if (!t) fail(ErrorCode::Geometry, "trace_orbit: orbit left the box D");
    const Vec2 gr = g.gradient_in(*t, p);
    if (gr.norm() < kMinGradient) fail(ErrorCode::DegenerateGradient, "trace_orbit: |grad g| vanishes on the orbit");
    if (tri) *tri = *t;
    return rot90(gr);
  }
};

Point2 rk4_step(const Field& F, const Point2& z, double h) {
  const Vec2 k1 = F(z);
  const Vec2 k2 = F(z + 0.5 * h * k1);
  const Vec2 k3 = F(z + 0.5 * h * k2);
  const Vec2 k4 = F(z + h * k3);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate exactly m steps of size h.
Orbit integrate_fixed(const Field& F, const Point2& x0, double h, long m) {
  Orbit o;
  o.dt = h;
  o.Z.reserve(m + 1);
  o.tri.reserve(m + 1);
  o.Z.push_back(x0);
  int t0 = 0;
  F(x0, &t0);
  o.tri.push_back(t0);
  Point2 z = x0;
  for (long k = 1; k <= m; ++k) {
    z = rk4_step(F, z, h);
    int t = 0;
    F(z, &t);
    o.Z.push_back(z);
    o.tri.push_back(t);
  }
  o.period = h * static_cast<double>(m);
  o.closure_gap = (o.Z.back() - x0).norm();
  return o;
}

// Time offset that moves z along the local flow v onto the target point.
double time_offset(const Point2& z, const Point2& target, const Vec2& v) { return (target - z).dot(v) / v.squaredNorm(); }

Mat2 step_matrix(const Mat2& A, double dt) { return Mat2::Identity() - dt * A; }

Vec2 solve2(const Mat2& S, const Vec2& rhs) {
  const double det = S.determinant();
  if (std::abs(det) < 1e-14) fail(ErrorCode::DegenerateStep, "singular 2x2 step matrix");
  return Vec2((S(1, 1) * rhs.x() - S(0, 1) * rhs.y()) / det, (S(0, 0) * rhs.y() - S(1, 0) * rhs.x()) / det);
}

}  // namespace

double Orbit::length() const {
  double s = 0.0;
  for (size_t k = 1; k < Z.size(); ++k) s += (Z[k] - Z[k - 1]).norm();
  return s;
}

Orbit trace_orbit(const ScalarField& g, const PointLocator& locator, const Point2& x0, const OrbitOptions& opts) {
  require(g.space().kind() == SpaceKind::P3, "trace_orbit: level set must be P3");
  require(opts.dt > 0.0, "trace_orbit: dt must be positive");
  const auto t0 = locator.locate(x0);
  if (!t0) fail(ErrorCode::Domain, "trace_orbit: start point outside D");
  const Vec2 g0 = g.gradient_in(*t0, x0);
  if (g0.norm() < kMinGradient) fail(ErrorCode::DegenerateGradient, "trace_orbit: |grad g(x0)| vanishes");
  require(std::abs(g.value_in(*t0, x0)) < 1e-6, "trace_orbit: x0 is not on the zero level set");

  const double tol = opts.closure_tol > 0.0 ? opts.closure_tol : std::max(10.0 * opts.dt * g0.norm(), 1e-6);
  const Field F{g, locator};

  // First pass: find the step nearest to the first return.
  Point2 z = x0;
  bool left = false;
  long k = 0, best_k = -1;
  double best_d = 0.0;
  Point2 best_z = x0;
  while (true) {
    if (++k > opts.max_steps) fail(ErrorCode::NoClosure, "trace_orbit: no closure within max_steps");
    z = rk4_step(F, z, opts.dt);
    const double d = (z - x0).norm();
    if (!left) {
      left = d > 10.0 * tol;
      continue;
    }
    if (best_k < 0) {
      if (d < tol) {
        best_k = k;
        best_d = d;
        best_z = z;
      }
      continue;
    }
    if (d < best_d) {
      best_k = k;
      best_d = d;
      best_z = z;
    } else {
      break;
    }
  }
  double T = opts.dt * static_cast<double>(best_k) + time_offset(best_z, x0, F(best_z));

  // Rescaled passes with T = m dt'.
  const long m = std::max<long>(8, std::lround(T / opts.dt));
  Orbit o;
  for (int pass = 0; pass < 3; ++pass) {
    o = integrate_fixed(F, x0, T / static_cast<double>(m), m);
    const double dT = time_offset(o.Z.back(), x0, F(o.Z.back()));
    if (std::abs(dT) <= 1e-14 * T) break;
    if (pass < 2) T += dT;
  }
  if (o.closure_gap > tol) fail(ErrorCode::NoClosure, "trace_orbit: orbit does not close");
  return o;
}

std::vector<Mat2> orbit_jacobians(const Discretization& disc, const ScalarField& g, const Orbit& orbit) {
  const ScalarField h11 = disc.derivative(g, Derivative::D11);
  const ScalarField h12 = disc.derivative(g, Derivative::D12);
  const ScalarField h22 = disc.derivative(g, Derivative::D22);
  std::vector<Mat2> A(orbit.Z.size());
  for (size_t k = 0; k < orbit.Z.size(); ++k) {
    const int t = orbit.tri[k];
    const Point2& p = orbit.Z[k];
    const double a = h11.value_in(t, p), b = h12.value_in(t, p), c = h22.value_in(t, p);
    A[k] << -b, -c, a, b;
  }
  return A;
}

std::vector<Vec2> solve_variation(const std::vector<Mat2>& A, double dt, const std::vector<Vec2>& c) {
  require(A.size() == c.size() && !A.empty(), "solve_variation: size mismatch");
  std::vector<Vec2> W(A.size(), Vec2::Zero());
  for (size_t k = 1; k < A.size(); ++k) W[k] = solve2(step_matrix(A[k], dt), W[k - 1] + dt * c[k]);
  return W;
}

std::vector<Vec2> variation_source(const Discretization& disc, const ScalarField& r, const Orbit& orbit) {
  const ScalarField r1 = disc.derivative(r, Derivative::D1);
  const ScalarField r2 = disc.derivative(r, Derivative::D2);
  std::vector<Vec2> c(orbit.Z.size());
  for (size_t k = 0; k < orbit.Z.size(); ++k) {
    const int t = orbit.tri[k];
    c[k] = Vec2(-r2.value_in(t, orbit.Z[k]), r1.value_in(t, orbit.Z[k]));
  }
  return c;
}

PeriodFactor period_derivative_factor(const Orbit& orbit, const std::vector<Mat2>& A, double grad_norm_end,
                                      double density_end) {
  const int m = orbit.steps();
  require(m >= 1 && static_cast<int>(A.size()) == m + 1, "period_derivative_factor: size mismatch");
  const double dz2 = orbit.Z[m].y() - orbit.Z[m - 1].y();
  if (std::abs(dz2) <= 1e-12)
    fail(ErrorCode::DegenerateStep,
         "period_derivative_factor: vertical velocity vanishes at the seed; re-seed the orbit elsewhere");
  PeriodFactor pf;
  pf.theta_scale = -orbit.dt / dz2;
  pf.mu = pf.theta_scale * grad_norm_end * density_end;
  pf.M_end = solve2(step_matrix(A[m].transpose(), orbit.dt), Vec2(0.0, pf.mu));
  return pf;
}

std::vector<Vec2> adjoint_sweep(const std::vector<Mat2>& A, double dt, const std::vector<Vec2>& b,
                                const Vec2& M_end) {
  require(A.size() == b.size() && !A.empty(), "adjoint_sweep: size mismatch");
  const size_t m = A.size() - 1;
  std::vector<Vec2> M(m + 1, Vec2::Zero());
  M[m] = M_end;
  for (size_t k = m; k >= 1; --k) M[k - 1] = solve2(step_matrix(A[k - 1].transpose(), dt), M[k] + dt * b[k - 1]);
  return M;
}

}  // namespace platetopo
