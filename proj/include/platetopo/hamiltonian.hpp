#pragma once

#include <vector>

#include "platetopo/fem.hpp"

namespace platetopo {

/// Discrete periodic orbit of z' = (-d2 g, d1 g) through x0, with T = m dt.
struct Orbit {
  std::vector<Point2> Z;  // Z_0 .. Z_m
  std::vector<int> tri;   // triangle holding each Z_k
  double dt = 0.0;
  double period = 0.0;
  double closure_gap = 0.0;

  int steps() const { return static_cast<int>(Z.size()) - 1; }
  double length() const;
};

struct OrbitOptions {
  double dt = 1e-3;
  double closure_tol = 0.0;  // 0: max(10 dt |grad g(x0)|, 1e-6)
  long max_steps = 2'000'000;
};

/// RK4 integration of the Hamiltonian system of g (a P3 field) from x0.
///
/// The orbit must leave the ball of radius 10*closure_tol around x0 and then
/// re-enter the closure_tol ball. The first-return time is then refined, the
/// step is rescaled to dt' = T/m for the nearest integer m, and the orbit is
/// integrated again with exactly m steps so that T = m dt'.
Orbit trace_orbit(const ScalarField& g, const PointLocator& locator, const Point2& x0, const OrbitOptions& opts);

// A_k = J * H_k with J the rotation by +90 degrees and H_k the discrete (P1)
// Hessian of g at Z_k.
std::vector<Mat2> orbit_jacobians(const Discretization& disc, const ScalarField& g, const Orbit& orbit);

/// Backward Euler for the linearized system:
///   (I - dt A_k) W_k = W_{k-1} + dt c_k,  W_0 = 0.
/// c[0] is ignored.
std::vector<Vec2> solve_variation(const std::vector<Mat2>& A, double dt, const std::vector<Vec2>& c);

// c_k = (-d2^h r, d1^h r)(Z_k) with the discrete derivatives of the P3 field r.
std::vector<Vec2> variation_source(const Discretization& disc, const ScalarField& r, const Orbit& orbit);

struct PeriodFactor {
  double theta_scale = 0.0;  // theta = theta_scale * W_m.y()
  double mu = 0.0;
  Vec2 M_end = Vec2::Zero();  // M_m
};

/// Terminal data of the adjoint recursion. density_end is the cost density
/// at Z_m and grad_norm_end = |grad g(Z_m)|. Throws a degenerate-step error
/// asking for a new seed when Z_m and Z_{m-1} share their second coordinate.
PeriodFactor period_derivative_factor(const Orbit& orbit, const std::vector<Mat2>& A, double grad_norm_end,
                                      double density_end);

/// Backward recursion M_{k-1} = (I - dt A_{k-1}^T)^{-1} (M_k + dt b_{k-1}),
/// starting from M_m. Returns M_0 .. M_m; b[m] is ignored.
std::vector<Vec2> adjoint_sweep(const std::vector<Mat2>& A, double dt, const std::vector<Vec2>& b,
                                const Vec2& M_end);

}  // namespace platetopo
