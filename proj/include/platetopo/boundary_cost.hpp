#pragma once

#include <functional>

#include "platetopo/biharmonic.hpp"
#include "platetopo/levelset.hpp"

namespace platetopo {

/// Boundary integrand j(x, s), s standing for the Laplacian of the state.
struct Integrand {
  std::function<double(const Point2&, double)> value;
  std::function<Vec2(const Point2&, double)> grad_x;  // gradient in x
  std::function<double(const Point2&, double)> ds;    // derivative in s

  // j = s^2 / 2.
  static Integrand half_square();
};

struct CostBreakdown {
  double t1 = 0.0;  // int j(x, lap y)
  double t2 = 0.0;  // int y^2
  double t3 = 0.0;  // int (grad y . n)^2, n = grad g / |grad g|
  double eps = 1.0;
  double J = 0.0;   // t1 + t2/eps + t3/eps
  int components = 0;
};

/// State, level set and discrete Laplacian of the state, bundled for pointwise
/// sampling on the free boundary and along orbits.
class CostFields {
 public:
  CostFields(const Discretization& disc, const ScalarField& y, const ScalarField& g);

  struct Sample {
    double y = 0.0;
    Vec2 grad_y = Vec2::Zero();
    Hess hess_y;
    double lap_y = 0.0;              // discrete (P1) Laplacian
    Vec2 grad_lap_y = Vec2::Zero();  // its per-triangle gradient
    Vec2 grad_g = Vec2::Zero();
    double grad_g_norm = 0.0;
    Vec2 n = Vec2::Zero();
    double N = 0.0;  // grad y . n
  };
  // order 1 fills values and gradients; order 2 adds hess_y.
  Sample sample(int t, const Point2& x, int order = 1) const;

  const Discretization& disc() const { return *disc_; }
  const ScalarField& y() const { return *y_; }
  const ScalarField& g() const { return *g_; }
  const ScalarField& lap_y() const { return lap_; }

 private:
  const Discretization* disc_;
  const ScalarField* y_;
  const ScalarField* g_;
  ScalarField lap_;
};

// j + y^2/eps + N^2/eps at a sample.
double cost_density(const CostFields::Sample& s, const Point2& x, const Integrand& j, double eps);

// Visit every Gauss point of every boundary segment: (component, triangle, point, weight).
void for_each_boundary_point(const BoundaryTrace& trace,
                             const std::function<void(int, int, const Point2&, double)>& visit);

CostBreakdown evaluate_cost(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j, double eps);

// Derivative of the cost in the state direction q (an HCT field), trace fixed:
// int d2j * lap q + (2/eps) y q + (2/eps) N (grad q . n).
double cost_derivative_in_state(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j,
                                double eps, const ScalarField& q);

// Right-hand side of the adjoint problem over all HCT dofs; the discrete
// Laplacian enters through the transpose of its matrix.
Eigen::VectorXd adjoint_rhs(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j, double eps);

// Adjoint state p_h; zero for an empty trace.
ScalarField solve_adjoint(const BiharmonicSystem& sys, const CostFields& fields, const BoundaryTrace& trace,
                          const Integrand& j, double eps);

}  // namespace platetopo
