#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "platetopo/geometry.hpp"

namespace platetopo {

// Symmetric 2x2 Hessian.
struct Hess {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double trace() const { return xx + yy; }
  Mat2 matrix() const {
    Mat2 m;
    m << xx, xy, xy, yy;
    return m;
  }
};

// Values, gradients and Hessians of the local basis of one element at a point.
struct BasisValues {
  int n = 0;
  std::array<double, 12> v{};
  std::array<Vec2, 12> d{};
  std::array<Hess, 12> h{};
};

/// Hsieh-Clough-Tocher macro element.
///
/// The triangle is split at its barycenter into three sub-triangles; sub-triangle
/// k is (C, P_{k+1}, P_{k+2}). On each one the function is a cubic. The twelve
/// local degrees of freedom are ordered
///   [u(P0), ux(P0), uy(P0), u(P1), ux(P1), uy(P1), u(P2), ux(P2), uy(P2),
///    dn(M0), dn(M1), dn(M2)]
/// where M_k is the midpoint of the edge opposite P_k and dn is the derivative
/// along the given (global) edge normal. The internal C1 conditions are
/// eliminated when the element is built, leaving a 12-function basis.
class HctElement {
 public:
  HctElement(const std::array<Point2, 3>& verts, const std::array<Vec2, 3>& edge_normals);

  // Sub-triangle containing a point given its barycentric coordinates in the
  // macro triangle.
  static int sub_triangle(const std::array<double, 3>& bary);

  // order 0: values, 1: + gradients, 2: + Hessians.
  void eval(int sub, const Point2& p, int order, BasisValues& out) const;

  // Largest residual of the defining constraints over all basis functions.
  double construction_residual() const { return residual_; }

 private:
  Point2 center_;
  double scale_ = 1.0;
  Eigen::Matrix<double, 12, 30, Eigen::RowMajor> coef_;
  double residual_ = 0.0;
};

// Quadrature point of the composite rule on a macro triangle: the degree-5
// rule applied on each of the three sub-triangles.
struct MacroQuadPoint {
  std::array<double, 3> bary;  // macro barycentric coordinates
  int sub;
  double weight;  // relative to the macro triangle area
};

const std::vector<MacroQuadPoint>& hct_macro_rule();

}  // namespace platetopo
