#include "platetopo/hct.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "platetopo/error.hpp"
#include "platetopo/quadrature.hpp"

namespace platetopo {

namespace {

using Row30 = Eigen::Matrix<double, 1, 30>;

struct Mono {
  std::array<double, 10> v, dx, dy, dxx, dxy, dyy;
};

// Cubic monomials in scaled local coordinates and their physical derivatives.
Mono monomials(double xi, double eta, double inv_s, int order) {
  Mono m;
  m.v = {1.0, xi, eta, xi * xi, xi * eta, eta * eta, xi * xi * xi, xi * xi * eta, xi * eta * eta,
         eta * eta * eta};
  if (order >= 1) {
    m.dx = {0.0, 1.0, 0.0, 2 * xi, eta, 0.0, 3 * xi * xi, 2 * xi * eta, eta * eta, 0.0};
    m.dy = {0.0, 0.0, 1.0, 0.0, xi, 2 * eta, 0.0, xi * xi, 2 * xi * eta, 3 * eta * eta};
    for (int i = 0; i < 10; ++i) {
      m.dx[i] *= inv_s;
      m.dy[i] *= inv_s;
    }
  }
  if (order >= 2) {
    const double s2 = inv_s * inv_s;
    m.dxx = {0, 0, 0, 2, 0, 0, 6 * xi, 2 * eta, 0, 0};
    m.dxy = {0, 0, 0, 0, 1, 0, 0, 2 * xi, 2 * eta, 0};
    m.dyy = {0, 0, 0, 0, 0, 2, 0, 0, 2 * xi, 6 * eta};
    for (int i = 0; i < 10; ++i) {
      m.dxx[i] *= s2;
      m.dxy[i] *= s2;
      m.dyy[i] *= s2;
    }
  }
  return m;
}

}  // namespace

HctElement::HctElement(const std::array<Point2, 3>& P, const std::array<Vec2, 3>& normals) {
  center_ = (P[0] + P[1] + P[2]) / 3.0;
  scale_ = std::sqrt(std::abs(orient2(P[0], P[1], P[2])));
  const double inv_s = 1.0 / scale_;

  auto local = [&](const Point2& p) { return Vec2((p - center_) * inv_s); };
  enum Kind { Value, Dx, Dy };
  auto row_for = [&](int sub, const Point2& p, Kind kind) {
    const Vec2 q = local(p);
    const Mono m = monomials(q.x(), q.y(), inv_s, 1);
    Row30 r = Row30::Zero();
    for (int i = 0; i < 10; ++i)
      r(10 * sub + i) = kind == Value ? m.v[i] : (kind == Dx ? m.dx[i] : m.dy[i]);
    return r;
  };

  constexpr int kRows = 51;
  Eigen::Matrix<double, kRows, 30> A = Eigen::Matrix<double, kRows, 30>::Zero();
  Eigen::Matrix<double, kRows, 12> B = Eigen::Matrix<double, kRows, 12>::Zero();
  int row = 0;

  // Vertex values and gradients, imposed on both sub-triangles touching P_j.
  for (int j = 0; j < 3; ++j) {
    for (int sub : {(j + 1) % 3, (j + 2) % 3}) {
      A.row(row) = row_for(sub, P[j], Value);
      B(row++, 3 * j) = 1.0;
      A.row(row) = row_for(sub, P[j], Dx);
      B(row++, 3 * j + 1) = 1.0;
      A.row(row) = row_for(sub, P[j], Dy);
      B(row++, 3 * j + 2) = 1.0;
    }
  }
  // Normal derivatives at outer edge midpoints.
  for (int k = 0; k < 3; ++k) {
    const Point2 mid = 0.5 * (P[(k + 1) % 3] + P[(k + 2) % 3]);
    A.row(row) = normals[k].x() * row_for(k, mid, Dx) + normals[k].y() * row_for(k, mid, Dy);
    B(row++, 9 + k) = 1.0;
  }
  // C1 continuity across the interior edges C-P_j (shared by subs j+1, j+2).
  for (int j = 0; j < 3; ++j) {
    const int a = (j + 1) % 3, b = (j + 2) % 3;
    for (double t : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
      const Point2 p = center_ + t * (P[j] - center_);
      A.row(row++) = row_for(a, p, Value) - row_for(b, p, Value);
    }
    for (double t : {0.0, 0.5, 1.0}) {
      const Point2 p = center_ + t * (P[j] - center_);
      A.row(row++) = row_for(a, p, Dx) - row_for(b, p, Dx);
      A.row(row++) = row_for(a, p, Dy) - row_for(b, p, Dy);
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, kRows, 30>> qr(A);
  if (qr.rank() != 30) fail(ErrorCode::SingularSystem, "HCT element construction is rank deficient");
  const Eigen::Matrix<double, 30, 12> X = qr.solve(B);
  coef_ = X.transpose();
  residual_ = (A * X - B).cwiseAbs().maxCoeff();
}

int HctElement::sub_triangle(const std::array<double, 3>& b) {
  int k = 0;
  if (b[1] < b[k]) k = 1;
  if (b[2] < b[k]) k = 2;
  return k;
}

void HctElement::eval(int sub, const Point2& p, int order, BasisValues& out) const {
  const double inv_s = 1.0 / scale_;
  const Vec2 q = (p - center_) * inv_s;
  const Mono m = monomials(q.x(), q.y(), inv_s, order);
  out.n = 12;
  const int off = 10 * sub;
  for (int i = 0; i < 12; ++i) {
    const double* c = coef_.data() + 30 * i + off;
    double v = 0.0;
    for (int k = 0; k < 10; ++k) v += c[k] * m.v[k];
    out.v[i] = v;
    if (order >= 1) {
      double dx = 0.0, dy = 0.0;
      for (int k = 1; k < 10; ++k) {
        dx += c[k] * m.dx[k];
        dy += c[k] * m.dy[k];
      }
      out.d[i] = Vec2(dx, dy);
    }
    if (order >= 2) {
      double hxx = 0.0, hxy = 0.0, hyy = 0.0;
      for (int k = 3; k < 10; ++k) {
        hxx += c[k] * m.dxx[k];
        hxy += c[k] * m.dxy[k];
        hyy += c[k] * m.dyy[k];
      }
      out.h[i] = Hess{hxx, hxy, hyy};
    }
  }
}

const std::vector<MacroQuadPoint>& hct_macro_rule() {
  static const std::vector<MacroQuadPoint> rule = [] {
    std::vector<MacroQuadPoint> pts;
    const auto& base = quadrature::triangle_degree5();
    for (int k = 0; k < 3; ++k) {
      for (const auto& q : base) {
        // Sub-triangle vertices: C, P_{k+1}, P_{k+2}.
        std::array<double, 3> b{q.bary[0] / 3.0, q.bary[0] / 3.0, q.bary[0] / 3.0};
        b[(k + 1) % 3] += q.bary[1];
        b[(k + 2) % 3] += q.bary[2];
        pts.push_back({b, k, q.weight / 3.0});
      }
    }
    return pts;
  }();
  return rule;
}

}  // namespace platetopo
