#include <doctest.h>

#include <cmath>
#include <random>

#include "platetopo/fem.hpp"
#include "platetopo/hct.hpp"

using namespace platetopo;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

const std::array<Point2, 3> kTri{Point2(0.2, -0.1), Point2(1.3, 0.4), Point2(0.1, 1.1)};

std::array<Vec2, 3> outward_normals(const std::array<Point2, 3>& P) {
  std::array<Vec2, 3> n;
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = P[(k + 2) % 3] - P[(k + 1) % 3];
    n[k] = Vec2(e.y(), -e.x()).normalized();
  }
  return n;
}

Point2 at(const std::array<Point2, 3>& P, const std::array<double, 3>& b) {
  return b[0] * P[0] + b[1] * P[1] + b[2] * P[2];
}

}  // namespace

TEST_CASE("macro rule weights sum to one and integrate degree-5 monomials exactly") {
  const auto& rule = hct_macro_rule();
  CHECK(rule.size() == 21);
  double s = 0.0;
  for (const auto& q : rule) s += q.weight;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  // int_T l1^a l2^b = 2|T| a! b! / (a+b+2)!
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b) {
      double num = 0.0;
      for (const auto& q : rule) num += q.weight * std::pow(q.bary[1], a) * std::pow(q.bary[2], b);
      CHECK(num == doctest::Approx(2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)).epsilon(1e-13));
    }
}

TEST_CASE("sub-triangle selection") {
  // sub-triangle k is the one opposite vertex k
  CHECK(HctElement::sub_triangle({0.1, 0.5, 0.4}) == 0);
  CHECK(HctElement::sub_triangle({0.5, 0.1, 0.4}) == 1);
  CHECK(HctElement::sub_triangle({0.4, 0.5, 0.1}) == 2);
}

TEST_CASE("basis functions are dual to the twelve degrees of freedom") {
  const auto n = outward_normals(kTri);
  const HctElement el(kTri, n);
  CHECK(el.construction_residual() < 1e-10);
  BasisValues b;
  // Vertex k sits in sub-triangles k+1 and k+2; use one of them.
  for (int k = 0; k < 3; ++k) {
    std::array<double, 3> bary{0, 0, 0};
    bary[k] = 1.0;
    el.eval((k + 1) % 3, kTri[k], 1, b);
    for (int i = 0; i < 12; ++i) {
      CHECK(b.v[i] == doctest::Approx(i == 3 * k ? 1.0 : 0.0).epsilon(1e-10));
      CHECK(b.d[i].x() == doctest::Approx(i == 3 * k + 1 ? 1.0 : 0.0).epsilon(1e-10));
      CHECK(b.d[i].y() == doctest::Approx(i == 3 * k + 2 ? 1.0 : 0.0).epsilon(1e-10));
    }
    const Point2 mid = 0.5 * (kTri[(k + 1) % 3] + kTri[(k + 2) % 3]);
    el.eval(k, mid, 1, b);
    for (int i = 0; i < 12; ++i) {
      if (i < 9) continue;
      CHECK(b.d[i].dot(n[k]) == doctest::Approx(i == 9 + k ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("basis is C1 across the internal edges of the macro triangle") {
  const HctElement el(kTri, outward_normals(kTri));
  BasisValues a, b;
  // segment from the barycenter to P0 is shared by sub-triangles 1 and 2
  for (double s : {0.1, 0.37, 0.8}) {
    const std::array<double, 3> bary{1.0 / 3 + s * 2.0 / 3, (1 - s) / 3, (1 - s) / 3};
    const Point2 p = at(kTri, bary);
    el.eval(1, p, 1, a);
    el.eval(2, p, 1, b);
    for (int i = 0; i < 12; ++i) {
      CHECK(a.v[i] == doctest::Approx(b.v[i]).epsilon(1e-10));
      CHECK((a.d[i] - b.d[i]).norm() < 1e-9);
    }
  }
}

TEST_CASE("global HCT fields are C1 across mesh edges") {
  auto mesh = std::make_shared<const TriMesh>(generate_square_mesh(-1, 1, 4));
  auto hct = FeSpace::make(mesh, SpaceKind::HCT);
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(hct->dof_count());
  for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
  const ScalarField f(hct, c);
  double jump = 0.0;
  for (int e = 0; e < mesh->num_edges(); ++e) {
    const auto& et = mesh->edge_triangles(e);
    if (et[1] < 0) continue;
    const Point2 a = mesh->vertex(mesh->edge(e).v0), b = mesh->vertex(mesh->edge(e).v1);
    for (double s : {0.15, 0.5, 0.71}) {
      const Point2 p = (1 - s) * a + s * b;
      jump = std::max(jump, std::abs(f.value_in(et[0], p) - f.value_in(et[1], p)));
      jump = std::max(jump, (f.gradient_in(et[0], p) - f.gradient_in(et[1], p)).norm());
    }
  }
  CHECK(jump < 1e-9);
}
