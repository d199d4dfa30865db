#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "platetopo/hct.hpp"
#include "platetopo/mesh.hpp"

namespace platetopo {

enum class SpaceKind { P1, P3, HCT };

std::string to_string(SpaceKind kind);

/// A finite-element space on a fixed mesh.
///
/// Degree-of-freedom layout:
///   P1  - one value per vertex.
///   P3  - vertices, then two nodes per edge (at 1/3 and 2/3 from the lower
///         vertex index), then one barycenter per triangle.
///   HCT - (value, d/dx, d/dy) per vertex at 3*v + {0,1,2}, then one normal
///         derivative per edge midpoint at 3*n_v + e. The edge normal is the
///         clockwise rotation of (v1 - v0) with v0 < v1.
class FeSpace {
 public:
  static std::shared_ptr<const FeSpace> make(MeshPtr mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const TriMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int dof_count() const { return ndofs_; }
  int dofs_per_triangle() const { return per_tri_; }
  std::span<const int> triangle_dofs(int t) const {
    return {dofs_.data() + static_cast<size_t>(t) * per_tri_, static_cast<size_t>(per_tri_)};
  }

  // Lagrange spaces only: node positions and one triangle owning each node.
  const std::vector<Point2>& nodes() const { return nodes_; }
  int node_triangle(int i) const { return node_tri_[i]; }

  // HCT only.
  const HctElement& hct_element(int t) const { return hct_[t]; }
  const Vec2& edge_normal(int e) const { return edge_normals_[e]; }
  // Clamped mask: value and first-derivative dofs attached to the boundary of D.
  bool is_constrained(int dof) const { return !constrained_.empty() && constrained_[dof] != 0; }
  const std::vector<char>& constrained_mask() const { return constrained_; }

  // Local basis of triangle t evaluated at p (p must lie in the closed triangle).
  void eval_basis(int t, const Point2& p, int order, BasisValues& out) const;
  // Same, from precomputed macro barycentric coordinates.
  void eval_basis_bary(int t, const std::array<double, 3>& bary, int order, BasisValues& out) const;

 private:
  FeSpace(MeshPtr mesh, SpaceKind kind);

  MeshPtr mesh_;
  SpaceKind kind_;
  int ndofs_ = 0;
  int per_tri_ = 0;
  std::vector<int> dofs_;
  std::vector<Point2> nodes_;
  std::vector<int> node_tri_;
  std::vector<HctElement> hct_;
  std::vector<Vec2> edge_normals_;
  std::vector<char> constrained_;
  std::vector<std::array<Vec2, 3>> grad_bary_;
};

using SpacePtr = std::shared_ptr<const FeSpace>;

/// Coefficient vector over a finite-element space.
class ScalarField {
 public:
  explicit ScalarField(SpacePtr space);
  ScalarField(SpacePtr space, Eigen::VectorXd coeffs);

  const FeSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  // Evaluation on a known triangle t containing p.
  double value_in(int t, const Point2& p) const;
  Vec2 gradient_in(int t, const Point2& p) const;
  Hess hessian_in(int t, const Point2& p) const;

  struct Jet {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Hess hess;
  };
  Jet jet_in(int t, const Point2& p, int order) const;

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

// Pointwise evaluation with point location; throws a domain error outside D.
double evaluate(const ScalarField& f, const PointLocator& locator, const Point2& p);
Vec2 gradient(const ScalarField& f, const PointLocator& locator, const Point2& p);

enum class Derivative { D1, D2, D11, D12, D21, D22, Laplacian };

/// Matrix of a discrete derivative operator (rows: target dofs, columns:
/// source dofs). Nodal values are area-weighted averages of the exact
/// piecewise derivative over all triangles sharing the node.
///   D1, D2           : P3 -> P3
///   D11, D12, D21, D22 : P3 -> P1
///   Laplacian        : HCT -> P1 (averaged over HCT sub-triangles)
Eigen::SparseMatrix<double> derivative_matrix(const FeSpace& source, Derivative which);

ScalarField discrete_derivative(const ScalarField& field, Derivative which, const SpacePtr& target);

// Nodal interpolation of `field` onto `target` (same mesh). For an HCT
// target, vertex gradients and edge normal derivatives of non-C1 sources are
// averaged over incident triangles.
ScalarField project(const ScalarField& field, const SpacePtr& target);

using PointFunction = std::function<double(const Point2&)>;
using GradFunction = std::function<Vec2(const Point2&)>;

// Nodal interpolation of an analytic function. HCT requires the gradient.
ScalarField interpolate(const SpacePtr& space, const PointFunction& f, const GradFunction& grad = {});

// Zero the constrained (clamped) dofs of an HCT field.
void apply_clamp(ScalarField& field);

/// Everything built once per mesh: the three spaces, a point locator and the
/// discrete derivative matrices.
struct Discretization {
  explicit Discretization(MeshPtr mesh);

  MeshPtr mesh;
  SpacePtr p1, p3, hct;
  PointLocator locator;
  Eigen::SparseMatrix<double> d1, d2;             // P3 -> P3 (Pi_h^1, Pi_h^2)
  Eigen::SparseMatrix<double> d11, d12, d22;      // P3 -> P1
  Eigen::SparseMatrix<double> laplacian;          // HCT -> P1

  ScalarField derivative(const ScalarField& f, Derivative which) const;
};

// Legacy VTK ASCII unstructured grid with point data sampled at the mesh
// vertices. HCT fields also export the gradient magnitude as "<name>_gradmag".
struct NamedField {
  std::string name;
  const ScalarField* field;
};
void write_vtk(const std::string& path, const TriMesh& mesh, const std::vector<NamedField>& fields);

}  // namespace platetopo
