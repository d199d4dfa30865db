#pragma once

#include <Eigen/SparseCholesky>
#include <array>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "platetopo/fem.hpp"

namespace platetopo {

/// Composite quadrature over every macro triangle: the 21-point HCT macro rule
/// with basis tables for P1, P3 and HCT precomputed at every point.
class AreaQuadrature {
 public:
  static constexpr int kPoints = 21;
  using Values = std::array<double, kPoints>;

  explicit AreaQuadrature(const Discretization& disc);

  const Discretization& disc() const { return *disc_; }
  double weight(int t, int q) const { return disc_->mesh->area(t) * rule_[q].weight; }
  const Point2& position(int t, int q) const { return pos_[static_cast<size_t>(t) * kPoints + q]; }
  const std::array<double, 3>& bary(int q) const { return rule_[q].bary; }

  // Values of f at the quadrature points of triangle t.
  void values(const ScalarField& f, int t, Values& out) const;
  // out[dof] += sum_q weight(t, q) * density[q] * phi_dof(x_q) for the basis of `kind`.
  void accumulate(SpaceKind kind, int t, const Values& density, Eigen::VectorXd& out) const;
  double integrate(int t, const Values& density) const;
  // Integral over D of a function given per triangle at the quadrature points.
  double integrate(const std::function<void(int, Values&)>& density) const;

 private:
  const double* basis(SpaceKind kind, int t, int q) const;

  const Discretization* disc_;
  std::vector<MacroQuadPoint> rule_;
  std::vector<Point2> pos_;
  std::vector<double> p1_, p3_, hct_;
};

// Load f in the state equation: a constant, a P1 field, or an analytic function.
using Load = std::variant<double, ScalarField, PointFunction>;

/// Clamped biharmonic problem  int_D lap(w) lap(phi) = rhs(phi)  over the HCT
/// space, assembled and factorized once per mesh.
class BiharmonicSystem {
 public:
  explicit BiharmonicSystem(std::shared_ptr<const Discretization> disc);

  const Discretization& disc() const { return *disc_; }
  const std::shared_ptr<const Discretization>& disc_ptr() const { return disc_; }
  const AreaQuadrature& quadrature() const { return quad_; }

  int free_dof_count() const { return nfree_; }
  // Global HCT dof -> index among free dofs, or -1 when clamped.
  const std::vector<int>& free_index() const { return free_; }
  // Stiffness restricted to the free dofs.
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }

  // Solve with a right-hand side given over all HCT dofs (clamped rows ignored).
  ScalarField solve(const Eigen::VectorXd& rhs) const;
  // ||K x - b|| / ||b|| of the most recent solve (0 for a zero right-hand side).
  double last_relative_residual() const { return last_residual_; }

  // rhs_i = int_D density * phi_i, density given at the quadrature points.
  Eigen::VectorXd load_vector(const std::function<void(int, AreaQuadrature::Values&)>& density) const;

  ScalarField solve_state(const Load& f, const ScalarField& g, const ScalarField& u) const;
  ScalarField solve_sensitivity(const ScalarField& g, const ScalarField& u, const ScalarField& r,
                                const ScalarField& v) const;
  // HCT solution of the smoothing problem with rhs int source * phi.
  ScalarField smooth_hct(const ScalarField& source) const;
  // smooth_hct followed by projection onto P3.
  ScalarField smooth_direction(const ScalarField& source) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  AreaQuadrature quad_;
  std::vector<int> free_;
  int nfree_ = 0;
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
  mutable double last_residual_ = 0.0;
};

// int_D lap(phi_i) lap(phi_j) over all HCT dofs, clamped ones included.
Eigen::SparseMatrix<double> assemble_full_stiffness(const FeSpace& hct);

}  // namespace platetopo
