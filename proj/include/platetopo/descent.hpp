#pragma once

#include <string>
#include <vector>

#include "platetopo/boundary_cost.hpp"
#include "platetopo/hamiltonian.hpp"

namespace platetopo {

enum class DirectionVariant { Full, Simplified, Interpolated };

std::string to_string(DirectionVariant v);
DirectionVariant parse_direction_variant(const std::string& name);

struct GradientQ {
  Eigen::VectorXd Rq;  // over P3 dofs
  Eigen::VectorXd Vq;  // over P1 dofs
};

// Rq_i = -int 2 g+ u p phi_i^g,  Vq_i = -int g+^2 p phi_i^u.
GradientQ gradient_q(const BiharmonicSystem& sys, const ScalarField& g, const ScalarField& u, const ScalarField& p);

/// Coefficient of grad r in the explicit level-set derivative of the boundary
/// cost, per unit arc length:
///   (2/eps) N grad y / |grad g| + (j + y^2/eps - N^2/eps) grad g / |grad g|^2.
Vec2 level_set_coefficient(const CostFields::Sample& s, const Point2& x, const Integrand& j, double eps);

// R^r = -(Pi1^T a1 + Pi2^T a2) with a_d,i = int a_d phi_i^g over the boundary.
Eigen::VectorXd gradient_r(const CostFields& fields, const BoundaryTrace& trace, const Integrand& j, double eps);

/// Orbit data of one boundary component: the traced orbit, its Jacobians
/// A_k, the cost sensitivities b_k and the adjoint sequence M_k.
struct OrbitTrack {
  int component = -1;
  Orbit orbit;
  std::vector<Mat2> A;
  std::vector<Vec2> b;
  std::vector<Vec2> M;
  PeriodFactor factor;
  bool reseeded = false;
};

// b_k = grad of |grad g| * (cost density) at Z_k, with the discrete Hessian of g.
Vec2 orbit_cost_gradient(const CostFields::Sample& s, const Point2& x, const Mat2& A, const Integrand& j,
                         double eps);

/// Trace one component from its seed and run the adjoint recursion. A seed
/// with |d1 g| < |grad g| / 2 is moved to the polyline vertex of largest
/// |d1 g|, so that the period derivative is well conditioned.
OrbitTrack track_component(const CostFields& fields, const Polyline& component, const Integrand& j, double eps,
                           const OrbitOptions& opts);

struct GradientW {
  Eigen::VectorXd Rw;
  std::vector<OrbitTrack> tracks;
  std::vector<std::string> failures;  // components skipped, with the reason
};

// R^w = dt (Pi2^T Phi M1 - Pi1^T Phi M2), summed over components.
GradientW gradient_w(const CostFields& fields, BoundaryTrace& trace, const Integrand& j, double eps,
                     const OrbitOptions& opts);

// Contribution of one track to R^w (added to out).
void accumulate_w(const Discretization& disc, const OrbitTrack& track, Eigen::VectorXd& out);

struct GradientBlocks {
  Eigen::VectorXd Rq, Vq, Rr, Rw;  // Rr, Rw empty when not computed
  const ScalarField* p = nullptr;  // adjoint, for the interpolated variant
  const ScalarField* u = nullptr;
};

struct DescentDirection {
  Eigen::VectorXd R;  // P3 coefficients
  Eigen::VectorXd V;  // P1 coefficients
  DirectionVariant variant = DirectionVariant::Full;
  bool smoothed = false;
  bool normalized = false;
  bool zero = false;
  // -<Rq + Rr + Rw, R> - <Vq, V> over the blocks present.
  double predicted_slope = 0.0;
};

double predicted_slope(const GradientBlocks& blocks, const Eigen::VectorXd& R, const Eigen::VectorXd& V);

/// Direction from gradient blocks:
///   full          R = Rq + Rr + Rw, V = Vq
///   simplified    R = Rq + Rr,      V = Vq
///   interpolated  R = P3 nodal values of -p u, V = P1 nodal values of -p
/// then optional smoothing of R (needs sys) and sup-norm normalization of
/// each block (0/0 = 0).
DescentDirection build_direction(const GradientBlocks& blocks, DirectionVariant variant, bool smooth,
                                 bool normalize, const BiharmonicSystem* sys);

}  // namespace platetopo
