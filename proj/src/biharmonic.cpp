#include "platetopo/biharmonic.hpp"

#include <cmath>

#include "platetopo/error.hpp"
#include "platetopo/levelset.hpp"

namespace platetopo {

namespace {

constexpr int kQ = AreaQuadrature::kPoints;

Point2 point_from_bary(const TriMesh& m, int t, const std::array<double, 3>& b) {
  const auto& tr = m.triangle(t);
  return b[0] * m.vertex(tr[0]) + b[1] * m.vertex(tr[1]) + b[2] * m.vertex(tr[2]);
}

// Element Laplacians of the 12 HCT basis functions at the macro-rule points.
void element_stiffness(const FeSpace& hct, int t, Eigen::Matrix<double, 12, 12>& Ke) {
  const TriMesh& m = hct.mesh();
  const auto& rule = hct_macro_rule();
  Eigen::Matrix<double, 12, kQ> L;
  BasisValues b;
  for (int q = 0; q < kQ; ++q) {
    hct.hct_element(t).eval(rule[q].sub, point_from_bary(m, t, rule[q].bary), 2, b);
    for (int i = 0; i < 12; ++i) L(i, q) = b.h[i].trace();
  }
  Eigen::Matrix<double, kQ, 1> w;
  for (int q = 0; q < kQ; ++q) w(q) = m.area(t) * rule[q].weight;
  Ke = L * w.asDiagonal() * L.transpose();
}

}  // namespace

AreaQuadrature::AreaQuadrature(const Discretization& disc) : disc_(&disc), rule_(hct_macro_rule()) {
  const TriMesh& m = *disc.mesh;
  const int nt = m.num_triangles();
  pos_.resize(static_cast<size_t>(nt) * kQ);
  for (int t = 0; t < nt; ++t)
    for (int q = 0; q < kQ; ++q) pos_[static_cast<size_t>(t) * kQ + q] = point_from_bary(m, t, rule_[q].bary);

  BasisValues b;
  p1_.resize(kQ * 3);
  p3_.resize(kQ * 10);
  for (int q = 0; q < kQ; ++q) {
    // Lagrange bases in barycentric form do not depend on the element.
    disc.p1->eval_basis_bary(0, rule_[q].bary, 0, b);
    for (int i = 0; i < 3; ++i) p1_[q * 3 + i] = b.v[i];
    disc.p3->eval_basis_bary(0, rule_[q].bary, 0, b);
    for (int i = 0; i < 10; ++i) p3_[q * 10 + i] = b.v[i];
  }
  hct_.resize(static_cast<size_t>(nt) * kQ * 12);
  for (int t = 0; t < nt; ++t) {
    for (int q = 0; q < kQ; ++q) {
      disc.hct->hct_element(t).eval(rule_[q].sub, position(t, q), 0, b);
      double* dst = hct_.data() + (static_cast<size_t>(t) * kQ + q) * 12;
      for (int i = 0; i < 12; ++i) dst[i] = b.v[i];
    }
  }
}

const double* AreaQuadrature::basis(SpaceKind kind, int t, int q) const {
  switch (kind) {
    case SpaceKind::P1: return p1_.data() + q * 3;
    case SpaceKind::P3: return p3_.data() + q * 10;
    case SpaceKind::HCT: return hct_.data() + (static_cast<size_t>(t) * kQ + q) * 12;
  }
  return nullptr;
}

void AreaQuadrature::values(const ScalarField& f, int t, Values& out) const {
  const FeSpace& s = f.space();
  const auto dofs = s.triangle_dofs(t);
  const int n = s.dofs_per_triangle();
  for (int q = 0; q < kQ; ++q) {
    const double* phi = basis(s.kind(), t, q);
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += f.coeffs()[dofs[i]] * phi[i];
    out[q] = v;
  }
}

void AreaQuadrature::accumulate(SpaceKind kind, int t, const Values& density, Eigen::VectorXd& out) const {
  const FeSpace& s = kind == SpaceKind::P1 ? *disc_->p1 : (kind == SpaceKind::P3 ? *disc_->p3 : *disc_->hct);
  const auto dofs = s.triangle_dofs(t);
  const int n = s.dofs_per_triangle();
  for (int q = 0; q < kQ; ++q) {
    const double wd = weight(t, q) * density[q];
    if (wd == 0.0) continue;
    const double* phi = basis(kind, t, q);
    for (int i = 0; i < n; ++i) out[dofs[i]] += wd * phi[i];
  }
}

double AreaQuadrature::integrate(int t, const Values& density) const {
  double s = 0.0;
  for (int q = 0; q < kQ; ++q) s += weight(t, q) * density[q];
  return s;
}

double AreaQuadrature::integrate(const std::function<void(int, Values&)>& density) const {
  Values d;
  double s = 0.0;
  for (int t = 0; t < disc_->mesh->num_triangles(); ++t) {
    density(t, d);
    s += integrate(t, d);
  }
  return s;
}

// ---------------------------------------------------------------------------

Eigen::SparseMatrix<double> assemble_full_stiffness(const FeSpace& hct) {
  require(hct.kind() == SpaceKind::HCT, "assemble_full_stiffness: HCT space required");
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::Matrix<double, 12, 12> Ke;
  for (int t = 0; t < hct.mesh().num_triangles(); ++t) {
    element_stiffness(hct, t, Ke);
    const auto dofs = hct.triangle_dofs(t);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) trip.emplace_back(dofs[i], dofs[j], Ke(i, j));
  }
  Eigen::SparseMatrix<double> K(hct.dof_count(), hct.dof_count());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

BiharmonicSystem::BiharmonicSystem(std::shared_ptr<const Discretization> disc)
    : disc_(std::move(disc)), quad_(*disc_) {
  const FeSpace& hct = *disc_->hct;
  free_.assign(hct.dof_count(), -1);
  for (int i = 0; i < hct.dof_count(); ++i)
    if (!hct.is_constrained(i)) free_[i] = nfree_++;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::Matrix<double, 12, 12> Ke;
  for (int t = 0; t < hct.mesh().num_triangles(); ++t) {
    const auto dofs = hct.triangle_dofs(t);
    bool any = false;
    for (int d : dofs) any = any || free_[d] >= 0;
    if (!any) continue;
    element_stiffness(hct, t, Ke);
    for (int i = 0; i < 12; ++i) {
      const int fi = free_[dofs[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 12; ++j) {
        const int fj = free_[dofs[j]];
        if (fj >= 0) trip.emplace_back(fi, fj, Ke(i, j));
      }
    }
  }
  K_.resize(nfree_, nfree_);
  K_.setFromTriplets(trip.begin(), trip.end());
  if (nfree_ > 0) {
    llt_.compute(K_);
    if (llt_.info() != Eigen::Success)
      fail(ErrorCode::SingularSystem, "biharmonic stiffness is not positive definite");
  }
}

ScalarField BiharmonicSystem::solve(const Eigen::VectorXd& rhs) const {
  const FeSpace& hct = *disc_->hct;
  require(rhs.size() == hct.dof_count(), "BiharmonicSystem::solve: rhs size mismatch");
  ScalarField out(disc_->hct);
  last_residual_ = 0.0;
  if (nfree_ == 0) return out;
  Eigen::VectorXd b(nfree_);
  for (int i = 0; i < hct.dof_count(); ++i)
    if (free_[i] >= 0) b[free_[i]] = rhs[i];
  const double bn = b.norm();
  if (bn == 0.0) return out;
  const Eigen::VectorXd x = llt_.solve(b);
  if (llt_.info() != Eigen::Success) fail(ErrorCode::SingularSystem, "biharmonic solve failed");
  last_residual_ = (K_ * x - b).norm() / bn;
  for (int i = 0; i < hct.dof_count(); ++i)
    if (free_[i] >= 0) out.coeffs()[i] = x[free_[i]];
  return out;
}

Eigen::VectorXd BiharmonicSystem::load_vector(
    const std::function<void(int, AreaQuadrature::Values&)>& density) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(disc_->hct->dof_count());
  AreaQuadrature::Values d;
  for (int t = 0; t < disc_->mesh->num_triangles(); ++t) {
    density(t, d);
    quad_.accumulate(SpaceKind::HCT, t, d, rhs);
  }
  return rhs;
}

namespace {

void check_space(const ScalarField& f, const Discretization& d, SpaceKind kind, const char* what) {
  require(f.space().mesh_ptr() == d.mesh, std::string(what) + ": mesh mismatch");
  require(f.space().kind() == kind, std::string(what) + ": expected a " + to_string(kind) + " field");
}

}  // namespace

ScalarField BiharmonicSystem::solve_state(const Load& f, const ScalarField& g, const ScalarField& u) const {
  check_space(g, *disc_, SpaceKind::P3, "solve_state");
  check_space(u, *disc_, SpaceKind::P1, "solve_state");
  if (const auto* fp = std::get_if<ScalarField>(&f)) check_space(*fp, *disc_, SpaceKind::P1, "solve_state");
  AreaQuadrature::Values gv, uv, fv;
  const Eigen::VectorXd rhs = load_vector([&](int t, AreaQuadrature::Values& d) {
    quad_.values(g, t, gv);
    quad_.values(u, t, uv);
    if (const auto* c = std::get_if<double>(&f)) {
      fv.fill(*c);
    } else if (const auto* fp = std::get_if<ScalarField>(&f)) {
      quad_.values(*fp, t, fv);
    } else {
      const auto& fn = std::get<PointFunction>(f);
      for (int q = 0; q < kQ; ++q) fv[q] = fn(quad_.position(t, q));
    }
    for (int q = 0; q < kQ; ++q) {
      const double gp = positive_part(gv[q]);
      d[q] = fv[q] + gp * gp * uv[q];
    }
  });
  return solve(rhs);
}

ScalarField BiharmonicSystem::solve_sensitivity(const ScalarField& g, const ScalarField& u,
                                                const ScalarField& r, const ScalarField& v) const {
  check_space(g, *disc_, SpaceKind::P3, "solve_sensitivity");
  check_space(r, *disc_, SpaceKind::P3, "solve_sensitivity");
  check_space(u, *disc_, SpaceKind::P1, "solve_sensitivity");
  check_space(v, *disc_, SpaceKind::P1, "solve_sensitivity");
  AreaQuadrature::Values gv, uv, rv, vv;
  const Eigen::VectorXd rhs = load_vector([&](int t, AreaQuadrature::Values& d) {
    quad_.values(g, t, gv);
    quad_.values(u, t, uv);
    quad_.values(r, t, rv);
    quad_.values(v, t, vv);
    for (int q = 0; q < kQ; ++q) {
      const double gp = positive_part(gv[q]);
      d[q] = gp * gp * vv[q] + 2.0 * gp * uv[q] * rv[q];
    }
  });
  return solve(rhs);
}

ScalarField BiharmonicSystem::smooth_hct(const ScalarField& source) const {
  require(source.space().mesh_ptr() == disc_->mesh, "smooth_direction: mesh mismatch");
  const Eigen::VectorXd rhs =
      load_vector([&](int t, AreaQuadrature::Values& d) { quad_.values(source, t, d); });
  return solve(rhs);
}

ScalarField BiharmonicSystem::smooth_direction(const ScalarField& source) const {
  return project(smooth_hct(source), disc_->p3);
}

}  // namespace platetopo
