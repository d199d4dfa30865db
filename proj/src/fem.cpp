#include "platetopo/fem.hpp"

#include <cmath>
#include <fstream>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {

// P3 Lagrange basis as polynomials of the barycentric coordinates: values,
// partial derivatives and second partials with respect to (l0, l1, l2).
struct P3Bary {
  std::array<double, 10> v{};
  std::array<std::array<double, 3>, 10> g{};
  std::array<std::array<std::array<double, 3>, 3>, 10> h{};
};

P3Bary p3_bary(const std::array<double, 3>& l, int order) {
  P3Bary b;
  for (int i = 0; i < 3; ++i) {
    const double s = l[i];
    b.v[i] = 0.5 * s * (3 * s - 1) * (3 * s - 2);
    if (order >= 1) b.g[i][i] = 0.5 * (27 * s * s - 18 * s + 2);
    if (order >= 2) b.h[i][i][i] = 27 * s - 9;
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, c = (k + 2) % 3;
    // Two nodes on the edge (a, c): near a, then near c.
    const std::array<std::pair<int, int>, 2> ends{{{a, c}, {c, a}}};
    for (int s = 0; s < 2; ++s) {
      const int idx = 3 + 2 * k + s;
      const int p = ends[s].first, q = ends[s].second;
      const double lp = l[p], lq = l[q];
      b.v[idx] = 4.5 * lp * lq * (3 * lp - 1);
      if (order >= 1) {
        b.g[idx][p] = 4.5 * (6 * lp * lq - lq);
        b.g[idx][q] = 4.5 * (3 * lp * lp - lp);
      }
      if (order >= 2) {
        b.h[idx][p][p] = 27 * lq;
        b.h[idx][p][q] = b.h[idx][q][p] = 4.5 * (6 * lp - 1);
      }
    }
  }
  b.v[9] = 27 * l[0] * l[1] * l[2];
  if (order >= 1) {
    b.g[9] = {27 * l[1] * l[2], 27 * l[0] * l[2], 27 * l[0] * l[1]};
  }
  if (order >= 2) {
    b.h[9][0][1] = b.h[9][1][0] = 27 * l[2];
    b.h[9][0][2] = b.h[9][2][0] = 27 * l[1];
    b.h[9][1][2] = b.h[9][2][1] = 27 * l[0];
  }
  return b;
}

std::array<Vec2, 3> barycentric_gradients(const TriMesh& m, int t) {
  const auto& tr = m.triangle(t);
  const Point2& p0 = m.vertex(tr[0]);
  const Point2& p1 = m.vertex(tr[1]);
  const Point2& p2 = m.vertex(tr[2]);
  const double inv = 1.0 / (2.0 * m.area(t));
  return {Vec2((p1.y() - p2.y()) * inv, (p2.x() - p1.x()) * inv),
          Vec2((p2.y() - p0.y()) * inv, (p0.x() - p2.x()) * inv),
          Vec2((p0.y() - p1.y()) * inv, (p1.x() - p0.x()) * inv)};
}

Point2 point_from_bary(const TriMesh& m, int t, const std::array<double, 3>& b) {
  const auto& tr = m.triangle(t);
  return b[0] * m.vertex(tr[0]) + b[1] * m.vertex(tr[1]) + b[2] * m.vertex(tr[2]);
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1: return "P1";
    case SpaceKind::P3: return "P3";
    case SpaceKind::HCT: return "HCT";
  }
  return "?";
}

std::shared_ptr<const FeSpace> FeSpace::make(MeshPtr mesh, SpaceKind kind) {
  require(mesh != nullptr, "FeSpace: null mesh");
  return std::shared_ptr<const FeSpace>(new FeSpace(std::move(mesh), kind));
}

FeSpace::FeSpace(MeshPtr mesh, SpaceKind kind) : mesh_(std::move(mesh)), kind_(kind) {
  const TriMesh& m = *mesh_;
  const int nv = m.num_vertices(), ne = m.num_edges(), nt = m.num_triangles();
  grad_bary_.resize(nt);
  for (int t = 0; t < nt; ++t) grad_bary_[t] = barycentric_gradients(m, t);

  switch (kind) {
    case SpaceKind::P1: {
      ndofs_ = nv;
      per_tri_ = 3;
      dofs_.resize(3 * static_cast<size_t>(nt));
      for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) dofs_[3 * t + k] = m.triangle(t)[k];
      nodes_ = m.vertices();
      node_tri_.resize(nv);
      for (int v = 0; v < nv; ++v) node_tri_[v] = m.vertex_triangles(v).front();
      break;
    }
    case SpaceKind::P3: {
      ndofs_ = nv + 2 * ne + nt;
      per_tri_ = 10;
      dofs_.resize(10 * static_cast<size_t>(nt));
      nodes_.resize(ndofs_);
      node_tri_.resize(ndofs_);
      for (int v = 0; v < nv; ++v) {
        nodes_[v] = m.vertex(v);
        node_tri_[v] = m.vertex_triangles(v).front();
      }
      for (int e = 0; e < ne; ++e) {
        const Point2& a = m.vertex(m.edge(e).v0);
        const Point2& b = m.vertex(m.edge(e).v1);
        nodes_[nv + 2 * e] = (2.0 * a + b) / 3.0;
        nodes_[nv + 2 * e + 1] = (a + 2.0 * b) / 3.0;
        node_tri_[nv + 2 * e] = node_tri_[nv + 2 * e + 1] = m.edge_triangles(e)[0];
      }
      for (int t = 0; t < nt; ++t) {
        const auto& tr = m.triangle(t);
        int* d = dofs_.data() + 10 * static_cast<size_t>(t);
        for (int k = 0; k < 3; ++k) d[k] = tr[k];
        for (int k = 0; k < 3; ++k) {
          const int e = m.triangle_edge(t, k);
          const int near_a = tr[(k + 1) % 3];
          const int first = nv + 2 * e + (near_a == m.edge(e).v0 ? 0 : 1);
          const int second = nv + 2 * e + (near_a == m.edge(e).v0 ? 1 : 0);
          d[3 + 2 * k] = first;
          d[3 + 2 * k + 1] = second;
        }
        d[9] = nv + 2 * ne + t;
        nodes_[d[9]] = m.centroid(t);
        node_tri_[d[9]] = t;
      }
      break;
    }
    case SpaceKind::HCT: {
      ndofs_ = 3 * nv + ne;
      per_tri_ = 12;
      dofs_.resize(12 * static_cast<size_t>(nt));
      edge_normals_.resize(ne);
      for (int e = 0; e < ne; ++e) {
        const Vec2 tan = (m.vertex(m.edge(e).v1) - m.vertex(m.edge(e).v0)).normalized();
        edge_normals_[e] = Vec2(tan.y(), -tan.x());
      }
      hct_.reserve(nt);
      for (int t = 0; t < nt; ++t) {
        const auto& tr = m.triangle(t);
        int* d = dofs_.data() + 12 * static_cast<size_t>(t);
        for (int k = 0; k < 3; ++k) {
          d[3 * k] = 3 * tr[k];
          d[3 * k + 1] = 3 * tr[k] + 1;
          d[3 * k + 2] = 3 * tr[k] + 2;
          d[9 + k] = 3 * nv + m.triangle_edge(t, k);
        }
        hct_.emplace_back(std::array<Point2, 3>{m.vertex(tr[0]), m.vertex(tr[1]), m.vertex(tr[2])},
                          std::array<Vec2, 3>{edge_normals_[m.triangle_edge(t, 0)],
                                              edge_normals_[m.triangle_edge(t, 1)],
                                              edge_normals_[m.triangle_edge(t, 2)]});
      }
      constrained_.assign(ndofs_, 0);
      for (int e = 0; e < ne; ++e) {
        if (!m.is_boundary_edge(e)) continue;
        constrained_[3 * nv + e] = 1;
        for (int v : {m.edge(e).v0, m.edge(e).v1})
          for (int c = 0; c < 3; ++c) constrained_[3 * v + c] = 1;
      }
      break;
    }
  }
}

void FeSpace::eval_basis_bary(int t, const std::array<double, 3>& l, int order, BasisValues& out) const {
  const auto& gl = grad_bary_[t];
  switch (kind_) {
    case SpaceKind::P1:
      out.n = 3;
      for (int i = 0; i < 3; ++i) {
        out.v[i] = l[i];
        if (order >= 1) out.d[i] = gl[i];
        if (order >= 2) out.h[i] = Hess{};
      }
      return;
    case SpaceKind::P3: {
      const P3Bary b = p3_bary(l, order);
      out.n = 10;
      for (int i = 0; i < 10; ++i) {
        out.v[i] = b.v[i];
        if (order >= 1) {
          Vec2 g = Vec2::Zero();
          for (int a = 0; a < 3; ++a) g += b.g[i][a] * gl[a];
          out.d[i] = g;
        }
        if (order >= 2) {
          Hess h;
          for (int a = 0; a < 3; ++a) {
            for (int c = 0; c < 3; ++c) {
              const double w = b.h[i][a][c];
              if (w == 0.0) continue;
              h.xx += w * gl[a].x() * gl[c].x();
              h.xy += w * gl[a].x() * gl[c].y();
              h.yy += w * gl[a].y() * gl[c].y();
            }
          }
          out.h[i] = h;
        }
      }
      return;
    }
    case SpaceKind::HCT:
      hct_[t].eval(HctElement::sub_triangle(l), point_from_bary(*mesh_, t, l), order, out);
      return;
  }
}

void FeSpace::eval_basis(int t, const Point2& p, int order, BasisValues& out) const {
  if (kind_ == SpaceKind::HCT) {
    hct_[t].eval(HctElement::sub_triangle(mesh_->barycentric(t, p)), p, order, out);
    return;
  }
  eval_basis_bary(t, mesh_->barycentric(t, p), order, out);
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(SpacePtr space)
    : space_(std::move(space)), coeffs_(Eigen::VectorXd::Zero(space_->dof_count())) {}

ScalarField::ScalarField(SpacePtr space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == space_->dof_count(), "ScalarField: coefficient count mismatch");
}

ScalarField::Jet ScalarField::jet_in(int t, const Point2& p, int order) const {
  BasisValues b;
  space_->eval_basis(t, p, order, b);
  const auto dofs = space_->triangle_dofs(t);
  Jet j;
  for (int i = 0; i < b.n; ++i) {
    const double c = coeffs_[dofs[i]];
    j.value += c * b.v[i];
    if (order >= 1) j.grad += c * b.d[i];
    if (order >= 2) {
      j.hess.xx += c * b.h[i].xx;
      j.hess.xy += c * b.h[i].xy;
      j.hess.yy += c * b.h[i].yy;
    }
  }
  return j;
}

double ScalarField::value_in(int t, const Point2& p) const { return jet_in(t, p, 0).value; }
Vec2 ScalarField::gradient_in(int t, const Point2& p) const { return jet_in(t, p, 1).grad; }
Hess ScalarField::hessian_in(int t, const Point2& p) const { return jet_in(t, p, 2).hess; }

double evaluate(const ScalarField& f, const PointLocator& locator, const Point2& p) {
  const auto t = locator.locate(p);
  if (!t) fail(ErrorCode::Domain, "evaluate: point outside the mesh");
  return f.value_in(*t, p);
}

Vec2 gradient(const ScalarField& f, const PointLocator& locator, const Point2& p) {
  const auto t = locator.locate(p);
  if (!t) fail(ErrorCode::Domain, "gradient: point outside the mesh");
  return f.gradient_in(*t, p);
}

// ---------------------------------------------------------------------------

Eigen::SparseMatrix<double> derivative_matrix(const FeSpace& src, Derivative which) {
  const TriMesh& m = src.mesh();
  const int nt = m.num_triangles();
  std::vector<Eigen::Triplet<double>> trip;
  const bool first_order = which == Derivative::D1 || which == Derivative::D2;

  if (first_order) {
    require(src.kind() == SpaceKind::P3, "discrete derivative d1/d2 requires a P3 source");
    std::vector<double> weight(src.dof_count(), 0.0);
    for (int t = 0; t < nt; ++t)
      for (int d : src.triangle_dofs(t)) weight[d] += m.area(t);
    BasisValues b;
    for (int t = 0; t < nt; ++t) {
      const auto dofs = src.triangle_dofs(t);
      for (int j = 0; j < 10; ++j) {
        const int row = dofs[j];
        src.eval_basis(t, src.nodes()[row], 1, b);
        const double w = m.area(t) / weight[row];
        for (int i = 0; i < 10; ++i) {
          const double d = which == Derivative::D1 ? b.d[i].x() : b.d[i].y();
          if (d != 0.0) trip.emplace_back(row, dofs[i], w * d);
        }
      }
    }
    Eigen::SparseMatrix<double> M(src.dof_count(), src.dof_count());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
  }

  const int nv = m.num_vertices();
  Eigen::SparseMatrix<double> M(nv, src.dof_count());
  std::vector<double> weight(nv, 0.0);
  BasisValues b;
  auto pick = [which](const Hess& h) {
    switch (which) {
      case Derivative::D11: return h.xx;
      case Derivative::D12:
      case Derivative::D21: return h.xy;
      case Derivative::D22: return h.yy;
      default: return h.trace();
    }
  };

  if (which == Derivative::Laplacian) {
    require(src.kind() == SpaceKind::HCT, "discrete laplacian requires an HCT source");
    for (int t = 0; t < nt; ++t)
      for (int v : m.triangle(t)) weight[v] += 2.0 * m.area(t) / 3.0;
    for (int t = 0; t < nt; ++t) {
      const auto dofs = src.triangle_dofs(t);
      const auto& tr = m.triangle(t);
      for (int j = 0; j < 3; ++j) {
        const double w = (m.area(t) / 3.0) / weight[tr[j]];
        for (int sub : {(j + 1) % 3, (j + 2) % 3}) {
          src.hct_element(t).eval(sub, m.vertex(tr[j]), 2, b);
          for (int i = 0; i < 12; ++i) trip.emplace_back(tr[j], dofs[i], w * b.h[i].trace());
        }
      }
    }
  } else {
    require(src.kind() == SpaceKind::P3, "discrete second derivatives require a P3 source");
    for (int t = 0; t < nt; ++t)
      for (int v : m.triangle(t)) weight[v] += m.area(t);
    for (int t = 0; t < nt; ++t) {
      const auto dofs = src.triangle_dofs(t);
      const auto& tr = m.triangle(t);
      for (int j = 0; j < 3; ++j) {
        std::array<double, 3> l{0.0, 0.0, 0.0};
        l[j] = 1.0;
        src.eval_basis_bary(t, l, 2, b);
        const double w = m.area(t) / weight[tr[j]];
        for (int i = 0; i < 10; ++i) {
          const double d = pick(b.h[i]);
          if (d != 0.0) trip.emplace_back(tr[j], dofs[i], w * d);
        }
      }
    }
  }
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

ScalarField discrete_derivative(const ScalarField& field, Derivative which, const SpacePtr& target) {
  const bool first_order = which == Derivative::D1 || which == Derivative::D2;
  const SpaceKind want = first_order ? SpaceKind::P3 : SpaceKind::P1;
  require(target->kind() == want, "discrete_derivative: illegal target space " + to_string(target->kind()));
  require(target->mesh_ptr() == field.space().mesh_ptr(), "discrete_derivative: mesh mismatch");
  const Eigen::SparseMatrix<double> M = derivative_matrix(field.space(), which);
  return ScalarField(target, M * field.coeffs());
}

ScalarField project(const ScalarField& field, const SpacePtr& target) {
  require(target->mesh_ptr() == field.space().mesh_ptr(), "project: mesh mismatch");
  if (target.get() == field.space_ptr().get() || target->kind() == field.space().kind())
    return ScalarField(target, field.coeffs());
  const TriMesh& m = target->mesh();
  ScalarField out(target);
  if (target->kind() != SpaceKind::HCT) {
    for (int i = 0; i < target->dof_count(); ++i)
      out.coeffs()[i] = field.value_in(target->node_triangle(i), target->nodes()[i]);
    return out;
  }
  const int nv = m.num_vertices();
  for (int v = 0; v < nv; ++v) {
    const auto& tris = m.vertex_triangles(v);
    Vec2 g = Vec2::Zero();
    double wsum = 0.0;
    for (int t : tris) {
      g += m.area(t) * field.gradient_in(t, m.vertex(v));
      wsum += m.area(t);
    }
    g /= wsum;
    out.coeffs()[3 * v] = field.value_in(tris.front(), m.vertex(v));
    out.coeffs()[3 * v + 1] = g.x();
    out.coeffs()[3 * v + 2] = g.y();
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const Point2 mid = 0.5 * (m.vertex(m.edge(e).v0) + m.vertex(m.edge(e).v1));
    const auto& et = m.edge_triangles(e);
    double dn = field.gradient_in(et[0], mid).dot(target->edge_normal(e));
    if (et[1] >= 0) dn = 0.5 * (dn + field.gradient_in(et[1], mid).dot(target->edge_normal(e)));
    out.coeffs()[3 * nv + e] = dn;
  }
  return out;
}

ScalarField interpolate(const SpacePtr& space, const PointFunction& f, const GradFunction& grad) {
  ScalarField out(space);
  if (space->kind() != SpaceKind::HCT) {
    for (int i = 0; i < space->dof_count(); ++i) out.coeffs()[i] = f(space->nodes()[i]);
    return out;
  }
  require(static_cast<bool>(grad), "interpolate: HCT interpolation needs the gradient");
  const TriMesh& m = space->mesh();
  const int nv = m.num_vertices();
  for (int v = 0; v < nv; ++v) {
    const Vec2 g = grad(m.vertex(v));
    out.coeffs()[3 * v] = f(m.vertex(v));
    out.coeffs()[3 * v + 1] = g.x();
    out.coeffs()[3 * v + 2] = g.y();
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const Point2 mid = 0.5 * (m.vertex(m.edge(e).v0) + m.vertex(m.edge(e).v1));
    out.coeffs()[3 * nv + e] = grad(mid).dot(space->edge_normal(e));
  }
  return out;
}

void apply_clamp(ScalarField& field) {
  const auto& mask = field.space().constrained_mask();
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) field.coeffs()[static_cast<Eigen::Index>(i)] = 0.0;
}

// ---------------------------------------------------------------------------

Discretization::Discretization(MeshPtr m)
    : mesh(m),
      p1(FeSpace::make(m, SpaceKind::P1)),
      p3(FeSpace::make(m, SpaceKind::P3)),
      hct(FeSpace::make(m, SpaceKind::HCT)),
      locator(m),
      d1(derivative_matrix(*p3, Derivative::D1)),
      d2(derivative_matrix(*p3, Derivative::D2)),
      d11(derivative_matrix(*p3, Derivative::D11)),
      d12(derivative_matrix(*p3, Derivative::D12)),
      d22(derivative_matrix(*p3, Derivative::D22)),
      laplacian(derivative_matrix(*hct, Derivative::Laplacian)) {}

ScalarField Discretization::derivative(const ScalarField& f, Derivative which) const {
  require(f.space().mesh_ptr() == mesh, "Discretization::derivative: mesh mismatch");
  switch (which) {
    case Derivative::D1:
    case Derivative::D2:
      require(f.space().kind() == SpaceKind::P3, "d1/d2 require a P3 field");
      return ScalarField(p3, (which == Derivative::D1 ? d1 : d2) * f.coeffs());
    case Derivative::D11:
    case Derivative::D12:
    case Derivative::D21:
    case Derivative::D22: {
      require(f.space().kind() == SpaceKind::P3, "second derivatives require a P3 field");
      const auto& M = which == Derivative::D11 ? d11 : (which == Derivative::D22 ? d22 : d12);
      return ScalarField(p1, M * f.coeffs());
    }
    case Derivative::Laplacian:
      require(f.space().kind() == SpaceKind::HCT, "laplacian requires an HCT field");
      return ScalarField(p1, laplacian * f.coeffs());
  }
  fail(ErrorCode::Argument, "unknown derivative");
}

void write_vtk(const std::string& path, const TriMesh& mesh, const std::vector<NamedField>& fields) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out.precision(17);
  const int nv = mesh.num_vertices(), nt = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\nplatetopo fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << nv << '\n';
  for (const auto& nf : fields) {
    const ScalarField& f = *nf.field;
    const bool hct = f.space().kind() == SpaceKind::HCT;
    out << "SCALARS " << nf.name << " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < nv; ++v) out << f.coeffs()[hct ? 3 * v : v] << '\n';
    if (hct) {
      out << "SCALARS " << nf.name << "_gradmag double 1\nLOOKUP_TABLE default\n";
      for (int v = 0; v < nv; ++v)
        out << std::hypot(f.coeffs()[3 * v + 1], f.coeffs()[3 * v + 2]) << '\n';
    }
  }
  if (!out) fail(ErrorCode::Io, "error writing '" + path + "'");
}

}  // namespace platetopo
