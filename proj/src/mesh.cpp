#include "platetopo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {
constexpr double kBaryTol = 1e-12;
}

TriMesh::TriMesh(std::vector<Point2> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  require(!vertices_.empty() && !triangles_.empty(), "mesh: empty vertex or triangle list");
  const int nv = num_vertices();
  const int nt = num_triangles();

  areas_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k)
      require(triangles_[t][k] >= 0 && triangles_[t][k] < nv, "mesh: vertex index out of range");
    const double a2 = orient2(vertices_[triangles_[t][0]], vertices_[triangles_[t][1]],
                              vertices_[triangles_[t][2]]);
    require(a2 > 0.0, "mesh: triangle " + std::to_string(t) + " is not positively oriented");
    areas_[t] = 0.5 * a2;
  }

  std::map<std::pair<int, int>, int> edge_index;
  tri_edges_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = triangles_[t][(k + 1) % 3];
      int b = triangles_[t][(k + 2) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.try_emplace({a, b}, num_edges());
      if (inserted) {
        edges_.push_back({a, b});
        edge_tris_.push_back({t, -1});
      } else {
        auto& et = edge_tris_[it->second];
        require(et[1] < 0, "mesh: edge shared by more than two triangles");
        et[1] = t;
      }
      tri_edges_[t][k] = it->second;
    }
  }

  vertex_tris_.resize(nv);
  for (int t = 0; t < nt; ++t)
    for (int v : triangles_[t]) vertex_tris_[v].push_back(t);

  boundary_vertex_.assign(nv, 0);
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_tris_[e][1] < 0) {
      boundary_vertex_[edges_[e].v0] = 1;
      boundary_vertex_[edges_[e].v1] = 1;
    }
  }

  bbox_min_ = bbox_max_ = vertices_[0];
  for (const auto& p : vertices_) {
    bbox_min_ = bbox_min_.cwiseMin(p);
    bbox_max_ = bbox_max_.cwiseMax(p);
  }
}

int TriMesh::neighbor(int t, int k) const {
  const auto& et = edge_tris_[tri_edges_[t][k]];
  return et[0] == t ? et[1] : et[0];
}

std::vector<std::pair<int, int>> TriMesh::boundary_edges() const {
  std::vector<std::pair<int, int>> out;
  for (int e = 0; e < num_edges(); ++e)
    if (is_boundary_edge(e)) out.emplace_back(edges_[e].v0, edges_[e].v1);
  return out;
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

Point2 TriMesh::centroid(int t) const {
  const auto& tr = triangles_[t];
  return (vertices_[tr[0]] + vertices_[tr[1]] + vertices_[tr[2]]) / 3.0;
}

std::array<double, 3> TriMesh::barycentric(int t, const Point2& p) const {
  const auto& tr = triangles_[t];
  const Point2& a = vertices_[tr[0]];
  const Point2& b = vertices_[tr[1]];
  const Point2& c = vertices_[tr[2]];
  const double inv = 1.0 / (2.0 * areas_[t]);
  const double l0 = orient2(p, b, c) * inv;
  const double l1 = orient2(a, p, c) * inv;
  return {l0, l1, 1.0 - l0 - l1};
}

TriMesh generate_square_mesh(double side_min, double side_max, int n_divisions) {
  require(n_divisions >= 1, "generate_square_mesh: n_divisions must be >= 1");
  require(std::isfinite(side_min) && std::isfinite(side_max) && side_min < side_max,
          "generate_square_mesh: require side_min < side_max");
  const int n = n_divisions;
  const double h = (side_max - side_min) / n;
  std::vector<Point2> verts;
  verts.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(i == n ? side_max : side_min + i * h,
                         j == n ? side_max : side_min + j * h);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Triangle> tris;
  tris.reserve(2 * static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  }
  return TriMesh(std::move(verts), std::move(tris));
}

TriMesh read_mesh(std::istream& in) {
  long nv = 0, nt = 0;
  if (!(in >> nv >> nt) || nv <= 0 || nt <= 0) fail(ErrorCode::Io, "read_mesh: bad header");
  std::vector<Point2> verts(nv);
  for (auto& p : verts)
    if (!(in >> p.x() >> p.y())) fail(ErrorCode::Io, "read_mesh: truncated vertex list");
  std::vector<Triangle> tris(nt);
  for (auto& t : tris)
    if (!(in >> t[0] >> t[1] >> t[2])) fail(ErrorCode::Io, "read_mesh: truncated triangle list");
  return TriMesh(std::move(verts), std::move(tris));
}

TriMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out.precision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

// ---------------------------------------------------------------------------

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const TriMesh& m = *mesh_;
  const int side = std::max(1, static_cast<int>(std::sqrt(m.num_triangles() / 2.0)));
  nx_ = ny_ = side;
  const Point2 lo = m.bbox_min(), hi = m.bbox_max();
  cell_w_ = std::max((hi.x() - lo.x()) / nx_, 1e-300);
  cell_h_ = std::max((hi.y() - lo.y()) / ny_, 1e-300);
  buckets_.resize(static_cast<size_t>(nx_) * ny_);
  for (int t = 0; t < m.num_triangles(); ++t) {
    Point2 tlo = m.vertex(m.triangle(t)[0]), thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(m.vertex(m.triangle(t)[k]));
      thi = thi.cwiseMax(m.vertex(m.triangle(t)[k]));
    }
    const int i0 = std::clamp(static_cast<int>((tlo.x() - lo.x()) / cell_w_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((thi.x() - lo.x()) / cell_w_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tlo.y() - lo.y()) / cell_h_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((thi.y() - lo.y()) / cell_h_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<size_t>(j) * nx_ + i].push_back(t);
  }
}

bool PointLocator::contains(int t, const Point2& p) const {
  const auto b = mesh_->barycentric(t, p);
  return b[0] >= -kBaryTol && b[1] >= -kBaryTol && b[2] >= -kBaryTol;
}

std::optional<int> PointLocator::walk(int start, const Point2& p) const {
  int t = start;
  const int max_steps = 64;
  for (int step = 0; step < max_steps; ++step) {
    const auto b = mesh_->barycentric(t, p);
    int worst = 0;
    for (int k = 1; k < 3; ++k)
      if (b[k] < b[worst]) worst = k;
    if (b[worst] >= -kBaryTol) return t;
    const int nb = mesh_->neighbor(t, worst);
    if (nb < 0) return std::nullopt;
    t = nb;
  }
  return std::nullopt;
}

std::optional<int> PointLocator::bucket_search(const Point2& p) const {
  const Point2 lo = mesh_->bbox_min(), hi = mesh_->bbox_max();
  const double slack = 1e-12 * std::max(1.0, (hi - lo).norm());
  if (p.x() < lo.x() - slack || p.x() > hi.x() + slack || p.y() < lo.y() - slack ||
      p.y() > hi.y() + slack)
    return std::nullopt;
  const int i = std::clamp(static_cast<int>((p.x() - lo.x()) / cell_w_), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((p.y() - lo.y()) / cell_h_), 0, ny_ - 1);
  // Neighbouring cells too, so points on cell borders are not missed.
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const int ii = i + di, jj = j + dj;
      if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
      for (int t : buckets_[static_cast<size_t>(jj) * nx_ + ii])
        if (contains(t, p)) return t;
    }
  }
  return std::nullopt;
}

std::optional<int> PointLocator::locate(const Point2& p) const {
  if (last_ < 0 || last_ >= mesh_->num_triangles()) last_ = 0;
  auto hit = walk(last_, p);
  if (!hit) hit = bucket_search(p);
  if (hit) last_ = *hit;
  return hit;
}

}  // namespace platetopo
