#include "platetopo/levelset.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "platetopo/error.hpp"

namespace platetopo {

namespace {

constexpr double kZeroShift = 1e-12;

double shifted(double v) { return v == 0.0 ? kZeroShift : v; }

// Cubic through (s, f) = (0, f0), (1, f1), (2, f2), (3, f3), in monomial form.
struct EdgeCubic {
  double c0, c1, c2, c3;
  double operator()(double s) const { return c0 + s * (c1 + s * (c2 + s * c3)); }
};

EdgeCubic edge_cubic(double f0, double f1, double f2, double f3) {
  const double d1 = f1 - f0;
  const double d2 = f2 - 2 * f1 + f0;
  const double d3 = f3 - 3 * f2 + 3 * f1 - f0;
  const double a = d1, b = d2 / 2.0, c = d3 / 6.0;
  return {f0, a - b + 2 * c, b - 3 * c, c};
}

double bisect(const EdgeCubic& p, double lo, double hi) {
  double flo = p(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Root of the edge cubic in (0, 3) nearest s = 1.5; endpoints have opposite signs.
double edge_root(const EdgeCubic& p) {
  std::vector<double> breaks{0.0};
  // Critical points split [0, 3] into monotone pieces.
  const double A = 3 * p.c3, B = 2 * p.c2, C = p.c1;
  std::vector<double> crit;
  if (std::abs(A) > 1e-300) {
    const double disc = B * B - 4 * A * C;
    if (disc > 0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (B + std::copysign(sq, B));
      crit.push_back(q / A);
      if (q != 0.0) crit.push_back(C / q);
    }
  } else if (std::abs(B) > 1e-300) {
    crit.push_back(-C / B);
  }
  std::sort(crit.begin(), crit.end());
  for (double s : crit)
    if (s > 0.0 && s < 3.0) breaks.push_back(s);
  breaks.push_back(3.0);

  double best = -1.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    const double flo = p(lo), fhi = p(hi);
    if ((flo < 0.0) == (fhi < 0.0)) continue;
    const double r = bisect(p, lo, hi);
    if (best < 0.0 || std::abs(r - 1.5) < std::abs(best - 1.5)) best = r;
  }
  if (best < 0.0) best = bisect(p, 0.0, 3.0);
  return best;
}

}  // namespace

double Polyline::length() const {
  double s = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) s += (points[i + 1] - points[i]).norm();
  return s;
}

double Polyline::signed_area() const {
  double s = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) s += cross2(points[i], points[i + 1]);
  return 0.5 * s;
}

double BoundaryTrace::length() const {
  double s = 0.0;
  for (const auto& c : components) s += c.length();
  return s;
}

BoundaryTrace extract_boundary(const ScalarField& g) {
  require(g.space().kind() == SpaceKind::P3, "extract_boundary: level set must be a P3 field");
  const TriMesh& m = g.space().mesh();
  const int nv = m.num_vertices(), ne = m.num_edges(), nt = m.num_triangles();
  const Eigen::VectorXd& G = g.coeffs();

  std::vector<char> neg(nv);
  for (int v = 0; v < nv; ++v) neg[v] = shifted(G[v]) < 0.0;

  std::vector<Point2> crossing(ne);
  std::vector<char> crossed(ne, 0);
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = m.edge(e);
    if (neg[ed.v0] == neg[ed.v1]) continue;
    if (m.is_boundary_edge(e))
      fail(ErrorCode::Geometry, "extract_boundary: zero level set reaches the boundary of D");
    const EdgeCubic p = edge_cubic(shifted(G[ed.v0]), G[nv + 2 * e], G[nv + 2 * e + 1], shifted(G[ed.v1]));
    const double s = edge_root(p) / 3.0;
    crossing[e] = (1.0 - s) * m.vertex(ed.v0) + s * m.vertex(ed.v1);
    crossed[e] = 1;
  }

  // Per crossed triangle, the oriented segment: from in_edge to out_edge.
  std::vector<int> in_edge(nt, -1), out_edge(nt, -1);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = m.triangle(t);
    const bool n0 = neg[tr[0]], n1 = neg[tr[1]], n2 = neg[tr[2]];
    if (n0 == n1 && n1 == n2) continue;
    const int lone = (n0 != n1 && n0 != n2) ? 0 : (n1 != n0 && n1 != n2 ? 1 : 2);
    // Triangle (L, P, Q) counterclockwise with L = lone. Edge LP is local edge
    // lone+2, edge LQ is local edge lone+1.
    const int e_lp = m.triangle_edge(t, (lone + 2) % 3);
    const int e_lq = m.triangle_edge(t, (lone + 1) % 3);
    if (neg[tr[lone]]) {
      in_edge[t] = e_lp;
      out_edge[t] = e_lq;
    } else {
      in_edge[t] = e_lq;
      out_edge[t] = e_lp;
    }
  }

  BoundaryTrace trace;
  std::vector<char> visited(nt, 0);
  for (int start = 0; start < nt; ++start) {
    if (in_edge[start] < 0 || visited[start]) continue;
    Polyline poly;
    int t = start;
    poly.points.push_back(crossing[in_edge[t]]);
    poly.edges.push_back(in_edge[t]);
    while (true) {
      visited[t] = 1;
      const int e = out_edge[t];
      poly.triangles.push_back(t);
      poly.points.push_back(crossing[e]);
      const auto& et = m.edge_triangles(e);
      const int next = et[0] == t ? et[1] : et[0];
      if (next < 0 || in_edge[next] != e)
        fail(ErrorCode::Geometry, "extract_boundary: open boundary chain");
      if (next == start) break;
      if (visited[next]) fail(ErrorCode::Geometry, "extract_boundary: inconsistent boundary chain");
      poly.edges.push_back(e);
      t = next;
    }
    poly.points.back() = poly.points.front();
    trace.components.push_back(std::move(poly));
  }
  return trace;
}

std::vector<Point2> component_seeds(BoundaryTrace& trace, const ScalarField& g) {
  std::vector<Point2> seeds;
  for (auto& c : trace.components) {
    double best = -1.0;
    int best_l = 0;
    for (int l = 0; l < c.segment_count(); ++l) {
      const double gn = g.gradient_in(c.triangles[l], c.points[l]).norm();
      if (gn > best) {
        best = gn;
        best_l = l;
      }
    }
    if (best < 1e-8)
      fail(ErrorCode::DegenerateGradient, "component_seeds: vanishing gradient on a boundary component");
    c.seed = c.points[best_l];
    seeds.push_back(c.seed);
  }
  return seeds;
}

bool positive_on_box_boundary(const ScalarField& g) {
  const TriMesh& m = g.space().mesh();
  const int nv = m.num_vertices();
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) continue;
    const Edge& ed = m.edge(e);
    if (g.space().kind() == SpaceKind::P3) {
      if (!(g.coeffs()[nv + 2 * e] > 0.0 && g.coeffs()[nv + 2 * e + 1] > 0.0)) return false;
    }
    if (!(g.coeffs()[ed.v0] > 0.0 && g.coeffs()[ed.v1] > 0.0)) return false;
  }
  return true;
}

void write_trace_csv(std::ostream& out, const BoundaryTrace& trace) {
  out.precision(17);
  out << "component,index,x,y\n";
  for (int c = 0; c < trace.size(); ++c) {
    const auto& pts = trace.components[c].points;
    for (size_t i = 0; i < pts.size(); ++i)
      out << c << ',' << i << ',' << pts[i].x() << ',' << pts[i].y() << '\n';
  }
}

void write_trace_csv(const std::string& path, const BoundaryTrace& trace) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  write_trace_csv(out, trace);
}

}  // namespace platetopo
