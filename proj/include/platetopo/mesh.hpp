#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "platetopo/geometry.hpp"

namespace platetopo {

using Triangle = std::array<int, 3>;

// An undirected edge stored with v0 < v1.
struct Edge {
  int v0 = -1;
  int v1 = -1;
};

/// Conforming triangulation of the polygonal hold-all box D.
///
/// Triangles are positively oriented. Local edge k of a triangle is the edge
/// opposite local vertex k, i.e. (tri[k+1], tri[k+2]).
class TriMesh {
 public:
  TriMesh(std::vector<Point2> vertices, std::vector<Triangle> triangles);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const Point2& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }

  // Global edge index of local edge k of triangle t.
  int triangle_edge(int t, int k) const { return tri_edges_[t][k]; }
  // Incident triangles of an edge; second entry is -1 on the boundary.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_tris_[e]; }
  // Triangle across local edge k of t, or -1 on the boundary.
  int neighbor(int t, int k) const;

  bool is_boundary_edge(int e) const { return edge_tris_[e][1] < 0; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  std::vector<std::pair<int, int>> boundary_edges() const;

  // Triangles sharing vertex v.
  const std::vector<int>& vertex_triangles(int v) const { return vertex_tris_[v]; }

  double area(int t) const { return areas_[t]; }
  double total_area() const;
  Point2 centroid(int t) const;

  // Barycentric coordinates of p with respect to triangle t.
  std::array<double, 3> barycentric(int t, const Point2& p) const;

  // Axis-aligned bounding box of all vertices.
  Point2 bbox_min() const { return bbox_min_; }
  Point2 bbox_max() const { return bbox_max_; }

 private:
  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 2>> edge_tris_;
  std::vector<std::vector<int>> vertex_tris_;
  std::vector<char> boundary_vertex_;
  std::vector<double> areas_;
  Point2 bbox_min_, bbox_max_;
};

using MeshPtr = std::shared_ptr<const TriMesh>;

/// Structured criss-cross triangulation of [side_min, side_max]^2: each of the
/// n_divisions^2 squares is split by a diagonal whose direction alternates in
/// a checkerboard pattern.
TriMesh generate_square_mesh(double side_min, double side_max, int n_divisions);

// Plain-text format: "n_v n_t", n_v lines "x y", n_t lines "i j k" (0-based).
TriMesh read_mesh(std::istream& in);
TriMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const TriMesh& mesh);

/// Point location by walking from the last hit triangle, with a bucket-grid
/// fallback. Holds a cache, so use one locator per worker.
class PointLocator {
 public:
  explicit PointLocator(MeshPtr mesh);

  // A triangle whose closure contains p (barycentrics >= -1e-12), or nullopt
  // when p lies outside the closure of D.
  std::optional<int> locate(const Point2& p) const;

  const TriMesh& mesh() const { return *mesh_; }

 private:
  bool contains(int t, const Point2& p) const;
  std::optional<int> walk(int start, const Point2& p) const;
  std::optional<int> bucket_search(const Point2& p) const;

  MeshPtr mesh_;
  int nx_ = 1, ny_ = 1;
  double cell_w_ = 1.0, cell_h_ = 1.0;
  std::vector<std::vector<int>> buckets_;
  mutable int last_ = 0;
};

}  // namespace platetopo
