#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "platetopo/fem.hpp"

namespace platetopo {

/// One closed component of the discrete free boundary {g_h = 0}.
///
/// points[0..n] with points[n] == points[0]; segment l = [points[l], points[l+1]]
/// lies in triangles[l]. Vertex l (l < n) sits on mesh edge edges[l]. The
/// region {g_h < 0} is on the left of every segment.
struct Polyline {
  std::vector<Point2> points;
  std::vector<int> triangles;
  std::vector<int> edges;
  Point2 seed = Point2::Zero();
  double period = 0.0;  // set once the component is traced as an orbit

  int segment_count() const { return static_cast<int>(triangles.size()); }
  double length() const;
  double signed_area() const;
};

struct BoundaryTrace {
  std::vector<Polyline> components;

  int size() const { return static_cast<int>(components.size()); }
  bool empty() const { return components.empty(); }
  double length() const;
};

/// Piecewise-linear approximation of {g_h = 0} for a P3 level-set field.
///
/// Edges whose endpoint values change sign carry one crossing, the root of
/// the cubic edge restriction nearest the middle of the edge. Vertex values
/// equal to zero count as +1e-12. Throws a geometry error when the zero set
/// reaches the boundary of D.
BoundaryTrace extract_boundary(const ScalarField& g);

/// One seed per component: the polyline vertex with the largest |grad g_h|.
/// Also stored in each Polyline::seed.
std::vector<Point2> component_seeds(BoundaryTrace& trace, const ScalarField& g);

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

/// Pointwise evaluators of max(g, 0) and max(g, 0)^2, for use inside
/// quadrature loops (no re-interpolation).
class PositivePartFields {
 public:
  explicit PositivePartFields(const ScalarField& g) : g_(&g) {}
  double gp_in(int t, const Point2& p) const { return positive_part(g_->value_in(t, p)); }
  double gp_squared_in(int t, const Point2& p) const {
    const double v = gp_in(t, p);
    return v * v;
  }
  double gp(const PointLocator& loc, const Point2& p) const { return positive_part(evaluate(*g_, loc, p)); }
  double gp_squared(const PointLocator& loc, const Point2& p) const {
    const double v = gp(loc, p);
    return v * v;
  }

 private:
  const ScalarField* g_;
};

// True when every P3 node on the boundary of D has g > 0.
bool positive_on_box_boundary(const ScalarField& g);

// CSV with header "component,index,x,y".
void write_trace_csv(std::ostream& out, const BoundaryTrace& trace);
void write_trace_csv(const std::string& path, const BoundaryTrace& trace);

}  // namespace platetopo
