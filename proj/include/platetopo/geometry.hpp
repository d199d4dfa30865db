#pragma once

#include <Eigen/Core>
#include <array>

namespace platetopo {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Twice the signed area of (a, b, c); positive when counterclockwise.
inline double orient2(const Point2& a, const Point2& b, const Point2& c) {
  return cross2(b - a, c - a);
}

// Rotation by +90 degrees: the Hamiltonian field is rot90(grad g).
inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

}  // namespace platetopo
