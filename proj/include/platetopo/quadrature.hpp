#pragma once

#include <array>
#include <cmath>

namespace platetopo::quadrature {

struct TriPoint {
  std::array<double, 3> bary;
  double weight;  // relative to the triangle area; weights sum to 1
};

// Seven-point rule exact for polynomials of total degree <= 5.
inline const std::array<TriPoint, 7>& triangle_degree5() {
  static const std::array<TriPoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (9.0 - 2.0 * s15) / 21.0, b1 = (6.0 + s15) / 21.0;
    const double a2 = (9.0 + 2.0 * s15) / 21.0, b2 = (6.0 - s15) / 21.0;
    const double w1 = (155.0 + s15) / 1200.0, w2 = (155.0 - s15) / 1200.0;
    return std::array<TriPoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
        {{a1, b1, b1}, w1},
        {{b1, a1, b1}, w1},
        {{b1, b1, a1}, w1},
        {{a2, b2, b2}, w2},
        {{b2, a2, b2}, w2},
        {{b2, b2, a2}, w2},
    }};
  }();
  return rule;
}

struct LinePoint {
  double t;       // position in [0, 1]
  double weight;  // relative to the segment length
};

// Three-point Gauss-Legendre rule on [0, 1].
inline const std::array<LinePoint, 3>& gauss3() {
  static const std::array<LinePoint, 3> rule = [] {
    const double d = 0.5 * std::sqrt(3.0 / 5.0);
    return std::array<LinePoint, 3>{{{0.5 - d, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + d, 5.0 / 18.0}}};
  }();
  return rule;
}

}  // namespace platetopo::quadrature
