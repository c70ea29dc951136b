#pragma once

#include <array>
#include <vector>

namespace oldroyd {

/// Symmetric Gauss rule on the reference triangle {(0,0),(1,0),(0,1)}.
/// Points are barycentric (l1, l2, l3) with x = l2, y = l3; weights sum to
/// the reference area 1/2.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
  double xi(std::size_t q) const { return points[q][1]; }
  double eta(std::size_t q) const { return points[q][2]; }
};

/// Smallest built-in rule exact to at least `degree` (1..8). Rules have
/// 1, 3, 6, 7, 12 and 16 points, all with positive weights.
const QuadratureRule& quadrature_rule(int degree);

}  // namespace oldroyd
