#pragma once

#include <array>
#include <functional>
#include <vector>

namespace oldroyd {

using Vec2 = std::array<double, 2>;
/// Row-major 2x2: m[i][j] = d(u_i)/d(x_j) for gradients.
using Mat2 = std::array<Vec2, 2>;
using Vector = std::vector<double>;

using ScalarField = std::function<double(double x, double y, double t)>;
using VectorField = std::function<Vec2(double x, double y, double t)>;

}  // namespace oldroyd
