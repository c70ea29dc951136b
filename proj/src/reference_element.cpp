#include "oldroyd/reference_element.hpp"

#include <cassert>
#include <stdexcept>

namespace oldroyd {

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::P1: return "P1";
    case ElementKind::P2: return "P2";
    case ElementKind::P1Bubble: return "P1-bubble";
    case ElementKind::P0: return "P0";
  }
  return "?";
}

int ReferenceElement::dof_count() const {
  switch (kind_) {
    case ElementKind::P1: return 3;
    case ElementKind::P2: return 6;
    case ElementKind::P1Bubble: return 4;
    case ElementKind::P0: return 1;
  }
  return 0;
}

void ReferenceElement::eval(double x, double y, std::span<double> v) const {
  assert(static_cast<int>(v.size()) >= dof_count());
  const double l1 = 1.0 - x - y;
  const double l2 = x;
  const double l3 = y;
  switch (kind_) {
    case ElementKind::P0:
      v[0] = 1.0;
      return;
    case ElementKind::P1:
      v[0] = l1;
      v[1] = l2;
      v[2] = l3;
      return;
    case ElementKind::P1Bubble:
      v[0] = l1;
      v[1] = l2;
      v[2] = l3;
      v[3] = 27.0 * l1 * l2 * l3;
      return;
    case ElementKind::P2:
      v[0] = l1 * (2.0 * l1 - 1.0);
      v[1] = l2 * (2.0 * l2 - 1.0);
      v[2] = l3 * (2.0 * l3 - 1.0);
      v[3] = 4.0 * l1 * l2;
      v[4] = 4.0 * l2 * l3;
      v[5] = 4.0 * l3 * l1;
      return;
  }
}

void ReferenceElement::grad(double x, double y, std::span<std::array<double, 2>> g) const {
  assert(static_cast<int>(g.size()) >= dof_count());
  const double l1 = 1.0 - x - y;
  const double l2 = x;
  const double l3 = y;
  // d(l1) = (-1,-1), d(l2) = (1,0), d(l3) = (0,1)
  switch (kind_) {
    case ElementKind::P0:
      g[0] = {0.0, 0.0};
      return;
    case ElementKind::P1:
      g[0] = {-1.0, -1.0};
      g[1] = {1.0, 0.0};
      g[2] = {0.0, 1.0};
      return;
    case ElementKind::P1Bubble:
      g[0] = {-1.0, -1.0};
      g[1] = {1.0, 0.0};
      g[2] = {0.0, 1.0};
      g[3] = {27.0 * (l3 * (l1 - l2)), 27.0 * (l2 * (l1 - l3))};
      return;
    case ElementKind::P2: {
      const double d1 = 4.0 * l1 - 1.0;
      g[0] = {-d1, -d1};
      g[1] = {4.0 * l2 - 1.0, 0.0};
      g[2] = {0.0, 4.0 * l3 - 1.0};
      g[3] = {4.0 * (l1 - l2), -4.0 * l2};
      g[4] = {4.0 * l3, 4.0 * l2};
      g[5] = {-4.0 * l3, 4.0 * (l1 - l3)};
      return;
    }
  }
}

std::array<double, 2> ReferenceElement::node(int i) const {
  static constexpr std::array<std::array<double, 2>, 3> vertex{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  if (i < 0 || i >= dof_count()) throw std::out_of_range("ReferenceElement::node");
  switch (kind_) {
    case ElementKind::P0:
      return {1.0 / 3.0, 1.0 / 3.0};
    case ElementKind::P1:
      return vertex[i];
    case ElementKind::P1Bubble:
      return i < 3 ? vertex[i] : std::array<double, 2>{1.0 / 3.0, 1.0 / 3.0};
    case ElementKind::P2:
      if (i < 3) return vertex[i];
      {
        const auto& a = vertex[i - 3];
        const auto& b = vertex[(i - 2) % 3];
        return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      }
  }
  return {};
}

bool ReferenceElement::is_nodal(int i) const {
  return !(kind_ == ElementKind::P1Bubble && i == 3);
}

}  // namespace oldroyd
