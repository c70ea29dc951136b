#pragma once

#include <array>
#include <span>
#include <string_view>

namespace oldroyd {

enum class ElementKind { P1, P2, P1Bubble, P0 };

std::string_view to_string(ElementKind kind);

/// Shape functions on the reference triangle {(0,0),(1,0),(0,1)} with
/// barycentrics l1 = 1-x-y, l2 = x, l3 = y.
///
/// Local numbering: vertex dofs 0..2 first; P2 edge dofs 3..5 where local
/// edge k joins vertices k and (k+1)%3; the P1Bubble cell bubble is dof 3.
/// The bubble is 27 l1 l2 l3, equal to 1 at the centroid.
class ReferenceElement {
 public:
  static constexpr int kMaxDofs = 6;

  explicit ReferenceElement(ElementKind kind) : kind_(kind) {}

  ElementKind kind() const { return kind_; }
  int dof_count() const;

  void eval(double x, double y, std::span<double> values) const;
  void grad(double x, double y, std::span<std::array<double, 2>> gradients) const;

  /// Reference coordinates of the node associated with local dof i.
  std::array<double, 2> node(int i) const;
  /// True for dofs that interpolate point values (everything except the bubble).
  bool is_nodal(int i) const;

 private:
  ElementKind kind_;
};

}  // namespace oldroyd
