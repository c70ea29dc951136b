#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "oldroyd/mesh.hpp"
#include "oldroyd/reference_element.hpp"
#include "oldroyd/types.hpp"

namespace oldroyd {

enum class SpaceKind { VelocityP2, VelocityMini, PressureP0, PressureP1 };

std::string_view to_string(SpaceKind kind);

/// Degree-of-freedom layout of a (possibly vector-valued) Lagrange space.
///
/// Scalar dofs are numbered vertices first, then edges (P2) or cell bubbles
/// (MINI); P0 numbers cells. Vector dofs are component-blocked: dof
/// c * num_scalar_dofs() + s is component c of scalar dof s.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const ReferenceElement& element() const { return element_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  int components() const { return components_; }
  int dofs_per_cell() const { return element_.dof_count(); }
  std::size_t num_scalar_dofs() const { return num_scalar_dofs_; }
  std::size_t num_dofs() const { return num_scalar_dofs_ * static_cast<std::size_t>(components_); }
  bool is_velocity() const { return components_ == 2; }

  /// Global scalar dofs of a cell in local order.
  std::span<const int> cell_dofs(std::size_t cell) const {
    return {cell_dofs_.data() + cell * static_cast<std::size_t>(dofs_per_cell()),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  std::size_t vector_dof(int component, std::size_t scalar_dof) const {
    return static_cast<std::size_t>(component) * num_scalar_dofs_ + scalar_dof;
  }

  /// Physical nodal point of a scalar dof (centroid for bubble and P0 dofs).
  const Point2& node(std::size_t scalar_dof) const { return nodes_[scalar_dof]; }
  bool is_nodal(std::size_t scalar_dof) const { return nodal_[scalar_dof]; }

  /// Sorted vector dof indices on the boundary (velocity spaces only).
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<bool>& boundary_flags() const { return boundary_flags_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  ReferenceElement element_;
  int components_;
  std::size_t num_scalar_dofs_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<Point2> nodes_;
  std::vector<bool> nodal_;
  std::vector<int> boundary_dofs_;
  std::vector<bool> boundary_flags_;
};

FeSpace build_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

/// Nodal interpolation. Bubble dofs are set to zero; P0 dofs take the
/// centroid value. A scalar field into a vector space fills both components.
Vector interpolate(const FeSpace& space, const ScalarField& f, double t);
Vector interpolate(const FeSpace& space, const VectorField& f, double t);

}  // namespace oldroyd
