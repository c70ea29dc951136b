#include "oldroyd/fe_space.hpp"

#include <string>
#include <stdexcept>
#include <utility>

namespace oldroyd {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::VelocityP2: return "velocity-P2";
    case SpaceKind::VelocityMini: return "velocity-MINI";
    case SpaceKind::PressureP0: return "pressure-P0";
    case SpaceKind::PressureP1: return "pressure-P1";
  }
  return "?";
}

namespace {

ElementKind element_for(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::VelocityP2: return ElementKind::P2;
    case SpaceKind::VelocityMini: return ElementKind::P1Bubble;
    case SpaceKind::PressureP0: return ElementKind::P0;
    case SpaceKind::PressureP1: return ElementKind::P1;
  }
  throw std::invalid_argument("unknown space kind");
}

Point2 centroid(const Mesh& mesh, std::size_t cell) {
  const auto& c = mesh.cells()[cell];
  const auto& v = mesh.vertices();
  return {(v[c[0]].x + v[c[1]].x + v[c[2]].x) / 3.0, (v[c[0]].y + v[c[1]].y + v[c[2]].y) / 3.0};
}

}  // namespace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)),
      kind_(kind),
      element_(element_for(kind)),
      components_(kind == SpaceKind::VelocityP2 || kind == SpaceKind::VelocityMini ? 2 : 1) {
  if (!mesh_ || mesh_->num_cells() == 0) {
    throw std::invalid_argument("FeSpace: empty mesh");
  }
  const Mesh& m = *mesh_;
  const std::size_t nv = m.num_vertices();
  const std::size_t nc = m.num_cells();
  const int per_cell = element_.dof_count();
  cell_dofs_.resize(nc * static_cast<std::size_t>(per_cell));

  std::vector<bool> scalar_boundary;
  switch (kind_) {
    case SpaceKind::PressureP0:
      num_scalar_dofs_ = nc;
      for (std::size_t c = 0; c < nc; ++c) {
        cell_dofs_[c] = static_cast<int>(c);
        nodes_.push_back(centroid(m, c));
      }
      nodal_.assign(nc, true);
      scalar_boundary.assign(nc, false);
      break;
    case SpaceKind::PressureP1:
    case SpaceKind::VelocityMini:
    case SpaceKind::VelocityP2: {
      nodes_ = m.vertices();
      nodal_.assign(nv, true);
      scalar_boundary = m.boundary_vertex_flags();
      num_scalar_dofs_ = nv;
      for (std::size_t c = 0; c < nc; ++c) {
        for (int k = 0; k < 3; ++k) {
          cell_dofs_[c * per_cell + k] = m.cells()[c][k];
        }
      }
      if (kind_ == SpaceKind::VelocityP2) {
        for (std::size_t e = 0; e < m.num_edges(); ++e) {
          const Point2& a = m.vertices()[m.edges()[e][0]];
          const Point2& b = m.vertices()[m.edges()[e][1]];
          nodes_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
          nodal_.push_back(true);
          scalar_boundary.push_back(m.boundary_edge_flags()[e]);
        }
        for (std::size_t c = 0; c < nc; ++c) {
          for (int k = 0; k < 3; ++k) {
            cell_dofs_[c * per_cell + 3 + k] = static_cast<int>(nv) + m.cell_edges()[c][k];
          }
        }
        num_scalar_dofs_ = nv + m.num_edges();
      } else if (kind_ == SpaceKind::VelocityMini) {
        for (std::size_t c = 0; c < nc; ++c) {
          nodes_.push_back(centroid(m, c));
          nodal_.push_back(false);
          scalar_boundary.push_back(false);
          cell_dofs_[c * per_cell + 3] = static_cast<int>(nv + c);
        }
        num_scalar_dofs_ = nv + nc;
      }
      break;
    }
  }

  boundary_flags_.assign(num_dofs(), false);
  if (is_velocity()) {
    for (int comp = 0; comp < components_; ++comp) {
      for (std::size_t s = 0; s < num_scalar_dofs_; ++s) {
        if (scalar_boundary[s]) {
          const std::size_t d = vector_dof(comp, s);
          boundary_flags_[d] = true;
          boundary_dofs_.push_back(static_cast<int>(d));
        }
      }
    }
  }
}

FeSpace build_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind) {
  return FeSpace(std::move(mesh), kind);
}

Vector interpolate(const FeSpace& space, const ScalarField& f, double t) {
  Vector coeffs(space.num_dofs(), 0.0);
  for (std::size_t s = 0; s < space.num_scalar_dofs(); ++s) {
    if (!space.is_nodal(s)) continue;
    const Point2& p = space.node(s);
    const double value = f(p.x, p.y, t);
    for (int c = 0; c < space.components(); ++c) coeffs[space.vector_dof(c, s)] = value;
  }
  return coeffs;
}

Vector interpolate(const FeSpace& space, const VectorField& f, double t) {
  if (!space.is_velocity()) {
    throw std::invalid_argument("interpolate: vector field into scalar space " +
                                std::string(to_string(space.kind())));
  }
  Vector coeffs(space.num_dofs(), 0.0);
  for (std::size_t s = 0; s < space.num_scalar_dofs(); ++s) {
    if (!space.is_nodal(s)) continue;
    const Point2& p = space.node(s);
    const Vec2 value = f(p.x, p.y, t);
    coeffs[space.vector_dof(0, s)] = value[0];
    coeffs[space.vector_dof(1, s)] = value[1];
  }
  return coeffs;
}

}  // namespace oldroyd
