#include "oldroyd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace oldroyd {

Point2 CellGeometry::map(double xi, double eta) const {
  const Eigen::Vector2d p = origin + jacobian * Eigen::Vector2d(xi, eta);
  return {p.x(), p.y()};
}

Mesh build_unit_square_mesh(int n) {
  if (n < 1) {
    throw std::invalid_argument("build_unit_square_mesh: n must be >= 1, got " +
                                std::to_string(n));
  }
  Mesh mesh;
  mesh.subdivisions_ = n;
  const int nv = n + 1;
  const auto vid = [nv](int i, int j) { return j * nv + i; };

  mesh.vertices_.reserve(static_cast<std::size_t>(nv * nv));
  mesh.boundary_vertex_.reserve(static_cast<std::size_t>(nv * nv));
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nv; ++i) {
      mesh.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      mesh.boundary_vertex_.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }

  mesh.cells_.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j);
      const int b = vid(i + 1, j);
      const int c = vid(i + 1, j + 1);
      const int d = vid(i, j + 1);
      mesh.cells_.push_back({a, b, c});
      mesh.cells_.push_back({a, c, d});
    }
  }

  // Edges numbered in order of first appearance while sweeping cells.
  std::map<std::pair<int, int>, int> edge_index;
  mesh.cell_edges_.resize(mesh.cells_.size());
  for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
    const auto& cell = mesh.cells_[c];
    for (int k = 0; k < 3; ++k) {
      const int v0 = cell[k];
      const int v1 = cell[(k + 1) % 3];
      const auto key = std::minmax(v0, v1);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second},
                                                   static_cast<int>(mesh.edges_.size()));
      if (inserted) {
        mesh.edges_.push_back({key.first, key.second});
        mesh.edge_cells_.push_back({static_cast<int>(c), -1});
      } else {
        mesh.edge_cells_[it->second][1] = static_cast<int>(c);
      }
      mesh.cell_edges_[c][k] = it->second;
    }
  }

  mesh.boundary_edge_.resize(mesh.edges_.size());
  double h = 0.0;
  for (std::size_t e = 0; e < mesh.edges_.size(); ++e) {
    mesh.boundary_edge_[e] = mesh.edge_cells_[e][1] < 0;
    const Point2& p = mesh.vertices_[mesh.edges_[e][0]];
    const Point2& q = mesh.vertices_[mesh.edges_[e][1]];
    h = std::max(h, std::hypot(q.x - p.x, q.y - p.y));
  }
  mesh.h_ = h;
  return mesh;
}

double Mesh::signed_area(std::size_t cell) const {
  const auto& c = cells_.at(cell);
  const Point2& a = vertices_[c[0]];
  const Point2& b = vertices_[c[1]];
  const Point2& d = vertices_[c[2]];
  return 0.5 * ((b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y));
}

CellGeometry Mesh::cell_geometry(std::size_t cell) const {
  if (cell >= cells_.size()) {
    throw std::out_of_range("cell_geometry: cell index " + std::to_string(cell) +
                            " out of range (" + std::to_string(cells_.size()) + " cells)");
  }
  const auto& c = cells_[cell];
  const Point2& a = vertices_[c[0]];
  const Point2& b = vertices_[c[1]];
  const Point2& d = vertices_[c[2]];
  CellGeometry g;
  g.origin = {a.x, a.y};
  g.jacobian << b.x - a.x, d.x - a.x,
                b.y - a.y, d.y - a.y;
  const double det = g.jacobian.determinant();
  g.inverse_jacobian = g.jacobian.inverse();
  g.area = 0.5 * std::abs(det);
  return g;
}

void Mesh::write_text(std::ostream& os) const {
  for (const Point2& p : vertices_) {
    os << "v " << p.x << ' ' << p.y << '\n';
  }
  for (const auto& c : cells_) {
    os << "c " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  }
}

}  // namespace oldroyd
