#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace oldroyd {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Affine map from the reference triangle {(0,0),(1,0),(0,1)} onto a cell:
/// x = origin + jacobian * xi.
struct CellGeometry {
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_jacobian;
  Eigen::Vector2d origin;
  double area = 0.0;

  Point2 map(double xi, double eta) const;
};

/// Conforming triangulation of the unit square.
///
/// Local edge k of a cell joins its vertices k and (k+1)%3. For every edge
/// the first incident cell is listed in edge_cells[e][0]; boundary edges
/// carry -1 in the second slot.
class Mesh {
 public:
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& cell_edges() const { return cell_edges_; }
  const std::vector<std::array<int, 2>>& edge_cells() const { return edge_cells_; }
  const std::vector<bool>& boundary_vertex_flags() const { return boundary_vertex_; }
  const std::vector<bool>& boundary_edge_flags() const { return boundary_edge_; }

  /// Maximum edge length.
  double h() const { return h_; }
  /// Number of subdivisions per side of the structured grid.
  int subdivisions() const { return subdivisions_; }

  CellGeometry cell_geometry(std::size_t cell) const;
  double signed_area(std::size_t cell) const;

  /// Plain-text dump: "v x y" per vertex, then "c i j k" per cell.
  void write_text(std::ostream& os) const;

  friend Mesh build_unit_square_mesh(int n);

 private:
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<bool> boundary_vertex_;
  std::vector<bool> boundary_edge_;
  double h_ = 0.0;
  int subdivisions_ = 0;
};

/// n x n squares, each split along the diagonal from (i/n, j/n) to
/// ((i+1)/n, (j+1)/n). Vertices are numbered j*(n+1)+i; each square
/// contributes its lower triangle first.
Mesh build_unit_square_mesh(int n);

}  // namespace oldroyd
