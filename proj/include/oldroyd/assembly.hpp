#pragma once

#include <span>
#include <vector>

#include "oldroyd/fe_space.hpp"
#include "oldroyd/quadrature.hpp"
#include "oldroyd/sparse_matrix.hpp"
#include "oldroyd/types.hpp"

namespace oldroyd {

/// Degree used for operator assembly: 5 for P2 velocity (exact for mass,
/// stiffness and convection), 8 for MINI (exact with the cubic bubble).
int default_assembly_degree(const FeSpace& velocity);
inline constexpr int kForcingDegree = 8;

/// Basis values and physical gradients at the quadrature points of every
/// cell of a space.
class ElementCache {
 public:
  ElementCache(const FeSpace& space, int quadrature_degree);

  const FeSpace& space() const { return *space_; }
  const QuadratureRule& rule() const { return *rule_; }
  int dofs_per_cell() const { return nd_; }
  std::size_t num_points() const { return rule_->size(); }

  /// Quadrature weight including the Jacobian.
  double weight(std::size_t cell, std::size_t q) const { return weights_[cell * nq_ + q]; }
  const Point2& point(std::size_t cell, std::size_t q) const { return points_[cell * nq_ + q]; }
  double value(std::size_t q, int i) const { return values_[q * nd_ + i]; }
  const Vec2& grad(std::size_t cell, std::size_t q, int i) const {
    return grads_[(cell * nq_ + q) * nd_ + i];
  }

  /// Value of a finite element function at a quadrature point (one component).
  double eval(std::span<const double> coeffs, int component, std::size_t cell,
              std::size_t q) const;
  Vec2 eval_grad(std::span<const double> coeffs, int component, std::size_t cell,
                 std::size_t q) const;

 private:
  const FeSpace* space_;
  const QuadratureRule* rule_;
  int nd_;
  std::size_t nq_;
  std::vector<double> weights_;
  std::vector<Point2> points_;
  std::vector<double> values_;
  std::vector<Vec2> grads_;
};

/// Velocity operators on a fixed pattern, plus the divergence coupling.
///
/// All velocity matrices share one pattern: block-diagonal over the two
/// components, with the scalar pattern induced by cell connectivity.
class OperatorSet {
 public:
  OperatorSet(const FeSpace& velocity, const FeSpace& pressure);
  OperatorSet(const FeSpace& velocity, const FeSpace& pressure, int quadrature_degree);

  const FeSpace& velocity() const { return *velocity_; }
  const FeSpace& pressure() const { return *pressure_; }

  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& divergence() const { return divergence_; }
  const SparseMatrix& pressure_mass() const { return pressure_mass_; }
  /// Integrals of the pressure basis functions (area-weighted mean functional).
  const Vector& pressure_weights() const { return pressure_weights_; }
  /// Zero matrix with the shared velocity pattern.
  const SparseMatrix& velocity_pattern() const { return pattern_; }

  /// N(w)_ij = b(w, phi_j, phi_i) with the skew-symmetric trilinear form.
  SparseMatrix convection(std::span<const double> w) const;
  /// Overwrites `out` (which must carry the velocity pattern) with N(w).
  void convection_into(std::span<const double> w, SparseMatrix& out) const;

  /// (f(., t), phi_i) with the degree-8 rule.
  Vector load(const VectorField& f, double t) const;

 private:
  void scatter(std::size_t cell, std::span<const double> local, SparseMatrix& m) const;

  const FeSpace* velocity_;
  const FeSpace* pressure_;
  ElementCache cache_;
  ElementCache load_cache_;
  std::vector<long> slots_;  // per cell: nd*nd local pairs x 2 components
  SparseMatrix pattern_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix divergence_;
  SparseMatrix pressure_mass_;
  Vector pressure_weights_;
};

SparseMatrix assemble_mass(const FeSpace& velocity);
SparseMatrix assemble_stiffness(const FeSpace& velocity);
/// Rows are pressure dofs, columns velocity dofs; only MINI/P1 and P2/P0 pairs.
SparseMatrix assemble_divergence(const FeSpace& velocity, const FeSpace& pressure);
SparseMatrix assemble_convection(const FeSpace& velocity, std::span<const double> w);
Vector assemble_load(const FeSpace& velocity, const VectorField& f, double t);

/// Scalar mass matrix of a pressure space.
SparseMatrix assemble_pressure_mass(const FeSpace& pressure);
/// Integral of each pressure basis function.
Vector pressure_mean_weights(const FeSpace& pressure);

bool compatible_pair(const FeSpace& velocity, const FeSpace& pressure);

}  // namespace oldroyd
