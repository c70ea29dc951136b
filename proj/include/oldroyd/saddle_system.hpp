#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oldroyd/sparse_matrix.hpp"
#include "oldroyd/types.hpp"

namespace oldroyd {

/// Raised when the direct solver meets a zero pivot. `index()` is the
/// original column of the system at which elimination broke down.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, long index)
      : std::runtime_error(what), index_(index) {}
  long index() const { return index_; }

 private:
  long index_;
};

/// Raised when a solve cannot reach the requested relative residual.
class LinearSolveError : public std::runtime_error {
 public:
  LinearSolveError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Sparse LU (UMFPACK) with partial pivoting and a fill-reducing ordering.
///
/// The symbolic analysis is kept between calls to factorize() as long as the
/// sparsity pattern does not change. solve() is const.
class DirectSolver {
 public:
  DirectSolver();
  explicit DirectSolver(const SparseMatrix& a);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  void factorize(const SparseMatrix& a);

  /// Solves A x = b; applies iterative refinement until the relative
  /// residual is below `tolerance` (throws LinearSolveError otherwise).
  Vector solve(std::span<const double> rhs, double tolerance = 1e-10) const;

  /// Solves a x = rhs for a nearby matrix `a` of the same size, using the
  /// current factors as preconditioner in iterative refinement from the
  /// initial guess in `x`. Returns false when the residual stops contracting
  /// or `max_sweeps` is reached above `tolerance`.
  bool refine(const SparseMatrix& a, std::span<const double> rhs, Vector& x, double tolerance,
              int max_sweeps = 30) const;

  std::size_t size() const;
  /// Number of times a fresh column ordering was computed.
  int symbolic_analyses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Block system
///
///   [ K   -B^T ] [u]   [f]
///   [ -B   0   ] [p] = [g]
///
/// with Dirichlet rows and columns of K replaced by identity (zero boundary
/// values). Pressure is determined up to constants by this system; when a
/// constraint c is given, the last pressure row is replaced by p_last = 0 and
/// the solution is shifted afterwards so that c^T p = 0.
struct SaddleSystem {
  SparseMatrix velocity_block;  // K
  SparseMatrix divergence;      // B_ij = (div phi_j, chi_i)
  std::vector<int> dirichlet_dofs;
  Vector pressure_constraint;   // c
  Vector rhs_velocity;
  Vector rhs_pressure;          // empty means zero; must satisfy sum g = 0 when c is given
};

struct SaddleSolution {
  Vector velocity;
  Vector pressure;
};

/// Builds the saddle matrix for a fixed velocity-block pattern and refills
/// it in place for new velocity-block values.
class SaddleMatrixBuilder {
 public:
  SaddleMatrixBuilder(const SparseMatrix& velocity_pattern, const SparseMatrix& divergence,
                      std::span<const int> dirichlet_dofs, const Vector& pressure_constraint);

  /// `velocity_block` must share the pattern given at construction.
  const SparseMatrix& assemble(const SparseMatrix& velocity_block);
  Vector rhs(std::span<const double> rhs_velocity, std::span<const double> rhs_pressure) const;
  /// Splits a solution vector and normalizes the pressure.
  SaddleSolution split(std::span<const double> x) const;

  std::size_t num_velocity() const { return nu_; }
  std::size_t num_pressure() const { return np_; }
  std::size_t size() const { return matrix_.rows(); }
  /// Pressure index held at zero during the solve, or npos when unconstrained.
  std::size_t pinned_pressure() const { return pinned_; }
  const SparseMatrix& matrix() const { return matrix_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t nu_;
  std::size_t np_;
  Vector constraint_;
  double constraint_total_ = 0.0;
  std::size_t pinned_ = npos;
  SparseMatrix velocity_pattern_;
  std::vector<bool> dirichlet_;
  std::vector<long> velocity_slot_;  // velocity value index -> saddle value index (or -1)
  SparseMatrix matrix_;
};

/// One-shot factorize + solve of a SaddleSystem.
DirectSolver factorize(const SaddleSystem& system);
SaddleSolution solve(const SaddleSystem& system, double tolerance = 1e-10);

/// Splits a stacked saddle solution vector.
SaddleSolution split_solution(std::span<const double> x, std::size_t nu, std::size_t np);

}  // namespace oldroyd
