#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oldroyd/assembly.hpp"
#include "oldroyd/fe_space.hpp"
#include "oldroyd/manufactured.hpp"
#include "oldroyd/memory.hpp"
#include "oldroyd/saddle_system.hpp"
#include "oldroyd/types.hpp"

namespace oldroyd {

struct SolveControls {
  double picard_tol = 1e-10;  // relative L2 increment
  int picard_max = 50;
  double linear_tol = 1e-10;  // relative residual of each saddle solve

  void validate() const;
};

/// Per-step record of the quantities bounded uniformly in time by the
/// stability analysis.
struct MonitorRecord {
  int n = 0;
  double t = 0.0;
  double l2_norm = 0.0;             // ||U^n||
  double h1_seminorm = 0.0;         // ||grad U^n||
  double memory_h1_seminorm = 0.0;  // ||grad U_beta^n||
  int picard_iters = 0;
};

struct StepperState {
  int n = 0;
  double t = 0.0;
  Vector velocity;
  Vector pressure;
  MemoryAccumulator memory;
  std::vector<MonitorRecord> monitors;
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(const std::string& what, double last_increment, int iterations)
      : std::runtime_error(what), last_increment_(last_increment), iterations_(iterations) {}
  double last_increment() const { return last_increment_; }
  int iterations() const { return iterations_; }

 private:
  double last_increment_;
  int iterations_;
};

/// A failure inside run(); `step()` is the index n of the step being computed.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Velocity and pressure projections of the initial data.
struct InitialProjection {
  Vector velocity;
  Vector multiplier;  // pressure-space Lagrange multiplier of the constraint B U = 0
};

/// Discretely divergence-free L2 projection: M U + (-B^T) l = (u0, phi), B U = 0.
InitialProjection project_initial_velocity(const OperatorSet& ops, const VectorField& u0,
                                           double linear_tol = 1e-10);

/// Fully implicit backward Euler with right-rectangle memory quadrature.
///
/// Each step solves, by Picard iteration on the transport field,
///   [M/k + (mu + k gamma) A + N(W)] U - B^T P = M U^n / k + F^{n+1} - e^{-delta k} A U_beta^n
///   -B U = 0,  c^T P = 0
/// and then advances U_beta^{n+1} = k gamma U^{n+1} + e^{-delta k} U_beta^n.
class BackwardEulerStepper {
 public:
  BackwardEulerStepper(const FeSpace& velocity, const FeSpace& pressure, ModelParams params,
                       double k, SolveControls controls = {});

  const OperatorSet& operators() const { return ops_; }
  const ModelParams& params() const { return params_; }
  double time_step() const { return k_; }
  const SolveControls& controls() const { return controls_; }

  StepperState initial_state(Vector u0) const;
  /// Advances `state` from t_n to t_{n+1}; forcing is evaluated at t_{n+1}.
  void step(StepperState& state, const VectorField& forcing);

  /// Numeric factorizations so far; each step needs at least one.
  long factorizations() const { return factorizations_; }

  double l2_norm(std::span<const double> u) const;
  double h1_seminorm(std::span<const double> u) const;
  double pressure_l2_norm(std::span<const double> p) const;
  /// ||B u||_inf
  double divergence_residual(std::span<const double> u) const;
  /// int p over the domain.
  double pressure_mean(std::span<const double> p) const;

 private:
  OperatorSet ops_;
  ModelParams params_;
  double k_;
  SolveControls controls_;
  SparseMatrix base_;  // M/k + (mu + k gamma) A
  SparseMatrix convection_;
  SparseMatrix system_;
  SaddleMatrixBuilder builder_;
  DirectSolver solver_;
  long factorizations_ = 0;
};

struct ErrorNorms {
  double velocity_l2 = 0.0;
  double velocity_h1 = 0.0;  // full H1 norm of the error
  double pressure_l2 = 0.0;  // after removing the mean of both pressures
};

/// Degree-8 quadrature of the errors against an exact solution.
class ErrorEvaluator {
 public:
  ErrorEvaluator(const FeSpace& velocity, const FeSpace& pressure);

  ErrorNorms operator()(std::span<const double> u, std::span<const double> p,
                        const VectorField& u_exact,
                        const std::function<Mat2(double, double, double)>& grad_exact,
                        const ScalarField& p_exact, double t) const;

  ErrorNorms operator()(std::span<const double> u, std::span<const double> p,
                        const ManufacturedCase& exact, double t) const;

 private:
  ElementCache vcache_;
  ElementCache pcache_;
};

ErrorNorms error_norms(const FeSpace& velocity, const FeSpace& pressure, const StepperState& state,
                       const ManufacturedCase& exact, double t);

struct Problem {
  VectorField initial_velocity;
  VectorField forcing;
};

Problem manufactured_problem(const ManufacturedCase& c, const ModelParams& params);

struct RunResult {
  StepperState state;
  int steps = 0;
  double max_h1_seminorm = 0.0;  // over n = 0..N
  int max_picard_iters = 0;
};

using StepObserver = std::function<void(const BackwardEulerStepper&, const StepperState&)>;

/// Number of steps N with N k = T; rejects T that is not an integer multiple of k.
int step_count(double k, double final_time);

/// Projects the initial data and takes N = T/k steps. Any failure is
/// rethrown as StepError carrying the step index.
RunResult run(const FeSpace& velocity, const FeSpace& pressure, const ModelParams& params,
              const Problem& problem, double k, double final_time,
              const SolveControls& controls = {}, const StepObserver& observer = {});

}  // namespace oldroyd
