#include "oldroyd/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace oldroyd {

void SolveControls::validate() const {
  if (!(picard_tol > 0.0) || !(linear_tol > 0.0) || picard_max < 1) {
    throw std::invalid_argument("SolveControls: tolerances must be positive and picard_max >= 1");
  }
}

InitialProjection project_initial_velocity(const OperatorSet& ops, const VectorField& u0,
                                           double linear_tol) {
  const Vector load = ops.load(u0, 0.0);
  SaddleMatrixBuilder builder(ops.velocity_pattern(), ops.divergence(),
                              ops.velocity().boundary_dofs(), ops.pressure_weights());
  DirectSolver solver(builder.assemble(ops.mass()));
  const Vector x = solver.solve(builder.rhs(load, {}), linear_tol);
  SaddleSolution s = builder.split(x);
  return {std::move(s.velocity), std::move(s.pressure)};
}

BackwardEulerStepper::BackwardEulerStepper(const FeSpace& velocity, const FeSpace& pressure,
                                           ModelParams params, double k, SolveControls controls)
    : ops_(velocity, pressure),
      params_(params),
      k_(k),
      controls_(controls),
      base_(add_scaled(ops_.mass(), 1.0 / k, ops_.stiffness(), params.mu() + k * params.gamma())),
      convection_(ops_.velocity_pattern()),
      system_(ops_.velocity_pattern()),
      builder_(ops_.velocity_pattern(), ops_.divergence(), velocity.boundary_dofs(),
               ops_.pressure_weights()) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("BackwardEulerStepper: time step must be positive");
  }
  controls_.validate();
}

StepperState BackwardEulerStepper::initial_state(Vector u0) const {
  if (u0.size() != ops_.velocity().num_dofs()) {
    throw std::invalid_argument("initial_state: velocity has wrong size");
  }
  StepperState s{0, 0.0, std::move(u0), Vector(ops_.pressure().num_dofs(), 0.0),
                 MemoryAccumulator(ops_.velocity().num_dofs(), k_, params_.gamma(), params_.delta()),
                 {}};
  return s;
}

void BackwardEulerStepper::step(StepperState& state, const VectorField& forcing) {
  const double t_next = static_cast<double>(state.n + 1) * k_;
  const std::size_t nu = ops_.velocity().num_dofs();

  Vector rhs = ops_.load(forcing, t_next);
  matvec_add(ops_.mass(), state.velocity, 1.0 / k_, rhs);
  matvec_add(ops_.stiffness(), state.memory.value(), -state.memory.decay(), rhs);
  const Vector b = builder_.rhs(rhs, {});

  Vector w = state.velocity;
  SaddleSolution sol;
  Vector x;
  double increment = 0.0;
  int iters = 0;
  bool converged = false;
  while (iters < controls_.picard_max) {
    ++iters;
    ops_.convection_into(w, convection_);
    auto& sys = system_.values();
    const auto& base = base_.values();
    const auto& conv = convection_.values();
    for (std::size_t p = 0; p < sys.size(); ++p) sys[p] = base[p] + conv[p];
    const SparseMatrix& saddle = builder_.assemble(system_);
    // Later Picard systems differ from the first by the change of the
    // transport field, so the step's first factorization solves them by
    // refinement; refactorize only when that stalls.
    if (iters == 1 || !solver_.refine(saddle, b, x, controls_.linear_tol)) {
      solver_.factorize(saddle);
      x = solver_.solve(b, controls_.linear_tol);
      ++factorizations_;
    }
    sol = builder_.split(x);

    Vector diff(nu);
    for (std::size_t i = 0; i < nu; ++i) diff[i] = sol.velocity[i] - w[i];
    const double dnorm = l2_norm(diff);
    const double unorm = l2_norm(sol.velocity);
    increment = unorm > 0.0 ? dnorm / unorm : dnorm;
    w = sol.velocity;
    if (!std::isfinite(increment)) break;
    if (increment <= controls_.picard_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "Picard iteration did not converge at t=" << t_next << " after " << iters
       << " iterations (last relative increment " << increment << ")";
    throw PicardDivergence(os.str(), increment, iters);
  }

  state.memory.update(sol.velocity);
  state.velocity = std::move(sol.velocity);
  state.pressure = std::move(sol.pressure);
  state.n += 1;
  state.t = t_next;
  state.monitors.push_back({state.n, state.t, l2_norm(state.velocity),
                            h1_seminorm(state.velocity), h1_seminorm(state.memory.value()), iters});
}

double BackwardEulerStepper::l2_norm(std::span<const double> u) const {
  return std::sqrt(std::max(0.0, dot(u, matvec(ops_.mass(), u))));
}

double BackwardEulerStepper::h1_seminorm(std::span<const double> u) const {
  return std::sqrt(std::max(0.0, dot(u, matvec(ops_.stiffness(), u))));
}

double BackwardEulerStepper::pressure_l2_norm(std::span<const double> p) const {
  return std::sqrt(std::max(0.0, dot(p, matvec(ops_.pressure_mass(), p))));
}

double BackwardEulerStepper::divergence_residual(std::span<const double> u) const {
  return norm_inf(matvec(ops_.divergence(), u));
}

double BackwardEulerStepper::pressure_mean(std::span<const double> p) const {
  return dot(ops_.pressure_weights(), p);
}

ErrorEvaluator::ErrorEvaluator(const FeSpace& velocity, const FeSpace& pressure)
    : vcache_(velocity, kForcingDegree), pcache_(pressure, kForcingDegree) {}

ErrorNorms ErrorEvaluator::operator()(std::span<const double> u, std::span<const double> p,
                                      const VectorField& u_exact,
                                      const std::function<Mat2(double, double, double)>& grad_exact,
                                      const ScalarField& p_exact, double t) const {
  const std::size_t nc = vcache_.space().mesh().num_cells();
  const std::size_t nq = vcache_.num_points();
  double l2 = 0.0;
  double grad = 0.0;
  double area = 0.0;
  double mean_h = 0.0;
  double mean_exact = 0.0;
  std::vector<double> pdiff(nc * nq);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t q = 0; q < nq; ++q) {
      const double w = vcache_.weight(c, q);
      const Point2& x = vcache_.point(c, q);
      const Vec2 ue = u_exact(x.x, x.y, t);
      const Mat2 ge = grad_exact(x.x, x.y, t);
      for (int comp = 0; comp < 2; ++comp) {
        const double d = vcache_.eval(u, comp, c, q) - ue[comp];
        const Vec2 gh = vcache_.eval_grad(u, comp, c, q);
        l2 += w * d * d;
        grad += w * ((gh[0] - ge[comp][0]) * (gh[0] - ge[comp][0]) +
                     (gh[1] - ge[comp][1]) * (gh[1] - ge[comp][1]));
      }
      const double ph = pcache_.eval(p, 0, c, q);
      const double pe = p_exact(x.x, x.y, t);
      pdiff[c * nq + q] = ph - pe;
      mean_h += w * ph;
      mean_exact += w * pe;
      area += w;
    }
  }
  const double shift = (mean_h - mean_exact) / area;
  double pl2 = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t q = 0; q < nq; ++q) {
      const double d = pdiff[c * nq + q] - shift;
      pl2 += vcache_.weight(c, q) * d * d;
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + grad), std::sqrt(pl2)};
}

ErrorNorms ErrorEvaluator::operator()(std::span<const double> u, std::span<const double> p,
                                      const ManufacturedCase& exact, double t) const {
  return (*this)(
      u, p, exact.velocity_field(),
      [&exact](double x, double y, double s) { return exact.eval(x, y, s).grad_u; },
      exact.pressure_field(), t);
}

ErrorNorms error_norms(const FeSpace& velocity, const FeSpace& pressure, const StepperState& state,
                       const ManufacturedCase& exact, double t) {
  return ErrorEvaluator(velocity, pressure)(state.velocity, state.pressure, exact, t);
}

Problem manufactured_problem(const ManufacturedCase& c, const ModelParams& params) {
  return {c.velocity_field(), c.forcing_field(params)};
}

int step_count(double k, double final_time) {
  if (!(k > 0.0) || !(final_time >= 0.0)) {
    throw std::invalid_argument("step_count: need k > 0 and T >= 0");
  }
  const double ratio = final_time / k;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "time step k=" << k << " does not divide final time T=" << final_time;
    throw std::invalid_argument(os.str());
  }
  return static_cast<int>(n);
}

RunResult run(const FeSpace& velocity, const FeSpace& pressure, const ModelParams& params,
              const Problem& problem, double k, double final_time, const SolveControls& controls,
              const StepObserver& observer) {
  const int steps = step_count(k, final_time);
  BackwardEulerStepper stepper(velocity, pressure, params, k, controls);
  StepperState state = stepper.initial_state(
      project_initial_velocity(stepper.operators(), problem.initial_velocity, controls.linear_tol)
          .velocity);
  RunResult result{std::move(state), steps, 0.0, 0};
  result.max_h1_seminorm = stepper.h1_seminorm(result.state.velocity);
  if (observer) observer(stepper, result.state);
  for (int n = 1; n <= steps; ++n) {
    try {
      stepper.step(result.state, problem.forcing);
    } catch (const std::exception& e) {
      throw StepError("step " + std::to_string(n) + ": " + e.what(), n);
    }
    const MonitorRecord& m = result.state.monitors.back();
    result.max_h1_seminorm = std::max(result.max_h1_seminorm, m.h1_seminorm);
    result.max_picard_iters = std::max(result.max_picard_iters, m.picard_iters);
    if (observer) observer(stepper, result.state);
  }
  return result;
}

}  // namespace oldroyd
