#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <sstream>

#include "oldroyd/stepper.hpp"
#include "oldroyd/study.hpp"

using namespace oldroyd;

namespace {

struct Spaces {
  Spaces(int n, SpaceKind v, SpaceKind p)
      : mesh(std::make_shared<const Mesh>(build_unit_square_mesh(n))),
        velocity(build_space(mesh, v)),
        pressure(build_space(mesh, p)) {}
  std::shared_ptr<const Mesh> mesh;
  FeSpace velocity;
  FeSpace pressure;
};

Spaces p2p0(int n) { return Spaces(n, SpaceKind::VelocityP2, SpaceKind::PressureP0); }
Spaces mini(int n) { return Spaces(n, SpaceKind::VelocityMini, SpaceKind::PressureP1); }

const VectorField kZeroField = [](double, double, double) { return Vec2{0.0, 0.0}; };

// Dense bordered saddle solve: Dirichlet rows replaced by identity, the
// zero-mean constraint carried by a Lagrange multiplier row.
struct DenseSaddle {
  static std::pair<Eigen::VectorXd, Eigen::VectorXd> solve(const OperatorSet& ops,
                                                           const Eigen::MatrixXd& a,
                                                           const Eigen::VectorXd& f) {
    const Eigen::MatrixXd b = ops.divergence().to_dense();
    const Eigen::Index nu = a.rows(), np = b.rows();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nu + np + 1, nu + np + 1);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nu + np + 1);
    k.topLeftCorner(nu, nu) = a;
    k.block(0, nu, nu, np) = -b.transpose();
    k.block(nu, 0, np, nu) = -b;
    r.head(nu) = f;
    const Vector& c = ops.pressure_weights();
    for (Eigen::Index j = 0; j < np; ++j) {
      k(nu + np, nu + j) = c[j];
      k(nu + j, nu + np) = c[j];
    }
    for (int d : ops.velocity().boundary_dofs()) {
      k.row(d).setZero();
      k(d, d) = 1.0;
      r(d) = 0.0;
    }
    const Eigen::VectorXd x = k.fullPivLu().solve(r);
    return {x.head(nu), x.segment(nu, np)};
  }
};

Eigen::VectorXd as_eigen(const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

}  // namespace

TEST(Stepper, ZeroDataStaysZero) {
  Spaces s = p2p0(4);
  BackwardEulerStepper stepper(s.velocity, s.pressure, ModelParams(1.0, 0.1, 0.1), 0.1);
  StepperState state = stepper.initial_state(Vector(s.velocity.num_dofs(), 0.0));
  for (int i = 0; i < 5; ++i) stepper.step(state, kZeroField);
  EXPECT_EQ(state.n, 5);
  EXPECT_NEAR(state.t, 0.5, 1e-15);
  EXPECT_EQ(norm_inf(state.velocity), 0.0);
  EXPECT_EQ(norm_inf(state.pressure), 0.0);
  ASSERT_EQ(state.monitors.size(), 5u);
  EXPECT_EQ(state.monitors.back().l2_norm, 0.0);
}

// Without memory the scheme is backward Euler Navier-Stokes; compare with a
// dense Picard loop built straight from the operators.
TEST(Stepper, WithoutMemoryMatchesDenseNavierStokesLoop) {
  Spaces s = p2p0(4);
  const ManufacturedCase ex = make_case(1);
  const ModelParams params(1.0, 0.0, 0.1);
  const Problem problem = manufactured_problem(ex, params);
  const double k = 0.1;
  SolveControls controls;
  controls.picard_tol = 1e-13;
  controls.linear_tol = 1e-13;

  BackwardEulerStepper stepper(s.velocity, s.pressure, params, k, controls);
  const OperatorSet& ops = stepper.operators();
  const Eigen::MatrixXd m = ops.mass().to_dense();
  const Eigen::MatrixXd a = ops.stiffness().to_dense();

  Eigen::VectorXd u = DenseSaddle::solve(ops, m, as_eigen(ops.load(problem.initial_velocity, 0.0))).first;
  Vector u0(u.data(), u.data() + u.size());
  StepperState state = stepper.initial_state(u0);

  for (int n = 1; n <= 3; ++n) {
    stepper.step(state, problem.forcing);
    const Eigen::VectorXd rhs = m * u / k + as_eigen(ops.load(problem.forcing, n * k));
    Eigen::VectorXd w = u, p;
    for (int it = 0; it < 50; ++it) {
      const Vector wv(w.data(), w.data() + w.size());
      const Eigen::MatrixXd sys = m / k + params.mu() * a + ops.convection(wv).to_dense();
      auto [un, pn] = DenseSaddle::solve(ops, sys, rhs);
      const double inc = (un - w).norm() / un.norm();
      w = un;
      p = pn;
      if (inc < 1e-14) break;
    }
    u = w;
    EXPECT_LE((as_eigen(state.velocity) - u).lpNorm<Eigen::Infinity>(), 1e-12 * u.lpNorm<Eigen::Infinity>())
        << "step " << n;
    EXPECT_LE((as_eigen(state.pressure) - p).lpNorm<Eigen::Infinity>(), 1e-10 * p.lpNorm<Eigen::Infinity>())
        << "step " << n;
  }
}

TEST(Stepper, OneSmallStepIsAccurate) {
  Spaces s = p2p0(16);
  const ManufacturedCase ex = make_case(1);
  const ModelParams params(1.0, 0.1, 0.1);
  const double k = 1.0 / 256;
  const RunResult r = run(s.velocity, s.pressure, params, manufactured_problem(ex, params), k, k);
  EXPECT_EQ(r.steps, 1);
  const ErrorNorms e = error_norms(s.velocity, s.pressure, r.state, ex, k);
  EXPECT_LE(e.velocity_l2, 1e-3);
}

TEST(Stepper, DivergenceFreeAndZeroMeanAtEveryStep) {
  for (bool use_mini : {false, true}) {
    Spaces s = use_mini ? mini(4) : p2p0(4);
    const ManufacturedCase ex = make_case(1);
    const ModelParams params(1.0, 0.1, 0.1);
    int seen = 0;
    run(s.velocity, s.pressure, params, manufactured_problem(ex, params), 0.02, 1.0, {},
        [&](const BackwardEulerStepper& st, const StepperState& state) {
          EXPECT_LE(st.divergence_residual(state.velocity), 1e-9) << "n=" << state.n;
          EXPECT_LE(std::abs(st.pressure_mean(state.pressure)), 1e-12) << "n=" << state.n;
          ++seen;
        });
    EXPECT_EQ(seen, 51);
  }
}

TEST(Stepper, UnforcedFlowWithoutMemoryDecays) {
  Spaces s = p2p0(8);
  const ManufacturedCase ex = make_case(1);
  const Problem problem{ex.velocity_field(), kZeroField};
  const RunResult r = run(s.velocity, s.pressure, ModelParams(1.0, 0.0, 0.1), problem, 0.05, 2.0);
  double previous = INFINITY;
  for (const MonitorRecord& m : r.state.monitors) {
    EXPECT_LE(m.l2_norm, previous * (1.0 + 1e-12)) << "n=" << m.n;
    previous = m.l2_norm;
  }
}

// With memory the unforced velocity overshoots through zero and then decays
// slowly. For a single Stokes mode with eigenvalue lambda the scheme reduces to
//   u^{n+1} (1/k + lambda mu + lambda k gamma) = u^n / k - lambda e^{-delta k} b^n,
//   b^{n+1} = k gamma u^{n+1} + e^{-delta k} b^n,
// whose late-time plateau bounds the rebound of ||U^n|| / ||U^0||.
TEST(Stepper, UnforcedFlowWithMemoryReboundsLikeSlowMode) {
  Spaces s = p2p0(8);
  const ManufacturedCase ex = make_case(1);
  const ModelParams params(1.0, 0.1, 0.1);
  const double k = 0.05;
  const Problem problem{ex.velocity_field(), kZeroField};
  const RunResult r = run(s.velocity, s.pressure, params, problem, k, 2.0);
  const auto& mon = r.state.monitors;
  std::size_t low = 0;
  for (std::size_t i = 1; i < mon.size(); ++i)
    if (mon[i].l2_norm < mon[low].l2_norm) low = i;
  double rebound = 0.0;
  for (std::size_t i = low; i < mon.size(); ++i) rebound = std::max(rebound, mon[i].l2_norm);
  EXPECT_GT(low, 0u);
  EXPECT_LT(low + 1, mon.size());
  EXPECT_GT(rebound, 2.0 * mon[low].l2_norm);

  // Largest plateau over the mode range of this mesh; the smallest Stokes
  // eigenvalue on the unit square is about 52.3.
  double plateau = 0.0;
  for (double lambda : {52.3, 100.0, 500.0}) {
    double u = 1.0, b = 0.0, peak = 0.0;
    for (int n = 0; n < 40; ++n) {
      u = (u / k - lambda * std::exp(-params.delta() * k) * b) /
          (1.0 / k + lambda * params.mu() + lambda * k * params.gamma());
      b = k * params.gamma() * u + std::exp(-params.delta() * k) * b;
      if (u < 0.0) peak = std::max(peak, -u);
    }
    plateau = std::max(plateau, peak);
  }
  const double u0 = BackwardEulerStepper(s.velocity, s.pressure, params, k)
                        .l2_norm(project_initial_velocity(OperatorSet(s.velocity, s.pressure),
                                                          ex.velocity_field())
                                     .velocity);
  EXPECT_LE(rebound, 1.05 * plateau * u0);
}

TEST(Projection, ZeroDataGivesZero) {
  Spaces s = mini(4);
  const OperatorSet ops(s.velocity, s.pressure);
  const InitialProjection p = project_initial_velocity(ops, kZeroField);
  EXPECT_EQ(norm_inf(p.velocity), 0.0);
}

TEST(Projection, IsDiscretelyDivergenceFreeAndSecondOrder) {
  const ManufacturedCase ex = make_case(1);
  for (bool use_mini : {false, true}) {
    std::vector<double> errors, hs;
    for (int n : {8, 16, 32}) {
      Spaces s = use_mini ? mini(n) : p2p0(n);
      const OperatorSet ops(s.velocity, s.pressure);
      const InitialProjection p = project_initial_velocity(ops, ex.velocity_field());
      EXPECT_LE(norm_inf(matvec(ops.divergence(), p.velocity)), 1e-12);
      const Vector zero_p(s.pressure.num_dofs(), 0.0);
      errors.push_back(ErrorEvaluator(s.velocity, s.pressure)(p.velocity, zero_p, ex, 0.0).velocity_l2);
      hs.push_back(1.0 / n);
    }
    for (double rate : compute_rates(errors, hs)) EXPECT_GE(rate, 1.8) << (use_mini ? "mini" : "p2p0");
  }
}

TEST(Stepper, StepCount) {
  EXPECT_EQ(step_count(0.1, 1.0), 10);
  EXPECT_EQ(step_count(1.0 / 256, 1.0), 256);
  EXPECT_EQ(step_count(0.1, 20.0), 200);
  EXPECT_EQ(step_count(0.5, 0.0), 0);
  EXPECT_THROW(step_count(0.3, 1.0), std::invalid_argument);
  EXPECT_THROW(step_count(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(step_count(-0.1, 1.0), std::invalid_argument);
}

TEST(Stepper, RejectsBadConstruction) {
  Spaces s = p2p0(2);
  const ModelParams params(1.0, 0.1, 0.1);
  EXPECT_THROW(BackwardEulerStepper(s.velocity, s.pressure, params, 0.0), std::invalid_argument);
  SolveControls bad;
  bad.picard_max = 0;
  EXPECT_THROW(BackwardEulerStepper(s.velocity, s.pressure, params, 0.1, bad), std::invalid_argument);
  BackwardEulerStepper ok(s.velocity, s.pressure, params, 0.1);
  EXPECT_THROW(ok.initial_state(Vector(3, 0.0)), std::invalid_argument);
}

TEST(Stepper, ZeroStepRunReturnsProjection) {
  Spaces s = p2p0(4);
  const ManufacturedCase ex = make_case(1);
  const ModelParams params(1.0, 0.1, 0.1);
  const RunResult r = run(s.velocity, s.pressure, params, manufactured_problem(ex, params), 0.1, 0.0);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.state.n, 0);
  EXPECT_TRUE(r.state.monitors.empty());
  const InitialProjection p = project_initial_velocity(OperatorSet(s.velocity, s.pressure), ex.velocity_field());
  EXPECT_EQ(r.state.velocity, p.velocity);
}

// Errors of the zero discrete solution are the norms of the exact solution:
// ||u||^2 = 2/33075, |u|_1^2 = 4/1225, ||p||^2 = 4/6 at t = 0. The degree-8
// rule is not exact for |u|^2, so use a mesh fine enough for its error to
// drop below round-off.
TEST(ErrorNorms, ZeroSolutionGivesExactNorms) {
  Spaces s = p2p0(16);
  const ManufacturedCase ex = make_case(1);
  const Vector u(s.velocity.num_dofs(), 0.0), p(s.pressure.num_dofs(), 0.0);
  const ErrorNorms e = ErrorEvaluator(s.velocity, s.pressure)(u, p, ex, 0.0);
  EXPECT_NEAR(e.velocity_l2, std::sqrt(2.0 / 33075), 1e-14);
  EXPECT_NEAR(e.velocity_h1, std::sqrt(2.0 / 33075 + 4.0 / 1225), 1e-13);
  EXPECT_NEAR(e.pressure_l2, 2.0 / std::sqrt(6.0), 1e-13);
}

// u = 0, p = x - y lies in the MINI spaces and solves the problem with f = grad p.
TEST(Stepper, RepresentableSolutionIsReproduced) {
  Spaces s = mini(4);
  const ModelParams params(1.0, 0.1, 0.1);
  const Problem problem{kZeroField, [](double, double, double) { return Vec2{1.0, -1.0}; }};
  const RunResult r = run(s.velocity, s.pressure, params, problem, 0.25, 1.0);
  const ErrorNorms e = ErrorEvaluator(s.velocity, s.pressure)(
      r.state.velocity, r.state.pressure, kZeroField,
      [](double, double, double) { return Mat2{}; }, [](double x, double y, double) { return x - y; },
      1.0);
  EXPECT_LE(e.velocity_h1, 1e-10);
  EXPECT_LE(e.pressure_l2, 1e-10);
}

TEST(Stepper, PicardFailureIsReported) {
  Spaces s = p2p0(4);
  const ManufacturedCase ex = make_case(1);
  const ModelParams params(1.0, 0.1, 0.1);
  SolveControls controls;
  controls.picard_max = 1;
  controls.picard_tol = 1e-14;
  BackwardEulerStepper stepper(s.velocity, s.pressure, params, 0.1, controls);
  StepperState state = stepper.initial_state(interpolate(s.velocity, ex.velocity_field(), 0.0));
  try {
    stepper.step(state, ex.forcing_field(params));
    FAIL() << "expected PicardDivergence";
  } catch (const PicardDivergence& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_GT(e.last_increment(), 1e-14);
  }
  try {
    run(s.velocity, s.pressure, params, manufactured_problem(ex, params), 0.1, 1.0, controls);
    FAIL() << "expected StepError";
  } catch (const StepError& e) {
    EXPECT_EQ(e.step(), 1);
    EXPECT_NE(std::string(e.what()).find("Picard"), std::string::npos);
  }
}

TEST(Stepper, MonitorsAndPicardCounts) {
  Spaces s = p2p0(8);
  const ManufacturedCase ex = make_case(1);
  const ModelParams params(1.0, 0.1, 0.1);
  const RunResult r = run(s.velocity, s.pressure, params, manufactured_problem(ex, params), 1.0 / 64, 0.25);
  ASSERT_EQ(r.state.monitors.size(), 16u);
  EXPECT_LE(r.max_picard_iters, 10);
  EXPECT_GE(r.max_picard_iters, 2);
  for (std::size_t i = 0; i < r.state.monitors.size(); ++i) {
    EXPECT_EQ(r.state.monitors[i].n, static_cast<int>(i) + 1);
    EXPECT_GT(r.state.monitors[i].memory_h1_seminorm, 0.0);
  }
  std::ostringstream os;
  write_csv(r.state.monitors, os);
  std::istringstream is(os.str());
  const auto rows = read_csv(is);
  ASSERT_EQ(rows.size(), 17u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "t", "l2_norm", "h1_seminorm",
                                               "memory_h1_seminorm", "picard_iters"}));
}

TEST(Stepper, LargeStepsOnRoughDataComplete) {
  Spaces s = p2p0(10);
  const ManufacturedCase ex = make_case(2);
  const ModelParams params(1.0, 0.1, 1.0);
  const double k = 1.3;
  BackwardEulerStepper stepper(s.velocity, s.pressure, params, k);
  const OperatorSet& ops = stepper.operators();
  StepperState state = stepper.initial_state(project_initial_velocity(ops, ex.velocity_field()).velocity);
  const int steps = stability_steps(k, 5.0);
  EXPECT_EQ(steps, 3);
  for (int n = 0; n < steps; ++n) stepper.step(state, ex.forcing_field(params));
  for (const MonitorRecord& m : state.monitors) {
    EXPECT_TRUE(std::isfinite(m.l2_norm));
    EXPECT_LT(m.l2_norm, 0.1);
  }
}

TEST(Stepper, NormsStayBoundedOverLongHorizon) {
  Spaces s = p2p0(4);
  const ManufacturedCase ex = make_case(2);
  const ModelParams params(1.0, 0.1, 1.0);
  const RunResult r = run(s.velocity, s.pressure, params, manufactured_problem(ex, params), 0.1, 50.0);
  double sup_short = 0.0, sup_long = 0.0, grad_short = 0.0, grad_long = 0.0;
  for (const MonitorRecord& m : r.state.monitors) {
    if (m.t <= 5.0 + 1e-9) {
      sup_short = std::max(sup_short, m.l2_norm);
      grad_short = std::max(grad_short, m.h1_seminorm);
    }
    sup_long = std::max(sup_long, m.l2_norm);
    grad_long = std::max(grad_long, m.h1_seminorm);
  }
  EXPECT_LE(sup_long, 1.5 * sup_short);
  EXPECT_LE(grad_long, 1.5 * grad_short);
}
