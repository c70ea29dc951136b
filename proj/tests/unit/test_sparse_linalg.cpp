#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <memory>
#include <random>

#include "oldroyd/assembly.hpp"
#include "oldroyd/fe_space.hpp"
#include "oldroyd/mesh.hpp"
#include "oldroyd/saddle_system.hpp"
#include "oldroyd/sparse_matrix.hpp"

using namespace oldroyd;

namespace {

SparseMatrix random_sparse(std::mt19937& rng, std::size_t rows, std::size_t cols, double fill) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(fill);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (keep(rng)) t.push_back({static_cast<int>(i), static_cast<int>(j), u(rng)});
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

Vector random_vector(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

Eigen::VectorXd as_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void expect_csr_invariants(const SparseMatrix& m) {
  ASSERT_EQ(m.row_ptr().size(), m.rows() + 1);
  EXPECT_EQ(m.row_ptr().front(), 0);
  EXPECT_EQ(static_cast<std::size_t>(m.row_ptr().back()), m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    EXPECT_LE(m.row_ptr()[i], m.row_ptr()[i + 1]);
    for (int p = m.row_ptr()[i] + 1; p < m.row_ptr()[i + 1]; ++p) {
      EXPECT_LT(m.col_idx()[p - 1], m.col_idx()[p]);
    }
  }
}

}  // namespace

TEST(SparseMatrix, FromTripletsSumsDuplicatesAndSorts) {
  const SparseMatrix m =
      SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {0, 1, 0.5},
                                         {1, 1, 0.0}});
  expect_csr_invariants(m);
  EXPECT_EQ(m.nnz(), 4u);
  EXPECT_EQ(m.coeff(0, 1), 2.5);
  EXPECT_EQ(m.coeff(1, 0), 3.0);
  EXPECT_EQ(m.coeff(1, 2), 1.0);
  EXPECT_GE(m.find(1, 1), 0);  // explicit zero kept
  EXPECT_EQ(m.find(0, 0), -1);
  EXPECT_EQ(m.coeff(0, 0), 0.0);
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST(SparseMatrix, ConstructorValidatesLayout) {
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 1}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), std::invalid_argument);
  EXPECT_NO_THROW(SparseMatrix(1, 2, {0, 2}, {0, 1}, {1.0, 1.0}));
}

TEST(SparseMatrix, MatvecExamples) {
  std::mt19937 rng(1);
  const Vector x = random_vector(rng, 7);
  EXPECT_EQ(matvec(SparseMatrix::identity(7), x), x);
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 2}, {0, 1, 1}, {1, 1, 3}});
  EXPECT_EQ(matvec(a, Vector{1, 1}), (Vector{3, 3}));
  EXPECT_THROW(matvec(a, Vector{1, 1, 1}), std::invalid_argument);
  Vector y(3);
  EXPECT_THROW(matvec_add(a, Vector{1, 1}, 1.0, y), std::invalid_argument);
}

TEST(SparseMatrix, MatvecAgainstDenseOracle) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseMatrix m = random_sparse(rng, 50, 50, 0.1);
    expect_csr_invariants(m);
    const Vector x = random_vector(rng, 50);
    const Eigen::VectorXd want = m.to_dense() * as_eigen(x);
    const Vector got = matvec(m, x);
    for (int i = 0; i < 50; ++i) EXPECT_NEAR(got[i], want(i), 1e-13);
  }
}

TEST(SparseMatrix, AddScaledExamples) {
  std::mt19937 rng(3);
  const SparseMatrix m = random_sparse(rng, 10, 10, 0.3);
  const SparseMatrix same = add_scaled(m, 1.0, m, 0.0);
  EXPECT_TRUE(same.same_pattern(m));
  EXPECT_EQ(same.values(), m.values());

  const SparseMatrix d = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {1, 1, 2}});
  const SparseMatrix o = SparseMatrix::from_triplets(2, 2, {{0, 1, 1}, {1, 0, 1}});
  Eigen::Matrix2d want;
  want << 1, 1, 1, 2;
  EXPECT_EQ(add_scaled(d, 1.0, o, 1.0).to_dense(), Eigen::MatrixXd(want));

  EXPECT_THROW(add_scaled(d, 1.0, SparseMatrix::identity(3), 1.0), std::invalid_argument);
}

TEST(SparseMatrix, AddScaledAgainstDenseAndCommutes) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseMatrix a = random_sparse(rng, 30, 20, 0.15);
    const SparseMatrix b = random_sparse(rng, 30, 20, 0.15);
    const double c1 = 0.7, c2 = -1.3;
    const SparseMatrix s = add_scaled(a, c1, b, c2);
    expect_csr_invariants(s);
    EXPECT_LE((s.to_dense() - (c1 * a.to_dense() + c2 * b.to_dense())).cwiseAbs().maxCoeff(),
              1e-14);
    const SparseMatrix t = add_scaled(b, c2, a, c1);
    ASSERT_TRUE(s.same_pattern(t));
    for (std::size_t p = 0; p < s.nnz(); ++p) EXPECT_EQ(s.values()[p], t.values()[p]);
  }
}

TEST(SparseMatrix, TransposeAndNorms) {
  std::mt19937 rng(5);
  const SparseMatrix m = random_sparse(rng, 12, 9, 0.3);
  EXPECT_EQ(m.transpose().to_dense(), Eigen::MatrixXd(m.to_dense().transpose()));
  EXPECT_EQ(norm_inf(Vector{1, -4, 2}), 4.0);
  EXPECT_EQ(norm2(Vector{3, 4}), 5.0);
  EXPECT_EQ(dot(Vector{1, 2}, Vector{3, 4}), 11.0);
}

TEST(DirectSolver, OneByOne) {
  DirectSolver s(SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}}));
  EXPECT_EQ(s.solve(Vector{4.0}), Vector{2.0});
}

TEST(DirectSolver, PoissonStencilAgainstDenseSolve) {
  const SparseMatrix a = SparseMatrix::from_triplets(
      3, 3, {{0, 0, 2}, {0, 1, -1}, {1, 0, -1}, {1, 1, 2}, {1, 2, -1}, {2, 1, -1}, {2, 2, 2}});
  const Vector b{1.0, 0.5, -2.0};
  const Vector x = DirectSolver(a).solve(b);
  const Eigen::VectorXd want = a.to_dense().lu().solve(as_eigen(b));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(x[i], want(i), 1e-12);
}

TEST(DirectSolver, RandomSystemsMeetResidualTolerance) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    SparseMatrix a = random_sparse(rng, 80, 80, 0.05);
    a = add_scaled(a, 1.0, SparseMatrix::identity(80), 4.0);
    const Vector b = random_vector(rng, 80);
    const Vector x = DirectSolver(a).solve(b, 1e-10);
    Vector r = b;
    matvec_add(a, x, -1.0, r);
    EXPECT_LE(norm2(r) / norm2(b), 1e-10);
  }
}

TEST(DirectSolver, DeterministicAndReusesAnalysis) {
  std::mt19937 rng(7);
  SparseMatrix a = add_scaled(random_sparse(rng, 60, 60, 0.08), 1.0, SparseMatrix::identity(60), 3.0);
  const Vector b = random_vector(rng, 60);
  DirectSolver s;
  s.factorize(a);
  const Vector x1 = s.solve(b);
  for (double& v : a.values()) v *= 1.5;
  s.factorize(a);
  EXPECT_EQ(s.symbolic_analyses(), 1);
  const Vector x2 = s.solve(b);
  for (std::size_t i = 0; i < x1.size(); ++i) EXPECT_NEAR(x2[i] * 1.5, x1[i], 1e-12);
  EXPECT_EQ(DirectSolver(a).solve(b), x2);
}

TEST(DirectSolver, ReportsZeroRow) {
  // Row 2 is empty.
  const SparseMatrix a = SparseMatrix::from_triplets(
      4, 4, {{0, 0, 1}, {1, 1, 1}, {1, 2, 1}, {3, 3, 1}, {3, 2, 1}});
  try {
    DirectSolver s(a);
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_EQ(e.index(), 2);
  }
}

TEST(DirectSolver, ReportsNumericalSingularity) {
  const SparseMatrix a =
      SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 4}, {2, 2, 1}});
  try {
    DirectSolver s(a);
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_TRUE(e.index() == 0 || e.index() == 1) << e.index();
  }
}

TEST(DirectSolver, RejectsNonSquareAndSizeMismatch) {
  EXPECT_THROW(DirectSolver(SparseMatrix::from_triplets(2, 3, {{0, 0, 1}})), std::invalid_argument);
  DirectSolver s(SparseMatrix::identity(3));
  EXPECT_THROW(s.solve(Vector{1, 2}), std::invalid_argument);
  EXPECT_THROW(DirectSolver().solve(Vector{1}), std::logic_error);
}

TEST(DirectSolver, RefineSolvesANearbyMatrix) {
  std::mt19937 rng(8);
  const SparseMatrix a =
      add_scaled(random_sparse(rng, 50, 50, 0.1), 1.0, SparseMatrix::identity(50), 5.0);
  SparseMatrix b = a;
  for (double& v : b.values()) v *= 1.0 + 1e-3 * std::uniform_real_distribution<double>(-1, 1)(rng);
  const Vector rhs = random_vector(rng, 50);
  DirectSolver s(a);
  Vector x(50, 0.0);
  ASSERT_TRUE(s.refine(b, rhs, x, 1e-12));
  Vector r = rhs;
  matvec_add(b, x, -1.0, r);
  EXPECT_LE(norm2(r) / norm2(rhs), 1e-12);
  // A very different matrix is refused rather than iterated on.
  SparseMatrix far = b;
  for (double& v : far.values()) v = -v;
  Vector y(50, 0.0);
  EXPECT_FALSE(s.refine(far, rhs, y, 1e-12));
}

namespace {

struct StokesFixture {
  std::shared_ptr<const Mesh> mesh;
  FeSpace velocity;
  FeSpace pressure;
  OperatorSet ops;
  StokesFixture(int n, SpaceKind v, SpaceKind p)
      : mesh(std::make_shared<const Mesh>(build_unit_square_mesh(n))),
        velocity(build_space(mesh, v)),
        pressure(build_space(mesh, p)),
        ops(velocity, pressure) {}
};

// Dense oracle: the bordered system with identity Dirichlet rows.
void bordered_dense_solve(const SaddleSystem& sys, Eigen::VectorXd& u, Eigen::VectorXd& p) {
  const Eigen::Index nu = sys.velocity_block.rows(), np = sys.divergence.rows();
  const Eigen::Index n = nu + np + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd k = sys.velocity_block.to_dense();
  const Eigen::MatrixXd bb = sys.divergence.to_dense();
  a.topLeftCorner(nu, nu) = k;
  a.block(0, nu, nu, np) = -bb.transpose();
  a.block(nu, 0, np, nu) = -bb;
  for (Eigen::Index r = 0; r < np; ++r) {
    a(nu + r, n - 1) = sys.pressure_constraint[r];
    a(n - 1, nu + r) = sys.pressure_constraint[r];
  }
  b.head(nu) = as_eigen(sys.rhs_velocity);
  for (int d : sys.dirichlet_dofs) {
    a.row(d).setZero();
    a(d, d) = 1.0;
    b(d) = 0.0;
  }
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  u = x.head(nu);
  p = x.segment(nu, np);
}

}  // namespace

class StokesSolve : public ::testing::TestWithParam<std::pair<SpaceKind, SpaceKind>> {};

TEST_P(StokesSolve, DivergenceFreeAndMatchesBorderedOracle) {
  const auto [vk, pk] = GetParam();
  StokesFixture f(2, vk, pk);
  std::mt19937 rng(9);
  SaddleSystem sys;
  sys.velocity_block = f.ops.stiffness();
  sys.divergence = f.ops.divergence();
  sys.dirichlet_dofs = f.velocity.boundary_dofs();
  sys.pressure_constraint = f.ops.pressure_weights();
  sys.rhs_velocity = random_vector(rng, f.velocity.num_dofs());
  const SaddleSolution s = solve(sys);
  EXPECT_LE(norm_inf(matvec(sys.divergence, s.velocity)), 1e-10);
  EXPECT_NEAR(dot(sys.pressure_constraint, s.pressure), 0.0, 1e-14);
  for (int d : sys.dirichlet_dofs) EXPECT_EQ(s.velocity[d], 0.0);

  Eigen::VectorXd u, p;
  bordered_dense_solve(sys, u, p);
  for (std::size_t i = 0; i < s.velocity.size(); ++i) EXPECT_NEAR(s.velocity[i], u(i), 1e-11);
  for (std::size_t i = 0; i < s.pressure.size(); ++i) EXPECT_NEAR(s.pressure[i], p(i), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Pairs, StokesSolve,
                         ::testing::Values(std::pair{SpaceKind::VelocityMini, SpaceKind::PressureP1},
                                           std::pair{SpaceKind::VelocityP2, SpaceKind::PressureP0}));

TEST(SaddleMatrixBuilder, RefillKeepsPatternAndRejectsOtherPatterns) {
  StokesFixture f(3, SpaceKind::VelocityP2, SpaceKind::PressureP0);
  SaddleMatrixBuilder builder(f.ops.velocity_pattern(), f.ops.divergence(),
                              f.velocity.boundary_dofs(), f.ops.pressure_weights());
  EXPECT_EQ(builder.size(), f.velocity.num_dofs() + f.pressure.num_dofs());
  EXPECT_EQ(builder.pinned_pressure(), f.pressure.num_dofs() - 1);
  const SparseMatrix first = builder.assemble(f.ops.mass());
  const SparseMatrix second = builder.assemble(f.ops.stiffness());
  EXPECT_TRUE(first.same_pattern(second));
  EXPECT_THROW(builder.assemble(SparseMatrix::identity(f.velocity.num_dofs())),
               std::invalid_argument);
  EXPECT_THROW(SaddleMatrixBuilder(f.ops.velocity_pattern(), f.ops.divergence(),
                                   std::vector<int>{-1}, {}),
               std::out_of_range);
  EXPECT_THROW(SaddleMatrixBuilder(f.ops.velocity_pattern(), f.ops.divergence(), {}, Vector{1.0}),
               std::invalid_argument);
}

TEST(SaddleMatrixBuilder, DivergenceHasZeroRowSumsOnConstants) {
  for (auto [vk, pk] : {std::pair{SpaceKind::VelocityMini, SpaceKind::PressureP1},
                        std::pair{SpaceKind::VelocityP2, SpaceKind::PressureP0}}) {
    StokesFixture f(4, vk, pk);
    const Vector ones = interpolate(f.velocity, VectorField([](double, double, double) {
                                      return Vec2{1.0, -2.0};
                                    }),
                                    0.0);
    EXPECT_LE(norm_inf(matvec(f.ops.divergence(), ones)), 1e-13);
  }
}
