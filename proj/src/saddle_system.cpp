#include "oldroyd/saddle_system.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace oldroyd {

namespace {

std::string umfpack_status(int status) {
  switch (status) {
    case UMFPACK_ERROR_out_of_memory: return "out of memory";
    case UMFPACK_ERROR_invalid_matrix: return "invalid matrix";
    case UMFPACK_WARNING_singular_matrix: return "singular matrix";
    default: return "status " + std::to_string(status);
  }
}

}  // namespace

// UMFPACK reads the CSR arrays of A as the CSC arrays of A^T; solves use
// the transposed system so no copy is needed.
struct DirectSolver::Impl {
  SparseMatrix csr;
  void* symbolic = nullptr;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];
  int analyses = 0;

  Impl() { umfpack_di_defaults(control); }
  ~Impl() { release(); }
  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;

  void release_numeric() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    numeric = nullptr;
  }
  void release() {
    release_numeric();
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    symbolic = nullptr;
  }

  // Original row of A at the first zero pivot, or -1.
  long zero_pivot() const {
    const int n = static_cast<int>(csr.rows());
    std::vector<int> q(n);
    Vector diag(n);
    int do_recip = 0;
    if (umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                               q.data(), diag.data(), &do_recip, nullptr, numeric) != UMFPACK_OK) {
      return -1;
    }
    for (int k = 0; k < n; ++k) {
      if (diag[k] == 0.0 || !std::isfinite(diag[k])) return q[k];
    }
    return -1;
  }
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}

DirectSolver::DirectSolver(const SparseMatrix& a) : DirectSolver() { factorize(a); }

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

void DirectSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("DirectSolver: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", not square");
  }
  Impl& s = *impl_;
  const bool reuse = s.symbolic && s.csr.same_pattern(a);
  s.release_numeric();
  s.csr = a;
  const int n = static_cast<int>(a.rows());
  const int* ap = s.csr.row_ptr().data();
  const int* ai = s.csr.col_idx().data();
  const double* ax = s.csr.values().data();
  double info[UMFPACK_INFO];
  if (!reuse) {
    if (s.symbolic) umfpack_di_free_symbolic(&s.symbolic);
    s.symbolic = nullptr;
    const int status = umfpack_di_symbolic(n, n, ap, ai, ax, &s.symbolic, s.control, info);
    if (status != UMFPACK_OK) {
      s.symbolic = nullptr;
      throw std::runtime_error("DirectSolver: symbolic analysis failed (" +
                               umfpack_status(status) + ")");
    }
    ++s.analyses;
  }
  const int status = umfpack_di_numeric(ap, ai, ax, s.symbolic, &s.numeric, s.control, info);
  if (status == UMFPACK_WARNING_singular_matrix) {
    const long index = s.zero_pivot();
    s.release_numeric();
    throw SingularMatrixError(
        "DirectSolver: singular matrix, zero pivot at row " + std::to_string(index), index);
  }
  if (status != UMFPACK_OK) {
    s.release_numeric();
    throw std::runtime_error("DirectSolver: numeric factorization failed (" +
                             umfpack_status(status) + ")");
  }
}

Vector DirectSolver::solve(std::span<const double> rhs, double tolerance) const {
  const Impl& s = *impl_;
  if (!s.numeric) throw std::logic_error("DirectSolver::solve before factorize");
  if (rhs.size() != s.csr.rows()) {
    throw std::invalid_argument("DirectSolver::solve: rhs has " + std::to_string(rhs.size()) +
                                " entries, system has " + std::to_string(s.csr.rows()));
  }
  const double bnorm = norm2(rhs);
  Vector x(rhs.size(), 0.0);
  if (bnorm == 0.0) return x;

  const int* ap = s.csr.row_ptr().data();
  const int* ai = s.csr.col_idx().data();
  const double* ax = s.csr.values().data();
  double info[UMFPACK_INFO];
  Vector r(rhs.begin(), rhs.end());
  Vector dx(rhs.size());
  double relative = 0.0;
  for (int refinement = 0;; ++refinement) {
    // UMFPACK_At with A^T's CSC arrays solves A x = r.
    const int status = umfpack_di_solve(UMFPACK_At, ap, ai, ax, dx.data(), r.data(), s.numeric,
                                        s.control, info);
    if (status != UMFPACK_OK) {
      throw LinearSolveError("DirectSolver: solve failed (" + umfpack_status(status) + ")",
                             INFINITY);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    r.assign(rhs.begin(), rhs.end());
    matvec_add(s.csr, x, -1.0, r);
    relative = norm2(r) / bnorm;
    if (!std::isfinite(relative) || relative <= tolerance || refinement == 3) break;
  }
  if (!(relative <= tolerance)) {
    throw LinearSolveError("DirectSolver: relative residual " + std::to_string(relative) +
                               " above tolerance " + std::to_string(tolerance),
                           relative);
  }
  return x;
}

bool DirectSolver::refine(const SparseMatrix& a, std::span<const double> rhs, Vector& x,
                          double tolerance, int max_sweeps) const {
  const Impl& s = *impl_;
  if (!s.numeric) throw std::logic_error("DirectSolver::refine before factorize");
  if (a.rows() != s.csr.rows() || rhs.size() != a.rows() || x.size() != a.rows()) {
    throw std::invalid_argument("DirectSolver::refine: size mismatch");
  }
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return true;
  }
  const int* ap = s.csr.row_ptr().data();
  const int* ai = s.csr.col_idx().data();
  const double* ax = s.csr.values().data();
  double info[UMFPACK_INFO];
  Vector r(rhs.begin(), rhs.end());
  matvec_add(a, x, -1.0, r);
  double relative = norm2(r) / bnorm;
  Vector dx(rhs.size());
  for (int sweep = 0; sweep < max_sweeps && relative > tolerance; ++sweep) {
    if (umfpack_di_solve(UMFPACK_At, ap, ai, ax, dx.data(), r.data(), s.numeric, s.control,
                         info) != UMFPACK_OK) {
      return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    r.assign(rhs.begin(), rhs.end());
    matvec_add(a, x, -1.0, r);
    const double next = norm2(r) / bnorm;
    // A factorization this far from `a` is not worth iterating with.
    if (!std::isfinite(next) || next > 0.5 * relative) return next <= tolerance;
    relative = next;
  }
  return relative <= tolerance;
}

std::size_t DirectSolver::size() const { return impl_->csr.rows(); }

int DirectSolver::symbolic_analyses() const { return impl_->analyses; }

SaddleMatrixBuilder::SaddleMatrixBuilder(const SparseMatrix& velocity_pattern,
                                         const SparseMatrix& divergence,
                                         std::span<const int> dirichlet_dofs,
                                         const Vector& pressure_constraint)
    : nu_(velocity_pattern.rows()),
      np_(divergence.rows()),
      constraint_(pressure_constraint),
      velocity_pattern_(velocity_pattern) {
  if (velocity_pattern.rows() != velocity_pattern.cols()) {
    throw std::invalid_argument("SaddleMatrixBuilder: velocity block not square");
  }
  if (divergence.cols() != nu_) {
    throw std::invalid_argument("SaddleMatrixBuilder: divergence has " +
                                std::to_string(divergence.cols()) + " columns, expected " +
                                std::to_string(nu_));
  }
  if (!constraint_.empty()) {
    if (constraint_.size() != np_) {
      throw std::invalid_argument("SaddleMatrixBuilder: pressure constraint size mismatch");
    }
    double sum = 0.0;
    for (double c : constraint_) sum += c;
    if (!(std::abs(sum) > 0.0)) {
      throw std::invalid_argument("SaddleMatrixBuilder: constraint has zero total weight");
    }
    constraint_total_ = sum;
    pinned_ = np_ - 1;
  }
  dirichlet_.assign(nu_, false);
  for (int d : dirichlet_dofs) {
    if (d < 0 || static_cast<std::size_t>(d) >= nu_) {
      throw std::out_of_range("SaddleMatrixBuilder: Dirichlet dof " + std::to_string(d));
    }
    dirichlet_[d] = true;
  }

  // Dirichlet rows and columns are both eliminated: the boundary values are
  // zero, so dropping the columns changes nothing and keeps the pattern
  // symmetric, which the fill-reducing ordering likes.
  const std::size_t n = nu_ + np_;
  std::vector<Triplet> t;
  t.reserve(velocity_pattern.nnz() + 2 * divergence.nnz() + nu_ + 1);
  for (std::size_t i = 0; i < nu_; ++i) {
    if (dirichlet_[i]) {
      t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
      continue;
    }
    for (int p = velocity_pattern.row_ptr()[i]; p < velocity_pattern.row_ptr()[i + 1]; ++p) {
      const int j = velocity_pattern.col_idx()[p];
      if (!dirichlet_[j]) t.push_back({static_cast<int>(i), j, 0.0});
    }
  }
  for (std::size_t r = 0; r < np_; ++r) {
    const int row = static_cast<int>(nu_ + r);
    if (r == pinned_) {
      t.push_back({row, row, 1.0});
      continue;
    }
    for (int p = divergence.row_ptr()[r]; p < divergence.row_ptr()[r + 1]; ++p) {
      const int j = divergence.col_idx()[p];
      if (dirichlet_[j]) continue;
      const double v = -divergence.values()[p];
      t.push_back({row, j, v});
      t.push_back({j, row, v});
    }
  }
  matrix_ = SparseMatrix::from_triplets(n, n, std::move(t));

  velocity_slot_.assign(velocity_pattern.nnz(), -1);
  for (std::size_t i = 0; i < nu_; ++i) {
    if (dirichlet_[i]) continue;
    for (int p = velocity_pattern.row_ptr()[i]; p < velocity_pattern.row_ptr()[i + 1]; ++p) {
      const int j = velocity_pattern.col_idx()[p];
      if (!dirichlet_[j]) velocity_slot_[p] = matrix_.find(i, j);
    }
  }
}

const SparseMatrix& SaddleMatrixBuilder::assemble(const SparseMatrix& velocity_block) {
  if (!velocity_block.same_pattern(velocity_pattern_)) {
    throw std::invalid_argument("SaddleMatrixBuilder::assemble: velocity block pattern changed");
  }
  // Each velocity slot is written exactly once, so overwrite is enough.
  auto& dst = matrix_.values();
  const auto& src = velocity_block.values();
  for (std::size_t p = 0; p < src.size(); ++p) {
    if (velocity_slot_[p] >= 0) dst[static_cast<std::size_t>(velocity_slot_[p])] = src[p];
  }
  return matrix_;
}

Vector SaddleMatrixBuilder::rhs(std::span<const double> rhs_velocity,
                                std::span<const double> rhs_pressure) const {
  if (rhs_velocity.size() != nu_ || (!rhs_pressure.empty() && rhs_pressure.size() != np_)) {
    throw std::invalid_argument("SaddleMatrixBuilder::rhs: size mismatch");
  }
  Vector b(size(), 0.0);
  for (std::size_t i = 0; i < nu_; ++i) b[i] = dirichlet_[i] ? 0.0 : rhs_velocity[i];
  for (std::size_t r = 0; r < rhs_pressure.size(); ++r) {
    if (r != pinned_) b[nu_ + r] = rhs_pressure[r];
  }
  return b;
}

SaddleSolution SaddleMatrixBuilder::split(std::span<const double> x) const {
  if (x.size() != size()) throw std::invalid_argument("SaddleMatrixBuilder::split: size mismatch");
  SaddleSolution s = split_solution(x, nu_, np_);
  if (!constraint_.empty()) {
    // Constants lie in the pressure space, so shifting the pinned solution
    // onto c^T p = 0 gives the constrained one.
    const double shift = dot(constraint_, s.pressure) / constraint_total_;
    for (double& p : s.pressure) p -= shift;
  }
  return s;
}

SaddleSolution split_solution(std::span<const double> x, std::size_t nu, std::size_t np) {
  if (x.size() < nu + np) throw std::invalid_argument("split_solution: vector too short");
  SaddleSolution s;
  s.velocity.assign(x.begin(), x.begin() + static_cast<long>(nu));
  s.pressure.assign(x.begin() + static_cast<long>(nu), x.begin() + static_cast<long>(nu + np));
  return s;
}

DirectSolver factorize(const SaddleSystem& system) {
  SaddleMatrixBuilder builder(system.velocity_block, system.divergence, system.dirichlet_dofs,
                              system.pressure_constraint);
  return DirectSolver(builder.assemble(system.velocity_block));
}

SaddleSolution solve(const SaddleSystem& system, double tolerance) {
  SaddleMatrixBuilder builder(system.velocity_block, system.divergence, system.dirichlet_dofs,
                              system.pressure_constraint);
  const DirectSolver solver(builder.assemble(system.velocity_block));
  const Vector x = solver.solve(builder.rhs(system.rhs_velocity, system.rhs_pressure), tolerance);
  return builder.split(x);
}

}  // namespace oldroyd
