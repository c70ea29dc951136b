#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "oldroyd/types.hpp"

namespace oldroyd {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with strictly increasing column indices in
/// every row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<int> row_ptr,
               std::vector<int> col_idx, std::vector<double> values);

  /// Duplicate entries are summed; explicit zeros are kept in the pattern.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Position of (row, col) in the value array, or -1 if outside the pattern.
  long find(std::size_t row, std::size_t col) const;
  double coeff(std::size_t row, std::size_t col) const;

  bool same_pattern(const SparseMatrix& other) const;
  void set_zero();
  SparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

Vector matvec(const SparseMatrix& m, std::span<const double> x);

/// y += alpha * M x
void matvec_add(const SparseMatrix& m, std::span<const double> x, double alpha,
                std::span<double> y);

/// c1*M1 + c2*M2 on the union of both patterns.
SparseMatrix add_scaled(const SparseMatrix& m1, double c1, const SparseMatrix& m2, double c2);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace oldroyd
