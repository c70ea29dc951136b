#include "oldroyd/sparse_matrix.hpp"

#include <limits>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace oldroyd {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<int> row_ptr,
                           std::vector<int> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 ||
      static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size() ||
      col_idx_.size() != values_.size()) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) {
      throw std::invalid_argument("SparseMatrix: row pointer decreases at row " + std::to_string(i));
    }
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || static_cast<std::size_t>(col_idx_[p]) >= cols_ ||
          (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])) {
        throw std::invalid_argument("SparseMatrix: bad column index in row " + std::to_string(i));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= rows || t.col < 0 ||
        static_cast<std::size_t>(t.col) >= cols) {
      throw std::out_of_range("SparseMatrix::from_triplets: entry (" + std::to_string(t.row) +
                              ", " + std::to_string(t.col) + ") outside " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<int> row_ptr(n + 1);
  std::vector<int> col_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_ptr[i + 1] = static_cast<int>(i + 1);
    col_idx[i] = static_cast<int>(i);
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

long SparseMatrix::find(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) return -1;
  const auto first = col_idx_.begin() + row_ptr_[row];
  const auto last = col_idx_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, static_cast<int>(col));
  if (it == last || *it != static_cast<int>(col)) return -1;
  return static_cast<long>(it - col_idx_.begin());
}

double SparseMatrix::coeff(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) {
    throw std::out_of_range("SparseMatrix::coeff: index out of range");
  }
  const long p = find(row, col);
  return p < 0 ? 0.0 : values_[static_cast<std::size_t>(p)];
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ &&
         col_idx_ == other.col_idx_;
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> row_ptr(cols_ + 1, 0);
  for (int c : col_idx_) ++row_ptr[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<int> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<int> col_idx(nnz());
  std::vector<double> values(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const int q = next[col_idx_[p]]++;
      col_idx[q] = static_cast<int>(i);
      values[q] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      d(static_cast<Eigen::Index>(i), col_idx_[p]) += values_[p];
    }
  }
  return d;
}

void matvec_add(const SparseMatrix& m, std::span<const double> x, double alpha,
                std::span<double> y) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    throw std::invalid_argument("matvec: dimension mismatch (" + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " times " + std::to_string(x.size()) +
                                ")");
  }
  const auto& rp = m.row_ptr();
  const auto& ci = m.col_idx();
  const auto& v = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] += alpha * s;
  }
}

Vector matvec(const SparseMatrix& m, std::span<const double> x) {
  Vector y(m.rows(), 0.0);
  matvec_add(m, x, 1.0, y);
  return y;
}

SparseMatrix add_scaled(const SparseMatrix& m1, double c1, const SparseMatrix& m2, double c2) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
    throw std::invalid_argument("add_scaled: shape mismatch " + std::to_string(m1.rows()) + "x" +
                                std::to_string(m1.cols()) + " vs " + std::to_string(m2.rows()) +
                                "x" + std::to_string(m2.cols()));
  }
  std::vector<int> row_ptr(m1.rows() + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(std::max(m1.nnz(), m2.nnz()));
  values.reserve(std::max(m1.nnz(), m2.nnz()));
  for (std::size_t i = 0; i < m1.rows(); ++i) {
    int p = m1.row_ptr()[i];
    int q = m2.row_ptr()[i];
    const int pe = m1.row_ptr()[i + 1];
    const int qe = m2.row_ptr()[i + 1];
    while (p < pe || q < qe) {
      const int a = p < pe ? m1.col_idx()[p] : std::numeric_limits<int>::max();
      const int b = q < qe ? m2.col_idx()[q] : std::numeric_limits<int>::max();
      if (a == b) {
        col_idx.push_back(a);
        values.push_back(c1 * m1.values()[p++] + c2 * m2.values()[q++]);
      } else if (a < b) {
        col_idx.push_back(a);
        values.push_back(c1 * m1.values()[p++]);
      } else {
        col_idx.push_back(b);
        values.push_back(c2 * m2.values()[q++]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(m1.rows(), m1.cols(), std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace oldroyd
