#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seaice {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with column indices sorted ascending and
/// unique within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Validates monotone offsets and sorted, unique, in-range column indices.
  CsrMatrix(int rows, int cols, std::vector<std::size_t> offsets, std::vector<int> columns,
            std::vector<double> values);

  static CsrMatrix identity(int n);
  /// Duplicates are summed; explicit zeros are kept.
  static CsrMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
  /// Builds from a row-major dense array, dropping exact zeros.
  static CsrMatrix from_dense(int rows, int cols, std::span<const double> dense);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return columns_.size(); }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const int> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Position of (row, col) in the value array, or -1 if structurally absent.
  std::ptrdiff_t find(int row, int col) const;
  double at(int row, int col) const;

  std::vector<double> to_dense() const;
  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;
  /// Removes off-diagonal entries that are exactly zero.
  CsrMatrix pruned() const;

  /// max |a_ij - a_ji| over all entries.
  double asymmetry() const;
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;
};

/// y = A x. Throws std::invalid_argument on dimension mismatch.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

/// y = b - A x.
void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> y);

/// C = A B (Gustavson).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// Writes the matrix in Matrix Market coordinate format.
void write_matrix_market(const CsrMatrix& a, const std::string& path);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace seaice
