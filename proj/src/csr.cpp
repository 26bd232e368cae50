#include "seaice/csr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace seaice {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<std::size_t> offsets,
                     std::vector<int> columns, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(offsets)),
      columns_(std::move(columns)),
      values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("CsrMatrix: negative dimension");
  if (offsets_.size() != static_cast<std::size_t>(rows) + 1 || offsets_.front() != 0 ||
      offsets_.back() != columns_.size() || columns_.size() != values_.size()) {
    throw std::invalid_argument("CsrMatrix: inconsistent array sizes");
  }
  for (int i = 0; i < rows; ++i) {
    if (offsets_[i] > offsets_[i + 1]) throw std::invalid_argument("CsrMatrix: offsets not monotone");
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (columns_[k] < 0 || columns_[k] >= cols) {
        throw std::invalid_argument("CsrMatrix: column index out of range");
      }
      if (k > offsets_[i] && columns_[k] <= columns_[k - 1]) {
        throw std::invalid_argument("CsrMatrix: columns not sorted/unique");
      }
    }
  }
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<std::size_t> off(n + 1);
  std::vector<int> col(n);
  for (int i = 0; i <= n; ++i) off[i] = i;
  for (int i = 0; i < n; ++i) col[i] = i;
  return CsrMatrix(n, n, std::move(off), std::move(col), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const auto& t : sorted) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::invalid_argument("CsrMatrix::from_triplets: index out of range");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> off(rows + 1, 0);
  std::vector<int> col;
  std::vector<double> val;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& t = sorted[k];
    if (!col.empty() && k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
      val.back() += t.value;
      continue;
    }
    col.push_back(t.col);
    val.push_back(t.value);
    ++off[t.row + 1];
  }
  for (int i = 0; i < rows; ++i) off[i + 1] += off[i];
  return CsrMatrix(rows, cols, std::move(off), std::move(col), std::move(val));
}

CsrMatrix CsrMatrix::from_dense(int rows, int cols, std::span<const double> dense) {
  if (dense.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("CsrMatrix::from_dense: size mismatch");
  }
  std::vector<std::size_t> off(rows + 1, 0);
  std::vector<int> col;
  std::vector<double> val;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double a = dense[static_cast<std::size_t>(i) * cols + j];
      if (a != 0.0) {
        col.push_back(j);
        val.push_back(a);
      }
    }
    off[i + 1] = col.size();
  }
  return CsrMatrix(rows, cols, std::move(off), std::move(col), std::move(val));
}

std::ptrdiff_t CsrMatrix::find(int row, int col) const {
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[row]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return -1;
  return it - columns_.begin();
}

double CsrMatrix::at(int row, int col) const {
  const auto k = find(row, col);
  return k < 0 ? 0.0 : values_[k];
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> d(static_cast<std::size_t>(rows_) * cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      d[static_cast<std::size_t>(i) * cols_ + columns_[k]] = values_[k];
    }
  }
  return d;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::size_t> off(cols_ + 1, 0);
  for (int c : columns_) ++off[c + 1];
  for (int j = 0; j < cols_; ++j) off[j + 1] += off[j];
  std::vector<int> col(columns_.size());
  std::vector<double> val(values_.size());
  std::vector<std::size_t> next(off.begin(), off.end() - 1);
  for (int i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const std::size_t p = next[columns_[k]]++;
      col[p] = i;
      val[p] = values_[k];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(off), std::move(col), std::move(val));
}

CsrMatrix CsrMatrix::pruned() const {
  std::vector<std::size_t> off(rows_ + 1, 0);
  std::vector<int> col;
  std::vector<double> val;
  col.reserve(columns_.size());
  val.reserve(values_.size());
  for (int i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (values_[k] != 0.0 || columns_[k] == i) {
        col.push_back(columns_[k]);
        val.push_back(values_[k]);
      }
    }
    off[i + 1] = col.size();
  }
  return CsrMatrix(rows_, cols_, std::move(off), std::move(col), std::move(val));
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const int j = columns_[k];
      const double aji = j < rows_ ? at(j, i) : 0.0;
      worst = std::max(worst, std::abs(values_[k] - aji));
    }
  }
  return worst;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != static_cast<std::size_t>(a.cols()) || y.size() != static_cast<std::size_t>(a.rows())) {
    throw std::invalid_argument("spmv: dimension mismatch");
  }
  const auto off = a.offsets();
  const auto col = a.columns();
  const auto val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  spmv(a, x, y);
  return y;
}

void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> y) {
  if (b.size() != static_cast<std::size_t>(a.rows())) {
    throw std::invalid_argument("residual: dimension mismatch");
  }
  spmv(a, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = b[i] - y[i];
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  const auto aoff = a.offsets();
  const auto acol = a.columns();
  const auto aval = a.values();
  const auto boff = b.offsets();
  const auto bcol = b.columns();
  const auto bval = b.values();

  std::vector<std::size_t> off(a.rows() + 1, 0);
  std::vector<int> col;
  std::vector<double> val;
  std::vector<std::ptrdiff_t> marker(b.cols(), -1);
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<int> row_cols;
  for (int i = 0; i < a.rows(); ++i) {
    row_cols.clear();
    for (std::size_t ka = aoff[i]; ka < aoff[i + 1]; ++ka) {
      const int k = acol[ka];
      const double av = aval[ka];
      for (std::size_t kb = boff[k]; kb < boff[k + 1]; ++kb) {
        const int j = bcol[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          row_cols.push_back(j);
        }
        acc[j] += av * bval[kb];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (int j : row_cols) {
      col.push_back(j);
      val.push_back(acc[j]);
    }
    off[i + 1] = col.size();
  }
  return CsrMatrix(a.rows(), b.cols(), std::move(off), std::move(col), std::move(val));
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  char buf[64];
  for (int i = 0; i < a.rows(); ++i) {
    for (std::size_t k = a.offsets()[i]; k < a.offsets()[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", a.values()[k]);
      out << i + 1 << ' ' << a.columns()[k] + 1 << ' ' << buf << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace seaice
