#pragma once

#include <span>
#include <vector>

namespace seaice {

/// LU factorization with partial pivoting of a dense row-major matrix.
class DenseLu {
 public:
  DenseLu() = default;
  /// Throws std::runtime_error if a zero pivot is encountered.
  DenseLu(int n, std::vector<double> a);

  int size() const { return n_; }
  /// Solves in place.
  void solve(std::span<double> b) const;

 private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> perm_;
};

std::vector<double> dense_lu_solve(int n, std::span<const double> a, std::span<const double> b);

}  // namespace seaice
