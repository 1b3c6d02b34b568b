#pragma once

#include <cstddef>
#include <vector>

namespace deltawell {

/// Real symmetric tridiagonal matrix: `diag` has n entries, `off` n-1.
struct SymmetricTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }

  /// y = T x.
  std::vector<double> apply(const std::vector<double>& x) const;

  /// Number of eigenvalues strictly below sigma (Sturm sequence count).
  std::size_t count_below(double sigma) const;

  /// k-th smallest eigenvalue (k = 0 is the smallest), by bisection on
  /// count_below to absolute accuracy `tol`.
  double eigenvalue(std::size_t k, double tol = 1e-12) const;

  /// Solve T x = rhs (no pivoting; intended for diagonally dominant or
  /// definite systems).
  std::vector<double> solve(const std::vector<double>& rhs) const;
};

}  // namespace deltawell
