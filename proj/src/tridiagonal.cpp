#include "deltawell/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deltawell/errors.hpp"

namespace deltawell {

std::vector<double> SymmetricTridiagonal::apply(
    const std::vector<double>& x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

std::size_t SymmetricTridiagonal::count_below(double sigma) const {
  // Signs of the leading principal minors of T - sigma I via the ratio
  // recurrence q_i = (d_i - sigma) - e_{i-1}^2 / q_{i-1}.
  const double tiny = std::numeric_limits<double>::min() * 1e4;
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double e2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
    q = (diag[i] - sigma) - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

double SymmetricTridiagonal::eigenvalue(std::size_t k, double tol) const {
  if (k >= size()) throw ParameterError("eigenvalue index out of range");
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < size(); ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(off[i - 1]);
    if (i + 1 < size()) radius += std::abs(off[i]);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> SymmetricTridiagonal::solve(
    const std::vector<double>& rhs) const {
  const std::size_t n = size();
  std::vector<double> c(n, 0.0), d(n, 0.0);
  double pivot = diag[0];
  if (pivot == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
  c[0] = n > 1 ? off[0] / pivot : 0.0;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - off[i - 1] * c[i - 1];
    if (pivot == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    c[i] = i + 1 < n ? off[i] / pivot : 0.0;
    d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace deltawell
