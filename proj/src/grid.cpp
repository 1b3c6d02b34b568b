#include "deltawell/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltawell/errors.hpp"

namespace deltawell {

int Grid::node_of(double xv) const {
  return static_cast<int>(std::lround((xv + M) / h)) - 1;
}

Grid make_grid(double L, double M, double h) {
  if (!(L > 0.0) || !(h > 0.0) || !(M > L)) {
    throw ParameterError("grid: need L > 0, h > 0 and M > L (got L=" +
                         std::to_string(L) + ", M=" + std::to_string(M) +
                         ", h=" + std::to_string(h) + ")");
  }
  Grid g;
  g.L = L;
  const double k = std::ceil(L / h - 1e-9);
  g.h = L / k;
  g.M = std::ceil(M / g.h - 1e-9) * g.h;
  g.n = static_cast<int>(std::lround(2.0 * g.M / g.h)) - 1;
  if (g.n < 3) throw ParameterError("grid: fewer than three nodes");
  return g;
}

std::vector<double> defect_weights(const Grid& grid, double epsilon) {
  std::vector<double> w(static_cast<std::size_t>(grid.n), 0.0);
  w[static_cast<std::size_t>(grid.left_defect())] += 1.0 / grid.h;
  w[static_cast<std::size_t>(grid.right_defect())] += epsilon / grid.h;
  return w;
}

SymmetricTridiagonal schrodinger_operator(const Grid& grid,
                                          const std::vector<double>& weights,
                                          double omega,
                                          const std::vector<double>& u,
                                          double coeff) {
  const auto n = static_cast<std::size_t>(grid.n);
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  SymmetricTridiagonal t;
  t.diag.resize(n);
  t.off.assign(n - 1, inv_h2);
  for (std::size_t j = 0; j < n; ++j) {
    t.diag[j] = -2.0 * inv_h2 - omega + coeff * u[j] * u[j] + weights[j];
  }
  return t;
}

std::vector<double> sample(const BoundState& state, const Grid& grid) {
  std::vector<double> u(static_cast<std::size_t>(grid.n));
  for (int j = 0; j < grid.n; ++j) u[static_cast<std::size_t>(j)] = state.value(grid.x(j));
  return u;
}

Relaxed relax_to_grid(const BoundState& state, const Grid& grid, double tol) {
  const double omega = state.params.omega;
  const auto weights = defect_weights(grid, state.params.epsilon);
  Relaxed out;
  out.u = sample(state, grid);

  const auto residual = [&](const std::vector<double>& u) {
    const auto op = schrodinger_operator(grid, weights, omega, u, 1.0);
    return op.apply(u);
  };
  const auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  auto f = residual(out.u);
  out.initial_residual = max_abs(f);
  out.residual = out.initial_residual;
  for (; out.iterations < 30 && out.residual > tol; ++out.iterations) {
    const auto jac = schrodinger_operator(grid, weights, omega, out.u, 3.0);
    const auto step = jac.solve(f);
    for (std::size_t j = 0; j < out.u.size(); ++j) out.u[j] -= step[j];
    f = residual(out.u);
    out.residual = max_abs(f);
  }
  if (!(out.residual <= tol)) {
    throw NumericalError("relax_to_grid: Newton stalled at residual " +
                         std::to_string(out.residual));
  }
  return out;
}

}  // namespace deltawell
