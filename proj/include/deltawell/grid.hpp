#pragma once

#include <vector>

#include "deltawell/bound_states.hpp"
#include "deltawell/tridiagonal.hpp"

namespace deltawell {

/// Uniform grid on [-M, M] with Dirichlet ends.  Only the interior nodes
/// x_j = -M + (j + 1) h, j = 0..n-1, carry unknowns.  h divides L exactly so
/// both defects sit on nodes.
struct Grid {
  double M = 0.0;
  double h = 0.0;
  double L = 0.0;
  int n = 0;

  double x(int j) const { return -M + (j + 1) * h; }
  int node_of(double x) const;
  int left_defect() const { return node_of(-L); }
  int right_defect() const { return node_of(L); }
};

/// Builds the grid closest to the requested (M, h): h is shrunk to L/k for
/// the smallest integer k with L/k <= h, then M is rounded up to a multiple
/// of h.  Throws ParameterError unless M > L and h > 0.
Grid make_grid(double L, double M, double h);

/// Node potential of the two defects: +1/h at -L and +epsilon/h at +L.
std::vector<double> defect_weights(const Grid& grid, double epsilon);

/// D^2 - omega + coeff * u^2 + defect weights, the discrete operator family
/// behind L+ (coeff 3) and L- (coeff 1).
SymmetricTridiagonal schrodinger_operator(const Grid& grid,
                                          const std::vector<double>& weights,
                                          double omega,
                                          const std::vector<double>& u,
                                          double coeff);

/// The analytic profile sampled at the interior nodes.
std::vector<double> sample(const BoundState& state, const Grid& grid);

struct Relaxed {
  std::vector<double> u;
  double initial_residual = 0.0;  // max |F| of the sampled profile
  double residual = 0.0;          // max |F| after Newton
  int iterations = 0;
};

/// Newton iteration for the discrete stationary equation
/// D^2 u - omega u + u^3 + V u = 0, started from the sampled analytic state.
/// Throws NumericalError if the residual does not fall below `tol`.
Relaxed relax_to_grid(const BoundState& state, const Grid& grid,
                      double tol = 1e-11);

}  // namespace deltawell
