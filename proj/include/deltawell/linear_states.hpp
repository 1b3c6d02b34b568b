#pragma once

#include <optional>

/// Small-amplitude limit: eigenpairs of u_xx - omega u - V(x) u = 0 with the
/// two attractive point defects.  Eigenfunctions are
///
///   u(x) = exp(s (x + L))                           x < -L
///        = A exp(s (x + L)) + B exp(-s (x + L))     -L < x < L
///        = C exp(-s (x - L))                        x > L
///
/// with s = sqrt(omega), A = 1 - 1/(2s), B = 1/(2s) and
/// C = exp(-2Ls) ((2s - 1) exp(4Ls) + 1)/(2s).

namespace deltawell::linear {

/// Right-hand side of the eigenvalue relation
///   L = ln(-eps / ((2s - 1)(eps - 2s))) / (4s)
/// minus L.  Empty outside the domain of the logarithm; +infinity at the
/// poles omega = 1/4 and omega = eps^2/4.
std::optional<double> omega_residual(double omega, double L, double epsilon);

struct BifurcationPoints {
  double omega0 = 0.0;                 // ground state, > 1/4
  std::optional<double> omega1;        // excited state, < eps^2/4
};

/// Threshold on L above which the excited linear state exists.
double excited_threshold(double epsilon);

BifurcationPoints bifurcation_points(double L, double epsilon);

enum class LinearIndex { ground, excited };

struct MatchingResiduals {
  double continuity_left = 0.0;
  double continuity_right = 0.0;
  double jump_left = 0.0;
  double jump_right = 0.0;
  double max_abs() const;
};

struct LinearState {
  double omega_eig = 0.0;
  double L = 0.0;
  double epsilon = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  LinearIndex index = LinearIndex::ground;

  double value(double x) const;
  /// One-sided derivative; `right` selects the limit from x+.
  double slope(double x, bool right = true) const;
  MatchingResiduals residuals() const;
  int interior_zeros() const;
};

/// Coefficients for a given omega.  Does not check that omega is an
/// eigenvalue: residuals() exposes the matching error instead.
LinearState eigenfunction(double omega_eig, double L, double epsilon);

}  // namespace deltawell::linear
