#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deltawell/bound_states.hpp"
#include "deltawell/grid.hpp"
#include "deltawell/tridiagonal.hpp"

namespace deltawell {

enum class Classification { P_le_1, P_ge_2_unstable };

/// "P_le_1" is inconclusive on its own: it does not prove stability.
std::string to_string(Classification c);

struct StabilityVerdict {
  double L1 = 0.0;
  double L2 = 0.0;
  double Lbar1 = 0.0;
  double Lbar2 = 0.0;
  Classification classification = Classification::P_le_1;
  int Q = 0;
  /// L1 or L2 sits on its threshold (within 1e-6); classified P_le_1.
  bool boundary = false;
};

/// Travel-time classifier: P >= 2 (hence a real unstable pair) iff
/// L1 >= Lbar1 and L2 >= Lbar2.  Throws ParameterError for states whose
/// flow between the defects passes the orbit maximum instead of its
/// minimum.
StabilityVerdict geometric_classify(const BoundState& state);

struct CrossingOptions {
  double seed = 1e-6;  // tail amplitude where the tangent vector starts
  double step = 2e-3;
};

/// Integrates the variational flow q1' = q2, q2' = (omega - 3u^2) q1 along
/// the state, starting from (1, sqrt(omega)) on the left tail, with
/// q2 -> q2 - V q1 at the defects, and counts sign changes of q1 up to the
/// point where the right tail returns to the seed amplitude.
int count_vertical_crossings(const BoundState& state,
                             const CrossingOptions& options = {});

struct Linearization {
  Grid grid;
  std::vector<double> profile;  // discrete stationary state on the grid
  SymmetricTridiagonal plus;    // L+ = D^2 - omega + 3u^2 + V
  SymmetricTridiagonal minus;   // L- = D^2 - omega + u^2 + V
  Eigen::MatrixXd block;        // [[0, -L-], [L+, 0]]
  double relax_residual = 0.0;
  std::vector<std::string> warnings;
};

Linearization build_linearization(const BoundState& state, double M,
                                  double h);

/// Number of eigenvalues above `threshold`.  L- has an exact zero mode (the
/// state itself), so counts for it need a small positive threshold.
std::size_t positive_count(const SymmetricTridiagonal& t,
                           double threshold = 0.0);

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double M = 0.0;
  double h = 0.0;
  double max_real_part = 0.0;
  double tau = 0.0;
  bool unstable = false;
  /// max over eigenvalues of the distance from -lambda to the nearest
  /// computed eigenvalue.
  double symmetry_defect = 0.0;
  /// Largest real eigenvalue above tau whose negative is also present (0 if
  /// none).
  double real_pair = 0.0;
};

double spectral_tolerance(double h);

/// A real eigenvalue of the block operator with its right and left
/// eigenvectors, normalised so that left . right = 1.  The left vector
/// extracts the mode's amplitude from a perturbation (Re, Im stacked).
struct RealMode {
  double lambda = 0.0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;
};

/// Inverse iteration at a shift next to `lambda`.
RealMode real_mode(const Linearization& lin, double lambda);

Spectrum spectrum(const Linearization& lin);
Spectrum spectrum(const BoundState& state, double M = 12.0, double h = 0.05);

}  // namespace deltawell
