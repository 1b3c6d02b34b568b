#include "deltawell/linear_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "deltawell/errors.hpp"

namespace deltawell::linear {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(double L, double epsilon) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw ParameterError("L must be positive, got " + std::to_string(L));
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1], got " +
                         std::to_string(epsilon));
  }
}

// Residual in terms of the offset t from the threshold so that roots
// closer to the threshold than double spacing in omega stay resolvable.
// Ground: 2 sqrt(omega) = 1 + t. Excited: 2 sqrt(omega) = epsilon - t.
double ground_residual(double t, double L, double epsilon) {
  const double log_arg = std::log(epsilon) - std::log(t) - std::log(t + 1.0 - epsilon);
  return log_arg / (2.0 * (1.0 + t)) - L;
}

double excited_residual(double t, double L, double epsilon) {
  const double log_arg = -std::log1p(t - epsilon) - std::log(t / epsilon);
  return log_arg / (2.0 * (epsilon - t)) - L;
}

// Root of a residual that is positive at lo and negative at hi, bisected
// in log t.
template <class F>
double bisect_log(F&& f, double lo, double hi) {
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    const double mid = 0.5 * (a + b);
    if (f(std::exp(mid)) > 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace

std::optional<double> omega_residual(double omega, double L, double epsilon) {
  if (!(omega > 0.0)) return std::nullopt;
  const double s = std::sqrt(omega);
  const double two_s = 2.0 * s;
  if (two_s == 1.0 || two_s == epsilon) return kInf;

  double log_arg = 0.0;
  if (two_s > 1.0 && two_s > epsilon) {
    log_arg = std::log(epsilon) - std::log(two_s - 1.0) -
              std::log(two_s - epsilon);
  } else if (two_s < 1.0 && two_s < epsilon) {
    // Written with log1p so that the omega -> 0 limit (1+eps)/(2 eps) is
    // reproduced without cancellation.
    log_arg = -std::log1p(-two_s) - std::log1p(-two_s / epsilon);
  } else {
    return std::nullopt;
  }
  return log_arg / (4.0 * s) - L;
}

double excited_threshold(double epsilon) {
  return (1.0 + epsilon) / (2.0 * epsilon);
}

BifurcationPoints bifurcation_points(double L, double epsilon) {
  check_inputs(L, epsilon);
  constexpr double kTiny = 1e-300;

  BifurcationPoints out;
  const auto ground = [&](double t) { return ground_residual(t, L, epsilon); };
  double hi = 1.0;
  while (ground(hi) > 0.0) hi *= 2.0;
  const double t0 = bisect_log(ground, kTiny, hi);
  out.omega0 = 0.25 * (1.0 + t0) * (1.0 + t0);

  // As t -> epsilon the excited residual tends to excited_threshold - L.
  if (L > excited_threshold(epsilon)) {
    const auto excited = [&](double t) { return excited_residual(t, L, epsilon); };
    const double top = epsilon * (1.0 - 1e-12);
    if (excited(top) < 0.0) {
      const double t1 = bisect_log(excited, kTiny, top);
      out.omega1 = 0.25 * (epsilon - t1) * (epsilon - t1);
    }
  }
  return out;
}

double MatchingResiduals::max_abs() const {
  return std::max({std::abs(continuity_left), std::abs(continuity_right),
                   std::abs(jump_left), std::abs(jump_right)});
}

LinearState eigenfunction(double omega_eig, double L, double epsilon) {
  check_inputs(L, epsilon);
  if (!(omega_eig > 0.0)) {
    throw ParameterError("eigenfunction: omega must be positive");
  }
  const double s = std::sqrt(omega_eig);
  LinearState state;
  state.omega_eig = omega_eig;
  state.L = L;
  state.epsilon = epsilon;
  state.A = 1.0 - 1.0 / (2.0 * s);
  state.B = 1.0 / (2.0 * s);
  state.C = ((2.0 * s - 1.0) * std::exp(2.0 * L * s) +
             std::exp(-2.0 * L * s)) /
            (2.0 * s);
  state.index =
      state.interior_zeros() == 0 ? LinearIndex::ground : LinearIndex::excited;
  return state;
}

double LinearState::value(double x) const {
  const double s = std::sqrt(omega_eig);
  if (x < -L) return std::exp(s * (x + L));
  if (x > L) return C * std::exp(-s * (x - L));
  return A * std::exp(s * (x + L)) + B * std::exp(-s * (x + L));
}

double LinearState::slope(double x, bool right) const {
  const double s = std::sqrt(omega_eig);
  if (x < -L || (x == -L && !right)) return s * std::exp(s * (x + L));
  if (x > L || (x == L && right)) return -s * C * std::exp(-s * (x - L));
  return s * (A * std::exp(s * (x + L)) - B * std::exp(-s * (x + L)));
}

MatchingResiduals LinearState::residuals() const {
  const double s = std::sqrt(omega_eig);
  const double mid_left = A + B;
  const double mid_right = A * std::exp(2.0 * s * L) + B * std::exp(-2.0 * s * L);
  MatchingResiduals r;
  r.continuity_left = mid_left - 1.0;
  r.continuity_right = mid_right - C;
  r.jump_left = (slope(-L, true) - slope(-L, false)) + 1.0 * value(-L);
  r.jump_right = (slope(L, true) - slope(L, false)) + epsilon * C;
  return r;
}

int LinearState::interior_zeros() const {
  if (A >= 0.0) return 0;
  const double s = std::sqrt(omega_eig);
  const double offset = std::log(-B / A) / (2.0 * s);  // x + L at the zero
  return (offset > 0.0 && offset < 2.0 * L) ? 1 : 0;
}

}  // namespace deltawell::linear
