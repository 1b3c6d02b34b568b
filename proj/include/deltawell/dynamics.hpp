#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "deltawell/bound_states.hpp"
#include "deltawell/errors.hpp"
#include "deltawell/grid.hpp"

/// Time evolution of
///
///   psi_t = i (psi_xx - omega psi + |psi|^2 psi + V psi)
///
/// on the grid of the stability module, in the frame rotating with the
/// standing wave so that a discrete stationary state does not move.

namespace deltawell {

struct Field {
  Grid grid;
  std::vector<std::complex<double>> psi;  // interior nodes
  double time = 0.0;
};

/// The bound state relaxed onto the grid, as a real field.
Field stationary_field(const BoundState& state, double M, double h);

/// Squared norm by the trapezoid rule (the ends carry zero).
double squared_norm(const Field& field);

struct Perturbation {
  /// Noise amplitude relative to max|psi|; 0 disables the perturbation.
  double amplitude = 0.0;
  std::uint64_t seed = 0;
};

/// Adds uniform complex noise in [-a, a] + i[-a, a], a = amplitude max|psi|,
/// to every node.
void perturb(Field& field, const Perturbation& p);

struct EvolveOptions {
  double dt = 0.0;         // 0 picks dt_factor h^2
  double t_final = 100.0;
  double dt_factor = 0.05;
  double max_dt_factor = 0.1;   // dt must not exceed this times h^2
  double sample_interval = 0.5;
  bool keep_density = true;
  double drift_limit = 1e-4;
};

struct Trajectory {
  Grid grid;
  double dt = 0.0;
  Perturbation perturbation;
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> left_mass;   // x < 0, the x = 0 node split evenly
  std::vector<double> right_mass;
  std::vector<double> deviation;   // max_j |psi_j(t) - psi_j(0)|
  std::vector<double> boundary;    // max(|psi_0|, |psi_n-1|) / max|psi|
  std::vector<std::vector<double>> density;  // |psi|^2 per sample
  Field final;
};

/// Thrown when the relative norm drift exceeds the configured limit.
class NormDriftError : public NumericalError {
 public:
  NormDriftError(double time, double drift);
  double time() const { return time_; }
  double drift() const { return drift_; }

 private:
  double time_;
  double drift_;
};

using Observer =
    std::function<void(double t, const std::vector<std::complex<double>>&)>;

/// Classic RK4 from `initial` (after applying the perturbation) to t_final.
/// `observer`, if set, sees the field at every sample.
Trajectory evolve(const Field& initial, const WellParams& params,
                  const EvolveOptions& options,
                  const Perturbation& perturbation = {},
                  const Observer& observer = {});

std::vector<std::pair<double, double>> norm_history(const Trajectory& t);

/// max_t |N(t) - N(0)| / N(0) (absolute when N(0) = 0).
double relative_drift(const Trajectory& t);

}  // namespace deltawell
