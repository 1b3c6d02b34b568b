#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deltawell/phase_plane.hpp"

namespace deltawell {

/// Which landing root is used at each defect: 1 is the larger root of the
/// landing cubic, 2 the smaller one.
struct BranchChoice {
  int first = 1;
  int second = 1;

  /// Parses "11", "12", "21" or "22"; throws ParameterError otherwise.
  static BranchChoice parse(std::string_view text);
  std::string label() const;

  friend bool operator==(const BranchChoice&, const BranchChoice&) = default;
};

inline constexpr std::array<BranchChoice, 4> kAllBranches{
    {{1, 1}, {1, 2}, {2, 1}, {2, 2}}};

/// A positive bound state assembled from closed-form pieces:
///
///   u = sqrt(2w) sech(sqrt(w)(x + xi1))   x < -L
///     = a dn(r (x + xi2) | m)             -L < x < L
///     = sqrt(2w) sech(sqrt(w)(x + xi3))   x > L
struct BoundState {
  WellParams params;
  BranchChoice branch;
  double Ehat = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double a = 0.0;
  double r = 0.0;
  double m = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi3 = 0.0;
  double norm = 0.0;

  double u_min = 0.0;
  /// Signed time from the landing point at -L to the orbit minimum, and from
  /// the orbit minimum to the take-off point at +L (L1 + L2 = 2L).
  double L1 = 0.0;
  double L2 = 0.0;
  /// True when the flow between the defects passes (a, 0) instead of
  /// (u_min, 0).
  bool crosses_maximum = false;

  double value(double x) const;
  /// One-sided derivative (from the right unless `right` is false).
  double slope(double x, bool right = true) const;
  /// u_xx of the piece containing x (x != -L, +L).
  double curvature(double x) const;
};

struct StateChecks {
  double continuity = 0.0;        // max |u(+-L^+) - u(+-L^-)|
  double jump_left = 0.0;         // |[u_x](-L) + u(-L)|
  double jump_right = 0.0;        // |[u_x](+L) + eps u(+L)|
  double interior_residual = 0.0; // sup |u_xx - w u + u^3| off the defects
};

/// Evaluates the defining conditions on a uniform grid of `samples` points
/// covering [-L - tail, L + tail].
StateChecks verify(const BoundState& state, int samples = 4001,
                   double tail = 6.0);

/// Forward flow time from the first landing point to the second take-off
/// point minus 2L, for the roots selected by `branch`.  NaN when the roots
/// do not exist at this energy.
double matching_residual(double Ehat, const WellParams& params,
                         BranchChoice branch);

/// All transient energies on the given branch that satisfy the matching
/// condition.  Throws ParameterError for omega <= 1/4.
std::vector<double> solve_transient_energy(const WellParams& params,
                                           BranchChoice branch);

/// Builds the explicit profile.  Throws NumericalError when the energy does
/// not produce a consistent state (spurious root).
BoundState assemble(const WellParams& params, BranchChoice branch,
                    double Ehat);

/// Every positive bound state at these parameters over the four branches,
/// duplicates (tangency states) removed.
std::vector<BoundState> all_states(const WellParams& params);

/// Squared norm of the state: closed-form tails plus adaptive quadrature of
/// the dn^2 piece.
double squared_norm(const BoundState& state);

/// Integral of 2w sech^2 over the decaying side of a sech tail starting
/// where the tail has amplitude u_edge.
double sech_tail_norm(double omega, double u_edge);

enum class StabilityTag { stable_candidate, unstable, unknown };

std::string to_string(StabilityTag tag);

struct BranchPoint {
  double omega = 0.0;
  double norm = 0.0;
  BranchChoice branch;
  double Ehat = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  StabilityTag stability_tag = StabilityTag::unknown;
};

struct TraceOptions {
  /// Bisection depth applied between grid points where the solution count
  /// of a branch changes.
  int refine_levels = 6;
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Bound states on every branch for each omega of an increasing grid.
/// Points with omega <= 1/4 are skipped.  Output is ordered by omega, then
/// branch, then Ehat.
std::vector<BranchPoint> trace_branches(double L, double epsilon,
                                        std::span<const double> omega_grid,
                                        const TraceOptions& options = {});

struct PinnedRoot {
  double omega = 0.0;
  int other_index = 1;  // landing root index used at the unpinned defect
};

enum class BifurcationKind { pitchfork, fold };

std::string to_string(BifurcationKind kind);

struct CriticalOmega {
  /// First omega above which more than one positive state exists.
  double omega_c = 0.0;
  BifurcationKind kind = BifurcationKind::pitchfork;
  /// Solutions of the matching condition with Ehat pinned to Ebar1 (merged
  /// first-defect roots) and to Ebar2 (merged second-defect roots).
  std::vector<PinnedRoot> pinned_e1;
  std::vector<PinnedRoot> pinned_e2;
};

/// Locates the first bifurcation of the positive-state diagram in
/// omega in (1/4, omega_max].  Throws NumericalError if none is found.
CriticalOmega critical_omega(double L, double epsilon, double omega_max = 3.0);

}  // namespace deltawell
