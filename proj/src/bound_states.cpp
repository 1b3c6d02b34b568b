#include "deltawell/bound_states.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <thread>

#include "deltawell/errors.hpp"
#include "deltawell/linear_states.hpp"
#include "deltawell/quadrature.hpp"
#include "deltawell/special_functions.hpp"

namespace deltawell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kEnergySamples = 4000;
constexpr double kAcceptResidual = 1e-7;

double manifold_y(double u, double omega) {
  return std::sqrt(std::max(u * u * (omega - 0.5 * u * u), 0.0));
}

// Phase data of one energy level shared by all four branches.
struct EnergySample {
  double Ehat = 0.0;
  double half_period = 0.0;
  std::vector<double> landing_phase;  // theta of A2 per u1 root
  std::vector<double> takeoff_phase;  // theta of A3 per u2 root
};

EnergySample sample_energy(double Ehat, const WellParams& params) {
  EnergySample s;
  s.Ehat = Ehat;
  const phase::TransientOrbit orbit(Ehat, params.omega);
  s.half_period = orbit.half_period();
  // A root that rounding pushes off the orbit counts as missing.
  const auto phase_of = [&](PhasePoint p) {
    try {
      return orbit.phase(p);
    } catch (const ParameterError&) {
      return kNaN;
    }
  };
  for (double u : phase::u1_roots(Ehat, params)) {
    s.landing_phase.push_back(phase_of({u, manifold_y(u, params.omega) - u}));
  }
  for (double u : phase::u2_roots(Ehat, params)) {
    s.takeoff_phase.push_back(
        phase_of({u, params.epsilon * u - manifold_y(u, params.omega)}));
  }
  return s;
}

double forward_time(double from, double to, double half_period) {
  const double d = to - from;
  return d >= 0.0 ? d : d + 2.0 * half_period;
}

double residual_of(const EnergySample& s, BranchChoice b, double L) {
  const auto i = static_cast<std::size_t>(b.first - 1);
  const auto j = static_cast<std::size_t>(b.second - 1);
  if (i >= s.landing_phase.size() || j >= s.takeoff_phase.size()) return kNaN;
  return forward_time(s.landing_phase[i], s.takeoff_phase[j], s.half_period) -
         2.0 * L;
}

std::optional<double> bisect_energy(double lo, double hi, double g_lo,
                                    const WellParams& params, BranchChoice b) {
  double g_hi = matching_residual(hi, params, b);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = matching_residual(mid, params, b);
    if (std::isnan(g)) break;
    if ((g < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
      g_hi = g;
    }
  }
  const bool take_lo = std::abs(g_lo) <= std::abs(g_hi);
  const double g = take_lo ? g_lo : g_hi;
  if (!(std::abs(g) <= kAcceptResidual)) return std::nullopt;
  return take_lo ? lo : hi;
}

// Solutions of the matching condition on all four branches, indexed like
// kAllBranches.
std::array<std::vector<double>, 4> solve_all(const WellParams& params) {
  params.validate();
  const double w = params.omega;
  if (!(w > 0.25)) {
    throw ParameterError("no positive bound states for omega <= 1/4");
  }
  const double e_lo =
      std::max({phase::tangency_energy(w, 1.0),
                phase::tangency_energy(w, params.epsilon), -0.5 * w * w});
  const double delta = 1e-10 * w * w;
  const double lo = e_lo + 1e-13 * std::abs(e_lo);
  const double hi = -delta;
  std::array<std::vector<double>, 4> out;
  if (!(lo < hi)) return out;

  std::vector<EnergySample> samples;
  samples.reserve(kEnergySamples);
  for (int k = 0; k < kEnergySamples; ++k) {
    const double t =
        0.5 * (1.0 - std::cos(std::numbers::pi * k / (kEnergySamples - 1)));
    samples.push_back(sample_energy(lo + (hi - lo) * t, params));
  }

  for (std::size_t b = 0; b < kAllBranches.size(); ++b) {
    const BranchChoice branch = kAllBranches[b];
    double prev = residual_of(samples[0], branch, params.L);
    if (prev == 0.0) out[b].push_back(samples[0].Ehat);
    for (std::size_t k = 1; k < samples.size(); ++k) {
      const double cur = residual_of(samples[k], branch, params.L);
      if (cur == 0.0) {
        out[b].push_back(samples[k].Ehat);
      } else if (!std::isnan(prev) && !std::isnan(cur) && prev != 0.0 &&
                 (prev < 0.0) != (cur < 0.0)) {
        if (auto root = bisect_energy(samples[k - 1].Ehat, samples[k].Ehat,
                                      prev, params, branch)) {
          out[b].push_back(*root);
        }
      }
      prev = cur;
    }
  }
  return out;
}

std::size_t branch_slot(BranchChoice b) {
  for (std::size_t i = 0; i < kAllBranches.size(); ++i) {
    if (kAllBranches[i] == b) return i;
  }
  throw ParameterError("invalid branch choice");
}

double left_tail(const BoundState& s, double x) {
  const double w = s.params.omega;
  return std::sqrt(2.0 * w) / std::cosh(std::sqrt(w) * (x + s.xi1));
}

double right_tail(const BoundState& s, double x) {
  const double w = s.params.omega;
  return std::sqrt(2.0 * w) / std::cosh(std::sqrt(w) * (x + s.xi3));
}

double middle(const BoundState& s, double x) {
  return s.a * special::jacobi_dn(s.r * (x + s.xi2), s.m);
}

double tail_slope(double omega, double z) {
  return -std::sqrt(2.0 * omega) * std::sqrt(omega) * std::tanh(z) /
         std::cosh(z);
}

double middle_slope(const BoundState& s, double x) {
  const auto j = special::jacobi(s.r * (x + s.xi2), s.m);
  return -s.a * s.r * s.m * j.sn * j.cn;
}

}  // namespace

BranchChoice BranchChoice::parse(std::string_view text) {
  if (text.size() == 2 && (text[0] == '1' || text[0] == '2') &&
      (text[1] == '1' || text[1] == '2')) {
    return {text[0] - '0', text[1] - '0'};
  }
  throw ParameterError("branch must be one of 11, 12, 21, 22; got '" +
                       std::string(text) + "'");
}

std::string BranchChoice::label() const {
  return std::to_string(first) + std::to_string(second);
}

double BoundState::value(double x) const {
  if (x < -params.L) return left_tail(*this, x);
  if (x > params.L) return right_tail(*this, x);
  return middle(*this, x);
}

double BoundState::slope(double x, bool right) const {
  const double w = params.omega;
  if (x < -params.L || (x == -params.L && !right)) {
    return tail_slope(w, std::sqrt(w) * (x + xi1));
  }
  if (x > params.L || (x == params.L && right)) {
    return tail_slope(w, std::sqrt(w) * (x + xi3));
  }
  return middle_slope(*this, x);
}

double BoundState::curvature(double x) const {
  const double w = params.omega;
  if (x < -params.L || x > params.L) {
    const double z = std::sqrt(w) * (x + (x < 0.0 ? xi1 : xi3));
    const double sech = 1.0 / std::cosh(z);
    const double tanh = std::tanh(z);
    return std::sqrt(2.0 * w) * w * sech * (tanh * tanh - sech * sech);
  }
  const auto j = special::jacobi(r * (x + xi2), m);
  return a * r * r * m * j.dn * (j.sn * j.sn - j.cn * j.cn);
}

StateChecks verify(const BoundState& s, int samples, double tail) {
  const double L = s.params.L;
  const double w = s.params.omega;
  StateChecks c;
  c.continuity = std::max(std::abs(middle(s, -L) - left_tail(s, -L)),
                          std::abs(middle(s, L) - right_tail(s, L)));
  c.jump_left =
      std::abs(s.slope(-L, true) - s.slope(-L, false) + s.value(-L));
  c.jump_right = std::abs(s.slope(L, true) - s.slope(L, false) +
                          s.params.epsilon * s.value(L));
  const double x0 = -L - tail;
  const double h = (2.0 * (L + tail)) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double x = x0 + i * h;
    if (std::abs(std::abs(x) - L) < 1e-12) continue;
    const double u = s.value(x);
    c.interior_residual = std::max(
        c.interior_residual, std::abs(s.curvature(x) - w * u + u * u * u));
  }
  return c;
}

double matching_residual(double Ehat, const WellParams& params,
                         BranchChoice branch) {
  if (!(Ehat > -0.5 * params.omega * params.omega && Ehat < 0.0)) return kNaN;
  return residual_of(sample_energy(Ehat, params), branch, params.L);
}

std::vector<double> solve_transient_energy(const WellParams& params,
                                           BranchChoice branch) {
  return solve_all(params)[branch_slot(branch)];
}

BoundState assemble(const WellParams& params, BranchChoice branch,
                    double Ehat) {
  params.validate();
  const double w = params.omega;
  const auto roots1 = phase::u1_roots(Ehat, params);
  const auto roots2 = phase::u2_roots(Ehat, params);
  const auto i = static_cast<std::size_t>(branch.first - 1);
  const auto j = static_cast<std::size_t>(branch.second - 1);
  if (i >= roots1.size() || j >= roots2.size()) {
    throw NumericalError("assemble: branch " + branch.label() +
                         " has no landing roots at Ehat=" +
                         std::to_string(Ehat));
  }

  BoundState s;
  s.params = params;
  s.branch = branch;
  s.Ehat = Ehat;
  s.u1 = roots1[i];
  s.u2 = roots2[j];

  const phase::TransientOrbit orbit(Ehat, w);
  s.a = orbit.amplitude_max();
  s.u_min = orbit.amplitude_min();
  s.r = orbit.wavenumber();
  s.m = orbit.parameter();

  const double landing_y = manifold_y(s.u1, w) - s.u1;
  const double takeoff_y = params.epsilon * s.u2 - manifold_y(s.u2, w);
  const double theta2 = orbit.phase({s.u1, landing_y});
  const double theta3 = orbit.phase({s.u2, takeoff_y});
  const double span =
      forward_time(theta2, theta3, orbit.half_period());
  if (std::abs(span - 2.0 * params.L) > 1e-6) {
    throw NumericalError("assemble: flow time " + std::to_string(span) +
                         " between defects does not match 2L");
  }
  s.crosses_maximum = theta3 < theta2;
  s.L1 = -theta2;
  s.L2 = 2.0 * params.L - s.L1;

  const double peak = std::sqrt(2.0 * w);
  s.xi1 = params.L - special::sech_inverse(s.u1 / peak) / std::sqrt(w);
  s.xi3 = special::sech_inverse(s.u2 / peak) / std::sqrt(w) - params.L;

  // dn is even: the two preimages of u1/a within one period differ in the
  // sign of the slope.  Keep the one reproducing the post-jump slope.
  const double d = special::jacobi_dn_inverse(s.u1 / s.a, s.m) / s.r;
  double best = std::numeric_limits<double>::infinity();
  for (double candidate : {params.L + d, params.L - d}) {
    s.xi2 = candidate;
    const double mismatch = std::abs(middle_slope(s, -params.L) - landing_y);
    if (mismatch < best) {
      best = mismatch;
    } else {
      s.xi2 = params.L + d;
    }
  }
  if (best > 1e-7 * std::max(1.0, std::abs(landing_y))) {
    throw NumericalError("assemble: no period-consistent shift of the dn "
                         "piece matches the slope after the first defect");
  }
  s.norm = squared_norm(s);
  return s;
}

std::vector<BoundState> all_states(const WellParams& params) {
  const auto roots = solve_all(params);
  std::vector<BoundState> states;
  for (std::size_t b = 0; b < kAllBranches.size(); ++b) {
    for (double e : roots[b]) {
      BoundState s;
      try {
        s = assemble(params, kAllBranches[b], e);
      } catch (const NumericalError&) {
        continue;
      }
      const bool duplicate =
          std::any_of(states.begin(), states.end(), [&](const BoundState& t) {
            return std::abs(t.u1 - s.u1) < 1e-7 &&
                   std::abs(t.u2 - s.u2) < 1e-7;
          });
      if (!duplicate) states.push_back(s);
    }
  }
  return states;
}

double sech_tail_norm(double omega, double u_edge) {
  const double v = u_edge / std::sqrt(2.0 * omega);
  const double c = std::sqrt(std::max((1.0 - v) * (1.0 + v), 0.0));
  return 2.0 * std::sqrt(omega) * v * v / (1.0 + c);
}

double squared_norm(const BoundState& s) {
  const double L = s.params.L;
  const auto square = [&](double x) {
    const double u = middle(s, x);
    return u * u;
  };
  const double inner = quad::integrate(square, -L, L, 1e-13, 1e-15).value;
  return sech_tail_norm(s.params.omega, s.u1) + inner +
         sech_tail_norm(s.params.omega, s.u2);
}

std::string to_string(StabilityTag tag) {
  switch (tag) {
    case StabilityTag::stable_candidate:
      return "stable-candidate";
    case StabilityTag::unstable:
      return "unstable";
    case StabilityTag::unknown:
      break;
  }
  return "unknown";
}

std::string to_string(BifurcationKind kind) {
  return kind == BifurcationKind::pitchfork ? "pitchfork" : "fold";
}

namespace {

std::vector<BranchPoint> points_at(double L, double epsilon, double omega) {
  std::vector<BranchPoint> points;
  const WellParams params{omega, L, epsilon};
  const auto roots = solve_all(params);
  for (std::size_t b = 0; b < kAllBranches.size(); ++b) {
    for (double e : roots[b]) {
      try {
        const BoundState s = assemble(params, kAllBranches[b], e);
        points.push_back(
            {omega, s.norm, s.branch, e, s.u1, s.u2, StabilityTag::unknown});
      } catch (const NumericalError&) {
      }
    }
  }
  return points;
}

std::array<int, 4> branch_counts(const std::vector<BranchPoint>& points) {
  std::array<int, 4> counts{};
  for (const auto& p : points) ++counts[branch_slot(p.branch)];
  return counts;
}

}  // namespace

std::vector<BranchPoint> trace_branches(double L, double epsilon,
                                        std::span<const double> omega_grid,
                                        const TraceOptions& options) {
  WellParams{1.0, L, epsilon}.validate();
  if (!std::is_sorted(omega_grid.begin(), omega_grid.end())) {
    throw ParameterError("trace_branches: omega grid must be increasing");
  }
  std::vector<double> grid;
  for (double w : omega_grid) {
    if (w > 0.25) grid.push_back(w);
  }

  std::vector<std::vector<BranchPoint>> per_omega(grid.size());
  unsigned workers = options.threads != 0
                         ? options.threads
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(grid.size(), 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      per_omega[k] = points_at(L, epsilon, grid[k]);
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  pool.clear();

  std::map<double, std::vector<BranchPoint>> by_omega;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    by_omega[grid[k]] = per_omega[k];
  }
  // Refine where the number of solutions on some branch changes.
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    double lo = grid[k];
    double hi = grid[k + 1];
    auto lo_counts = branch_counts(by_omega[lo]);
    const auto hi_counts = branch_counts(by_omega[hi]);
    if (lo_counts == hi_counts) continue;
    for (int level = 0; level < options.refine_levels; ++level) {
      const double mid = 0.5 * (lo + hi);
      auto pts = points_at(L, epsilon, mid);
      const auto mid_counts = branch_counts(pts);
      by_omega[mid] = std::move(pts);
      if (mid_counts != lo_counts) {
        hi = mid;
      } else {
        lo = mid;
        lo_counts = mid_counts;
      }
    }
  }

  std::vector<BranchPoint> out;
  for (auto& [omega, pts] : by_omega) {
    std::sort(pts.begin(), pts.end(),
              [](const BranchPoint& x, const BranchPoint& y) {
                if (x.branch.first != y.branch.first)
                  return x.branch.first < y.branch.first;
                if (x.branch.second != y.branch.second)
                  return x.branch.second < y.branch.second;
                return x.Ehat < y.Ehat;
              });
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

namespace {

std::vector<PinnedRoot> pinned_solutions(double L, double epsilon,
                                         bool pin_first, double omega_max) {
  std::vector<PinnedRoot> found;
  const double omega_min =
      0.25 * std::max(1.0, epsilon * epsilon) * (1.0 + 1e-9);
  for (int other = 1; other <= 2; ++other) {
    const auto g = [&](double w) {
      const WellParams params{w, L, epsilon};
      const double strength = pin_first ? 1.0 : epsilon;
      const double e = phase::tangency_energy(w, strength);
      if (!(e > -0.5 * w * w && e < 0.0)) return kNaN;
      const double pinned = phase::tangency_amplitude(w, strength);
      std::vector<double> others;
      try {
        others = pin_first ? phase::u2_roots(e, params)
                           : phase::u1_roots(e, params);
      } catch (const ParameterError&) {
        return kNaN;
      }
      if (others.size() < static_cast<std::size_t>(other)) return kNaN;
      const double u1 = pin_first ? pinned : others[other - 1];
      const double u2 = pin_first ? others[other - 1] : pinned;
      const phase::TransientOrbit orbit(e, w);
      const double t2 = orbit.phase({u1, manifold_y(u1, w) - u1});
      const double t3 = orbit.phase({u2, epsilon * u2 - manifold_y(u2, w)});
      return forward_time(t2, t3, orbit.half_period()) - 2.0 * L;
    };
    constexpr int kScan = 600;
    double prev_w = omega_min;
    double prev = g(prev_w);
    for (int k = 1; k <= kScan; ++k) {
      const double w = omega_min + (omega_max - omega_min) * k / kScan;
      const double cur = g(w);
      if (!std::isnan(prev) && !std::isnan(cur) &&
          (prev < 0.0) != (cur < 0.0)) {
        double lo = prev_w, hi = w, g_lo = prev;
        for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid);
          if (std::isnan(gm)) break;
          if ((gm < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = gm;
          } else {
            hi = mid;
          }
        }
        const double root = 0.5 * (lo + hi);
        if (std::abs(g(root)) < 1e-6) found.push_back({root, other});
      }
      prev = cur;
      prev_w = w;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const PinnedRoot& x, const PinnedRoot& y) {
              return x.omega < y.omega;
            });
  return found;
}

std::size_t state_count(double L, double epsilon, double omega) {
  return all_states({omega, L, epsilon}).size();
}

}  // namespace

CriticalOmega critical_omega(double L, double epsilon, double omega_max) {
  WellParams{1.0, L, epsilon}.validate();
  const double omega0 = linear::bifurcation_points(L, epsilon).omega0;
  const double start = std::max(0.25, omega0) + 1e-3;
  if (!(start < omega_max)) {
    throw NumericalError("critical_omega: empty scan range");
  }

  constexpr double kStep = 0.02;
  double lo = start;
  std::optional<double> hi;
  for (double w = start + kStep; w <= omega_max + 1e-12; w += kStep) {
    if (state_count(L, epsilon, w) > 1) {
      hi = w;
      break;
    }
    lo = w;
  }
  if (!hi) {
    throw NumericalError("critical_omega: no bifurcation in (" +
                         std::to_string(start) + ", " +
                         std::to_string(omega_max) + "]");
  }
  while (*hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + *hi);
    if (state_count(L, epsilon, mid) > 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  CriticalOmega out;
  out.omega_c = 0.5 * (lo + *hi);

  // A pitchfork creates a mirror pair (equal norms, swapped defect values);
  // a fold creates two unrelated states.
  out.kind = BifurcationKind::fold;
  const auto states = all_states({out.omega_c + 1e-4, L, epsilon});
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (std::abs(states[i].norm - states[j].norm) <=
              1e-9 * states[i].norm &&
          std::abs(states[i].u1 - states[j].u2) < 1e-7) {
        out.kind = BifurcationKind::pitchfork;
      }
    }
  }
  out.pinned_e1 = pinned_solutions(L, epsilon, true, omega_max);
  out.pinned_e2 = pinned_solutions(L, epsilon, false, omega_max);
  return out;
}

}  // namespace deltawell
