#include "deltawell/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deltawell/errors.hpp"
#include "deltawell/phase_plane.hpp"
#include "deltawell/special_functions.hpp"

namespace deltawell {

std::string to_string(Classification c) {
  return c == Classification::P_ge_2_unstable ? "P_ge_2_unstable" : "P_le_1";
}

StabilityVerdict geometric_classify(const BoundState& state) {
  if (state.crosses_maximum) {
    throw ParameterError(
        "geometric_classify: the flow between the defects passes the orbit "
        "maximum; the travel-time criterion does not apply");
  }
  const auto bars = phase::tangency_times(state.params);
  StabilityVerdict v;
  v.L1 = state.L1;
  v.L2 = state.L2;
  v.Lbar1 = bars.Lbar1;
  v.Lbar2 = bars.Lbar2;
  constexpr double kBoundary = 1e-6;
  v.boundary = std::abs(v.L1 - v.Lbar1) <= kBoundary ||
               std::abs(v.L2 - v.Lbar2) <= kBoundary;
  const bool unstable = v.L1 >= v.Lbar1 && v.L2 >= v.Lbar2;
  v.classification = unstable && !v.boundary
                         ? Classification::P_ge_2_unstable
                         : Classification::P_le_1;
  return v;
}

int count_vertical_crossings(const BoundState& state,
                             const CrossingOptions& options) {
  const double w = state.params.omega;
  const double L = state.params.L;
  if (!(options.seed > 0.0 && options.seed < state.u1 &&
        options.seed < state.u2)) {
    throw ParameterError("count_vertical_crossings: seed must lie below the "
                         "defect amplitudes");
  }
  // Position on each tail where u equals the seed amplitude.
  const double reach =
      special::sech_inverse(options.seed / std::sqrt(2.0 * w)) / std::sqrt(w);
  const double x_start = -state.xi1 - reach;
  const double x_end = -state.xi3 + reach;

  const auto potential = [&](double x) {
    const double u = state.value(x);
    return w - 3.0 * u * u;
  };
  double q1 = 1.0;
  double q2 = std::sqrt(w);
  int crossings = 0;

  const auto integrate = [&](double a, double b) {
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / options.step)));
    const double dx = (b - a) / steps;
    for (int i = 0; i < steps; ++i) {
      const double x = a + i * dx;
      // Sample the potential strictly inside [a, b] so no defect is touched.
      const double p0 = potential(i == 0 ? x + 1e-12 * dx : x);
      const double pm = potential(x + 0.5 * dx);
      const double p1 = potential(i + 1 == steps ? b - 1e-12 * dx : x + dx);
      const double k1a = q2, k1b = p0 * q1;
      const double k2a = q2 + 0.5 * dx * k1b, k2b = pm * (q1 + 0.5 * dx * k1a);
      const double k3a = q2 + 0.5 * dx * k2b, k3b = pm * (q1 + 0.5 * dx * k2a);
      const double k4a = q2 + dx * k3b, k4b = p1 * (q1 + dx * k3a);
      const double n1 = q1 + dx / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      const double n2 = q2 + dx / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
      if ((n1 < 0.0) != (q1 < 0.0)) ++crossings;
      q1 = n1;
      q2 = n2;
      const double scale = std::hypot(q1, q2);
      if (!std::isfinite(scale)) {
        throw NumericalError("count_vertical_crossings: integration diverged");
      }
      if (scale > 1e100) {
        q1 /= scale;
        q2 /= scale;
      }
    }
  };

  if (x_start >= -L || x_end <= L) {
    throw NumericalError("count_vertical_crossings: seed lies between the "
                         "defects");
  }
  integrate(x_start, -L);
  q2 -= 1.0 * q1;
  integrate(-L, L);
  q2 -= state.params.epsilon * q1;
  integrate(L, x_end);
  return crossings;
}

Linearization build_linearization(const BoundState& state, double M,
                                  double h) {
  const double L = state.params.L;
  if (!(M > 3.0 * L)) {
    throw ParameterError("build_linearization: need M > 3L");
  }
  Linearization lin;
  lin.grid = make_grid(L, M, h);
  const Grid& g = lin.grid;
  const double w = state.params.omega;

  // Tails decay like exp(-sqrt(w)|x|); ask for a negligible boundary value
  // and several nodes per decay length.
  const double edge = std::sqrt(2.0 * w) * 2.0 *
                      std::exp(-std::sqrt(w) * (g.M - L));
  // Eigenvalue shifts from truncation scale with the square of this.
  if (edge > 1e-3) {
    lin.warnings.push_back("domain half-width " + std::to_string(g.M) +
                           " leaves tail amplitude " + std::to_string(edge) +
                           " at the boundary");
  }
  if (g.h * std::sqrt(w) > 0.2) {
    lin.warnings.push_back("grid spacing " + std::to_string(g.h) +
                           " is coarse relative to the decay length");
  }

  const auto relaxed = relax_to_grid(state, g);
  lin.profile = relaxed.u;
  lin.relax_residual = relaxed.residual;
  const auto weights = defect_weights(g, state.params.epsilon);
  lin.plus = schrodinger_operator(g, weights, w, lin.profile, 3.0);
  lin.minus = schrodinger_operator(g, weights, w, lin.profile, 1.0);

  const auto n = static_cast<Eigen::Index>(g.n);
  lin.block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    lin.block(j, n + j) = -lin.minus.diag[k];
    lin.block(n + j, j) = lin.plus.diag[k];
    if (j + 1 < n) {
      lin.block(j, n + j + 1) = -lin.minus.off[k];
      lin.block(j + 1, n + j) = -lin.minus.off[k];
      lin.block(n + j, j + 1) = lin.plus.off[k];
      lin.block(n + j + 1, j) = lin.plus.off[k];
    }
  }
  return lin;
}

std::size_t positive_count(const SymmetricTridiagonal& t, double threshold) {
  SymmetricTridiagonal neg;
  neg.diag.resize(t.diag.size());
  neg.off.resize(t.off.size());
  std::transform(t.diag.begin(), t.diag.end(), neg.diag.begin(),
                 [](double d) { return -d; });
  std::transform(t.off.begin(), t.off.end(), neg.off.begin(),
                 [](double d) { return -d; });
  return neg.count_below(-threshold);
}

double spectral_tolerance(double h) { return std::max(1e-6, 10.0 * h * h); }

Spectrum spectrum(const Linearization& lin) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(lin.block, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectrum: eigensolver did not converge");
  }
  Spectrum s;
  s.M = lin.grid.M;
  s.h = lin.grid.h;
  s.tau = spectral_tolerance(lin.grid.h);
  const auto& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(),
            [](auto a, auto b) {
              return a.real() != b.real() ? a.real() > b.real()
                                          : a.imag() > b.imag();
            });
  s.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& z : s.eigenvalues) {
    s.max_real_part = std::max(s.max_real_part, z.real());
  }
  s.unstable = s.max_real_part > s.tau;

  // Nearest neighbour of -lambda, sorted by real part so only a window needs
  // scanning.
  std::vector<std::complex<double>> by_real = s.eigenvalues;
  std::reverse(by_real.begin(), by_real.end());  // ascending real part
  for (const auto& z : s.eigenvalues) {
    const std::complex<double> target = -z;
    auto it = std::lower_bound(
        by_real.begin(), by_real.end(), target.real() - 1e-6,
        [](const std::complex<double>& a, double v) { return a.real() < v; });
    double best = std::numeric_limits<double>::infinity();
    for (; it != by_real.end() && it->real() <= target.real() + 1e-6; ++it) {
      best = std::min(best, std::abs(*it - target));
    }
    if (!std::isfinite(best)) {
      for (const auto& c : by_real) best = std::min(best, std::abs(c - target));
    }
    s.symmetry_defect = std::max(s.symmetry_defect, best);
    if (z.real() > s.tau && std::abs(z.imag()) <= 1e-8 * std::max(1.0, z.real()) &&
        best <= 1e-6) {
      s.real_pair = std::max(s.real_pair, z.real());
    }
  }
  return s;
}

RealMode real_mode(const Linearization& lin, double lambda) {
  const auto size = lin.block.rows();
  const double shift = lambda * (1.0 + 1e-9) + 1e-12;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(size, size);
  const Eigen::PartialPivLU<Eigen::MatrixXd> right_lu(lin.block - shift * eye);
  const Eigen::PartialPivLU<Eigen::MatrixXd> left_lu(
      lin.block.transpose() - shift * eye);

  RealMode mode;
  mode.right = Eigen::VectorXd::Ones(size);
  mode.left = Eigen::VectorXd::Ones(size);
  for (int it = 0; it < 4; ++it) {
    mode.right = right_lu.solve(mode.right).normalized();
    mode.left = left_lu.solve(mode.left).normalized();
  }
  const double residual =
      (lin.block * mode.right - lambda * mode.right).norm();
  if (!std::isfinite(residual) || residual > 1e-6 * std::max(1.0, lambda)) {
    throw NumericalError("real_mode: no eigenvalue near " +
                         std::to_string(lambda));
  }
  mode.lambda = mode.right.dot(lin.block * mode.right);
  mode.left /= mode.left.dot(mode.right);
  return mode;
}

Spectrum spectrum(const BoundState& state, double M, double h) {
  return spectrum(build_linearization(state, M, h));
}

}  // namespace deltawell
