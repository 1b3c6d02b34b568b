#pragma once

// Reference computations that share no code with the library: generic
// quadrature and ODE integrators from Boost, companion-matrix polynomial
// roots from Eigen, and a dense Sturm count on a fine grid.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "deltawell/bound_states.hpp"
#include "deltawell/tridiagonal.hpp"

namespace oracle {

using Point = std::array<double, 2>;

/// F(phi | m) by adaptive Gauss-Kronrod.
inline double elliptic_f(double phi, double m) {
  auto f = [m](double t) {
    const double s = std::sin(t);
    return 1.0 / std::sqrt(1.0 - m * s * s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, phi, 15, 1e-15);
}

/// Flow of u'' = omega u - u^3 for time T from p (T may be negative).
inline Point flow(Point p, double omega, double T, double tol = 1e-14) {
  namespace odeint = boost::numeric::odeint;
  if (T == 0.0) return p;
  auto rhs = [omega](const Point& s, Point& d, double) {
    d[0] = s[1];
    d[1] = omega * s[0] - s[0] * s[0] * s[0];
  };
  auto stepper = odeint::make_controlled(
      tol, tol, odeint::runge_kutta_fehlberg78<Point>());
  odeint::integrate_adaptive(stepper, rhs, p, 0.0, T, T / 200.0);
  return p;
}

/// Positive roots u of s^2 u^2 - 2 s u sqrt(omega u^2 - u^4/2) = E, found by
/// squaring to a cubic in v = u^2, solving it through the eigenvalues of the
/// companion matrix and discarding the roots the squaring introduced.
/// Descending order.
inline std::vector<double> landing_roots(double E, double omega, double s) {
  // 2 s^2 v^3 + (s^4 - 4 s^2 omega) v^2 - 2 s^2 E v + E^2 = 0
  const double a3 = 2.0 * s * s;
  const double c2 = (s * s * s * s - 4.0 * s * s * omega) / a3;
  const double c1 = -2.0 * s * s * E / a3;
  const double c0 = E * E / a3;
  Eigen::Matrix3d companion;
  companion << -c2, -c1, -c0, 1, 0, 0, 0, 1, 0;
  const Eigen::Vector3cd ev = companion.eigenvalues();
  std::vector<double> out;
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> v = ev[i];
    if (std::abs(v.imag()) > 1e-7 * std::max(1.0, std::abs(v))) continue;
    if (v.real() <= 0.0 || v.real() > 2.0 * omega) continue;
    double x = v.real();
    // Newton on the cubic to remove eigensolver rounding.
    for (int k = 0; k < 3; ++k) {
      const double p = ((x + c2) * x + c1) * x + c0;
      const double dp = (3.0 * x + 2.0 * c2) * x + c1;
      if (std::abs(dp) < 1e-6) break;
      x -= p / dp;
    }
    const double u = std::sqrt(x);
    const double y = std::sqrt(std::max(omega * x - 0.5 * x * x, 0.0));
    if (std::abs(s * s * x - 2.0 * s * u * y - E) < 1e-8) out.push_back(u);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Shooting construction of a positive bound state.  The unknown is the
/// amplitude c at x = -L on the unstable manifold; the residual is the
/// distance to the stable manifold after the second defect.
class Shooter {
 public:
  explicit Shooter(deltawell::WellParams p) : p_(p) {}

  double residual(double c) const {
    Point q{c, branch_y(c) - c};
    q = flow(q, p_.omega, 2.0 * p_.L);
    q[1] -= p_.epsilon * q[0];
    return q[1] + branch_y(q[0]);
  }

  /// Root in [lo, hi]; requires a sign change.
  double solve(double lo, double hi) const {
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(a - b) < 1e-15; };
    const auto r = boost::math::tools::toms748_solve(
        [this](double c) { return residual(c); }, lo, hi, tol, iters);
    c_ = 0.5 * (r.first + r.second);
    return c_;
  }

  /// Profile of the solved state at increasing abscissae xs.
  std::vector<double> profile(const std::vector<double>& xs) const {
    const double w = p_.omega;
    const double peak = std::sqrt(2.0 * w);
    std::vector<double> out;
    Point q{c_, branch_y(c_) - c_};
    double at = -p_.L;
    Point right{};
    {
      Point e = flow(q, w, 2.0 * p_.L);
      e[1] -= p_.epsilon * e[0];
      right = e;
    }
    for (double x : xs) {
      if (x <= -p_.L) {
        const double shift = std::acosh(peak / c_);
        out.push_back(peak / std::cosh(std::sqrt(w) * (x + p_.L) - shift));
      } else if (x <= p_.L) {
        q = flow(q, w, x - at);
        at = x;
        out.push_back(q[0]);
      } else {
        const double shift = std::acosh(peak / right[0]);
        out.push_back(peak / std::cosh(std::sqrt(w) * (x - p_.L) + shift));
      }
    }
    return out;
  }

 private:
  double branch_y(double u) const {
    return std::sqrt(std::max(p_.omega * u * u - 0.5 * u * u * u * u, 0.0));
  }

  deltawell::WellParams p_;
  mutable double c_ = 0.0;
};

/// Largest eigenvalue of u'' + (delta(x+L) + eps delta(x-L)) u on [-X, X]
/// with spacing h, i.e. the linear ground-state frequency, by bisection on
/// Sturm counts of the finite-difference matrix.
inline double linear_ground_matrix(double L, double eps, double X = 40.0,
                                   double h = 1e-3) {
  const long k = std::lround(L / h);
  h = L / static_cast<double>(k);
  const long n = 2 * std::lround(X / h) - 1;
  deltawell::SymmetricTridiagonal t;
  t.diag.assign(static_cast<std::size_t>(n), -2.0 / (h * h));
  t.off.assign(static_cast<std::size_t>(n - 1), 1.0 / (h * h));
  const long centre = (n - 1) / 2;
  t.diag[static_cast<std::size_t>(centre - k)] += 1.0 / h;
  t.diag[static_cast<std::size_t>(centre + k)] += eps / h;
  // The largest eigenvalue is omega.
  return t.eigenvalue(static_cast<std::size_t>(n - 1), 1e-12);
}

/// Integral of u^2 over the real line.
inline double squared_norm(const deltawell::BoundState& s) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto sq = [&s](double x) {
    const double u = s.value(x);
    return u * u;
  };
  const double L = s.params.L;
  const double far = L + 60.0 / std::sqrt(s.params.omega);
  return GK::integrate(sq, -far, -L, 20, 1e-15) +
         GK::integrate(sq, -L, L, 20, 1e-15) +
         GK::integrate(sq, L, far, 20, 1e-15);
}

}  // namespace oracle
