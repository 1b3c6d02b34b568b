#include "deltawell/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "deltawell/errors.hpp"
#include "deltawell/quadrature.hpp"
#include "deltawell/special_functions.hpp"

namespace deltawell {

void WellParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ParameterError("omega must be positive, got " +
                         std::to_string(omega));
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw ParameterError("L must be positive, got " + std::to_string(L));
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1], got " +
                         std::to_string(epsilon));
  }
}

namespace phase {

namespace {

constexpr double kPi = std::numbers::pi;

void check_energy(double Ehat, double omega, const char* where) {
  if (!(Ehat > -0.5 * omega * omega && Ehat < 0.0)) {
    throw ParameterError(std::string(where) + ": Ehat=" +
                         std::to_string(Ehat) + " outside (-omega^2/2, 0)");
  }
}

double manifold_y(double u, double omega) {
  const double s2 = u * u * (omega - 0.5 * u * u);
  return std::sqrt(std::max(s2, 0.0));
}

// Landing cubic in v = u^2:  v^3 + (s^2/2 - 2 omega) v^2 - E v + E^2/(2 s^2).
double landing_cubic(double v, double Ehat, double omega, double s) {
  return ((v + (0.5 * s * s - 2.0 * omega)) * v - Ehat) * v +
         Ehat * Ehat / (2.0 * s * s);
}

double landing_cubic_slope(double v, double Ehat, double omega, double s) {
  return (3.0 * v + 2.0 * (0.5 * s * s - 2.0 * omega)) * v - Ehat;
}

double polish(double v, double Ehat, double omega, double s) {
  for (int i = 0; i < 3; ++i) {
    const double p = landing_cubic(v, Ehat, omega, s);
    const double dp = landing_cubic_slope(v, Ehat, omega, s);
    if (std::abs(dp) < 1e-6 * (std::abs(v) + 1.0)) break;  // near double root
    const double next = v - p / dp;
    if (!(std::abs(landing_cubic(next, Ehat, omega, s)) < std::abs(p))) break;
    v = next;
  }
  return v;
}

}  // namespace

double energy(PhasePoint p, const WellParams& params) {
  return p.y * p.y - params.omega * p.u * p.u + 0.5 * p.u * p.u * p.u * p.u;
}

double unstable_manifold_y(double u, const WellParams& params) {
  const double top = std::sqrt(2.0 * params.omega);
  if (!(u >= 0.0 && u <= top * (1.0 + 1e-14))) {
    throw ParameterError("unstable_manifold_y: u=" + std::to_string(u) +
                         " outside [0, sqrt(2 omega)]");
  }
  return manifold_y(std::min(u, top), params.omega);
}

PhasePoint jump(PhasePoint p, double strength) {
  return {p.u, p.y - strength * p.u};
}

double landing_residual(double u, double Ehat, double omega, double strength) {
  const double s2 = u * u * (omega - 0.5 * u * u);
  if (s2 < -1e-14 * omega * omega) return std::nan("");
  const double y = std::sqrt(std::max(s2, 0.0));
  return strength * strength * u * u - 2.0 * strength * u * y - Ehat;
}

std::vector<double> landing_roots(double Ehat, double omega, double strength) {
  check_energy(Ehat, omega, "landing_roots");
  const double s = strength;
  const double s2 = s * s;
  if (omega <= 0.25 * s2) return {};

  const double shift = s2 - 4.0 * omega;
  const double q = 12.0 * Ehat + shift * shift;
  if (!(q > 0.0)) return {};
  const double arg =
      -(54.0 * Ehat * Ehat + 18.0 * Ehat * (s2 * s2 - 4.0 * omega * s2) +
        s2 * shift * shift * shift) /
      (s2 * q * std::sqrt(q));
  constexpr double slack = 1e-12;
  if (arg < -1.0 - slack || arg > 1.0 + slack) return {};
  const double theta = std::acos(std::clamp(arg, -1.0, 1.0)) / 3.0;
  const double base = (2.0 * omega - 0.5 * s2) / 3.0;
  const double radius = std::sqrt(q) / 3.0;

  const double candidates[2] = {
      base + radius * std::cos(theta),
      base - radius * std::sin(kPi / 6.0 - theta)};

  std::vector<double> roots;
  for (double v : candidates) {
    v = polish(v, Ehat, omega, s);
    if (!(v > 0.0)) continue;
    const double u = std::sqrt(v);
    if (u > std::sqrt(2.0 * omega)) continue;
    const double residual = landing_residual(u, Ehat, omega, s);
    if (std::isnan(residual) || std::abs(residual) > 1e-9) continue;
    roots.push_back(u);
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

std::vector<double> u1_roots(double Ehat, const WellParams& params) {
  return landing_roots(Ehat, params.omega, 1.0);
}

std::vector<double> u2_roots(double Ehat, const WellParams& params) {
  return landing_roots(Ehat, params.omega, params.epsilon);
}

double tangency_energy(double omega, double strength) {
  const double s2 = strength * strength;
  if (!(omega > 0.25 * s2)) {
    throw ParameterError("tangency_energy: requires omega > strength^2/4");
  }
  const double t = 12.0 * omega + s2;
  return (36.0 * s2 * omega - std::sqrt(s2 * t * t * t) - s2 * s2) / 27.0;
}

bool has_tangency(double omega, double strength) {
  const double s2 = strength * strength;
  return omega > 0.25 * s2 && omega < 2.0 * s2;
}

double tangency_energy_1(const WellParams& params) {
  return tangency_energy(params.omega, 1.0);
}

double tangency_energy_2(const WellParams& params) {
  return tangency_energy(params.omega, params.epsilon);
}

double tangency_amplitude(double omega, double strength) {
  const double e = tangency_energy(omega, strength);
  const double s2 = strength * strength;
  const double shift = s2 - 4.0 * omega;
  const double q = std::max(12.0 * e + shift * shift, 0.0);
  // Both trigonometric roots meet at theta = pi/3.
  const double v = (2.0 * omega - 0.5 * s2) / 3.0 + std::sqrt(q) / 6.0;
  return std::sqrt(v);
}

double inner_orbit_max(double Ehat, const WellParams& params) {
  check_energy(Ehat, params.omega, "inner_orbit_max");
  const double w = params.omega;
  return std::sqrt(w + std::sqrt(w * w + 2.0 * Ehat));
}

double inner_orbit_min(double Ehat, const WellParams& params) {
  check_energy(Ehat, params.omega, "inner_orbit_min");
  const double w = params.omega;
  return std::sqrt(-2.0 * Ehat / (w + std::sqrt(w * w + 2.0 * Ehat)));
}

TransientOrbit::TransientOrbit(double Ehat, double omega)
    : energy_(Ehat), omega_(omega) {
  check_energy(Ehat, omega, "TransientOrbit");
  const double root = std::sqrt(omega * omega + 2.0 * Ehat);
  a_ = std::sqrt(omega + root);
  b_ = std::sqrt(-2.0 * Ehat / (omega + root));
  r_ = a_ / std::sqrt(2.0);
  m_ = 2.0 * root / (a_ * a_);
  k_ = special::elliptic_k(m_);
}

double TransientOrbit::clamp_amplitude(double u) const {
  const double slack = 1e-9 * a_;
  if (!(u >= b_ - slack && u <= a_ + slack)) {
    throw ParameterError("TransientOrbit: amplitude " + std::to_string(u) +
                         " outside [" + std::to_string(b_) + ", " +
                         std::to_string(a_) + "]");
  }
  return std::clamp(u, b_, a_);
}

double TransientOrbit::time_from_min(double u, Route route) const {
  u = clamp_amplitude(u);
  if (route == Route::elliptic) {
    // dn(K - w) = sqrt(1-m)/dn(w) and sqrt(1-m) = b/a.
    return special::jacobi_dn_inverse(b_ / u, m_) / r_;
  }
  // u^2 = b^2 + (a^2 - b^2) sin^2(psi) removes both endpoint singularities.
  const double span = a_ * a_ - b_ * b_;
  const double psi =
      std::asin(std::sqrt(std::clamp((u * u - b_ * b_) / span, 0.0, 1.0)));
  const auto integrand = [&](double t) {
    const double sn = std::sin(t);
    return std::sqrt(2.0) / std::sqrt(b_ * b_ + span * sn * sn);
  };
  return quad::integrate(integrand, 0.0, psi, 1e-14, 1e-15).value;
}

double TransientOrbit::time_from_max(double u, Route route) const {
  u = clamp_amplitude(u);
  if (route == Route::elliptic) {
    return special::jacobi_dn_inverse(u / a_, m_) / r_;
  }
  // u^2 = a^2 - (a^2 - b^2) sin^2(phi).
  const double span = a_ * a_ - b_ * b_;
  const double phi =
      std::asin(std::sqrt(std::clamp((a_ * a_ - u * u) / span, 0.0, 1.0)));
  const auto integrand = [&](double t) {
    const double sn = std::sin(t);
    return 1.0 / std::sqrt(1.0 - m_ * sn * sn);
  };
  return quad::integrate(integrand, 0.0, phi, 1e-14, 1e-15).value / r_;
}

double TransientOrbit::phase(PhasePoint p, Route route) const {
  const double t = time_from_min(p.u, route);
  return p.y >= 0.0 ? t : -t;
}

PhasePoint TransientOrbit::at_phase(double theta) const {
  const auto j = special::jacobi(r_ * theta + k_, m_);
  return {a_ * j.dn, -a_ * r_ * m_ * j.sn * j.cn};
}

TravelTime travel_time(OrbitEndpoint start, OrbitEndpoint end, double Ehat,
                       const WellParams& params, Route route) {
  const TransientOrbit orbit(Ehat, params.omega);
  const double from = orbit.phase({start.u, start.upper ? 1.0 : -1.0}, route);
  const double to = orbit.phase({end.u, end.upper ? 1.0 : -1.0}, route);
  const double half = orbit.half_period();

  TravelTime out;
  if (to >= from) {
    out.total = to - from;
    if (from < 0.0 && to > 0.0) {
      out.turning = Turning::minimum;
      out.to_turning = -from;
      out.from_turning = to;
    } else {
      out.to_turning = out.total;
    }
  } else {
    out.turning = Turning::maximum;
    out.to_turning = half - from;
    out.from_turning = to + half;
    out.total = out.to_turning + out.from_turning;
  }
  return out;
}

TravelTime travel_time(double u_start, double u_end, double Ehat,
                       const WellParams& params, Route route) {
  const TransientOrbit orbit(Ehat, params.omega);
  TravelTime out;
  out.turning = Turning::maximum;
  out.to_turning = orbit.time_from_max(u_start, route);
  out.from_turning = orbit.time_from_max(u_end, route);
  out.total = out.to_turning + out.from_turning;
  return out;
}

TangencyTimes tangency_times(const WellParams& params) {
  const double w = params.omega;
  const double eps = params.epsilon;
  if (!(w > 0.25)) {
    throw ParameterError("tangency_times: requires omega > 1/4");
  }
  if (!has_tangency(w, 1.0) || !has_tangency(w, eps)) {
    throw ParameterError("tangency_times: the tangency point is not left of the "
                         "centre at omega=" + std::to_string(w));
  }
  TangencyTimes out;
  {
    const double e1 = tangency_energy(w, 1.0);
    const double u = tangency_amplitude(w, 1.0);
    const TransientOrbit orbit(e1, w);
    out.Lbar1 = -orbit.phase({u, manifold_y(u, w) - u});
  }
  {
    const double e2 = tangency_energy(w, eps);
    const double u = tangency_amplitude(w, eps);
    const TransientOrbit orbit(e2, w);
    out.Lbar2 = orbit.phase({u, eps * u - manifold_y(u, w)});
  }
  return out;
}

}  // namespace phase
}  // namespace deltawell
