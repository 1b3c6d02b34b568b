#pragma once

#include <vector>

/// Phase-plane algebra of the stationary problem
///
///   u_x = y,   y_x = omega u - u^3        (x != -L, +L)
///
/// with the defect jumps y -> y - V u at x = -L (V = 1) and x = +L
/// (V = epsilon).  Level sets are E = y^2 - omega u^2 + u^4/2; the
/// homoclinic loop of the origin sits at E = 0 and the orbits inside it
/// (E in (-omega^2/2, 0)) are the transient orbits a bound state follows
/// between the two defects.

namespace deltawell {

/// Frequency omega, half-separation L (defects at -L and +L) and strength
/// epsilon of the defect at +L (the defect at -L has unit strength).
struct WellParams {
  double omega = 1.0;
  double L = 1.0;
  double epsilon = 1.0;

  /// Throws ParameterError unless omega > 0, L > 0 and 0 < epsilon <= 1.
  void validate() const;
};

struct PhasePoint {
  double u = 0.0;
  double y = 0.0;
};

namespace phase {

double energy(PhasePoint p, const WellParams& params);

/// y on the unstable manifold of the origin, 0 <= u <= sqrt(2 omega).
double unstable_manifold_y(double u, const WellParams& params);

/// Defect map (u, y) -> (u, y - strength u).
PhasePoint jump(PhasePoint p, double strength);

/// Residual of strength^2 u^2 - 2 strength u sqrt(omega u^2 - u^4/2) = Ehat,
/// the condition for the jump of a point of the homoclinic loop by
/// `strength` to land on the orbit of energy Ehat.  NaN if u > sqrt(2 omega).
double landing_residual(double u, double Ehat, double omega, double strength);

/// Defect amplitudes u with landing_residual(u) = 0, in descending order
/// (index 0 is root "(1)", index 1 is root "(2)").  Empty when
/// omega <= strength^2/4 or Ehat is below the tangency energy.
/// Throws ParameterError unless -omega^2/2 < Ehat < 0.
std::vector<double> landing_roots(double Ehat, double omega, double strength);

/// Roots for the first defect (strength 1).
std::vector<double> u1_roots(double Ehat, const WellParams& params);
/// Roots for the second defect (strength epsilon).
std::vector<double> u2_roots(double Ehat, const WellParams& params);

/// Energy at which the landing curve of a defect of the given strength is
/// tangent to a transient orbit.  Requires omega > strength^2/4.
double tangency_energy(double omega, double strength);
double tangency_energy_1(const WellParams& params);
double tangency_energy_2(const WellParams& params);

/// True while the tangency point lies left of the centre, u < sqrt(omega),
/// which holds exactly for strength^2/4 < omega < 2 strength^2.  At the upper
/// end the tangent orbit is the centre itself.
bool has_tangency(double omega, double strength);

/// The double root of the landing cubic at Ehat = tangency_energy(...).
double tangency_amplitude(double omega, double strength);

/// Largest and smallest u on the transient orbit of energy Ehat.
double inner_orbit_max(double Ehat, const WellParams& params);
double inner_orbit_min(double Ehat, const WellParams& params);

enum class Route { elliptic, quadrature };

/// One transient orbit, parametrised by the signed "time" (the independent
/// variable x) measured from its minimum (u_min, 0).  On the orbit
///   u(theta) = a dn(r theta + K(m) | m),  r = a/sqrt(2),  m = 2(a^2-omega)/a^2,
/// with theta in [-H, H], H = K(m)/r the half period.  Negative phases lie
/// on the lower half (y < 0), positive phases on the upper half.
class TransientOrbit {
 public:
  TransientOrbit(double Ehat, double omega);

  double energy() const { return energy_; }
  double omega() const { return omega_; }
  double amplitude_max() const { return a_; }
  double amplitude_min() const { return b_; }
  double wavenumber() const { return r_; }
  double parameter() const { return m_; }
  double quarter_period() const { return k_; }
  double half_period() const { return k_ / r_; }

  /// Time from (u_min, 0) to amplitude u on either half of the orbit.
  double time_from_min(double u, Route route = Route::elliptic) const;
  /// Time from amplitude u on either half to (a, 0).
  double time_from_max(double u, Route route = Route::elliptic) const;

  /// Signed phase of a point on (or numerically next to) the orbit; the
  /// branch is taken from the sign of p.y.
  double phase(PhasePoint p, Route route = Route::elliptic) const;

  PhasePoint at_phase(double theta) const;

 private:
  double clamp_amplitude(double u) const;

  double energy_;
  double omega_;
  double a_;
  double b_;
  double r_;
  double m_;
  double k_;
};

/// A point of a transient orbit identified by its amplitude and the half it
/// lies on.
struct OrbitEndpoint {
  double u = 0.0;
  bool upper = true;  // y >= 0
};

enum class Turning { none, minimum, maximum };

struct TravelTime {
  double total = 0.0;
  double to_turning = 0.0;    // start -> turning point (total if none)
  double from_turning = 0.0;  // turning point -> end (0 if none)
  Turning turning = Turning::none;
};

/// Forward flow time from `start` to `end` along the orbit of energy Ehat,
/// passing at most one turning point.
TravelTime travel_time(OrbitEndpoint start, OrbitEndpoint end, double Ehat,
                       const WellParams& params,
                       Route route = Route::elliptic);

/// Time from (u_start, y > 0) over the turning point (a, 0) down to
/// (u_end, y < 0).
TravelTime travel_time(double u_start, double u_end, double Ehat,
                       const WellParams& params,
                       Route route = Route::elliptic);

struct TangencyTimes {
  double Lbar1 = 0.0;
  double Lbar2 = 0.0;
};

/// Signed times at tangency.  Lbar1: from the landing point of the first
/// defect (Ehat = Ebar1, merged root) to the orbit minimum.  Lbar2: from the
/// orbit minimum to the point that the second defect maps onto the stable
/// manifold (Ehat = Ebar2, merged root).  Throws ParameterError unless has_tangency
/// holds for both defects.
TangencyTimes tangency_times(const WellParams& params);

}  // namespace phase
}  // namespace deltawell
