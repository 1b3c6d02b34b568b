#include "deltawell/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "deltawell/errors.hpp"

namespace deltawell::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Truncation thresholds from Carlson (1995): the duplication loop stops once
// the relative spread of the arguments drops below tol^(1/8) so that the
// seventh-order series is exact to ~tol.
const double kTolRF = std::pow(3.0 * 0.01 * kEps, 1.0 / 8.0);
const double kTolJacobi = std::sqrt(0.01 * kEps);

void check_parameter(double m, const char* where) {
  if (!(m >= 0.0 && m <= 1.0)) {
    throw ParameterError(std::string(where) + ": parameter m=" +
                         std::to_string(m) + " outside [0, 1]");
  }
}

}  // namespace

double carlson_rf(double x, double y, double z) {
  if (!(x >= 0.0 && y >= 0.0 && z >= 0.0)) {
    throw ParameterError("carlson_rf: negative argument");
  }
  if (static_cast<int>(x == 0.0) + static_cast<int>(y == 0.0) +
          static_cast<int>(z == 0.0) >
      1) {
    return kInf;
  }
  const double a0 = (x + y + z) / 3.0;
  double an = a0;
  const double q =
      std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)}) /
      kTolRF;
  double x0 = x, y0 = y, z0 = z, mul = 1.0;
  while (q >= mul * std::abs(an)) {
    const double sx = std::sqrt(x0), sy = std::sqrt(y0), sz = std::sqrt(z0);
    const double lam = sx * sy + sy * sz + sz * sx;
    an = (an + lam) / 4.0;
    x0 = (x0 + lam) / 4.0;
    y0 = (y0 + lam) / 4.0;
    z0 = (z0 + lam) / 4.0;
    mul *= 4.0;
  }
  const double X = (a0 - x) / (mul * an);
  const double Y = (a0 - y) / (mul * an);
  const double Z = -(X + Y);
  const double e2 = X * Y - Z * Z;
  const double e3 = X * Y * Z;
  // 1 - E2/10 + E3/14 + E2^2/24 - 3 E2 E3/44 - 5 E2^3/208 + 3 E3^2/104
  //   + E2^2 E3/16, in Horner form.
  return (e3 * (6930.0 * e3 + e2 * (15015.0 * e2 - 16380.0) + 17160.0) +
          e2 * ((10010.0 - 5775.0 * e2) * e2 - 24024.0) + 240240.0) /
         (240240.0 * std::sqrt(an));
}

double elliptic_k(double m) {
  if (!(m >= 0.0 && m < 1.0)) {
    throw ParameterError("elliptic_k: parameter m=" + std::to_string(m) +
                         " outside [0, 1)");
  }
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  for (int i = 0; i < 64 && std::abs(a - b) > 2.0 * kEps * a; ++i) {
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return kPi / (a + b);
}

double elliptic_f(double phi, double m) {
  check_parameter(m, "elliptic_f");
  if (!std::isfinite(phi)) {
    throw ParameterError("elliptic_f: non-finite amplitude");
  }
  const double periods = std::round(phi / kPi);
  const double reduced = phi - periods * kPi;  // in [-pi/2, pi/2]
  const double sign = reduced < 0.0 ? -1.0 : 1.0;
  const double s = std::abs(std::sin(reduced));
  const double c = std::cos(reduced);

  double value = 0.0;
  if (m == 1.0) {
    if (std::abs(reduced) >= 0.5 * kPi || periods != 0.0) {
      return phi > 0.0 ? kInf : -kInf;
    }
    value = std::atanh(s);
  } else {
    value = s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
  }
  value *= sign;
  if (periods != 0.0) {
    value += 2.0 * periods * elliptic_k(m);
  }
  return value;
}

JacobiTriple jacobi(double u, double m) {
  check_parameter(m, "jacobi");
  if (m == 0.0) {
    return {std::sin(u), std::cos(u), 1.0};
  }
  double mc = 1.0 - m;
  if (mc == 0.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  // Bulirsch's descending Gauss transformation.
  constexpr int kMaxLevels = 16;
  std::array<double, kMaxLevels> am{};
  std::array<double, kMaxLevels> bn{};
  int levels = 0;
  double a = 1.0;
  double c = 0.0;
  while (levels < kMaxLevels) {
    am[levels] = a;
    mc = std::sqrt(mc);
    bn[levels] = mc;
    c = 0.5 * (a + mc);
    ++levels;
    if (!(std::abs(a - mc) > kTolJacobi * a)) break;
    mc *= a;
    a = c;
  }
  const double x = u * c;
  double sn = std::sin(x);
  double cn = std::cos(x);
  double dn = 1.0;
  if (sn != 0.0) {
    double t = cn / sn;
    c *= t;
    while (levels-- > 0) {
      const double b = am[levels];
      t *= c;
      c *= dn;
      dn = (bn[levels] + t) / (b + t);
      t = c / b;
    }
    t = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn < 0.0 ? -t : t;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

double jacobi_dn(double u, double m) { return jacobi(u, m).dn; }

double jacobi_dn_inverse(double v, double m) {
  check_parameter(m, "jacobi_dn_inverse");
  const double floor_value = std::sqrt(1.0 - m);
  constexpr double slack = 64.0 * kEps;
  if (!(v >= floor_value - slack && v <= 1.0 + slack)) {
    throw ParameterError("jacobi_dn_inverse: v=" + std::to_string(v) +
                         " outside [sqrt(1-m), 1]");
  }
  v = std::clamp(v, floor_value, 1.0);
  if (v == 1.0 || m == 0.0) return 0.0;

  // dn(u) = v  <=>  sn^2 = (1 - v^2)/m,  cn^2 = (v^2 - (1-m))/m,
  // and F = sn * R_F(cn^2, dn^2, 1) with dn^2 = 1 - m sn^2 = v^2.
  const double sn2 = (1.0 - v) * (1.0 + v) / m;
  const double cn2 = (v - floor_value) * (v + floor_value) / m;
  return std::sqrt(sn2) * carlson_rf(cn2, v * v, 1.0);
}

double sech_inverse(double v) {
  constexpr double slack = 4.0 * kEps;
  if (!(v > 0.0 && v <= 1.0 + slack)) {
    throw ParameterError("sech_inverse: v=" + std::to_string(v) +
                         " outside (0, 1]");
  }
  v = std::min(v, 1.0);
  const double t = std::sqrt((1.0 - v) * (1.0 + v));
  // ln((1 + t)/v) written to stay accurate as v -> 1.
  return std::log1p((1.0 - v + t) / v);
}

}  // namespace deltawell::special
