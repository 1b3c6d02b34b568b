#pragma once

#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "deltawell/errors.hpp"

namespace deltawell::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod_panel(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive G7K15 quadrature of f over [a, b].  Panels with the
/// largest error estimate are bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |I|).
template <class F>
Estimate integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                   double abs_tol = 0.0, int max_panels = 4000) {
  if (a == b) return {};
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::kronrod_panel(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(panels.size()) >= max_panels) {
      throw NumericalError("quad::integrate: panel budget exhausted");
    }
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Panel left = detail::kronrod_panel(f, worst.a, mid);
    const detail::Panel right = detail::kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error};
}

/// Composite trapezoid rule for samples on a uniform grid of spacing h.
double trapezoid(std::span<const double> samples, double h);

}  // namespace deltawell::quad
