#include "deltawell/quadrature.hpp"

namespace deltawell::quad {

double trapezoid(std::span<const double> samples, double h) {
  if (samples.size() < 2) return 0.0;
  double sum = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) sum += samples[i];
  return sum * h;
}

}  // namespace deltawell::quad
