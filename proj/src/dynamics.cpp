#include "deltawell/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace deltawell {

namespace {

// Split storage keeps the inner loop free of complex-multiply overhead.
struct State {
  std::vector<double> re;
  std::vector<double> im;
};

void rhs(const State& s, const std::vector<double>& diag, double inv_h2,
         State& out) {
  const std::size_t n = s.re.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double re_l = j > 0 ? s.re[j - 1] : 0.0;
    const double im_l = j > 0 ? s.im[j - 1] : 0.0;
    const double re_r = j + 1 < n ? s.re[j + 1] : 0.0;
    const double im_r = j + 1 < n ? s.im[j + 1] : 0.0;
    const double dens = s.re[j] * s.re[j] + s.im[j] * s.im[j];
    const double d = diag[j] + dens;
    // H psi with H = D^2 - omega + |psi|^2 + V; the derivative is i H psi.
    const double h_re = inv_h2 * (re_l + re_r) + d * s.re[j];
    const double h_im = inv_h2 * (im_l + im_r) + d * s.im[j];
    out.re[j] = -h_im;
    out.im[j] = h_re;
  }
}

void axpy(const State& x, double a, const State& k, State& out) {
  for (std::size_t j = 0; j < x.re.size(); ++j) {
    out.re[j] = x.re[j] + a * k.re[j];
    out.im[j] = x.im[j] + a * k.im[j];
  }
}

double norm_of(const State& s, double h) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.re.size(); ++j) {
    sum += s.re[j] * s.re[j] + s.im[j] * s.im[j];
  }
  return h * sum;
}

std::vector<std::complex<double>> to_complex(const State& s) {
  std::vector<std::complex<double>> out(s.re.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = {s.re[j], s.im[j]};
  return out;
}

}  // namespace

NormDriftError::NormDriftError(double time, double drift)
    : NumericalError("evolve: relative norm drift " + std::to_string(drift) +
                     " at t=" + std::to_string(time) +
                     " exceeds the limit; reduce dt"),
      time_(time),
      drift_(drift) {}

Field stationary_field(const BoundState& state, double M, double h) {
  Field f;
  f.grid = make_grid(state.params.L, M, h);
  const auto relaxed = relax_to_grid(state, f.grid);
  f.psi.assign(relaxed.u.begin(), relaxed.u.end());
  return f;
}

double squared_norm(const Field& field) {
  double sum = 0.0;
  for (const auto& z : field.psi) sum += std::norm(z);
  return field.grid.h * sum;
}

void perturb(Field& field, const Perturbation& p) {
  if (p.amplitude == 0.0) return;
  if (!(p.amplitude > 0.0)) {
    throw ParameterError("perturb: amplitude must be non-negative");
  }
  double peak = 0.0;
  for (const auto& z : field.psi) peak = std::max(peak, std::abs(z));
  const double a = p.amplitude * peak;
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> noise(-a, a);
  for (auto& z : field.psi) {
    const double re = noise(rng);
    const double im = noise(rng);
    z += std::complex<double>(re, im);
  }
}

Trajectory evolve(const Field& initial, const WellParams& params,
                  const EvolveOptions& options,
                  const Perturbation& perturbation, const Observer& observer) {
  params.validate();
  const Grid& g = initial.grid;
  const double h2 = g.h * g.h;
  const double dt = options.dt > 0.0 ? options.dt : options.dt_factor * h2;
  if (dt > options.max_dt_factor * h2 * (1.0 + 1e-12)) {
    throw ParameterError("evolve: dt=" + std::to_string(dt) + " exceeds " +
                         std::to_string(options.max_dt_factor) +
                         " h^2 (explicit RK4 bound)");
  }
  if (!(options.t_final >= 0.0) || !(options.sample_interval > 0.0)) {
    throw ParameterError("evolve: need t_final >= 0 and sample_interval > 0");
  }

  Field start = initial;
  perturb(start, perturbation);

  Trajectory traj;
  traj.grid = g;
  traj.dt = dt;
  traj.perturbation = perturbation;

  const auto n = start.psi.size();
  std::vector<double> diag(n);
  const auto weights = defect_weights(g, params.epsilon);
  for (std::size_t j = 0; j < n; ++j) {
    diag[j] = -2.0 / h2 - params.omega + weights[j];
  }

  State psi{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    psi.re[j] = start.psi[j].real();
    psi.im[j] = start.psi[j].imag();
  }
  const State psi0 = psi;
  State k1 = psi, k2 = psi, k3 = psi, k4 = psi, tmp = psi;

  const int centre = g.node_of(0.0);
  const bool centre_on_node = std::abs(g.x(centre)) < 1e-9 * g.h;
  const double n0 = norm_of(psi, g.h);

  const auto record = [&](double t) {
    double left = 0.0, right = 0.0, dev = 0.0, peak = 0.0;
    std::vector<double> dens(n);
    for (std::size_t j = 0; j < n; ++j) {
      dens[j] = psi.re[j] * psi.re[j] + psi.im[j] * psi.im[j];
      peak = std::max(peak, dens[j]);
      dev = std::max(dev, std::hypot(psi.re[j] - psi0.re[j],
                                     psi.im[j] - psi0.im[j]));
      const double x = g.x(static_cast<int>(j));
      if (centre_on_node && static_cast<int>(j) == centre) {
        left += 0.5 * dens[j];
        right += 0.5 * dens[j];
      } else if (x < 0.0) {
        left += dens[j];
      } else {
        right += dens[j];
      }
    }
    const double norm = g.h * (left + right);
    traj.times.push_back(t);
    traj.norms.push_back(norm);
    traj.left_mass.push_back(g.h * left);
    traj.right_mass.push_back(g.h * right);
    traj.deviation.push_back(dev);
    traj.boundary.push_back(
        peak > 0.0 ? std::sqrt(std::max(dens.front(), dens.back()) / peak)
                   : 0.0);
    if (options.keep_density) traj.density.push_back(std::move(dens));
    if (observer) observer(t, to_complex(psi));

    const double drift = n0 > 0.0 ? std::abs(norm - n0) / n0 : norm;
    if (drift > options.drift_limit) throw NormDriftError(t, drift);
  };

  const auto steps = static_cast<long>(std::ceil(options.t_final / dt - 1e-9));
  const double step = steps > 0 ? options.t_final / steps : 0.0;
  const long stride =
      std::max(1L, std::lround(options.sample_interval / std::max(step, 1e-300)));
  const double inv_h2 = 1.0 / h2;

  record(initial.time);
  for (long s = 1; s <= steps; ++s) {
    rhs(psi, diag, inv_h2, k1);
    axpy(psi, 0.5 * step, k1, tmp);
    rhs(tmp, diag, inv_h2, k2);
    axpy(psi, 0.5 * step, k2, tmp);
    rhs(tmp, diag, inv_h2, k3);
    axpy(psi, step, k3, tmp);
    rhs(tmp, diag, inv_h2, k4);
    for (std::size_t j = 0; j < n; ++j) {
      psi.re[j] += step / 6.0 * (k1.re[j] + 2.0 * (k2.re[j] + k3.re[j]) + k4.re[j]);
      psi.im[j] += step / 6.0 * (k1.im[j] + 2.0 * (k2.im[j] + k3.im[j]) + k4.im[j]);
    }
    if (s % stride == 0 || s == steps) record(initial.time + s * step);
  }

  traj.final.grid = g;
  traj.final.psi = to_complex(psi);
  traj.final.time = initial.time + steps * step;
  return traj;
}

std::vector<std::pair<double, double>> norm_history(const Trajectory& t) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t.times.size());
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    out.emplace_back(t.times[i], t.norms[i]);
  }
  return out;
}

double relative_drift(const Trajectory& t) {
  if (t.norms.empty()) return 0.0;
  const double n0 = t.norms.front();
  double worst = 0.0;
  for (double n : t.norms) worst = std::max(worst, std::abs(n - n0));
  return n0 > 0.0 ? worst / n0 : worst;
}

}  // namespace deltawell
