// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "deltawell/cli.hpp"
#include "deltawell/dynamics.hpp"
#include "deltawell/linear_states.hpp"
#include "deltawell/phase_plane.hpp"
#include "deltawell/special_functions.hpp"
#include "deltawell/stability.hpp"
#include "oracles.hpp"

using namespace deltawell;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BoundState case_state(const cli::ReferenceCase& c) {
  const WellParams p{c.omega, c.L, c.epsilon};
  return assemble(p, c.branch, solve_transient_energy(p, c.branch).at(0));
}

const cli::ReferenceCase& find_case(const std::string& label) {
  for (const auto& c : cli::reference_cases()) {
    if (c.label == label) return c;
  }
  throw std::logic_error("unknown case");
}

Outcome critical_frequency(double epsilon, double target) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const std::string eps = fmt("%g", epsilon);
  const int code = cli::run({"bifurcation", "--L", "1", "--epsilon", eps,
                             "--omega-range", "0.3:2:35", "--out",
                             "acceptance_bif.csv"},
                            out, err);
  const double elapsed = seconds_since(t0);
  if (code != 0) return {false, "bifurcation exited with " + std::to_string(code)};
  const auto j = json::parse(out.str());
  const double wc = j["omega_c"].get<double>();
  const bool pass = std::abs(wc - target) <= 1e-3 && elapsed < 60.0;
  return {pass, fmt("omega_c=%.6f", wc) + fmt(" target=%.4f", target) +
                    " (" + j["kind"].get<std::string>() + ")" +
                    fmt(" in %.1fs", elapsed)};
}

Outcome criterion1() { return critical_frequency(1.0, 0.8186); }
Outcome criterion2() { return critical_frequency(0.95, 0.945); }

Outcome criterion3() {
  bool pass = true;
  std::string detail;
  const double threshold = linear::excited_threshold(0.95);
  for (double L : {1.0, 1.03, 1.1}) {
    const bool exists = linear::bifurcation_points(L, 0.95).omega1.has_value();
    pass = pass && exists == (L >= threshold);
    detail += fmt("L=%.2f:", L) + (exists ? "yes " : "no ");
  }
  const double w0 = linear::bifurcation_points(50.0, 1.0).omega0;
  const auto w1 = linear::bifurcation_points(50.0, 0.95).omega1;
  pass = pass && std::abs(w0 - 0.25) <= 1e-4 && w1 &&
         std::abs(*w1 - 0.95 * 0.95 / 4.0) <= 1e-4;
  detail += fmt("omega0(50)=%.6f ", w0) + fmt("omega1(50)=%.6f", w1 ? *w1 : NAN);
  return {pass, detail};
}

Outcome criterion4() {
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(0.3 + 1.5 * i / 60.0);
  TraceOptions options;
  options.refine_levels = 0;

  // Symmetric well.
  const double wc = critical_omega(1.0, 1.0).omega_c;
  const auto sym = trace_branches(1.0, 1.0, grid, options);
  std::map<double, std::vector<BranchPoint>> at;
  for (const auto& p : sym) at[p.omega].push_back(p);
  bool pitchfork = true;
  double worst_mirror = 0.0;
  for (const auto& [w, pts] : at) {
    const std::size_t expected = w < wc ? 1 : 3;
    pitchfork = pitchfork && pts.size() == expected;
    if (pts.size() == 3) {
      std::vector<double> asym;
      for (const auto& p : pts) {
        if (!(p.branch == BranchChoice{1, 1})) asym.push_back(p.norm);
      }
      pitchfork = pitchfork && asym.size() == 2;
      if (asym.size() == 2) {
        worst_mirror = std::max(worst_mirror, std::abs(asym[0] - asym[1]) / asym[0]);
      }
    }
  }
  pitchfork = pitchfork && worst_mirror <= 1e-9;

  // Asymmetric well: count jumps from 1 to 3 at the fold with two new
  // states whose norms merge as omega decreases to the fold.
  const auto crit = critical_omega(1.0, 0.95);
  const auto below = all_states({crit.omega_c - 1e-3, 1.0, 0.95});
  std::vector<double> gaps;
  for (double d : {1e-2, 1e-3, 1e-4}) {
    const auto above = all_states({crit.omega_c + d, 1.0, 0.95});
    if (above.size() != 3) {
      gaps.push_back(-1.0);
      continue;
    }
    // The two states not continuing the lower branch.
    std::vector<double> fresh;
    for (const auto& s : above) {
      if (std::abs(s.norm - below.front().norm) > 0.05) fresh.push_back(s.norm);
    }
    gaps.push_back(fresh.size() == 2 ? std::abs(fresh[0] - fresh[1]) : -1.0);
  }
  const bool fold = crit.kind == BifurcationKind::fold && below.size() == 1 &&
                    gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] >= 0.0;

  // The asymmetric branches no longer mirror each other.
  double split = 1.0;
  const auto broken = all_states({1.3, 1.0, 0.95});
  if (broken.size() == 3) {
    std::vector<double> n;
    for (const auto& s : broken) n.push_back(s.norm);
    std::sort(n.begin(), n.end());
    split = std::min(n[1] - n[0], n[2] - n[1]);
  }
  const bool splits = split > 1e-3;

  return {pitchfork && fold && splits,
          fmt("eps=1 counts 1/3 about %.4f", wc) +
              fmt(" mirror=%.1e", worst_mirror) +
              fmt("; eps=0.95 fold at %.5f", crit.omega_c) +
              fmt(" pair gap %.2e", gaps[2]) + fmt(" branch split %.3f", split)};
}

Outcome criterion5() {
  bool pass = true;
  double worst_res = 0.0, worst_jump = 0.0, worst_shoot = 0.0;
  for (const auto& c : cli::reference_cases()) {
    const BoundState s = case_state(c);
    const auto checks = verify(s);
    worst_res = std::max(worst_res, checks.interior_residual);
    worst_jump = std::max({worst_jump, checks.jump_left, checks.jump_right});
    const oracle::Shooter shooter(s.params);
    shooter.solve(s.u1 * (1.0 - 2e-3), s.u1 * (1.0 + 2e-3));
    std::vector<double> xs;
    for (double x = -s.params.L - 4.0; x <= s.params.L + 4.0; x += 0.02) xs.push_back(x);
    const auto ref = shooter.profile(xs);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      worst_shoot = std::max(worst_shoot, std::abs(ref[k] - s.value(xs[k])));
    }
  }
  pass = worst_res <= 1e-7 && worst_jump <= 1e-9 && worst_shoot <= 1e-6;
  return {pass, fmt("residual %.1e", worst_res) + fmt(" jump %.1e", worst_jump) +
                    fmt(" shooting %.1e", worst_shoot)};
}

Outcome criterion6() {
  bool pass = true;
  std::string detail;
  for (const auto& c : cli::reference_cases()) {
    const BoundState s = case_state(c);
    const auto v = geometric_classify(s);
    const Spectrum sp = spectrum(s, 12.0, 0.05);
    const bool geometric = v.classification == Classification::P_ge_2_unstable;
    const bool ok = geometric == sp.unstable && geometric == c.unstable &&
                    (c.unstable ? sp.real_pair > sp.tau : sp.max_real_part <= sp.tau);
    pass = pass && ok;
    detail += c.label + (c.unstable ? fmt("=%.4f ", sp.real_pair) : std::string(ok ? "=ok " : "=bad "));
  }
  return {pass, detail};
}

Outcome criterion7() {
  // Reference run: an unperturbed stable state.
  const BoundState stable = case_state(find_case("2a"));
  EvolveOptions o;
  o.t_final = 100.0;
  o.keep_density = false;
  const auto quiet = evolve(stationary_field(stable, 12.0, 0.05), stable.params, o);
  const double drift_quiet = relative_drift(quiet);

  // Perturbed unstable state.
  const BoundState s = case_state(find_case("3b"));
  const auto lin = build_linearization(s, 12.0, 0.05);
  const auto sp = spectrum(lin);
  const auto mode = real_mode(lin, sp.real_pair);
  const Field f = stationary_field(s, 12.0, 0.05);
  const int n = f.grid.n;
  std::vector<double> ts, amp;
  const Observer observe = [&](double t, const std::vector<std::complex<double>>& psi) {
    double c = 0.0;
    for (int j = 0; j < n; ++j) {
      c += mode.left[j] * (psi[j].real() - lin.profile[j]) +
           mode.left[n + j] * psi[j].imag();
    }
    ts.push_back(t);
    amp.push_back(std::abs(c));
  };
  o.sample_interval = 0.25;
  const auto tr = evolve(f, s.params, o, {1e-3, 42}, observe);
  const double drift_loud = relative_drift(tr);

  // Growth: least squares on log|c| while |c| stays below 5% of the
  // state's amplitude.
  const double ceiling = 0.05 * std::sqrt(s.norm);
  double st = 0, sa = 0, stt = 0, sta = 0, m = 0, t_sat = 0;
  for (std::size_t i = 0; i < ts.size() && amp[i] < ceiling; ++i) {
    st += ts[i];
    sa += std::log(amp[i]);
    stt += ts[i] * ts[i];
    sta += ts[i] * std::log(amp[i]);
    m += 1;
    t_sat = ts[i];
  }
  const double rate = (m * sta - st * sa) / (m * stt - st * st);
  const bool growth = std::abs(rate - sp.real_pair) <= 0.1 * sp.real_pair;

  // Localisation after saturation, plus an oscillation in the well masses.
  double left = 0, right = 0;
  int swings = 0;
  double prev = 0.0;
  const double t_from = t_sat + 10.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] < t_from) continue;
    left += tr.left_mass[i];
    right += tr.right_mass[i];
    const double d = tr.left_mass[i] - tr.right_mass[i];
    const double centred = d - (left - right) / std::max(1.0, static_cast<double>(i));
    if (prev != 0.0 && (centred > 0) != (prev > 0)) ++swings;
    prev = centred;
  }
  const double excess = std::max(left, right) / std::min(left, right) - 1.0;
  const bool localised = excess > 0.2 && swings >= 4;

  const bool pass = drift_quiet <= 1e-6 && drift_loud <= 1e-6 && growth && localised;
  return {pass, fmt("drift %.1e", drift_quiet) + fmt("/%.1e", drift_loud) +
                    fmt(" rate %.4f", rate) + fmt(" vs lambda %.4f", sp.real_pair) +
                    fmt(" well excess %.0f%%", 100.0 * excess) +
                    " swings " + std::to_string(swings)};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double special_err = 0.0;
  for (double u : {-2.0, -0.5, 0.3, 1.7, 4.0}) {
    special_err = std::max(special_err, std::abs(special::jacobi_dn(u, 1.0) - 1.0 / std::cosh(u)));
  }
  for (double phi : {-3.0, 0.2, 1.4, 5.0}) {
    special_err = std::max(special_err, std::abs(special::elliptic_f(phi, 0.0) - phi));
  }
  for (int i = 0; i < 100; ++i) {
    const double m = 0.01 + 0.98 * unit(rng);
    const double u = (0.05 + 0.9 * unit(rng)) * special::elliptic_k(m);
    special_err = std::max(special_err,
                           std::abs(special::jacobi_dn_inverse(special::jacobi_dn(u, m), m) - u) * 1e-4);
    const double phi = 3.0 * unit(rng);
    special_err = std::max(special_err, std::abs(special::elliptic_f(phi, m) - oracle::elliptic_f(phi, m)));
  }

  double cardan_err = 0.0;
  int samples = 0;
  while (samples < 200) {
    const double omega = 0.3 + 2.0 * unit(rng);
    const double s = 0.5 + 0.5 * unit(rng);
    if (omega <= 0.25 * s * s) continue;
    const double lo = std::max(phase::tangency_energy(omega, s), -0.5 * omega * omega);
    const double E = lo * (0.999 - 0.998 * unit(rng));
    const auto a = phase::landing_roots(E, omega, s);
    const auto b = oracle::landing_roots(E, omega, s);
    if (a.size() != b.size()) {
      cardan_err = INFINITY;
    } else {
      for (std::size_t k = 0; k < a.size(); ++k) cardan_err = std::max(cardan_err, std::abs(a[k] - b[k]));
    }
    ++samples;
  }

  double flow_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double omega = 0.4 + 1.5 * unit(rng);
    const double E = -0.5 * omega * omega * (0.05 + 0.9 * unit(rng));
    const phase::TransientOrbit orbit(E, omega);
    const double span = orbit.amplitude_max() - orbit.amplitude_min();
    const phase::OrbitEndpoint a{orbit.amplitude_min() + unit(rng) * span, unit(rng) < 0.5};
    const phase::OrbitEndpoint b{orbit.amplitude_min() + unit(rng) * span, unit(rng) < 0.5};
    const auto tt = phase::travel_time(a, b, E, {omega, 1.0, 1.0}, phase::Route::quadrature);
    const auto y_of = [&](const phase::OrbitEndpoint& e) {
      const double y2 = E + omega * e.u * e.u - 0.5 * std::pow(e.u, 4);
      return (e.upper ? 1.0 : -1.0) * std::sqrt(std::max(y2, 0.0));
    };
    const auto end = oracle::flow({a.u, y_of(a)}, omega, tt.total);
    flow_err = std::max({flow_err, std::abs(end[0] - b.u), std::abs(end[1] - y_of(b))});
  }

  double symmetry = 0.0;
  for (const char* label : {"2a", "3b"}) {
    const Spectrum sp = spectrum(case_state(find_case(label)), 8.0, 0.05);
    symmetry = std::max(symmetry, sp.symmetry_defect);
  }

  const double elapsed = seconds_since(t0);
  const bool pass = special_err <= 1e-12 && cardan_err <= 1e-9 && flow_err <= 1e-8 &&
                    symmetry <= 1e-8 && elapsed < 300.0;
  return {pass, fmt("special %.1e", special_err) + fmt(" cubic %.1e", cardan_err) +
                    fmt(" flow %.1e", flow_err) + fmt(" quadruples %.1e", symmetry) +
                    fmt(" in %.1fs", elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"critical frequency, symmetric well", criterion1},
      {"critical frequency, asymmetric well", criterion2},
      {"linear thresholds and asymptotes", criterion3},
      {"bifurcation topology", criterion4},
      {"construction fidelity", criterion5},
      {"stability concordance", criterion6},
      {"dynamics", criterion7},
      {"property suites", criterion8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += r.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, r.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
