#include "deltawell/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "deltawell/dynamics.hpp"
#include "deltawell/errors.hpp"
#include "deltawell/linear_states.hpp"
#include "deltawell/stability.hpp"

namespace deltawell::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Json number_or_null(std::optional<double> v) {
  return v ? Json(*v) : Json(nullptr);
}

std::ofstream open_file(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw ParameterError("cannot open '" + path + "' for writing");
  return f;
}

// "a.csv" with index 2 -> "a_2.csv"
std::string indexed_path(const std::string& path, std::size_t index) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos &&
                       (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  const std::string ext = has_ext ? path.substr(dot) : "";
  return stem + "_" + std::to_string(index) + ext;
}

unsigned thread_cap() {
  if (const char* env = std::getenv("DELTAWELL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;
}

struct StateArgs {
  double omega = 1.0;
  double L = 1.0;
  double epsilon = 1.0;
  std::string branch = "11";
  int index = 1;  // which energy root when several exist

  WellParams params() const {
    const WellParams p{omega, L, epsilon};
    p.validate();
    return p;
  }
};

void add_state_options(CLI::App* cmd, StateArgs& a, bool with_index) {
  cmd->add_option("--omega", a.omega, "frequency")->required();
  cmd->add_option("--L", a.L, "half distance between the defects");
  cmd->add_option("--epsilon", a.epsilon, "strength of the defect at +L");
  cmd->add_option("--branch", a.branch, "landing roots: 11, 12, 21 or 22");
  if (with_index) {
    cmd->add_option("--index", a.index,
                    "energy root to use when the branch has several (1-based)");
  }
}

std::vector<BoundState> states_for(const StateArgs& a) {
  const WellParams p = a.params();
  const BranchChoice b = BranchChoice::parse(a.branch);
  std::vector<BoundState> out;
  for (double e : solve_transient_energy(p, b)) out.push_back(assemble(p, b, e));
  if (out.empty()) {
    throw ParameterError("no positive state on branch " + b.label() +
                         " at omega=" + num(p.omega));
  }
  return out;
}

BoundState state_for(const StateArgs& a) {
  const auto all = states_for(a);
  if (a.index < 1 || static_cast<std::size_t>(a.index) > all.size()) {
    throw ParameterError("--index " + std::to_string(a.index) + " out of 1.." +
                         std::to_string(all.size()));
  }
  return all[static_cast<std::size_t>(a.index - 1)];
}

std::optional<StabilityVerdict> try_classify(const BoundState& s) {
  const double w = s.params.omega;
  if (s.crosses_maximum || !phase::has_tangency(w, 1.0) ||
      !phase::has_tangency(w, s.params.epsilon)) {
    return std::nullopt;
  }
  return geometric_classify(s);
}

std::string classification_label(const std::optional<StabilityVerdict>& v) {
  return v ? to_string(v->classification) : "not_applicable";
}

Json summary(const BoundState& s, const std::optional<StabilityVerdict>& v,
             std::optional<double> max_real_part) {
  Json j;
  j["omega"] = s.params.omega;
  j["L"] = s.params.L;
  j["epsilon"] = s.params.epsilon;
  j["branch"] = s.branch.label();
  j["Ehat"] = s.Ehat;
  j["u1"] = s.u1;
  j["u2"] = s.u2;
  j["norm"] = s.norm;
  j["classification"] = classification_label(v);
  j["max_real_part"] = number_or_null(max_real_part);
  return j;
}

void write_profile(const BoundState& s, const std::string& path) {
  auto f = open_file(path);
  const double reach = s.params.L + 12.0 / std::sqrt(s.params.omega);
  constexpr int kIntervals = 2000;
  f << "x,u,u_x\n";
  for (int i = 0; i <= kIntervals; ++i) {
    const double x = -reach + 2.0 * reach * i / kIntervals;
    f << num(x) << ',' << num(s.value(x)) << ',' << num(s.slope(x)) << '\n';
  }
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

Range parse_range(const std::string& text) {
  Range r;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &r.lo, &r.hi, &r.n, &tail) != 3) {
    throw ParameterError("--omega-range must look like a:b:n, got '" + text +
                         "'");
  }
  if (r.n < 1) throw ParameterError("--omega-range needs n >= 1");
  if (!(r.hi >= r.lo)) throw ParameterError("--omega-range needs a <= b");
  return r;
}

// ---------------------------------------------------------------- commands

int cmd_linear(double L, double epsilon, const std::string& format,
               const std::string& out_path, std::ostream& out) {
  const auto points = linear::bifurcation_points(L, epsilon);
  struct Row {
    std::string mode;
    linear::LinearState state;
  };
  std::vector<Row> rows{{"ground", linear::eigenfunction(points.omega0, L, epsilon)}};
  if (points.omega1) {
    rows.push_back({"excited", linear::eigenfunction(*points.omega1, L, epsilon)});
  }

  std::ostringstream body;
  if (format == "json") {
    Json j;
    j["L"] = L;
    j["epsilon"] = epsilon;
    j["omega0"] = points.omega0;
    j["omega1"] = number_or_null(points.omega1);
    j["excited_threshold"] = linear::excited_threshold(epsilon);
    for (const auto& r : rows) {
      j["modes"].push_back({{"mode", r.mode},
                            {"omega", r.state.omega_eig},
                            {"A", r.state.A},
                            {"B", r.state.B},
                            {"C", r.state.C}});
    }
    body << j.dump(2) << '\n';
  } else {
    body << "mode,omega,A,B,C\n";
    for (const auto& r : rows) {
      body << r.mode << ',' << num(r.state.omega_eig) << ',' << num(r.state.A)
           << ',' << num(r.state.B) << ',' << num(r.state.C) << '\n';
    }
  }
  if (out_path.empty()) {
    out << body.str();
  } else {
    open_file(out_path) << body.str();
  }
  return kOk;
}

int cmd_state(const StateArgs& a, const std::string& out_path,
              std::ostream& out) {
  const auto states = states_for(a);
  Json list = Json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    const auto checks = verify(s);
    Json j = summary(s, try_classify(s), std::nullopt);
    j["index"] = i + 1;
    j["xi"] = {s.xi1, s.xi2, s.xi3};
    j["elliptic"] = {{"a", s.a}, {"r", s.r}, {"m", s.m}};
    j["L1"] = s.L1;
    j["L2"] = s.L2;
    j["checks"] = {{"continuity", checks.continuity},
                   {"jump_left", checks.jump_left},
                   {"jump_right", checks.jump_right},
                   {"interior_residual", checks.interior_residual}};
    if (!out_path.empty()) {
      const std::string path =
          states.size() == 1 ? out_path : indexed_path(out_path, i + 1);
      write_profile(s, path);
      j["profile"] = path;
    }
    list.push_back(std::move(j));
  }
  out << list.dump(2) << '\n';
  return kOk;
}

int cmd_bifurcation(double L, double epsilon, const std::string& range_text,
                    const std::string& format, const std::string& out_path,
                    std::ostream& out, std::ostream& err) {
  WellParams{1.0, L, epsilon}.validate();
  const Range range = parse_range(range_text);
  std::vector<double> grid;
  for (int i = 0; i < range.n; ++i) {
    grid.push_back(range.n == 1 ? range.lo
                                : range.lo + (range.hi - range.lo) * i /
                                                 (range.n - 1));
  }
  TraceOptions options;
  options.threads = thread_cap();
  auto points = trace_branches(L, epsilon, grid, options);
  for (auto& p : points) {
    try {
      const auto s = assemble({p.omega, L, epsilon}, p.branch, p.Ehat);
      const auto v = try_classify(s);
      if (v) {
        p.stability_tag = v->classification == Classification::P_ge_2_unstable
                              ? StabilityTag::unstable
                              : StabilityTag::stable_candidate;
      }
    } catch (const NumericalError&) {
    }
  }
  const auto crit = critical_omega(L, epsilon, std::max(3.0, range.hi));

  Json report;
  report["L"] = L;
  report["epsilon"] = epsilon;
  report["omega_c"] = crit.omega_c;
  report["kind"] = to_string(crit.kind);
  for (const auto* list : {&crit.pinned_e1, &crit.pinned_e2}) {
    Json arr = Json::array();
    for (const auto& r : *list) {
      arr.push_back({{"omega", r.omega}, {"other_index", r.other_index}});
    }
    report[list == &crit.pinned_e1 ? "pinned_e1" : "pinned_e2"] = arr;
  }
  report["points"] = points.size();

  std::ostringstream table;
  if (format == "json") {
    Json rows = Json::array();
    for (const auto& p : points) {
      rows.push_back({{"omega", p.omega},
                      {"branch", p.branch.label()},
                      {"Ehat", p.Ehat},
                      {"u1", p.u1},
                      {"u2", p.u2},
                      {"norm", p.norm},
                      {"stability_tag", to_string(p.stability_tag)}});
    }
    table << rows.dump(1) << '\n';
  } else {
    table << "omega,branch,Ehat,u1,u2,norm,stability_tag\n";
    for (const auto& p : points) {
      table << num(p.omega) << ',' << p.branch.label() << ',' << num(p.Ehat)
            << ',' << num(p.u1) << ',' << num(p.u2) << ',' << num(p.norm)
            << ',' << to_string(p.stability_tag) << '\n';
    }
  }
  // The report goes to stdout next to a data file; without one, the table
  // takes stdout and the report moves into it (json) or to stderr (csv).
  if (!out_path.empty()) {
    open_file(out_path) << table.str();
    out << report.dump(2) << '\n';
  } else if (format == "json") {
    report["branches"] = Json::parse(table.str());
    out << report.dump(1) << '\n';
  } else {
    out << table.str();
    err << report.dump() << '\n';
  }
  return kOk;
}

int cmd_spectrum(const StateArgs& a, double M, double h,
                 const std::string& format, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  const BoundState s = state_for(a);
  const auto lin = build_linearization(s, M, h);
  for (const auto& w : lin.warnings) err << "warning: " << w << '\n';
  const Spectrum sp = spectrum(lin);
  const auto verdict = try_classify(s);

  if (!out_path.empty()) {
    auto f = open_file(out_path);
    if (format == "json") {
      Json arr = Json::array();
      for (const auto& z : sp.eigenvalues) arr.push_back({z.real(), z.imag()});
      f << arr.dump() << '\n';
    } else {
      f << "re,im\n";
      for (const auto& z : sp.eigenvalues) {
        f << num(z.real()) << ',' << num(z.imag()) << '\n';
      }
    }
  }

  Json j = summary(s, verdict, sp.max_real_part);
  j["grid"] = {{"M", sp.M}, {"h", sp.h}, {"n", lin.grid.n}};
  j["tau"] = sp.tau;
  j["spectral_unstable"] = sp.unstable;
  j["real_pair"] = sp.real_pair;
  j["symmetry_defect"] = sp.symmetry_defect;
  j["P_sturm"] = positive_count(lin.plus);
  j["Q_sturm"] = positive_count(lin.minus, 1e-8);
  j["P_crossings"] = count_vertical_crossings(s);
  if (verdict) {
    j["L1"] = verdict->L1;
    j["L2"] = verdict->L2;
    j["Lbar1"] = verdict->Lbar1;
    j["Lbar2"] = verdict->Lbar2;
    j["boundary"] = verdict->boundary;
  }
  const bool agree =
      !verdict || ((verdict->classification ==
                    Classification::P_ge_2_unstable) == sp.unstable);
  j["concordant"] = agree;
  out << j.dump(2) << '\n';
  if (!agree) {
    err << "geometric and spectral verdicts disagree\n";
    return kConsistencyFailure;
  }
  return kOk;
}

struct EvolveArgs {
  double M = 12.0;
  double h = 0.05;
  double dt = 0.0;
  double t_final = 100.0;
  double perturb_amp = 1e-3;
  std::uint64_t seed = 1;
  double sample_interval = 0.5;
  double drift_limit = 1e-4;
};

int cmd_evolve(const StateArgs& a, const EvolveArgs& e,
               const std::string& format, const std::string& out_path,
               std::ostream& out) {
  const BoundState s = state_for(a);
  const Field start = stationary_field(s, e.M, e.h);
  EvolveOptions options;
  options.dt = e.dt;
  options.t_final = e.t_final;
  options.sample_interval = e.sample_interval;
  options.keep_density = !out_path.empty();
  options.drift_limit = e.drift_limit;
  const Trajectory tr = evolve(start, s.params, options, {e.perturb_amp, e.seed});

  if (!out_path.empty()) {
    const Grid& g = tr.grid;
    if (format == "bin") {
      auto f = open_file(out_path, true);
      for (const auto& row : tr.density) {
        for (double d : row) {
          const auto v = static_cast<float>(d);
          f.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
      }
      Json side;
      side["dtype"] = "float32";
      side["layout"] = "row per sample, column per node";
      side["rows"] = tr.density.size();
      side["cols"] = g.n;
      side["x0"] = g.x(0);
      side["h"] = g.h;
      side["times"] = tr.times;
      open_file(out_path + ".json") << side.dump(2) << '\n';
    } else {
      auto f = open_file(out_path);
      f << "t,x,density\n";
      for (std::size_t i = 0; i < tr.times.size(); ++i) {
        for (int j = 0; j < g.n; ++j) {
          f << num(tr.times[i]) << ',' << num(g.x(j)) << ','
            << num(tr.density[i][static_cast<std::size_t>(j)]) << '\n';
        }
      }
    }
  }

  Json j = summary(s, try_classify(s), std::nullopt);
  j["grid"] = {{"M", tr.grid.M}, {"h", tr.grid.h}, {"n", tr.grid.n}};
  j["dt"] = tr.dt;
  j["t_final"] = e.t_final;
  j["perturb_amp"] = e.perturb_amp;
  j["seed"] = e.seed;
  j["norm_drift"] = relative_drift(tr);
  j["max_deviation"] =
      *std::max_element(tr.deviation.begin(), tr.deviation.end());
  j["max_boundary"] = *std::max_element(tr.boundary.begin(), tr.boundary.end());
  Json hist = Json::array();
  for (const auto& [t, n] : norm_history(tr)) hist.push_back({t, n});
  j["norm_history"] = hist;
  Json wells = Json::array();
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    wells.push_back({tr.times[i], tr.left_mass[i], tr.right_mass[i]});
  }
  j["well_mass"] = wells;
  out << j.dump(1) << '\n';
  return kOk;
}

int cmd_reproduce(double M, double h, std::ostream& out, std::ostream& err) {
  Json checks = Json::array();
  bool all_pass = true;
  const auto record = [&](const std::string& name, bool pass, Json detail) {
    all_pass = all_pass && pass;
    err << (pass ? "PASS " : "FAIL ") << name << '\n';
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
  };

  for (const auto& c : reference_cases()) {
    const WellParams p{c.omega, c.L, c.epsilon};
    Json detail;
    bool pass = false;
    try {
      const auto energies = solve_transient_energy(p, c.branch);
      if (energies.empty()) throw ParameterError("no state");
      const BoundState s = assemble(p, c.branch, energies.front());
      const auto checks_s = verify(s);
      const auto verdict = try_classify(s);
      const Spectrum sp = spectrum(s, M, h);
      const bool geometric_unstable =
          verdict &&
          verdict->classification == Classification::P_ge_2_unstable;
      detail = summary(s, verdict, sp.max_real_part);
      detail["interior_residual"] = checks_s.interior_residual;
      pass = checks_s.interior_residual <= 1e-7 &&
             std::max(checks_s.jump_left, checks_s.jump_right) <= 1e-9 &&
             geometric_unstable == c.unstable && sp.unstable == c.unstable &&
             (!c.unstable || sp.real_pair > sp.tau);
    } catch (const std::exception& ex) {
      detail = {{"error", ex.what()}};
    }
    record("state " + c.label, pass, detail);
  }

  const struct {
    double epsilon, target;
  } targets[] = {{1.0, 0.8186}, {0.95, 0.945}};
  for (const auto& t : targets) {
    Json detail;
    bool pass = false;
    try {
      const auto crit = critical_omega(1.0, t.epsilon);
      detail = {{"omega_c", crit.omega_c},
                {"target", t.target},
                {"kind", to_string(crit.kind)}};
      pass = std::abs(crit.omega_c - t.target) <= 1e-3;
    } catch (const std::exception& ex) {
      detail = {{"error", ex.what()}};
    }
    record("omega_c epsilon=" + short_num(t.epsilon), pass, detail);
  }

  out << Json{{"checks", checks}, {"all_pass", all_pass}}.dump(2) << '\n';
  return all_pass ? kOk : kConsistencyFailure;
}

}  // namespace

const std::vector<ReferenceCase>& reference_cases() {
  static const std::vector<ReferenceCase> cases{
      {"2a", 0.6, 1.0, 1.0, {2, 2}, false},
      {"2b", 1.2, 1.0, 1.0, {1, 1}, true},
      {"2c", 1.0, 1.0, 1.0, {2, 1}, false},
      {"2d", 1.0, 1.0, 1.0, {1, 2}, false},
      {"3a", 0.7, 1.0, 0.95, {1, 2}, false},
      {"3b", 1.2, 1.0, 0.95, {1, 1}, true},
      {"3c", 1.4, 1.0, 0.95, {2, 1}, false},
      {"3d", 1.1, 1.0, 0.95, {1, 2}, false},
  };
  return cases;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bound states of the NLS equation with two point defects"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  const auto add_io = [&](CLI::App* cmd, std::vector<std::string> formats) {
    cmd->add_option("--out", out_path, "data file");
    cmd->add_option("--format", format, "data format")
        ->check(CLI::IsMember(formats));
  };

  double L = 1.0;
  double epsilon = 1.0;
  auto* linear_cmd = app.add_subcommand("linear", "linear bifurcation points");
  linear_cmd->add_option("--L", L);
  linear_cmd->add_option("--epsilon", epsilon);
  add_io(linear_cmd, {"csv", "json"});

  StateArgs state_args;
  auto* state_cmd = app.add_subcommand("state", "assemble bound states");
  add_state_options(state_cmd, state_args, false);
  state_cmd->add_option("--out", out_path, "profile CSV");

  std::string range = "0.3:2:86";
  auto* bif_cmd = app.add_subcommand("bifurcation", "trace the branches");
  bif_cmd->add_option("--L", L);
  bif_cmd->add_option("--epsilon", epsilon);
  bif_cmd->add_option("--omega-range", range, "a:b:n");
  add_io(bif_cmd, {"csv", "json"});

  double grid_M = 12.0;
  double grid_h = 0.05;
  auto* spec_cmd = app.add_subcommand("spectrum", "linearised spectrum");
  add_state_options(spec_cmd, state_args, true);
  spec_cmd->add_option("--grid-M", grid_M);
  spec_cmd->add_option("--grid-h", grid_h);
  add_io(spec_cmd, {"csv", "json"});

  EvolveArgs evolve_args;
  auto* evolve_cmd = app.add_subcommand("evolve", "time evolution");
  add_state_options(evolve_cmd, state_args, true);
  evolve_cmd->add_option("--grid-M", evolve_args.M);
  evolve_cmd->add_option("--grid-h", evolve_args.h);
  evolve_cmd->add_option("--dt", evolve_args.dt, "time step (default 0.05 h^2)");
  evolve_cmd->add_option("--t-final", evolve_args.t_final);
  evolve_cmd->add_option("--perturb-amp", evolve_args.perturb_amp,
                         "noise amplitude relative to max|psi|");
  evolve_cmd->add_option("--seed", evolve_args.seed);
  evolve_cmd->add_option("--sample-interval", evolve_args.sample_interval);
  evolve_cmd->add_option("--drift-limit", evolve_args.drift_limit,
                         "abort when the relative norm drift exceeds this");
  add_io(evolve_cmd, {"csv", "bin"});

  auto* repro_cmd = app.add_subcommand(
      "reproduce-paper", "reference states and critical frequencies");
  repro_cmd->add_option("--grid-M", grid_M);
  repro_cmd->add_option("--grid-h", grid_h);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kDomainError;
  }

  try {
    if (*linear_cmd) return cmd_linear(L, epsilon, format, out_path, out);
    if (*state_cmd) return cmd_state(state_args, out_path, out);
    if (*bif_cmd) {
      return cmd_bifurcation(L, epsilon, range, format, out_path, out, err);
    }
    if (*spec_cmd) {
      return cmd_spectrum(state_args, grid_M, grid_h, format, out_path, out,
                          err);
    }
    if (*evolve_cmd) {
      return cmd_evolve(state_args, evolve_args, format, out_path, out);
    }
    if (*repro_cmd) return cmd_reproduce(grid_M, grid_h, out, err);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  }
  return kDomainError;
}

}  // namespace deltawell::cli
