#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "deltawell/cli.hpp"
#include "deltawell/errors.hpp"
#include "deltawell/linear_states.hpp"
#include "deltawell/stability.hpp"

using namespace deltawell;

namespace {

BoundState reference_state(const std::string& label) {
  for (const auto& c : cli::reference_cases()) {
    if (c.label != label) continue;
    const WellParams p{c.omega, c.L, c.epsilon};
    return assemble(p, c.branch, solve_transient_energy(p, c.branch).at(0));
  }
  throw std::logic_error("unknown case " + label);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("free operator spectrum lies below -omega") {
  const Grid g = make_grid(1.0, 10.0, 0.05);
  const std::vector<double> zero(static_cast<std::size_t>(g.n), 0.0);
  const auto op = schrodinger_operator(g, zero, 0.7, zero, 1.0);
  CHECK(positive_count(op, -0.7) == 0);
  // Lowest Dirichlet mode of the discrete Laplacian on 2M / h cells.
  const double k = M_PI * g.h / (4.0 * g.M);
  const double top = -0.7 - 4.0 * std::sin(k) * std::sin(k) / (g.h * g.h);
  CHECK(op.eigenvalue(op.size() - 1) == doctest::Approx(top).epsilon(1e-10));
}

TEST_CASE("grid places both defects on nodes") {
  const Grid g = make_grid(1.0, 12.3, 0.047);
  CHECK(g.h <= 0.047);
  CHECK(g.x(g.left_defect()) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(g.x(g.right_defect()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.x(g.n - 1) + g.h == doctest::Approx(g.M));
  CHECK_THROWS_AS(make_grid(1.0, 0.5, 0.05), ParameterError);
}

TEST_CASE("node-weight defects reproduce the linear ground frequency") {
  for (double eps : {1.0, 0.95}) {
    const Grid g = make_grid(1.0, 20.0, 0.01);
    const std::vector<double> zero(static_cast<std::size_t>(g.n), 0.0);
    const auto op = schrodinger_operator(g, defect_weights(g, eps), 0.0, zero, 0.0);
    const double top = op.eigenvalue(op.size() - 1);
    CHECK(std::abs(top - linear::bifurcation_points(1.0, eps).omega0) <= 5e-3);
  }
}

TEST_CASE("L- annihilates the sampled state up to discretisation error") {
  const BoundState s = reference_state("3a");
  double prev_bulk = 0.0, prev_node = 0.0;
  for (double h : {0.04, 0.02, 0.01}) {
    const Grid g = make_grid(s.params.L, 12.0, h);
    const auto u = sample(s, g);
    const auto op = schrodinger_operator(g, defect_weights(g, s.params.epsilon),
                                         s.params.omega, u, 1.0);
    auto r = op.apply(u);
    const double node = std::max(std::abs(r[g.left_defect()]),
                                 std::abs(r[g.right_defect()]));
    r[g.left_defect()] = r[g.right_defect()] = 0.0;
    // The Dirichlet ends see the truncated tail, not the discretisation.
    r.front() = r.back() = 0.0;
    const double bulk = max_abs(r);
    if (prev_bulk > 0.0) {
      // Second order in the bulk; first order on the two defect nodes.
      CHECK(prev_bulk / bulk == doctest::Approx(4.0).epsilon(0.1));
      CHECK(prev_node / node == doctest::Approx(2.0).epsilon(0.1));
    }
    prev_bulk = bulk;
    prev_node = node;
  }
}

TEST_CASE("relaxation converges to the discrete stationary state") {
  const BoundState s = reference_state("2b");
  const Grid g = make_grid(1.0, 12.0, 0.05);
  const auto r = relax_to_grid(s, g);
  CHECK(r.residual <= 1e-11);
  CHECK(r.iterations <= 6);
  const auto sampled = sample(s, g);
  for (std::size_t j = 0; j < sampled.size(); ++j) {
    CHECK(std::abs(r.u[j] - sampled[j]) <= 5e-3);
  }
}

TEST_CASE("geometric verdicts, crossing counts and spectra agree") {
  for (const auto& c : cli::reference_cases()) {
    CAPTURE(c.label);
    const BoundState s = reference_state(c.label);
    const auto v = geometric_classify(s);
    CHECK(v.Q == 0);
    CHECK((v.classification == Classification::P_ge_2_unstable) == c.unstable);
    if (c.unstable) {
      CHECK(v.L1 > v.Lbar1);
      CHECK(v.L2 > v.Lbar2);
    }

    const int crossings = count_vertical_crossings(s);
    const auto lin = build_linearization(s, 12.0, 0.05);
    CHECK(lin.warnings.empty());
    CHECK(crossings == static_cast<int>(positive_count(lin.plus)));
    CHECK(positive_count(lin.minus, 1e-8) == 0);
    CHECK(crossings == (c.unstable ? 2 : 1));

    const Spectrum sp = spectrum(lin);
    CHECK(sp.unstable == c.unstable);
    CHECK(sp.symmetry_defect <= 1e-8);
    if (c.unstable) {
      CHECK(sp.real_pair > sp.tau);
      CHECK(sp.real_pair == doctest::Approx(sp.max_real_part));
    } else {
      CHECK(sp.max_real_part <= sp.tau);
    }
  }
}

TEST_CASE("mirror states have identical spectra") {
  const auto a = spectrum(reference_state("2c"), 12.0, 0.05);
  const auto b = spectrum(reference_state("2d"), 12.0, 0.05);
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  double worst = 0.0;
  for (const auto& z : a.eigenvalues) {
    // The zero mode is a Jordan block, so its cluster moves by the square
    // root of rounding errors.
    if (std::abs(z) < 1e-4) continue;
    double best = 1e300;
    for (const auto& w : b.eigenvalues) best = std::min(best, std::abs(z - w));
    worst = std::max(worst, best);
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("unstable eigenvalue is stable under grid refinement") {
  const BoundState s = reference_state("3b");
  const double coarse = spectrum(s, 8.0, 0.05).real_pair;
  const double fine = spectrum(s, 8.0, 0.025).real_pair;
  CHECK(std::abs(coarse - fine) <= 0.05 * fine);
}

TEST_CASE("the unstable mode extracted by inverse iteration") {
  const BoundState s = reference_state("2b");
  const auto lin = build_linearization(s, 12.0, 0.05);
  const auto sp = spectrum(lin);
  const auto mode = real_mode(lin, sp.real_pair);
  CHECK(mode.lambda == doctest::Approx(sp.real_pair).epsilon(1e-10));
  CHECK(mode.left.dot(mode.right) == doctest::Approx(1.0));
  CHECK((lin.block * mode.right - mode.lambda * mode.right).norm() <= 1e-8);
}

TEST_CASE("symmetric state changes verdict at the critical frequency") {
  const auto crit = critical_omega(1.0, 1.0);
  const auto symmetric = [](double omega) {
    for (const auto& s : all_states({omega, 1.0, 1.0})) {
      if (std::abs(s.u1 - s.u2) < 1e-6) return geometric_classify(s);
    }
    FAIL("no symmetric state");
    return StabilityVerdict{};
  };
  for (double d : {-1e-6, 1e-6}) {
    const auto v = symmetric(crit.omega_c + d);
    CHECK(v.boundary);
    CHECK(v.classification == Classification::P_le_1);
  }
  const auto below = symmetric(crit.omega_c - 1e-4);
  const auto above = symmetric(crit.omega_c + 1e-4);
  CHECK(below.L1 < below.Lbar1);
  CHECK(above.L1 > above.Lbar1);
  CHECK_FALSE(below.boundary);
  CHECK(below.classification == Classification::P_le_1);
  CHECK(above.classification == Classification::P_ge_2_unstable);
}

TEST_CASE("classifier rejects flows over the orbit maximum") {
  BoundState s = reference_state("2a");
  s.crosses_maximum = true;
  CHECK_THROWS_AS(geometric_classify(s), ParameterError);
  CHECK_THROWS_AS(build_linearization(s, 2.0, 0.05), ParameterError);
}

TEST_CASE("classifier is confined to tangencies left of the centre") {
  const WellParams p{1.9, 1.0, 0.95};
  const auto s = assemble(p, {1, 2}, solve_transient_energy(p, {1, 2}).at(0));
  CHECK_THROWS_AS(geometric_classify(s), ParameterError);
  // The crossing count still works and agrees with Sturm.
  const auto lin = build_linearization(s, 12.0, 0.05);
  CHECK(count_vertical_crossings(s) == static_cast<int>(positive_count(lin.plus)));
}
