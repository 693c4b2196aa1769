#include <algorithm>
#include <cmath>
#include <random>

#include "afp/cyclic.hpp"
#include "afp/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afp;
using afp::testing::load;

namespace {

const GridPlan kGrid{0.01, 1'000'000};

std::vector<double> grid(double lo, double hi) {
  std::vector<double> v;
  for (int j = static_cast<int>(std::lround(lo * 100)); j <= static_cast<int>(std::lround(hi * 100)); ++j) v.push_back(j / 100.0);
  return v;
}

// Independent sweep for T(x) = x/4 with |.| distances: x from A, y from B
// and the reverse orientation.
template <class Ratio>
double brute_sup(const std::vector<double>& a, const std::vector<double>& b, Ratio ratio) {
  double best = 0.0;
  for (double x : a)
    for (double y : b) best = std::max({best, ratio(x, y), ratio(y, x)});
  return best;
}

}  // namespace

TEST_CASE("apply_map on the bundled maps") {
  const auto e38 = load("example_3_8");
  CHECK(apply_map(e38.map, 0.8) == 0.2);

  const auto e412 = load("example_4_12");
  CHECK(apply_map(e412.map, 0.3) == 0.0);
  CHECK(apply_map(e412.map, 0.5) == 0.125);
  CHECK(apply_map(e412.map, 0.7) == 0.175);
  CHECK(apply_map(e412.map, 1.5) == 0.125);
  CHECK_THROWS_AS(apply_map(e412.map, 2.5), UnmatchedPointError);

  const auto seq = load("example_cyclic_seq");
  CHECK(apply_map(seq.map, 1.0, 0) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(apply_map(seq.map, 1.0, 1) == -0.25);
  CHECK(apply_map(seq.map, 1.0) == doctest::Approx(-0.2).epsilon(1e-15));  // first containing subset
  CHECK(apply_map(seq.map, -0.5, 0) == doctest::Approx(1.0 / 7).epsilon(1e-15));
}

TEST_CASE("every bundled map covers its grids with exactly one branch") {
  for (const char* name : {"example_3_8", "example_4_12", "example_4_15", "example_cyclic_seq"}) {
    CAPTURE(name);
    const auto l = load(name);
    const CoverageReport c = check_coverage(l.map, l.spec.grid);
    CHECK(c.unmatched.empty());
    CHECK(c.overlapping.empty());
  }
}

TEST_CASE("overlapping guards are reported") {
  const ProblemSpec s = parse_spec("[space]\nm = 1\nX1 = [0, 1]\n[map]\nbranch = [0, 0.6] : x\nbranch = [0.5, 1] : x\n[run]\nepsilon = 0.1\n");
  const CoverageReport c = check_coverage(map_from(s), kGrid);
  CHECK(c.overlapping == std::vector<double>{0.5, 0.51, 0.52, 0.53, 0.54, 0.55, 0.56, 0.57, 0.58, 0.59, 0.6});
}

TEST_CASE("cyclicity") {
  CHECK(verify_cyclicity(load("example_3_8").map, kGrid).pass());
  CHECK(verify_cyclicity(load("example_cyclic_seq").map, kGrid).pass());

  // [0.1, 0.5) is sent to 0, outside both subsets.
  const auto rep = verify_cyclicity(load("example_4_12").map, kGrid);
  CHECK(rep.violations.size() == 80);
  const auto hit = std::find_if(rep.violations.begin(), rep.violations.end(),
                                [](const CyclicityViolation& v) { return v.from_set == 0 && v.x == 0.3; });
  REQUIRE(hit != rep.violations.end());
  CHECK(hit->image == 0.0);

  // x/4 < 0.01 exactly for x < 0.04.
  const auto r415 = verify_cyclicity(load("example_4_15").map, kGrid);
  std::vector<double> xs;
  for (const auto& v : r415.violations) xs.push_back(v.x);
  CHECK(xs == std::vector<double>{0.01, 0.02, 0.03, 0.01, 0.02, 0.03});
}

TEST_CASE("GMohseni pair ratio on example_3_8 is 1/5 for every cross pair") {
  const auto l = load("example_3_8");
  for (double x : discretize(l.space().subset(0), kGrid)) {
    for (double y : discretize(l.space().subset(1), kGrid)) {
      if (x == y) continue;
      CHECK(std::abs(pair_ratio(l.space(), l.map, OperatorClass::GMohseni, x, y, 0) - 0.2) <= 1e-12);
    }
  }
}

TEST_CASE("empirical constants on example_3_8 match independent sweeps") {
  const auto l = load("example_3_8");
  const auto a = grid(0.01, 0.8), b = grid(0.01, 0.5);
  auto est = [&](OperatorClass c) { return empirical_constant(l.space(), l.map, c, kGrid, 4'000'000, 42); };

  const ClassEstimate mohseni = est(OperatorClass::GMohseni);
  CHECK(mohseni.exhaustive);
  CHECK(mohseni.pairs_examined == 2 * 80 * 50);
  CHECK(std::abs(mohseni.constant - 0.2) <= 1e-9);
  CHECK(mohseni.admissible);
  CHECK(std::abs(est(OperatorClass::GAlphaPlain).constant - 0.25) <= 1e-9);

  const double chatterjea = brute_sup(a, b, [](double x, double y) {
    const double den = std::abs(x - y / 4) + std::abs(y - x / 4);
    return den < 1e-9 ? 0.0 : std::abs(x - y) / 4 / den;
  });
  CHECK(est(OperatorClass::GChatterjea).constant == doctest::Approx(chatterjea).epsilon(1e-12));

  const double semi = brute_sup(a, b, [](double x, double y) {
    const double den = std::abs(x - y) + 0.75 * x;
    return den < 1e-9 ? 0.0 : std::abs(x - y) / 4 / den;
  });
  const ClassEstimate s = est(OperatorClass::GMohseniSemi);
  CHECK(s.constant == doctest::Approx(semi).epsilon(1e-12));
  // Attained at x = 0.01 taken from X2, y = 0.8: 0.1975 / (0.79 + 0.0075).
  CHECK(s.constant == doctest::Approx(0.1975 / 0.7975).epsilon(1e-12));
  CHECK(s.witness.x == 0.01);
  CHECK(s.witness.y == 0.8);
  CHECK(s.witness.x_set == 1);
}

TEST_CASE("inadmissible constants on example_4_12") {
  const auto l = load("example_4_12");
  const ClassEstimate m = empirical_constant(l.space(), l.map, OperatorClass::GMohseni, kGrid, 4'000'000, 42);
  // x = 0.49 -> 0, y = 0.5 -> 0.125: 0.125 / (0.01 + 0.125).
  CHECK(m.constant == doctest::Approx(0.125 / 0.135).epsilon(1e-12));
  CHECK_FALSE(m.admissible);
  const ClassEstimate c = empirical_constant(l.space(), l.map, OperatorClass::GChatterjea, kGrid, 4'000'000, 42);
  CHECK(c.constant == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c.admissible);
}

TEST_CASE("sampling: deterministic per seed, never above the exhaustive constant") {
  const auto l = load("example_4_12");
  for (OperatorClass cls : {OperatorClass::GMohseni, OperatorClass::GChatterjea, OperatorClass::GMohseniSemi}) {
    const ClassEstimate full = empirical_constant(l.space(), l.map, cls, kGrid, 4'000'000, 42);
    const ClassEstimate a = empirical_constant(l.space(), l.map, cls, kGrid, 2000, 7);
    const ClassEstimate b = empirical_constant(l.space(), l.map, cls, kGrid, 2000, 7);
    CHECK_FALSE(a.exhaustive);
    CHECK(a.pairs_examined == 2000);
    CHECK(a.constant == b.constant);
    CHECK(a.witness.x == b.witness.x);
    CHECK(a.witness.y == b.witness.y);
    CHECK(a.constant <= full.constant);
    // Refining the grid adds pairs, so the supremum cannot drop.
    const ClassEstimate fine = empirical_constant(l.space(), l.map, cls, GridPlan{0.005, 1'000'000}, 4'000'000, 42);
    CHECK(fine.constant >= full.constant - 1e-12);
  }
}

TEST_CASE("combined class fit") {
  const auto l = load("example_3_8");
  const ClassEstimate fit = fit_mohsenialhosseini(l.space(), l.map, kGrid, 4'000'000, 42);
  REQUIRE(fit.fitted);
  CHECK(fit.constant == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(fit.fitted->eta() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(verify_mohsenialhosseini(l.space(), l.map, *fit.fitted, kGrid, 4'000'000, 42).holds);
  // Any smaller eta fails somewhere.
  const double t = fit.constant * 0.99;
  const ClassParams tighter{t, 0.0, t / (1 + t)};
  const auto chk = verify_mohsenialhosseini(l.space(), l.map, tighter, kGrid, 4'000'000, 42);
  CHECK_FALSE(chk.holds);
  CHECK(chk.failures > 0);
  CHECK_FALSE(chk.failing_pairs.empty());

  const auto l412 = load("example_4_12");
  const ClassEstimate f412 = fit_mohsenialhosseini(l412.space(), l412.map, kGrid, 4'000'000, 42);
  // x = 0.3 -> 0, y = 0.8 -> 0.2: both ratios give 2/7.
  CHECK(f412.constant == doctest::Approx(2.0 / 7).epsilon(1e-12));
  CHECK(verify_mohsenialhosseini(l412.space(), l412.map, *f412.fitted, kGrid, 4'000'000, 42).holds);
}

TEST_CASE("combined check with beta = gamma = 0 and alpha = the GMohseni constant") {
  for (const char* name : {"example_3_8", "example_4_15", "example_4_12"}) {
    CAPTURE(name);
    const auto l = load(name);
    const ClassEstimate m = empirical_constant(l.space(), l.map, OperatorClass::GMohseni, kGrid, 4'000'000, 42);
    const auto chk = verify_mohsenialhosseini(l.space(), l.map, ClassParams{m.constant, 0, 0}, kGrid, 4'000'000, 42);
    CHECK(chk.holds);
    // The combined class admits alpha up to 1, so for 4_12 the check holds
    // although the GMohseni constant (about 0.926) is not admissible there.
    CHECK(m.admissible == (std::string(name) != "example_4_12"));
  }
}

TEST_CASE("contraction rates") {
  CHECK(*contraction_rate(OperatorClass::GAlphaPlain, {0.3}) == 0.3);
  CHECK(*contraction_rate(OperatorClass::GMohseni, {1.0 / 3}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(*contraction_rate(OperatorClass::GChatterjea, {0.2}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(*contraction_rate(OperatorClass::GMohseniSemi, {1.0 / 3}) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(*contraction_rate(OperatorClass::GMohsenialhosseini, {0.1, 0.2, 0.0}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_FALSE(contraction_rate(OperatorClass::GMohsenialhosseini, {0.4, 0, 0}));
  CHECK_THROWS_AS(contraction_rate(OperatorClass::GMohseni, {0.5}), ParameterError);
  CHECK_THROWS_AS(contraction_rate(OperatorClass::GAlphaPlain, {0.0}), ParameterError);
  CHECK_THROWS_AS(contraction_rate(OperatorClass::GMohsenialhosseini, {0.1, 0.5, 0}), ParameterError);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    for (OperatorClass c : {OperatorClass::GAlphaPlain, OperatorClass::GMohseni, OperatorClass::GChatterjea,
                            OperatorClass::GMohseniSemi}) {
      const double hi = class_upper_bound(c);
      const double a = std::uniform_real_distribution<double>(1e-9, hi)(rng);
      if (a >= hi) continue;
      const auto r = contraction_rate(c, {a});
      REQUIRE(r);
      CHECK(*r < 1.0);
    }
  }
}

TEST_CASE("class names round-trip") {
  for (OperatorClass c : kAllClasses) CHECK(class_from_name(class_name(c)) == c);
  CHECK_FALSE(class_from_name("GBanach"));
}
