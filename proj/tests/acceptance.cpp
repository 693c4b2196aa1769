// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "afp/atlas.hpp"
#include "afp/engine.hpp"
#include "afp/error.hpp"
#include "afp/report.hpp"
#include "support.hpp"

using namespace afp;
using afp::testing::golden_path;
using afp::testing::load;
using afp::testing::slurp;
using afp::testing::spec_path;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

// A criterion with a time limit fails when it runs over, whatever its outcome.
void criterion(int id, const char* title, const std::function<Outcome()>& body, double limit_s = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs >= limit_s) {
    o.pass = false;
    o.detail += "; over the " + format_number(limit_s) + " s limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) { return format_number(v); }

const GridPlan kGrid{0.01, 1'000'000};
constexpr std::size_t kBudget = 4'000'000;
constexpr std::uint64_t kSeed = 42;

GSpace unit_space(GMetricDef g) { return GSpace({RealSubset::interval(0, 1)}, std::move(g)); }

GMetricDef custom(const char* text) { return GMetricDef::custom(parse_expr(text, {Symbol::X, Symbol::Y, Symbol::Z})); }

std::string first_witness(const AxiomReport& r) {
  for (const AxiomVerdict& v : r.verdicts) {
    if (v.pass) continue;
    std::string s = std::string(axiom_name(v.axiom)) + " at (";
    for (std::size_t i = 0; i < v.witnesses.front().witness.size(); ++i) {
      s += (i ? ", " : "") + fmt(v.witnesses.front().witness[i]);
    }
    return s + ")";
  }
  return "none";
}

Outcome axioms() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> pts(100);
  for (double& x : pts) x = u(rng);
  const auto t0 = std::chrono::steady_clock::now();
  const AxiomReport good = check_axioms(unit_space(GMetricDef{}), pts);
  const AxiomReport zero = check_axioms(unit_space(custom("0")), pts);
  const AxiomReport zblind = check_axioms(unit_space(custom("abs(x - y)")), pts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = good.all_pass() && !zero.all_pass() && !zblind.all_pass() && secs < 10.0;
  return {ok, "builder-max " + std::string(good.all_pass() ? "passes" : "fails") + "; zero metric fails " +
                  first_witness(zero) + "; z-ignoring metric fails " + first_witness(zblind) + "; " + fmt(secs) + " s"};
}

Outcome constants() {
  const auto l = load("example_3_8");
  const ClassEstimate m = empirical_constant(l.space(), l.map, OperatorClass::GMohseni, kGrid, kBudget, kSeed);
  const ClassEstimate a = empirical_constant(l.space(), l.map, OperatorClass::GAlphaPlain, kGrid, kBudget, kSeed);
  const bool ok = m.exhaustive && a.exhaustive && std::abs(m.constant - 0.2) <= 1e-9 && std::abs(a.constant - 0.25) <= 1e-9;
  return {ok, "GMohseni " + fmt(m.constant) + ", GAlphaPlain " + fmt(a.constant) + " over " +
                  std::to_string(m.pairs_examined) + " pairs"};
}

Outcome solve_and_bound() {
  const auto l = load("example_3_8");
  SolveConfig c;
  c.epsilon = 0.01;
  c.x0 = 0.8;
  const SolveTrace t = picard_solve(l.space(), l.map, c);
  const IterationBound b = iteration_bound(0.6, 0.01, 0.5);
  const bool ok = t.hit_index == std::optional<std::size_t>(3) && b.n_star == 6;
  return {ok, "hit_index " + (t.hit_index ? std::to_string(*t.hit_index) : std::string("none")) + ", n* = " +
                  std::to_string(b.n_star)};
}

Outcome fset_closed_form() {
  const auto l = load("example_3_8");
  std::string detail;
  bool ok = true;
  for (double eps : {0.05, 0.1, 0.3}) {
    std::vector<double> expected;
    for (int j = 1; j <= 80; ++j) {
      if (j / 100.0 < 4.0 * eps / 3.0) expected.push_back(j / 100.0);
    }
    const FixedPointSet f = enumerate_fset(l.space(), l.map, eps, kGrid);
    const bool same = f.members == expected;
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + std::string("eps ") + fmt(eps) + ": " + std::to_string(f.members.size()) +
              "/" + std::to_string(expected.size()) + (same ? "" : " MISMATCH");
  }
  return {ok, detail};
}

Outcome no_exact_fixed_point() {
  const auto l = load("example_3_8");
  std::string detail;
  bool ok = true;
  for (double h : {0.01, 0.001}) {
    double lo = INFINITY;
    for (double x : union_grid(l.space(), GridPlan{h, 1'000'000})) lo = std::min(lo, displacement(l.space(), l.map, x));
    ok = ok && lo > 0.0;
    detail += (detail.empty() ? "" : ", ") + std::string("h ") + fmt(h) + ": min displacement " + fmt(lo);
  }
  return {ok, detail};
}

Outcome diameters() {
  std::string detail;
  bool ok = true;
  auto run = [&](const char* name, OperatorClass cls, const ClassParams& p, double factor) {
    const auto l = load(name);
    for (double eps : l.spec.epsilons) {
      const DiameterReport r = verify_diameter(l.space(), l.map, cls, p, eps, kGrid);
      const double limit = factor > 0 ? factor * eps : r.bound;
      const bool pass = r.measured.delta_pair <= limit + kDiameterMargin &&
                        r.measured.delta_triple <= limit + kDiameterMargin && r.pass;
      ok = ok && pass;
      if (!pass) detail += std::string(name) + " " + class_name(cls) + " eps " + fmt(eps) + " exceeds; ";
    }
  };
  run("example_3_8", OperatorClass::GMohseni, {1.0 / 3}, 8.0);
  run("example_4_15", OperatorClass::GMohseniSemi, {1.0 / 3}, 3.5);
  for (const char* name : {"example_3_8", "example_4_12", "example_4_15"}) {
    const auto l = load(name);
    const ClassEstimate fit = fit_mohsenialhosseini(l.space(), l.map, kGrid, kBudget, kSeed);
    if (!fit.admissible || !fit.fitted) {
      ok = false;
      detail += std::string(name) + " GMohsenialhosseini not admissible; ";
      continue;
    }
    run(name, OperatorClass::GMohsenialhosseini, *fit.fitted, 0.0);
    detail += std::string(name) + " eta " + fmt(fit.constant) + "; ";
  }
  return {ok, detail + "all within bound"};
}

Outcome decay_envelope() {
  std::string detail;
  bool ok = true;
  std::size_t traces = 0, faults = 0;
  for (const char* name : {"example_3_8", "example_4_15"}) {
    const auto l = load(name);
    for (OperatorClass cls : kAllClasses) {
      ClassEstimate est = cls == OperatorClass::GMohsenialhosseini
                              ? fit_mohsenialhosseini(l.space(), l.map, kGrid, kBudget, kSeed)
                              : empirical_constant(l.space(), l.map, cls, kGrid, kBudget, kSeed);
      if (!est.admissible) continue;
      const ClassParams p = est.fitted ? *est.fitted : ClassParams{fitted_parameter(cls, est.constant), 0, 0};
      const auto rate = contraction_rate(cls, p);
      if (!rate) continue;
      double worst = 0.0;
      for (std::size_t i = 0; i < l.map.size(); ++i) {
        for (double x : discretize(l.space().subset(i), kGrid)) {
          for (double eps : l.spec.epsilons) {
            SolveConfig c;
            c.epsilon = eps;
            c.x0 = x;
            c.start_set = i;
            SolveTrace t;
            try {
              t = picard_solve(l.space(), l.map, c);
            } catch (const OrbitError&) {
              ++faults;
              continue;
            }
            ++traces;
            for (double r : t.decay_ratios) worst = std::max(worst, r);
          }
        }
      }
      const bool pass = worst <= *rate + 1e-9;
      ok = ok && pass;
      detail += std::string(name) + " " + class_name(cls) + " " + fmt(worst) + " <= " + fmt(*rate) + (pass ? "; " : " VIOLATED; ");
    }
  }
  return {ok && faults == 0, detail + std::to_string(traces) + " traces, " + std::to_string(faults) + " orbit faults"};
}

Outcome power() {
  const auto l = load("example_3_8");
  SolveConfig c;
  c.epsilon = 0.1;
  c.x0 = 0.8;
  const SolveTrace t2 = power_solve(l.space(), l.map, 2, c);
  bool same = true;
  for (double eps : l.spec.epsilons) {
    c.epsilon = eps;
    const SolveTrace a = picard_solve(l.space(), l.map, c);
    const SolveTrace b = power_solve(l.space(), l.map, 1, c);
    same = same && a.iterates == b.iterates && a.displacements == b.displacements && a.hit_index == b.hit_index;
  }
  const bool ok = t2.hit_index == std::optional<std::size_t>(2) && same;
  return {ok, "k = 2 hit " + (t2.hit_index ? std::to_string(*t2.hit_index) : std::string("none")) +
                  (same ? ", k = 1 trace identical to picard" : ", k = 1 trace differs from picard")};
}

Outcome cyclicity_warning() {
  const RunReport r = execute(Command::Check, spec_path("example_4_12"), {});
  bool witness = false;
  std::string message;
  for (const Warning& w : r.warnings) {
    if (w.code != "cyclicity") continue;
    for (const auto& x : w.witnesses) {
      if (x["x"].get<double>() == 0.3 && x["image"].get<double>() == 0.0 && x["to"] == "X2") {
        witness = true;
        message = w.message;
      }
    }
  }
  const bool names_target = message.find("[0.1, 1]") != std::string::npos;
  RunFlags strict;
  strict.strict = true;
  const int strict_exit = execute(Command::Check, spec_path("example_4_12"), strict).exit_code;
  const bool ok = r.exit_code == 0 && witness && names_target && strict_exit == 1;
  return {ok, "exit " + std::to_string(r.exit_code) + ", witness 0.3 -> 0 " + (witness ? "found" : "missing") +
                  ", --strict exit " + std::to_string(strict_exit)};
}

Outcome round_trip() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"example_3_8", "example_4_12", "example_4_15", "example_cyclic_seq"}) {
    const ProblemSpec s = load_spec(spec_path(name));
    const std::string text = serialize_spec(s);
    const ProblemSpec back = parse_spec(text);
    const bool pass = back == s && serialize_spec(back) == text &&
                      text == slurp(golden_path(std::string("canonical/") + name + ".afp"));
    ok = ok && pass;
    if (!pass) detail += std::string(name) + " differs; ";
  }
  std::size_t malformed = 0, matched = 0;
  for (const auto& entry : std::filesystem::directory_iterator(golden_path("malformed"))) {
    if (entry.path().extension() != ".afp") continue;
    ++malformed;
    std::string expected = slurp(std::filesystem::path(entry.path()).replace_extension(".err").string());
    while (!expected.empty() && expected.back() == '\n') expected.pop_back();
    try {
      parse_spec(slurp(entry.path().string()));
    } catch (const ParseError& e) {
      if (e.what() == expected) ++matched;
    }
  }
  ok = ok && malformed > 0 && matched == malformed;
  return {ok, detail + "4 bundled specs byte-identical after round trip; malformed " + std::to_string(matched) + "/" +
                  std::to_string(malformed) + " errors match"};
}

}  // namespace

int main() {
  criterion(1, "G-metric axioms", axioms, 10);
  criterion(2, "class constants of example_3_8", constants, 30);
  criterion(3, "picard hit index and iteration bound", solve_and_bound, 1);
  criterion(4, "epsilon-fixed sets match (0, 4eps/3)", fset_closed_form);
  criterion(5, "no exact fixed point on the grid", no_exact_fixed_point);
  criterion(6, "diameter bounds", diameters, 60);
  criterion(7, "decay ratios within contraction rates", decay_envelope);
  criterion(8, "power iteration", power);
  criterion(9, "cyclicity warning and strict mode", cyclicity_warning);
  criterion(10, "spec round trip and malformed goldens", round_trip);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
