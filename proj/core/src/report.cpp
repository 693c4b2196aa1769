#include "afp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "afp/atlas.hpp"
#include "afp/engine.hpp"
#include "afp/error.hpp"

namespace afp {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, const char*>, 6> kCommands{{{Command::Check, "check"},
                                                                     {Command::Classify, "classify"},
                                                                     {Command::Solve, "solve"},
                                                                     {Command::Fset, "fset"},
                                                                     {Command::Verify, "verify"},
                                                                     {Command::Report, "report"}}};

// Starting points examined by `verify`, strided over all subset grids.
constexpr std::size_t kMaxStarts = 1000;
// Points fed to the axiom check; G5 costs |sample|^4.
constexpr std::size_t kAxiomSample = 64;
constexpr double kEnvelopeMargin = 1e-9;
constexpr std::size_t kWitnessCap = 64;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string set_name(std::size_t i) { return "X" + std::to_string(i + 1); }

json fault_json(const std::exception& e) {
  json j;
  j["message"] = e.what();
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["kind"] = "parse";
    j["line"] = p->line();
    j["column"] = p->column();
    j["key"] = p->key();
  } else if (const auto* ev = dynamic_cast<const EvalError*>(&e)) {
    j["kind"] = "eval";
    j["at"] = num(ev->at());
  } else if (const auto* o = dynamic_cast<const OrbitError*>(&e)) {
    j["kind"] = "orbit";
    j["iterate"] = o->iterate();
    j["x"] = num(o->x());
  } else if (const auto* u = dynamic_cast<const UnmatchedPointError*>(&e)) {
    j["kind"] = "unmatched";
    j["x"] = num(u->x());
  } else if (dynamic_cast<const DomainError*>(&e)) {
    j["kind"] = "domain";
  } else if (dynamic_cast<const ParameterError*>(&e)) {
    j["kind"] = "parameter";
  } else if (dynamic_cast<const UnsupportedClassError*>(&e)) {
    j["kind"] = "unsupported_class";
  } else {
    j["kind"] = "internal";
  }
  return j;
}

std::vector<double> strided(const std::vector<double>& pts, std::size_t cap) {
  if (pts.size() <= cap) return pts;
  std::vector<double> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) out.push_back(pts[i * (pts.size() - 1) / (cap - 1)]);
  return out;
}

json params_json(const ClassParams& p) {
  return {{"alpha", num(p.alpha)}, {"beta", num(p.beta)}, {"gamma", num(p.gamma)}};
}

class Run {
 public:
  Run(const ProblemSpec& spec, const RunFlags& flags, RunReport& report)
      : spec_(spec),
        flags_(flags),
        report_(report),
        plan_{flags.grid.value_or(spec.grid.h), spec.grid.max_points},
        budget_(flags.budget.value_or(spec.budget)),
        seed_(flags.seed.value_or(spec.seed)),
        space_(spec.subsets, spec.gmetric, sample_for_symmetry(spec, plan_)),
        map_(space_, spec.map) {
    if (!(plan_.h > 0.0)) throw ParameterError("grid step must be positive");
    if (budget_ == 0) throw ParameterError("budget must be at least 1");
  }

  json settings() const {
    json s;
    s["grid"] = plan_.h;
    s["max_points"] = plan_.max_points;
    s["budget"] = budget_;
    s["seed"] = seed_;
    s["strict"] = flags_.strict;
    s["epsilon"] = flags_.epsilon ? json(*flags_.epsilon) : json(nullptr);
    s["x0"] = flags_.x0 ? json(*flags_.x0) : json(nullptr);
    s["k"] = flags_.k ? json(*flags_.k) : json(nullptr);
    return s;
  }

  json check() {
    json out;
    out["axioms"] = axioms(true);
    out["coverage"] = coverage();
    out["cyclicity"] = cyclicity();
    return out;
  }

  // Commands other than `check` refuse a custom G that breaks the axioms.
  bool gmetric_usable() {
    if (space_.gmetric().is_builder()) return true;
    const json a = axioms(false);
    if (a["pass"].get<bool>()) return true;
    fail("custom G-metric " + space_.gmetric().str() + " violates the G-metric axioms; run `check` for witnesses");
    return false;
  }

  json classify() {
    json out = json::array();
    for (const ClassEstimate& est : estimates()) out.push_back(estimate_json(est));
    return out;
  }

  json solve() {
    const double eps = flags_.epsilon.value_or(spec_.epsilons.front());
    if (!flags_.x0 && !spec_.solver.x0) throw ParameterError("no starting point: pass --x0 or set x0 in [run]");
    const std::size_t k = flags_.k.value_or(1);
    SolveConfig cfg;
    cfg.epsilon = eps;
    cfg.x0 = flags_.x0 ? *flags_.x0 : *spec_.solver.x0;
    cfg.max_iter = spec_.solver.max_iter;
    cfg.divergence_factor = spec_.solver.divergence_factor;
    SolveTrace trace = k == 1 ? picard_solve(space_, map_, cfg) : power_solve(space_, map_, k, cfg);

    json out;
    out["epsilon"] = eps;
    out["x0"] = cfg.x0;
    out["k"] = k;
    out["outcome"] = outcome_name(trace.outcome);
    out["hit_index"] = trace.hit_index ? json(*trace.hit_index) : json(nullptr);
    out["iterations"] = trace.displacements.size();
    out["final_iterate"] = num(trace.iterates.back());
    out["final_displacement"] = num(trace.displacements.back());
    out["max_decay_ratio"] =
        trace.decay_ratios.empty() ? json(nullptr) : num(*std::max_element(trace.decay_ratios.begin(), trace.decay_ratios.end()));
    out["bound"] = nullptr;

    if (k == 1) {
      if (auto rate = declared_rate()) {
        attach_bound(trace, *rate);
        const bool respected = !trace.hit_index || *trace.hit_index <= trace.bound->n_star;
        out["bound"] = {{"class", class_name(*spec_.declared_class)},
                        {"rate", trace.bound->rate},
                        {"delta0", trace.bound->delta0},
                        {"n_star", trace.bound->n_star},
                        {"respected", respected}};
        if (!respected) {
          fail("hit index " + std::to_string(*trace.hit_index) + " exceeds the iteration bound n* = " +
               std::to_string(trace.bound->n_star));
        }
      }
    }
    if (trace.outcome == SolveOutcome::NoHit) {
      fail("no " + format_number(eps) + "-fixed point within " + std::to_string(cfg.max_iter) + " iterations");
    } else if (trace.outcome == SolveOutcome::Diverged) {
      fail("orbit diverged: displacement " + format_number(trace.displacements.back()) + " exceeds " +
           format_number(cfg.divergence_factor) + " times the initial displacement");
    }
    if (flags_.csv_path) {
      std::ostringstream os;
      write_trace_csv(os, trace);
      csv_ = os.str();
    }
    return out;
  }

  json fset() {
    json out = json::array();
    std::ostringstream csv;
    csv << "epsilon,x\n";
    for (double eps : epsilons()) {
      const FixedPointSet f = enumerate_fset(space_, map_, eps, plan_);
      json e;
      e["epsilon"] = eps;
      e["grid_size"] = f.grid_size;
      e["count"] = f.members.size();
      e["members"] = f.members;
      if (f.members.empty()) {
        e["min"] = e["max"] = e["delta_pair"] = e["delta_triple"] = nullptr;
        e["approximate"] = false;
      } else {
        const Diameters d = set_diameter(space_, f, kDefaultTripleBudget, seed_);
        e["min"] = f.members.front();
        e["max"] = f.members.back();
        e["delta_pair"] = num(d.delta_pair);
        e["delta_triple"] = num(d.delta_triple);
        e["approximate"] = d.approximate;
      }
      for (double x : f.members) csv << format_number(eps) << ',' << format_number(x) << '\n';
      out.push_back(std::move(e));
    }
    if (flags_.csv_path) csv_ = csv.str();
    return out;
  }

  json verify() {
    json out;
    out["classes"] = classify();
    out["declared"] = declared();
    out["solves"] = grid_solves();
    out["diameters"] = diameters();
    out["cyclicity"] = cyclicity();
    return out;
  }

  const std::optional<std::string>& csv() const { return csv_; }

  void warn(std::string code, std::string message, json witnesses = json::array()) {
    report_.warnings.push_back({std::move(code), std::move(message), std::move(witnesses)});
  }
  void fail(std::string message) { report_.failures.push_back(std::move(message)); }

 private:
  static std::vector<double> sample_for_symmetry(const ProblemSpec& spec, const GridPlan& plan) {
    if (spec.gmetric.is_builder()) return {};
    GSpace probe(spec.subsets, GMetricDef{});
    return strided(union_grid(probe, plan), kAxiomSample);
  }

  std::vector<double> epsilons() const {
    if (flags_.epsilon) return {*flags_.epsilon};
    return spec_.epsilons;
  }

  ClassParams declared_params() const {
    return {spec_.alpha ? spec_.alpha->value : 0.0, spec_.beta ? spec_.beta->value : 0.0,
            spec_.gamma ? spec_.gamma->value : 0.0};
  }

  // Rate from the declared class and parameters, when both are usable.
  std::optional<double> declared_rate() {
    if (!spec_.declared_class) return std::nullopt;
    try {
      auto r = contraction_rate(*spec_.declared_class, declared_params());
      if (!r) warn("rate", std::string("declared ") + class_name(*spec_.declared_class) + " parameters give a rate >= 1");
      return r;
    } catch (const ParameterError& e) {
      warn("parameters", e.what());
      return std::nullopt;
    }
  }

  json axioms(bool record) {
    const auto sample = strided(union_grid(space_, plan_), kAxiomSample);
    const AxiomReport rep = check_axioms(space_, sample);
    json out;
    out["sample_size"] = rep.sample_size;
    out["tol"] = rep.tol;
    out["pass"] = rep.all_pass();
    out["verdicts"] = json::array();
    for (const AxiomVerdict& v : rep.verdicts) {
      json w = json::array();
      for (const AxiomViolation& viol : v.witnesses) w.push_back({{"point", viol.witness}, {"lhs", num(viol.lhs)}, {"rhs", num(viol.rhs)}});
      out["verdicts"].push_back({{"axiom", axiom_name(v.axiom)},
                                 {"pass", v.pass},
                                 {"checked", v.checked},
                                 {"violations", v.violations},
                                 {"witnesses", std::move(w)}});
      if (record && !v.pass) {
        const auto& first = v.witnesses.front();
        std::string at;
        for (double c : first.witness) at += (at.empty() ? "" : ", ") + format_number(c);
        fail(std::string(axiom_name(v.axiom)) + " fails on " + std::to_string(v.violations) + " tuples, first at (" + at +
             "): " + format_number(first.lhs) + " vs " + format_number(first.rhs));
      }
    }
    return out;
  }

  json coverage() {
    const CoverageReport rep = check_coverage(map_, plan_);
    auto capped = [](const std::vector<double>& v) {
      return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(v.size(), kWitnessCap)));
    };
    json out{{"pass", rep.pass()},
             {"unmatched", rep.unmatched.size()},
             {"overlapping", rep.overlapping.size()},
             {"unmatched_points", capped(rep.unmatched)},
             {"overlapping_points", capped(rep.overlapping)}};
    if (!rep.unmatched.empty()) {
      warn("coverage", std::to_string(rep.unmatched.size()) + " grid points match no branch, first x = " +
                           format_number(rep.unmatched.front()),
           capped(rep.unmatched));
    }
    if (!rep.overlapping.empty()) {
      warn("coverage", std::to_string(rep.overlapping.size()) + " grid points match several branches, first x = " +
                           format_number(rep.overlapping.front()),
           capped(rep.overlapping));
    }
    return out;
  }

  json cyclicity() {
    if (cyclicity_) return *cyclicity_;
    const CyclicityReport rep = verify_cyclicity(map_, plan_);
    json out{{"pass", rep.pass()}, {"points_checked", rep.points_checked}, {"violations", rep.violations.size()}};
    std::map<std::size_t, std::vector<const CyclicityViolation*>> by_set;
    for (const auto& v : rep.violations) by_set[v.from_set].push_back(&v);
    for (const auto& [from, list] : by_set) {
      const std::size_t to = (from + 1) % map_.size();
      json w = json::array();
      for (const CyclicityViolation* v : list) {
        w.push_back({{"from", set_name(from)}, {"to", set_name(to)}, {"x", v->x}, {"image", v->image ? num(*v->image) : json(nullptr)}});
      }
      const CyclicityViolation& first = *list.front();
      const std::string image = first.image ? format_number(*first.image) : "undefined";
      warn("cyclicity",
           "T maps " + std::to_string(list.size()) + " grid points of " + set_name(from) + " outside " + set_name(to) +
               " = " + map_.domain().subset(to).str() + ", first: " + format_number(first.x) + " -> " + image,
           std::move(w));
    }
    cyclicity_ = out;
    return out;
  }

  const std::vector<ClassEstimate>& estimates() {
    if (estimates_.empty()) {
      for (OperatorClass c : kAllClasses) {
        estimates_.push_back(empirical_constant(space_, map_, c, plan_, budget_, seed_));
        if (!estimates_.back().exhaustive) {
          warn("sampled", std::string(class_name(c)) + " constant is a sampled lower bound (" +
                              std::to_string(estimates_.back().pairs_examined) + " pairs)");
        }
      }
    }
    return estimates_;
  }

  const ClassEstimate& estimate(OperatorClass c) { return estimates()[static_cast<std::size_t>(c)]; }

  std::optional<ClassParams> fitted_params(const ClassEstimate& est) const {
    if (!est.admissible) return std::nullopt;
    if (est.fitted) return est.fitted;
    return ClassParams{fitted_parameter(est.cls, est.constant), 0.0, 0.0};
  }

  json estimate_json(const ClassEstimate& est) {
    json e;
    e["class"] = class_name(est.cls);
    e["constant"] = num(est.constant);
    e["admissible"] = est.admissible;
    e["upper_bound"] = class_upper_bound(est.cls);
    e["witness"] = {{"x", est.witness.x}, {"y", est.witness.y}, {"from", set_name(est.witness.x_set)}};
    e["pairs_examined"] = est.pairs_examined;
    e["exhaustive"] = est.exhaustive;
    e["params"] = nullptr;
    e["rate"] = nullptr;
    if (auto p = fitted_params(est)) {
      e["params"] = params_json(*p);
      const auto rate = contraction_rate(est.cls, *p);
      e["rate"] = rate ? json(*rate) : json(nullptr);
      if (!rate) warn("rate", std::string(class_name(est.cls)) + " fitted parameters give a rate >= 1");
      if (est.cls == OperatorClass::GMohsenialhosseini) {
        const auto chk = verify_mohsenialhosseini(space_, map_, *p, plan_, budget_, seed_);
        e["eta"] = chk.eta;
        e["fitted_check"] = {{"holds", chk.holds}, {"failures", chk.failures}, {"rate_condition", chk.rate_condition}};
        if (!chk.holds) fail("fitted GMohsenialhosseini parameters fail on " + std::to_string(chk.failures) + " pairs");
      }
    }
    return e;
  }

  json declared() {
    if (!spec_.declared_class) return nullptr;
    const OperatorClass cls = *spec_.declared_class;
    const ClassParams p = declared_params();
    json out;
    out["class"] = class_name(cls);
    out["params"] = params_json(p);
    try {
      validate_params(cls, p);
    } catch (const ParameterError& e) {
      out["valid"] = false;
      fail(std::string("declared parameters: ") + e.what());
      return out;
    }
    out["valid"] = true;
    bool holds = false;
    if (cls == OperatorClass::GMohsenialhosseini) {
      const auto chk = verify_mohsenialhosseini(space_, map_, p, plan_, budget_, seed_);
      holds = chk.holds;
      out["failures"] = chk.failures;
    } else {
      const ClassEstimate& est = estimate(cls);
      holds = est.constant <= p.alpha + kEnvelopeMargin;
      out["constant"] = num(est.constant);
      if (!holds) {
        fail(std::string("declared ") + class_name(cls) + " alpha = " + format_number(p.alpha) +
             " is below the empirical constant " + format_number(est.constant) + " at (x, y) = (" +
             format_number(est.witness.x) + ", " + format_number(est.witness.y) + ")");
      }
    }
    out["holds"] = holds;
    const auto rate = contraction_rate(cls, p);
    out["rate"] = rate ? json(*rate) : json(nullptr);
    if (!rate) warn("rate", std::string("declared ") + class_name(cls) + " parameters give a rate >= 1");
    if (holds && rate) declared_rate_ = rate;
    return out;
  }

  struct Envelope {
    std::string label;
    OperatorClass cls;
    double rate;
    double max_ratio = 0.0;
    std::size_t decay_violations = 0;
    std::size_t bound_violations = 0;
    json first_violation = nullptr;
  };

  json grid_solves() {
    std::vector<std::pair<double, std::size_t>> starts;
    for (std::size_t i = 0; i < map_.size(); ++i) {
      for (double x : discretize(map_.domain().subset(i), plan_)) starts.emplace_back(x, i);
    }
    if (starts.size() > kMaxStarts) {
      std::vector<std::pair<double, std::size_t>> picked;
      for (std::size_t j = 0; j < kMaxStarts; ++j) picked.push_back(starts[j * (starts.size() - 1) / (kMaxStarts - 1)]);
      starts = std::move(picked);
    }

    std::vector<Envelope> envs;
    for (const ClassEstimate& est : estimates()) {
      if (auto p = fitted_params(est)) {
        if (auto r = contraction_rate(est.cls, *p)) envs.push_back({"fitted", est.cls, *r});
      }
    }
    if (declared_rate_) envs.push_back({"declared", *spec_.declared_class, *declared_rate_});

    std::size_t traces = 0, hits = 0, misses = 0, faults = 0;
    json fault_witnesses = json::array();
    std::string first_fault;
    for (double eps : epsilons()) {
      for (const auto& [x, i] : starts) {
        SolveConfig cfg;
        cfg.epsilon = eps;
        cfg.x0 = x;
        cfg.start_set = i;
        cfg.max_iter = spec_.solver.max_iter;
        cfg.divergence_factor = spec_.solver.divergence_factor;
        SolveTrace t;
        try {
          t = picard_solve(space_, map_, cfg);
        } catch (const OrbitError& e) {
          if (faults == 0) first_fault = e.what();
          ++faults;
          if (fault_witnesses.size() < kWitnessCap) {
            fault_witnesses.push_back({{"epsilon", eps}, {"x0", x}, {"from", set_name(i)}, {"iterate", e.iterate()}, {"x", num(e.x())}});
          }
          continue;
        }
        ++traces;
        if (t.hit_index) ++hits; else ++misses;
        for (Envelope& env : envs) {
          for (std::size_t n = 0; n < t.decay_ratios.size(); ++n) {
            const double r = t.decay_ratios[n];
            env.max_ratio = std::max(env.max_ratio, r);
            if (r > env.rate + kEnvelopeMargin) {
              if (env.decay_violations++ == 0) {
                env.first_violation = {{"epsilon", eps}, {"x0", x}, {"n", n + 1}, {"ratio", r}};
              }
            }
          }
          if (t.hit_index) {
            const auto b = iteration_bound(t.displacements.front(), eps, env.rate);
            if (*t.hit_index > b.n_star) ++env.bound_violations;
          }
        }
      }
    }
    if (faults > 0) {
      warn("orbit", std::to_string(faults) + " grid starts left the cyclic domain, first: " + first_fault,
           std::move(fault_witnesses));
    }
    if (misses > 0) fail(std::to_string(misses) + " grid starts found no epsilon-fixed point");

    json out;
    out["starts"] = starts.size();
    out["epsilons"] = epsilons();
    out["traces"] = traces;
    out["hits"] = hits;
    out["orbit_faults"] = faults;
    out["envelopes"] = json::array();
    for (const Envelope& env : envs) {
      const bool pass = env.decay_violations == 0 && env.bound_violations == 0;
      out["envelopes"].push_back({{"class", class_name(env.cls)},
                                  {"source", env.label},
                                  {"rate", env.rate},
                                  {"max_decay_ratio", env.max_ratio},
                                  {"decay_violations", env.decay_violations},
                                  {"bound_violations", env.bound_violations},
                                  {"first_violation", env.first_violation},
                                  {"pass", pass}});
      if (!pass) {
        fail(std::string(class_name(env.cls)) + " (" + env.label + ") rate " + format_number(env.rate) + ": " +
             std::to_string(env.decay_violations) + " decay ratios above the rate, " +
             std::to_string(env.bound_violations) + " hits beyond n*");
      }
    }
    return out;
  }

  json diameters() {
    std::vector<std::tuple<std::string, OperatorClass, ClassParams>> cases;
    for (OperatorClass c : {OperatorClass::GMohseni, OperatorClass::GMohsenialhosseini, OperatorClass::GMohseniSemi}) {
      if (auto p = fitted_params(estimate(c))) cases.emplace_back("fitted", c, *p);
    }
    if (declared_rate_ && *spec_.declared_class != OperatorClass::GAlphaPlain &&
        *spec_.declared_class != OperatorClass::GChatterjea) {
      cases.emplace_back("declared", *spec_.declared_class, declared_params());
    }
    json out = json::array();
    for (double eps : epsilons()) {
      for (const auto& [label, cls, p] : cases) {
        DiameterReport r;
        try {
          r = verify_diameter(space_, map_, cls, p, eps, plan_, kDefaultTripleBudget, seed_);
        } catch (const ParameterError& e) {
          warn("parameters", std::string(class_name(cls)) + " diameter bound skipped: " + e.what());
          continue;
        }
        out.push_back({{"class", class_name(cls)},
                       {"source", label},
                       {"params", params_json(p)},
                       {"epsilon", eps},
                       {"bound", num(r.bound)},
                       {"members", r.members},
                       {"delta_pair", num(r.measured.delta_pair)},
                       {"delta_triple", num(r.measured.delta_triple)},
                       {"approximate", r.measured.approximate},
                       {"empty", r.empty},
                       {"pass", r.pass}});
        if (r.empty) {
          warn("vacuous_diameter", std::string(class_name(cls)) + " (" + label + ") diameter check at epsilon = " +
                                       format_number(eps) + " is vacuous: no grid point is epsilon-fixed",
               json::array({{{"epsilon", eps}}}));
        } else if (!r.pass) {
          fail(std::string(class_name(cls)) + " (" + label + ") diameter at epsilon = " + format_number(eps) +
               " exceeds its bound " + format_number(r.bound));
        }
      }
    }
    return out;
  }

  const ProblemSpec& spec_;
  const RunFlags& flags_;
  RunReport& report_;
  GridPlan plan_;
  std::size_t budget_;
  std::uint64_t seed_;
  GSpace space_;
  CyclicMap map_;
  std::vector<ClassEstimate> estimates_;
  std::optional<json> cyclicity_;
  std::optional<double> declared_rate_;
  std::optional<std::string> csv_;
};

void run_command(Command command, Run& run, RunReport& report) {
  switch (command) {
    case Command::Check: report.results["check"] = run.check(); return;
    case Command::Classify:
      if (run.gmetric_usable()) report.results["classify"] = run.classify();
      return;
    case Command::Solve:
      if (run.gmetric_usable()) report.results["solve"] = run.solve();
      return;
    case Command::Fset:
      if (run.gmetric_usable()) report.results["fset"] = run.fset();
      return;
    case Command::Verify:
      if (run.gmetric_usable()) report.results["verify"] = run.verify();
      return;
    case Command::Report: break;
  }
  // Each section runs even if an earlier one faulted; faults become failures.
  using Section = std::pair<const char*, std::function<json()>>;
  const std::vector<Section> sections{{"check", [&] { return run.check(); }},
                                      {"solve", [&] { return run.solve(); }},
                                      {"fset", [&] { return run.fset(); }},
                                      {"verify", [&] { return run.verify(); }}};
  if (!run.gmetric_usable()) {
    report.results["check"] = run.check();
    return;
  }
  for (const auto& [name, fn] : sections) {
    try {
      report.results[name] = fn();
    } catch (const Error& e) {
      report.results[name] = {{"error", fault_json(e)}};
      run.fail(std::string(name) + ": " + e.what());
    }
  }
}

}  // namespace

const char* command_name(Command c) noexcept {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::optional<Command> command_from_name(std::string_view name) {
  for (const auto& [cmd, n] : kCommands) {
    if (name == n) return cmd;
  }
  return std::nullopt;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json RunReport::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["spec_digest"] = spec_digest;
  j["command"] = command_name(command);
  j["settings"] = settings;
  j["results"] = results;
  j["warnings"] = json::array();
  for (const Warning& w : warnings) j["warnings"].push_back({{"code", w.code}, {"message", w.message}, {"witnesses", w.witnesses}});
  j["failures"] = failures;
  j["error"] = error ? *error : json(nullptr);
  j["exit_code"] = exit_code;
  return j;
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move report into place at '" + path.string() + "'");
  }
}

RunReport execute_text(Command command, std::string_view spec_text, const RunFlags& flags) {
  RunReport report;
  report.command = command;
  std::optional<std::string> csv;
  try {
    const ProblemSpec spec = parse_spec(spec_text);
    report.spec_digest = fnv1a_hex(serialize_spec(spec));
    Run run(spec, flags, report);
    report.settings = run.settings();
    run_command(command, run, report);
    csv = run.csv();
  } catch (const ParseError& e) {
    report.error = fault_json(e);
    report.exit_code = kExitParse;
  } catch (const Error& e) {
    report.error = fault_json(e);
    report.exit_code = kExitFault;
  }

  if (!report.error) {
    if (!report.failures.empty()) {
      report.exit_code = kExitFailed;
    } else if (flags.strict && !report.warnings.empty()) {
      report.failures.push_back("strict: " + std::to_string(report.warnings.size()) + " warnings treated as failures");
      report.exit_code = kExitFailed;
    }
  }

  try {
    if (flags.csv_path && csv) write_atomically(*flags.csv_path, *csv);
    if (flags.json_path) write_atomically(*flags.json_path, report.to_json().dump(2) + "\n");
  } catch (const Error& e) {
    json err = fault_json(e);
    err["kind"] = "io";
    report.error = err;
    report.exit_code = kExitFault;
  }
  return report;
}

RunReport execute(Command command, const std::filesystem::path& spec_path, const RunFlags& flags) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    RunReport report;
    report.command = command;
    report.error = json{{"kind", "io"}, {"message", "cannot open problem file '" + spec_path.string() + "'"}};
    report.exit_code = kExitParse;
    return report;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return execute_text(command, ss.str(), flags);
}

// ---------------------------------------------------------------- text

namespace {

std::string fmt(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render_check(std::ostream& os, const json& c) {
  const json& ax = c["axioms"];
  os << "axioms: " << (ax["pass"].get<bool>() ? "pass" : "FAIL") << " on " << fmt(ax["sample_size"]) << " points\n";
  for (const json& v : ax["verdicts"]) {
    os << "  " << fmt(v["axiom"]) << "  " << (v["pass"].get<bool>() ? "ok  " : "FAIL") << "  checked " << fmt(v["checked"]);
    if (!v["pass"].get<bool>()) os << ", " << fmt(v["violations"]) << " violations";
    os << "\n";
  }
  os << "coverage: " << (c["coverage"]["pass"].get<bool>() ? "every grid point matches one branch" : "see warnings") << "\n";
  os << "cyclicity: " << fmt(c["cyclicity"]["violations"]) << " violations\n";
}

void render_classes(std::ostream& os, const json& classes) {
  os << "classes:\n";
  for (const json& e : classes) {
    os << "  " << fmt(e["class"]);
    for (std::size_t pad = e["class"].get<std::string>().size(); pad < 20; ++pad) os << ' ';
    os << "constant " << fmt(e["constant"]) << (e["exhaustive"].get<bool>() ? "" : " (sampled)")
       << (e["admissible"].get<bool>() ? "  admissible" : "  not admissible");
    if (!e["rate"].is_null()) os << "  rate " << fmt(e["rate"]);
    os << "  witness (" << fmt(e["witness"]["x"]) << ", " << fmt(e["witness"]["y"]) << ")\n";
  }
}

void render_solve(std::ostream& os, const json& s) {
  if (s.contains("error")) {
    os << "solve: fault: " << fmt(s["error"]["message"]) << "\n";
    return;
  }
  os << "solve: epsilon " << fmt(s["epsilon"]) << ", x0 " << fmt(s["x0"]) << ", k " << fmt(s["k"]) << ": "
     << fmt(s["outcome"]);
  if (!s["hit_index"].is_null()) os << " at n = " << fmt(s["hit_index"]);
  os << ", x_n " << fmt(s["final_iterate"]) << ", delta_n " << fmt(s["final_displacement"]) << "\n";
  if (!s["bound"].is_null()) {
    const json& b = s["bound"];
    os << "  bound (" << fmt(b["class"]) << ", rate " << fmt(b["rate"]) << "): n* = " << fmt(b["n_star"])
       << (b["respected"].get<bool>() ? ", respected" : ", VIOLATED") << "\n";
  }
}

void render_fset(std::ostream& os, const json& list) {
  if (list.is_object() && list.contains("error")) {
    os << "fset: fault: " << fmt(list["error"]["message"]) << "\n";
    return;
  }
  for (const json& e : list) {
    os << "F_eps at epsilon " << fmt(e["epsilon"]) << ": " << fmt(e["count"]) << " of " << fmt(e["grid_size"]) << " grid points";
    if (!e["min"].is_null()) {
      os << " in [" << fmt(e["min"]) << ", " << fmt(e["max"]) << "], delta_pair " << fmt(e["delta_pair"])
         << ", delta_triple " << fmt(e["delta_triple"]) << (e["approximate"].get<bool>() ? " (sampled)" : "");
    }
    os << "\n";
  }
}

void render_verify(std::ostream& os, const json& v) {
  if (v.contains("error")) {
    os << "verify: fault: " << fmt(v["error"]["message"]) << "\n";
    return;
  }
  render_classes(os, v["classes"]);
  if (!v["declared"].is_null()) {
    const json& d = v["declared"];
    os << "declared: " << fmt(d["class"]) << " alpha " << fmt(d["params"]["alpha"]);
    if (d.contains("holds")) os << (d["holds"].get<bool>() ? " holds" : " does NOT hold");
    if (d.contains("rate")) os << ", rate " << fmt(d["rate"]);
    os << "\n";
  }
  const json& s = v["solves"];
  os << "grid solves: " << fmt(s["traces"]) << " traces from " << fmt(s["starts"]) << " starts, " << fmt(s["hits"])
     << " hits, " << fmt(s["orbit_faults"]) << " orbit faults\n";
  for (const json& e : s["envelopes"]) {
    os << "  " << fmt(e["class"]) << " (" << fmt(e["source"]) << ") rate " << fmt(e["rate"]) << ": max decay "
       << fmt(e["max_decay_ratio"]) << (e["pass"].get<bool>() ? "  ok" : "  FAIL") << "\n";
  }
  os << "diameters:\n";
  for (const json& d : v["diameters"]) {
    os << "  " << fmt(d["class"]) << " (" << fmt(d["source"]) << ") epsilon " << fmt(d["epsilon"]) << ": bound "
       << fmt(d["bound"]);
    if (d["empty"].get<bool>()) {
      os << ", empty set (vacuous)\n";
    } else {
      os << ", delta_pair " << fmt(d["delta_pair"]) << ", delta_triple " << fmt(d["delta_triple"])
         << (d["pass"].get<bool>() ? "  ok" : "  FAIL") << "\n";
    }
  }
}

}  // namespace

std::string render_text(const RunReport& report) {
  std::ostringstream os;
  os << "afp " << command_name(report.command);
  if (!report.spec_digest.empty()) os << "  spec " << report.spec_digest;
  os << "\n";
  if (report.error) {
    const json& e = *report.error;
    os << "error (" << fmt(e["kind"]) << "): " << fmt(e["message"]) << "\n";
  }
  const json& r = report.results;
  if (r.contains("check")) {
    if (r["check"].contains("error")) os << "check: fault: " << fmt(r["check"]["error"]["message"]) << "\n";
    else render_check(os, r["check"]);
  }
  if (r.contains("classify")) render_classes(os, r["classify"]);
  if (r.contains("solve")) render_solve(os, r["solve"]);
  if (r.contains("fset")) render_fset(os, r["fset"]);
  if (r.contains("verify")) render_verify(os, r["verify"]);

  if (!report.warnings.empty()) {
    os << "warnings:\n";
    for (const Warning& w : report.warnings) os << "  [" << w.code << "] " << w.message << "\n";
  }
  if (!report.failures.empty()) {
    os << "failures:\n";
    for (const std::string& f : report.failures) os << "  " << f << "\n";
  }
  os << "exit " << report.exit_code << "\n";
  return os.str();
}

}  // namespace afp
