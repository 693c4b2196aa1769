#include "afp/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "afp/error.hpp"

namespace afp {

// ---------------------------------------------------------------- subsets

bool Interval::contains(double v, double tol) const {
  const bool above = lo_open ? v > lo + tol : v >= lo - tol;
  const bool below = hi_open ? v < hi - tol : v <= hi + tol;
  return above && below;
}

std::string Interval::str() const {
  return std::string(lo_open ? "(" : "[") + format_number(lo) + ", " + format_number(hi) + (hi_open ? ")" : "]");
}

std::string Family::str() const {
  return "{" + generator.str() + " : k = " + std::to_string(k_min) + ".." + std::to_string(k_max) + "}";
}

struct RealSubset::FamilyCache {
  std::vector<double> by_k;    // generator(k_min..k_max)
  std::vector<double> sorted;  // ascending copy for membership
  bool tail_monotone = false;
  double tail_limit_value = 0.0;
};

namespace {

constexpr long kTailHorizon = 1L << 40;

double eval_generator(const Expr& g, long k) {
  Bindings b;
  b.k = static_cast<double>(k);
  try {
    return g.eval(b);
  } catch (const EvalError& e) {
    throw EvalError("family generator failed at k=" + std::to_string(k) + ": " + e.what(), b.k);
  }
}

}  // namespace

RealSubset RealSubset::interval(double lo, double hi, bool lo_open, bool hi_open) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("interval bounds must be finite");
  if (lo > hi) throw DomainError("interval lower bound " + format_number(lo) + " exceeds upper bound " + format_number(hi));
  return union_of({Interval{lo, hi, lo_open, hi_open}});
}

RealSubset RealSubset::family(Expr generator, long k_min, long k_max) {
  return union_of({Family{std::move(generator), k_min, k_max}});
}

RealSubset RealSubset::union_of(std::vector<SubsetPiece> pieces) {
  if (pieces.empty()) throw DomainError("a subset needs at least one piece");
  RealSubset s;
  for (const auto& piece : pieces) {
    if (const auto* iv = std::get_if<Interval>(&piece)) {
      if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi) || iv->lo > iv->hi) {
        throw DomainError("invalid interval " + iv->str());
      }
      s.caches_.push_back(nullptr);
      continue;
    }
    const auto& fam = std::get<Family>(piece);
    if (fam.k_min < 1 || fam.k_max < fam.k_min) {
      throw DomainError("family index range must satisfy 1 <= k_min <= k_max, got " + std::to_string(fam.k_min) +
                        ".." + std::to_string(fam.k_max));
    }
    auto cache = std::make_shared<FamilyCache>();
    cache->by_k.reserve(static_cast<std::size_t>(fam.k_max - fam.k_min + 1));
    for (long k = fam.k_min; k <= fam.k_max; ++k) {
      const double v = eval_generator(fam.generator, k);
      if (!std::isfinite(v)) throw DomainError("family " + fam.str() + " generates a non-finite value at k=" + std::to_string(k));
      cache->by_k.push_back(v);
    }
    cache->sorted = cache->by_k;
    std::sort(cache->sorted.begin(), cache->sorted.end());

    // The tail is searchable when the last generated terms and the far
    // horizon all move in one direction.
    try {
      const std::size_t n = cache->by_k.size();
      const std::size_t from = n > 8 ? n - 8 : 0;
      int dir = 0;
      bool monotone = n >= 2;
      for (std::size_t i = from + 1; i < n && monotone; ++i) {
        const double d = cache->by_k[i] - cache->by_k[i - 1];
        const int sd = (d > 0) - (d < 0);
        if (sd == 0 || (dir != 0 && sd != dir)) monotone = false;
        dir = sd;
      }
      const double far = eval_generator(fam.generator, kTailHorizon);
      const double last = cache->by_k.back();
      if (monotone && std::isfinite(far) && ((far - last > 0) - (far - last < 0)) == dir) {
        cache->tail_monotone = true;
        cache->tail_limit_value = far;
      }
    } catch (const EvalError&) {
      cache->tail_monotone = false;
    }
    s.caches_.push_back(std::move(cache));
  }
  s.pieces_ = std::move(pieces);
  return s;
}

namespace {

bool sorted_contains(const std::vector<double>& sorted, double v, double tol) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v - tol);
  return it != sorted.end() && *it <= v + tol;
}

}  // namespace

bool RealSubset::contains(double v, double tol) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (const auto* iv = std::get_if<Interval>(&pieces_[i])) {
      if (iv->contains(v, tol)) return true;
      continue;
    }
    const auto& fam = std::get<Family>(pieces_[i]);
    const auto& cache = *caches_[i];
    if (sorted_contains(cache.sorted, v, tol)) return true;
    if (!cache.tail_monotone) continue;

    // Bisection for the crossing g(k) <= v <= g(k+1) (or reversed) in
    // (k_max, horizon].
    const double g_lo = cache.by_k.back();
    const double g_hi = cache.tail_limit_value;
    const bool increasing = g_hi > g_lo;
    const double lo_v = std::min(g_lo, g_hi);
    const double hi_v = std::max(g_lo, g_hi);
    if (v < lo_v - tol || v > hi_v + tol) continue;
    long a = fam.k_max;
    long b = kTailHorizon;
    try {
      while (b - a > 1) {
        const long mid = a + (b - a) / 2;
        const double g = eval_generator(fam.generator, mid);
        if ((g < v) == increasing) {
          a = mid;
        } else {
          b = mid;
        }
      }
      if (std::fabs(eval_generator(fam.generator, a) - v) <= tol ||
          std::fabs(eval_generator(fam.generator, b) - v) <= tol) {
        return true;
      }
    } catch (const EvalError&) {
      continue;
    }
  }
  return false;
}

std::string RealSubset::str() const {
  std::string out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) out += " | ";
    out += std::visit([](const auto& p) { return p.str(); }, pieces_[i]);
  }
  return out;
}

// ---------------------------------------------------------------- G-metric

GMetricDef GMetricDef::builder(GShape shape, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("G-metric scale must be positive, got " + format_number(scale));
  GMetricDef g;
  g.def_ = Builder{shape, scale};
  return g;
}

GMetricDef GMetricDef::custom(Expr expr) {
  if (expr.uses(Symbol::K)) throw ParameterError("custom G-metric may only use x, y, z");
  GMetricDef g;
  g.def_ = Custom{std::move(expr)};
  return g;
}

double GMetricDef::operator()(double x, double y, double z) const {
  if (const auto* b = as_builder()) {
    const double dxy = std::fabs(x - y);
    const double dyz = std::fabs(y - z);
    const double dxz = std::fabs(x - z);
    if (b->shape == GShape::Max) return b->scale * std::max({dxy, dyz, dxz});
    return b->scale * (dxy + dyz + dxz);
  }
  Bindings bind;
  bind.x = x;
  bind.y = y;
  bind.z = z;
  try {
    return std::get<Custom>(def_).expr.eval(bind);
  } catch (const EvalError& e) {
    throw EvalError("G(" + format_number(x) + ", " + format_number(y) + ", " + format_number(z) +
                        ") could not be evaluated: " + e.what(),
                    x);
  }
}

std::string GMetricDef::str() const {
  if (const auto* b = as_builder()) {
    return std::string(b->shape == GShape::Max ? "max(" : "sum(") + format_number(b->scale) + ")";
  }
  return "custom(" + std::get<Custom>(def_).expr.str() + ")";
}

// ---------------------------------------------------------------- space

GSpace::GSpace(std::vector<RealSubset> subsets, GMetricDef gmetric, std::span<const double> symmetry_sample, double tol)
    : subsets_(std::move(subsets)), gmetric_(std::move(gmetric)) {
  if (subsets_.empty()) throw DomainError("a G-space needs at least one subset");
  if (gmetric_.is_builder()) {
    symmetric_ = true;
    return;
  }
  std::vector<double> pts(symmetry_sample.begin(), symmetry_sample.end());
  if (pts.empty()) {
    try {
      pts = union_grid(*this, GridPlan{});
    } catch (const DomainError&) {
      pts.clear();
    }
  }
  constexpr std::size_t kMaxSymmetryPoints = 64;
  if (pts.size() > kMaxSymmetryPoints) {
    std::vector<double> strided;
    const double step = static_cast<double>(pts.size() - 1) / static_cast<double>(kMaxSymmetryPoints - 1);
    for (std::size_t i = 0; i < kMaxSymmetryPoints; ++i) {
      strided.push_back(pts[static_cast<std::size_t>(std::llround(static_cast<double>(i) * step))]);
    }
    pts = std::move(strided);
  }
  // An evaluation fault here leaves the space on the general (asymmetric) path;
  // the fault itself surfaces when the metric is next used.
  symmetric_ = true;
  try {
    for (double x : pts) {
      for (double y : pts) {
        if (std::fabs(gmetric_(x, y, y) - gmetric_(y, x, x)) > tol) {
          symmetric_ = false;
          return;
        }
      }
    }
  } catch (const EvalError&) {
    symmetric_ = false;
  }
}

std::optional<std::size_t> GSpace::locate(double x, double tol) const {
  for (std::size_t i = 0; i < subsets_.size(); ++i) {
    if (subsets_[i].contains(x, tol)) return i;
  }
  return std::nullopt;
}

double eval_g(const GSpace& space, double x, double y, double z) { return space.gmetric()(x, y, z); }

double derived_metric(const GSpace& space, double x, double y) {
  return eval_g(space, x, y, y) + eval_g(space, y, x, x);
}

// ---------------------------------------------------------------- axioms

const char* axiom_name(Axiom a) noexcept {
  switch (a) {
    case Axiom::G1: return "G1";
    case Axiom::G2: return "G2";
    case Axiom::G3: return "G3";
    case Axiom::G4: return "G4";
    case Axiom::G5: return "G5";
  }
  return "?";
}

bool AxiomReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const AxiomVerdict& v) { return v.pass; });
}

namespace {

class Recorder {
 public:
  explicit Recorder(AxiomVerdict& v) : v_(v) {}
  void check(bool ok, std::initializer_list<double> witness, double lhs, double rhs) {
    ++v_.checked;
    if (ok) return;
    v_.pass = false;
    ++v_.violations;
    if (v_.witnesses.size() < kMaxWitnesses) v_.witnesses.push_back({std::vector<double>(witness), lhs, rhs});
  }

 private:
  AxiomVerdict& v_;
};

}  // namespace

AxiomReport check_axioms(const GSpace& space, std::span<const double> sample, double tol) {
  std::vector<double> pts;
  {
    std::set<double> seen;
    for (double v : sample) {
      if (seen.insert(v).second) pts.push_back(v);
    }
  }
  if (pts.size() < 2) throw DomainError("axiom check needs at least two distinct sample points");

  const std::size_t n = pts.size();
  AxiomReport report;
  report.sample_size = n;
  report.tol = tol;
  for (std::size_t i = 0; i < report.verdicts.size(); ++i) report.verdicts[i].axiom = static_cast<Axiom>(i);

  // Tabulate G once; every axiom reads from the table.
  std::vector<double> table(n * n * n);
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> double& { return table[(i * n + j) * n + k]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) at(i, j, k) = eval_g(space, pts[i], pts[j], pts[k]);

  Recorder g1(report.verdicts[0]);
  Recorder g2(report.verdicts[1]);
  Recorder g3(report.verdicts[2]);
  Recorder g4(report.verdicts[3]);
  Recorder g5(report.verdicts[4]);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) g2.check(at(i, i, j) > tol, {pts[i], pts[i], pts[j]}, 0.0, at(i, i, j));
      for (std::size_t k = 0; k < n; ++k) {
        const double g = at(i, j, k);
        const bool diagonal = i == j && j == k;
        g1.check(diagonal ? std::fabs(g) <= tol : g > tol, {pts[i], pts[j], pts[k]}, g, 0.0);
        if (k != j) g3.check(at(i, i, j) <= g + tol, {pts[i], pts[j], pts[k]}, at(i, i, j), g);

        const double perms[5] = {at(i, k, j), at(j, i, k), at(j, k, i), at(k, i, j), at(k, j, i)};
        double worst = g;
        for (double p : perms) {
          if (std::fabs(p - g) > std::fabs(worst - g)) worst = p;
        }
        g4.check(std::fabs(worst - g) <= tol, {pts[i], pts[j], pts[k]}, g, worst);

        for (std::size_t a = 0; a < n; ++a) {
          const double rhs = at(i, a, a) + at(a, j, k);
          g5.check(g <= rhs + tol, {pts[i], pts[j], pts[k], pts[a]}, g, rhs);
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------- grids

namespace {

// Rounds to the decimal precision implied by the step so that, e.g., the
// 30th point of a 0.01 grid is exactly the double nearest 0.3.
double snap(double v, double h) {
  const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(h))) + 3, 0, 15);
  const double scale = std::pow(10.0, digits);
  const double scaled = v * scale;
  if (std::fabs(scaled) >= 4.0e15) return v;
  return std::round(scaled) / scale;
}

void append_unique(std::vector<double>& out, std::set<double>& seen, double v, double tol) {
  auto it = seen.lower_bound(v - tol);
  if (it != seen.end() && *it <= v + tol) return;
  seen.insert(v);
  out.push_back(v);
}

}  // namespace

std::vector<double> discretize(const RealSubset& subset, const GridPlan& plan) {
  if (!(plan.h > 0.0) || !std::isfinite(plan.h)) throw ParameterError("grid step must be positive");
  std::vector<double> out;
  std::set<double> seen;
  for (const auto& piece : subset.pieces()) {
    if (const auto* iv = std::get_if<Interval>(&piece)) {
      const double span = iv->hi - iv->lo;
      const double slack = 1e-9;
      long j0 = iv->lo_open ? 1 : 0;
      long j1 = static_cast<long>(std::floor(span / plan.h + slack));
      if (iv->hi_open && std::fabs(iv->lo + static_cast<double>(j1) * plan.h - iv->hi) <= slack * std::max(1.0, std::fabs(iv->hi))) {
        --j1;
      }
      if (j1 < j0) continue;
      const auto count = static_cast<std::size_t>(j1 - j0 + 1);
      if (out.size() + count > plan.max_points) {
        throw DomainError("grid for " + subset.str() + " has " + std::to_string(out.size() + count) +
                          " points, exceeding the cap of " + std::to_string(plan.max_points));
      }
      for (long j = j0; j <= j1; ++j) {
        const double v = snap(iv->lo + static_cast<double>(j) * plan.h, plan.h);
        append_unique(out, seen, v, kDefaultTol);
      }
      continue;
    }
    const auto& fam = std::get<Family>(piece);
    const auto count = static_cast<std::size_t>(fam.k_max - fam.k_min + 1);
    if (out.size() + count > plan.max_points) {
      throw DomainError("grid for " + subset.str() + " has " + std::to_string(out.size() + count) +
                        " points, exceeding the cap of " + std::to_string(plan.max_points));
    }
    std::vector<double> values;
    values.reserve(count);
    for (long k = fam.k_min; k <= fam.k_max; ++k) {
      const double v = eval_generator(fam.generator, k);
      if (!std::isfinite(v)) throw DomainError("family " + fam.str() + " generates a non-finite value at k=" + std::to_string(k));
      values.push_back(v);
    }
    std::stable_sort(values.begin(), values.end(), [](double a, double b) { return std::fabs(a) > std::fabs(b); });
    for (double v : values) append_unique(out, seen, v, kDefaultTol);
  }
  if (out.empty()) throw DomainError("grid for " + subset.str() + " is empty");
  return out;
}

std::vector<double> union_grid(const GSpace& space, const GridPlan& plan) {
  std::vector<double> all;
  for (const auto& s : space.subsets()) {
    auto g = discretize(s, plan);
    all.insert(all.end(), g.begin(), g.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double v : all) {
    if (out.empty() || v - out.back() > kDefaultTol) out.push_back(v);
  }
  return out;
}

}  // namespace afp
