#pragma once

// Point sets on the real line and G-metrics over them.

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "afp/expr.hpp"

namespace afp {

inline constexpr double kDefaultTol = 1e-9;

/// Closed, open or half-open interval. A degenerate open interval such as
/// `(0.3, 0.3)` is representable and simply has no grid points.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  /// Closed ends admit points up to `tol` outside; open ends require the
  /// point to be more than `tol` inside, so adjacent `[a, b)` and `[b, c]`
  /// never both claim `b`.
  bool contains(double v, double tol = kDefaultTol) const;
  std::string str() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Countable family `{ generator(k) : k = k_min..k_max }`, the truncation of
/// an infinite sequence such as `{1/k}`.
struct Family {
  Expr generator;  // in `k`
  long k_min = 1;
  long k_max = 1000;

  std::string str() const;
  friend bool operator==(const Family&, const Family&) = default;
};

using SubsetPiece = std::variant<Interval, Family>;

/// Union of intervals and families. Most declarations have one piece.
class RealSubset {
 public:
  static RealSubset interval(double lo, double hi, bool lo_open = false, bool hi_open = false);
  static RealSubset family(Expr generator, long k_min, long k_max);
  static RealSubset union_of(std::vector<SubsetPiece> pieces);

  const std::vector<SubsetPiece>& pieces() const noexcept { return pieces_; }

  /// Membership within `tol`. Family membership looks past the truncation:
  /// the tail beyond `k_max` is searched by bisection when the generator is
  /// monotone there, so `1/4001` belongs to `{1/k : k = 1..1000}`.
  bool contains(double v, double tol = kDefaultTol) const;

  std::string str() const;

  friend bool operator==(const RealSubset& a, const RealSubset& b) { return a.pieces_ == b.pieces_; }

 private:
  struct FamilyCache;
  std::vector<SubsetPiece> pieces_;
  std::vector<std::shared_ptr<const FamilyCache>> caches_;  // parallel to pieces_, null for intervals
};

enum class GShape { Max, Sum };

/// Either a builder over |x - y| or a user expression in x, y, z.
class GMetricDef {
 public:
  struct Builder {
    GShape shape = GShape::Max;
    double scale = 0.5;
    friend bool operator==(const Builder&, const Builder&) = default;
  };
  struct Custom {
    Expr expr;
    friend bool operator==(const Custom&, const Custom&) = default;
  };

  GMetricDef() = default;  // builder-max, scale 0.5
  static GMetricDef builder(GShape shape, double scale);
  static GMetricDef custom(Expr expr);

  bool is_builder() const noexcept { return std::holds_alternative<Builder>(def_); }
  const Builder* as_builder() const noexcept { return std::get_if<Builder>(&def_); }
  const Custom* as_custom() const noexcept { return std::get_if<Custom>(&def_); }

  double operator()(double x, double y, double z) const;
  std::string str() const;

  friend bool operator==(const GMetricDef&, const GMetricDef&) = default;

 private:
  std::variant<Builder, Custom> def_{Builder{}};
};

struct GridPlan {
  double h = 0.01;
  std::size_t max_points = 1'000'000;
  friend bool operator==(const GridPlan&, const GridPlan&) = default;
};

/// The carrier X_1..X_m together with its G-metric.
class GSpace {
 public:
  /// `symmetry_sample` feeds the symmetry detection for custom metrics; when
  /// empty, points are drawn from the subsets with the default grid.
  GSpace(std::vector<RealSubset> subsets, GMetricDef gmetric, std::span<const double> symmetry_sample = {},
         double tol = kDefaultTol);

  std::size_t size() const noexcept { return subsets_.size(); }
  /// Cyclic indexing: subset(m) is subset(0).
  const RealSubset& subset(std::size_t i) const { return subsets_[i % subsets_.size()]; }
  const std::vector<RealSubset>& subsets() const noexcept { return subsets_; }
  const GMetricDef& gmetric() const noexcept { return gmetric_; }
  bool symmetric() const noexcept { return symmetric_; }

  /// Index of the first subset containing `x`.
  std::optional<std::size_t> locate(double x, double tol = kDefaultTol) const;

 private:
  std::vector<RealSubset> subsets_;
  GMetricDef gmetric_;
  bool symmetric_ = true;
};

/// G(x, y, z). Custom-expression faults are rethrown as EvalError naming the
/// triple.
double eval_g(const GSpace& space, double x, double y, double z);

/// d_G(x, y) = G(x, y, y) + G(y, x, x).
double derived_metric(const GSpace& space, double x, double y);

enum class Axiom { G1, G2, G3, G4, G5 };
const char* axiom_name(Axiom a) noexcept;

struct AxiomViolation {
  std::vector<double> witness;  // (x,y,z) or (x,y,z,a) for G5
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AxiomVerdict {
  Axiom axiom = Axiom::G1;
  bool pass = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<AxiomViolation> witnesses;  // first few, in enumeration order
};

struct AxiomReport {
  std::size_t sample_size = 0;
  double tol = kDefaultTol;
  std::array<AxiomVerdict, 5> verdicts{};

  bool all_pass() const;
  const AxiomVerdict& operator[](Axiom a) const { return verdicts[static_cast<std::size_t>(a)]; }
};

inline constexpr std::size_t kMaxWitnesses = 8;

/// Exhaustive check of G1-G5 over all ordered triples of the (deduplicated)
/// sample, and all quadruples for the rectangle inequality.
AxiomReport check_axioms(const GSpace& space, std::span<const double> sample, double tol = kDefaultTol);

/// Grid over a subset. Intervals step by `plan.h` from the lower end (one step
/// in when open); families list their generated values by descending
/// magnitude. Throws DomainError on an empty grid or when the point count
/// exceeds `plan.max_points`.
std::vector<double> discretize(const RealSubset& subset, const GridPlan& plan);

/// Distinct grid points of every subset of the space, ascending.
std::vector<double> union_grid(const GSpace& space, const GridPlan& plan);

}  // namespace afp
