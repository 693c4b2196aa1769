#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace afp {

/// Variables an expression may reference. Which ones are legal depends on
/// the context: maps use `x`, family generators use `k`, custom G-metrics
/// use `x`, `y`, `z`, and bounds/parameters use none.
enum class Symbol { X, Y, Z, K };

const char* symbol_name(Symbol s) noexcept;

struct Bindings {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double k = 0.0;
};

enum class BinaryOp { Add, Sub, Mul, Div };
enum class Builtin { Abs, Min, Max };

/// Immutable arithmetic expression tree with value semantics.
///
/// Copies share nodes. Equality is structural, so `parse(str(e)) == e`
/// holds for every expression built by the parser.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr variable(Symbol s);
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Builtin fn, std::vector<Expr> args);

  /// Evaluates in double precision. Division by a zero divisor raises
  /// EvalError carrying `b.x`.
  double eval(const Bindings& b) const;
  double eval_x(double x) const;

  bool uses(Symbol s) const;
  bool is_constant() const;  // no variables at all

  /// Canonical infix text with minimal parentheses.
  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Parses a complete expression. `allowed` lists the variables that may
/// appear; anything else is a ParseError. `line`/`column` position the
/// first character of `text` for error reporting, and `key` names the
/// enclosing declaration.
Expr parse_expr(std::string_view text, std::initializer_list<Symbol> allowed,
                std::size_t line = 1, std::size_t column = 1, std::string key = {});

/// Parses and evaluates a variable-free expression such as `1/3`.
double parse_constant(std::string_view text);

}  // namespace afp
