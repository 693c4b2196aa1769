#include "afp/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>
#include <variant>

#include "afp/error.hpp"
#include "lexer.hpp"

namespace afp {

ParseError::ParseError(std::size_t line, std::size_t column, std::string key, const std::string& message)
    : Error([&] {
        std::ostringstream os;
        os << "line " << line << ", column " << column << ": ";
        if (!key.empty()) os << "[" << key << "] ";
        os << message;
        return os.str();
      }()),
      line_(line),
      column_(column),
      key_(std::move(key)),
      detail_(message) {}

const char* symbol_name(Symbol s) noexcept {
  switch (s) {
    case Symbol::X: return "x";
    case Symbol::Y: return "y";
    case Symbol::Z: return "z";
    case Symbol::K: return "k";
  }
  return "?";
}

namespace {

const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::Abs: return "abs";
    case Builtin::Min: return "min";
    case Builtin::Max: return "max";
  }
  return "?";
}

}  // namespace

struct Expr::Node {
  struct Const {
    double value;
  };
  struct Var {
    Symbol symbol;
  };
  struct Neg {
    Expr operand;
  };
  struct Bin {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
  };
  struct Call {
    Builtin fn;
    std::vector<Expr> args;
  };
  std::variant<Const, Var, Neg, Bin, Call> v;
};

Expr::Expr() : node_(std::make_shared<const Node>(Node{Node::Const{0.0}})) {}

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{Node::Const{value}}));
}

Expr Expr::variable(Symbol s) {
  return Expr(std::make_shared<const Node>(Node{Node::Var{s}}));
}

Expr Expr::negate(Expr operand) {
  return Expr(std::make_shared<const Node>(Node{Node::Neg{std::move(operand)}}));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{Node::Bin{op, std::move(lhs), std::move(rhs)}}));
}

Expr Expr::call(Builtin fn, std::vector<Expr> args) {
  return Expr(std::make_shared<const Node>(Node{Node::Call{fn, std::move(args)}}));
}

namespace {

std::string describe(const Bindings& b) {
  std::ostringstream os;
  os << "x=" << format_number(b.x);
  if (b.y != 0.0 || b.z != 0.0) os << ", y=" << format_number(b.y) << ", z=" << format_number(b.z);
  if (b.k != 0.0) os << ", k=" << format_number(b.k);
  return os.str();
}

}  // namespace

double Expr::eval(const Bindings& b) const {
  struct Visitor {
    const Bindings& b;
    double operator()(const Node::Const& c) const { return c.value; }
    double operator()(const Node::Var& v) const {
      switch (v.symbol) {
        case Symbol::X: return b.x;
        case Symbol::Y: return b.y;
        case Symbol::Z: return b.z;
        case Symbol::K: return b.k;
      }
      return 0.0;
    }
    double operator()(const Node::Neg& n) const { return -n.operand.eval(b); }
    double operator()(const Node::Bin& n) const {
      const double l = n.lhs.eval(b);
      const double r = n.rhs.eval(b);
      switch (n.op) {
        case BinaryOp::Add: return l + r;
        case BinaryOp::Sub: return l - r;
        case BinaryOp::Mul: return l * r;
        case BinaryOp::Div:
          if (r == 0.0) throw EvalError("division by zero at " + describe(b), b.x);
          return l / r;
      }
      return 0.0;
    }
    double operator()(const Node::Call& c) const {
      switch (c.fn) {
        case Builtin::Abs: return std::fabs(c.args.at(0).eval(b));
        case Builtin::Min:
        case Builtin::Max: {
          double acc = c.args.at(0).eval(b);
          for (std::size_t i = 1; i < c.args.size(); ++i) {
            const double v = c.args[i].eval(b);
            acc = c.fn == Builtin::Min ? std::min(acc, v) : std::max(acc, v);
          }
          return acc;
        }
      }
      return 0.0;
    }
  };
  return std::visit(Visitor{b}, node_->v);
}

double Expr::eval_x(double x) const {
  Bindings b;
  b.x = x;
  return eval(b);
}

bool Expr::uses(Symbol s) const {
  struct Visitor {
    Symbol s;
    bool operator()(const Node::Const&) const { return false; }
    bool operator()(const Node::Var& v) const { return v.symbol == s; }
    bool operator()(const Node::Neg& n) const { return n.operand.uses(s); }
    bool operator()(const Node::Bin& n) const { return n.lhs.uses(s) || n.rhs.uses(s); }
    bool operator()(const Node::Call& c) const {
      return std::any_of(c.args.begin(), c.args.end(), [this](const Expr& e) { return e.uses(s); });
    }
  };
  return std::visit(Visitor{s}, node_->v);
}

bool Expr::is_constant() const {
  return !uses(Symbol::X) && !uses(Symbol::Y) && !uses(Symbol::Z) && !uses(Symbol::K);
}

namespace {

// Binding strength: sums < products < unary minus < atoms.
int precedence(const Expr::Node& n) {
  if (const auto* b = std::get_if<Expr::Node::Bin>(&n.v)) {
    return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
  }
  if (std::holds_alternative<Expr::Node::Neg>(n.v)) return 3;
  return 4;
}

}  // namespace

std::string Expr::str() const {
  struct Visitor {
    std::string operator()(const Node::Const& c) const { return format_number(c.value); }
    std::string operator()(const Node::Var& v) const { return symbol_name(v.symbol); }
    std::string operator()(const Node::Neg& n) const {
      const std::string inner = n.operand.str();
      // Parenthesize anything that is not an atom so the tree is preserved.
      if (precedence(*n.operand.node_) < 4) return "-(" + inner + ")";
      return "-" + inner;
    }
    std::string operator()(const Node::Bin& n) const {
      static constexpr std::array<const char*, 4> kOps{" + ", " - ", " * ", " / "};
      const int mine = (n.op == BinaryOp::Add || n.op == BinaryOp::Sub) ? 1 : 2;
      std::string l = n.lhs.str();
      std::string r = n.rhs.str();
      if (precedence(*n.lhs.node_) < mine) l = "(" + l + ")";
      if (precedence(*n.rhs.node_) <= mine) r = "(" + r + ")";
      return l + kOps[static_cast<std::size_t>(n.op)] + r;
    }
    std::string operator()(const Node::Call& c) const {
      std::string out = builtin_name(c.fn);
      out += "(";
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ", ";
        out += c.args[i].str();
      }
      return out + ")";
    }
  };
  return std::visit(Visitor{}, node_->v);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node_->v;
  const auto& y = b.node_->v;
  if (x.index() != y.index()) return false;
  using N = Expr::Node;
  if (const auto* c = std::get_if<N::Const>(&x)) return c->value == std::get<N::Const>(y).value;
  if (const auto* v = std::get_if<N::Var>(&x)) return v->symbol == std::get<N::Var>(y).symbol;
  if (const auto* n = std::get_if<N::Neg>(&x)) return n->operand == std::get<N::Neg>(y).operand;
  if (const auto* bin = std::get_if<N::Bin>(&x)) {
    const auto& o = std::get<N::Bin>(y);
    return bin->op == o.op && bin->lhs == o.lhs && bin->rhs == o.rhs;
  }
  const auto& c = std::get<N::Call>(x);
  const auto& o = std::get<N::Call>(y);
  return c.fn == o.fn && c.args == o.args;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

namespace detail {

const char* tok_name(Tok t) noexcept {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Pipe: return "'|'";
    case Tok::Equals: return "'='";
    case Tok::DotDot: return "'..'";
    case Tok::End: return "end of input";
  }
  return "?";
}

TokenStream::TokenStream(std::string_view text, std::size_t line, std::size_t first_column, std::string key)
    : line_(line), key_(std::move(key)) {
  std::size_t i = 0;
  auto col = [&](std::size_t at) { return first_column + at; };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.column = col(i);
    const bool starts_number =
        std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])));
    if (starts_number) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.' && !(j + 1 < text.size() && text[j + 1] == '.')) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t e = j + 1;
        if (e < text.size() && (text[e] == '+' || text[e] == '-')) ++e;
        if (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) {
          j = e;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
      t.text = text.substr(i, j - i);
      const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc{} || !std::isfinite(t.number)) {
        throw ParseError(line_, t.column, key_, "invalid numeric literal '" + std::string(t.text) + "'");
      }
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = text.substr(i, j - i);
      i = j;
    } else {
      std::size_t len = 1;
      switch (c) {
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case ',': t.kind = Tok::Comma; break;
        case ':': t.kind = Tok::Colon; break;
        case '|': t.kind = Tok::Pipe; break;
        case '=': t.kind = Tok::Equals; break;
        case '.':
          if (i + 1 < text.size() && text[i + 1] == '.') {
            t.kind = Tok::DotDot;
            len = 2;
            break;
          }
          [[fallthrough]];
        default:
          throw ParseError(line_, t.column, key_, std::string("unexpected character '") + c + "'");
      }
      t.text = text.substr(i, len);
      i += len;
    }
    tokens_.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.column = col(text.size());
  tokens_.push_back(end);
}

const Token& TokenStream::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(Tok kind) {
  if (peek().kind != kind) return false;
  next();
  return true;
}

Token TokenStream::expect(Tok kind, const char* what) {
  if (peek().kind != kind) {
    fail(peek(), std::string("expected ") + what + ", found " + describe_token(peek()));
  }
  return next();
}

void TokenStream::fail(const Token& at, const std::string& message) const {
  throw ParseError(line_, at.column, key_, "syntax error: " + message);
}

void TokenStream::fail_semantic(const Token& at, const std::string& message) const {
  throw ParseError(line_, at.column, key_, message);
}

std::string describe_token(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

namespace {

class ExprParser {
 public:
  ExprParser(TokenStream& ts, std::initializer_list<Symbol> allowed) : ts_(ts), allowed_(allowed) {}

  Expr sum() {
    Expr lhs = product();
    for (;;) {
      if (ts_.accept(Tok::Plus)) {
        lhs = Expr::binary(BinaryOp::Add, lhs, product());
      } else if (ts_.accept(Tok::Minus)) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, product());
      } else {
        return lhs;
      }
    }
  }

 private:
  Expr product() {
    Expr lhs = unary();
    for (;;) {
      if (ts_.accept(Tok::Star)) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, unary());
      } else if (ts_.accept(Tok::Slash)) {
        lhs = Expr::binary(BinaryOp::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (ts_.accept(Tok::Minus)) return Expr::negate(unary());
    return primary();
  }

  Expr primary() {
    const Token t = ts_.peek();
    switch (t.kind) {
      case Tok::Number:
        ts_.next();
        return Expr::constant(t.number);
      case Tok::LParen: {
        ts_.next();
        Expr inner = sum();
        ts_.expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        ts_.next();
        if (ts_.peek().kind == Tok::LParen) return call(t);
        return variable(t);
      default:
        ts_.fail(t, "expected an operand, found " + describe_token(t));
    }
  }

  Expr variable(const Token& t) {
    for (Symbol s : {Symbol::X, Symbol::Y, Symbol::Z, Symbol::K}) {
      if (t.text == symbol_name(s)) {
        if (std::find(allowed_.begin(), allowed_.end(), s) == allowed_.end()) {
          ts_.fail_semantic(t, "variable '" + std::string(t.text) + "' is not allowed here");
        }
        return Expr::variable(s);
      }
    }
    ts_.fail_semantic(t, "unknown variable '" + std::string(t.text) + "'");
  }

  Expr call(const Token& name) {
    Builtin fn{};
    std::size_t min_args = 2;
    if (name.text == "abs") {
      fn = Builtin::Abs;
      min_args = 1;
    } else if (name.text == "min") {
      fn = Builtin::Min;
    } else if (name.text == "max") {
      fn = Builtin::Max;
    } else {
      ts_.fail_semantic(name, "unknown function '" + std::string(name.text) + "'");
    }
    ts_.expect(Tok::LParen, "'('");
    std::vector<Expr> args;
    args.push_back(sum());
    while (ts_.accept(Tok::Comma)) args.push_back(sum());
    ts_.expect(Tok::RParen, "')'");
    if (fn == Builtin::Abs ? args.size() != 1 : args.size() < min_args) {
      ts_.fail_semantic(name, "wrong number of arguments to '" + std::string(name.text) + "'");
    }
    return Expr::call(fn, std::move(args));
  }

  TokenStream& ts_;
  std::vector<Symbol> allowed_;
};

}  // namespace

Expr parse_expression(TokenStream& ts, std::initializer_list<Symbol> allowed) {
  ExprParser p(ts, allowed);
  return p.sum();
}

}  // namespace detail

Expr parse_expr(std::string_view text, std::initializer_list<Symbol> allowed, std::size_t line,
                std::size_t column, std::string key) {
  detail::TokenStream ts(text, line, column, std::move(key));
  Expr e = detail::parse_expression(ts, allowed);
  if (!ts.at_end()) ts.fail(ts.peek(), "unexpected " + detail::describe_token(ts.peek()));
  return e;
}

double parse_constant(std::string_view text) {
  return parse_expr(text, {}).eval(Bindings{});
}

}  // namespace afp
