#include "afp/spec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "afp/error.hpp"
#include "lexer.hpp"

namespace afp {

Scalar Scalar::of(Expr e) {
  const double v = e.eval(Bindings{});
  return {std::move(e), v};
}

namespace {

using detail::Tok;
using detail::Token;
using detail::TokenStream;

enum class Section { None, Space, Map, Params, Run };

const char* section_name(Section s) {
  switch (s) {
    case Section::Space: return "space";
    case Section::Map: return "map";
    case Section::Params: return "params";
    case Section::Run: return "run";
    case Section::None: break;
  }
  return "";
}

struct Entry {
  std::string key;
  std::string_view value;
  std::size_t line = 0;
  std::size_t key_column = 0;
  std::size_t value_column = 0;
};

bool is_subset_key(std::string_view key, std::size_t* index) {
  if (key.size() < 2 || key[0] != 'X') return false;
  std::size_t v = 0;
  for (std::size_t i = 1; i < key.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(key[i]))) return false;
    v = v * 10 + static_cast<std::size_t>(key[i] - '0');
  }
  if (key[1] == '0') return false;
  *index = v;
  return true;
}

bool key_allowed(Section s, std::string_view key) {
  std::size_t idx = 0;
  switch (s) {
    case Section::Space: return key == "m" || key == "metric" || is_subset_key(key, &idx);
    case Section::Map: return key == "map" || key == "branch" || key == "default";
    case Section::Params: return key == "class" || key == "alpha" || key == "beta" || key == "gamma";
    case Section::Run:
      return key == "epsilon" || key == "grid" || key == "max_points" || key == "x0" || key == "max_iter" ||
             key == "divergence_factor" || key == "budget" || key == "seed";
    case Section::None: break;
  }
  return false;
}

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  ProblemSpec run() {
    split_lines();
    ProblemSpec spec;
    parse_space(spec);
    parse_map(spec);
    parse_params(spec);
    parse_run(spec);
    return spec;
  }

 private:
  [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& key, const std::string& msg) {
    throw ParseError(line, column, key, msg);
  }

  void split_lines() {
    Section current = Section::None;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      std::string_view line = text_.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      handle_line(line, line_no, current);
      if (end == text_.size()) break;
      start = end + 1;
    }
  }

  void handle_line(std::string_view line, std::size_t line_no, Section& current) {
    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    if (first == line.size()) return;
    std::size_t last = line.size();
    while (last > first && std::isspace(static_cast<unsigned char>(line[last - 1]))) --last;
    const std::string_view body = line.substr(first, last - first);

    const auto eq = body.find('=');
    if (body.front() == '[' && eq == std::string_view::npos) {
      if (body.back() != ']') fail(line_no, first + body.size() + 1, "", "syntax error: expected ']' to close section header");
      std::string name(body.substr(1, body.size() - 2));
      name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }), name.end());
      Section s = Section::None;
      for (Section cand : {Section::Space, Section::Map, Section::Params, Section::Run}) {
        if (name == section_name(cand)) s = cand;
      }
      if (s == Section::None) fail(line_no, first + 1, "", "unknown section '" + name + "'");
      if (!seen_sections_.insert(s).second) fail(line_no, first + 1, "", "duplicate section '" + name + "'");
      current = s;
      return;
    }
    if (eq == std::string_view::npos) fail(line_no, first + body.size() + 1, "", "syntax error: expected 'key = value'");

    std::string_view key = body.substr(0, eq);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.remove_suffix(1);
    if (key.empty()) fail(line_no, first + 1, "", "syntax error: missing key before '='");
    for (char c : key) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
        fail(line_no, first + 1, "", "syntax error: invalid key '" + std::string(key) + "'");
      }
    }
    if (current == Section::None) fail(line_no, first + 1, std::string(key), "key outside of any section");
    if (!key_allowed(current, key)) {
      fail(line_no, first + 1, std::string(key),
           "unknown key '" + std::string(key) + "' in section [" + section_name(current) + "]");
    }
    std::size_t vstart = eq + 1;
    while (vstart < body.size() && std::isspace(static_cast<unsigned char>(body[vstart]))) ++vstart;

    Entry e;
    e.key = std::string(key);
    e.value = body.substr(vstart);
    e.line = line_no;
    e.key_column = first + 1;
    e.value_column = first + vstart + 1;
    if (e.value.empty()) fail(line_no, e.value_column, e.key, "syntax error: missing value");

    if (e.key == "branch") {
      branches_.push_back(e);
      return;
    }
    if (!entries_.emplace(e.key, e).second) fail(line_no, first + 1, e.key, "duplicate key '" + e.key + "'");
  }

  TokenStream stream(const Entry& e) const { return TokenStream(e.value, e.line, e.value_column, e.key); }

  static void finish(TokenStream& ts) {
    if (!ts.at_end()) ts.fail(ts.peek(), "unexpected " + detail::describe_token(ts.peek()));
  }

  double constant(TokenStream& ts) {
    const Token at = ts.peek();
    Expr e = detail::parse_expression(ts, {});
    const double v = evaluate_constant(ts, at, e);
    return v;
  }

  static double evaluate_constant(TokenStream& ts, const Token& at, const Expr& e) {
    try {
      const double v = e.eval(Bindings{});
      if (!std::isfinite(v)) ts.fail_semantic(at, "value is not finite");
      return v;
    } catch (const EvalError& err) {
      ts.fail_semantic(at, err.what());
    }
  }

  long integer(TokenStream& ts, const char* what) {
    const Token t = ts.expect(Tok::Number, what);
    if (t.number != std::floor(t.number) || std::fabs(t.number) > 9.0e15) {
      ts.fail_semantic(t, std::string(what) + " must be an integer");
    }
    return static_cast<long>(t.number);
  }

  Interval interval(TokenStream& ts) {
    const Token open = ts.next();
    Interval iv;
    iv.lo_open = open.kind == Tok::LParen;
    iv.lo = constant(ts);
    ts.expect(Tok::Comma, "','");
    iv.hi = constant(ts);
    const Token close = ts.peek();
    if (close.kind == Tok::RParen) {
      iv.hi_open = true;
    } else if (close.kind != Tok::RBracket) {
      ts.fail(close, "expected ')' or ']' to close the interval, found " + detail::describe_token(close));
    }
    ts.next();
    if (iv.lo > iv.hi) ts.fail_semantic(open, "interval lower bound exceeds upper bound");
    return iv;
  }

  Family family(TokenStream& ts) {
    const Token open = ts.expect(Tok::LBrace, "'{'");
    Family f;
    f.generator = detail::parse_expression(ts, {Symbol::K});
    ts.expect(Tok::Colon, "':'");
    const Token k = ts.expect(Tok::Ident, "'k'");
    if (k.text != "k") ts.fail(k, "expected 'k', found " + detail::describe_token(k));
    ts.expect(Tok::Equals, "'='");
    f.k_min = integer(ts, "k_min");
    ts.expect(Tok::DotDot, "'..'");
    f.k_max = ts.peek().kind == Tok::Number ? integer(ts, "k_max") : kDefaultFamilyKMax;
    ts.expect(Tok::RBrace, "'}'");
    if (f.k_min < 1 || f.k_max < f.k_min) ts.fail_semantic(open, "family index range must satisfy 1 <= k_min <= k_max");
    return f;
  }

  RealSubset subset(const Entry& e) {
    TokenStream ts = stream(e);
    std::vector<SubsetPiece> pieces;
    do {
      const Token t = ts.peek();
      if (t.kind == Tok::LParen || t.kind == Tok::LBracket) {
        pieces.emplace_back(interval(ts));
      } else if (t.kind == Tok::LBrace) {
        pieces.emplace_back(family(ts));
      } else {
        ts.fail(t, "expected an interval or a family, found " + detail::describe_token(t));
      }
    } while (ts.accept(Tok::Pipe));
    finish(ts);
    try {
      return RealSubset::union_of(std::move(pieces));
    } catch (const Error& err) {
      fail(e.line, e.value_column, e.key, err.what());
    }
  }

  const Entry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const Entry& require(const std::string& key, Section s) {
    if (const Entry* e = find(key)) return *e;
    const std::size_t line = count_lines();
    fail(line, 1, key, std::string("missing required key '") + key + "' in section [" + section_name(s) + "]");
  }

  std::size_t count_lines() const {
    return static_cast<std::size_t>(std::count(text_.begin(), text_.end(), '\n')) + 1;
  }

  void parse_space(ProblemSpec& spec) {
    const Entry& m_entry = require("m", Section::Space);
    {
      TokenStream ts = stream(m_entry);
      const long m = integer(ts, "m");
      finish(ts);
      if (m < 1) fail(m_entry.line, m_entry.value_column, "m", "m must be at least 1");
      spec.m = static_cast<std::size_t>(m);
    }
    std::map<std::size_t, const Entry*> sets;
    for (const auto& [key, e] : entries_) {
      std::size_t idx = 0;
      if (is_subset_key(key, &idx)) sets.emplace(idx, &e);
    }
    if (sets.size() != spec.m) {
      fail(m_entry.line, m_entry.value_column, "m",
           "m = " + std::to_string(spec.m) + " but " + std::to_string(sets.size()) + " subsets are declared");
    }
    std::size_t expected = 1;
    for (const auto& [idx, e] : sets) {
      if (idx != expected) fail(e->line, e->key_column, e->key, "subsets must be numbered X1..X" + std::to_string(spec.m));
      spec.subsets.push_back(subset(*e));
      ++expected;
    }
    if (const Entry* e = find("metric")) spec.gmetric = metric(*e);
  }

  GMetricDef metric(const Entry& e) {
    TokenStream ts = stream(e);
    const Token name = ts.expect(Tok::Ident, "'max', 'sum' or 'custom'");
    ts.expect(Tok::LParen, "'('");
    GMetricDef g;
    if (name.text == "max" || name.text == "sum") {
      const Token at = ts.peek();
      const double scale = constant(ts);
      if (!(scale > 0.0)) ts.fail_semantic(at, "G-metric scale must be positive");
      g = GMetricDef::builder(name.text == "max" ? GShape::Max : GShape::Sum, scale);
    } else if (name.text == "custom") {
      g = GMetricDef::custom(detail::parse_expression(ts, {Symbol::X, Symbol::Y, Symbol::Z}));
    } else {
      ts.fail_semantic(name, "unknown metric '" + std::string(name.text) + "'");
    }
    ts.expect(Tok::RParen, "')'");
    finish(ts);
    return g;
  }

  Expr map_expr(TokenStream& ts) { return detail::parse_expression(ts, {Symbol::X}); }

  void parse_map(ProblemSpec& spec) {
    const Entry* single = find("map");
    const Entry* fallback = find("default");
    if (single && (fallback || !branches_.empty())) {
      fail(single->line, single->key_column, "map", "'map' cannot be combined with 'branch' or 'default'");
    }
    if (single) {
      TokenStream ts = stream(*single);
      spec.map.fallback = map_expr(ts);
      finish(ts);
      return;
    }
    if (!fallback && branches_.empty()) {
      fail(count_lines(), 1, "map", "missing required key 'map' (or 'branch') in section [map]");
    }
    for (const Entry& e : branches_) {
      TokenStream ts = stream(e);
      Branch b;
      const Token t = ts.peek();
      if (t.kind == Tok::LParen || t.kind == Tok::LBracket) {
        b.guard = interval(ts);
      } else if (t.kind == Tok::Ident) {
        std::size_t idx = 0;
        if (!is_subset_key(t.text, &idx)) ts.fail_semantic(t, "unknown guard '" + std::string(t.text) + "'");
        if (idx > spec.m) ts.fail_semantic(t, "guard refers to undeclared subset " + std::string(t.text));
        ts.next();
        b.guard = SetGuard{idx - 1};
      } else {
        ts.fail(t, "expected an interval or a subset name, found " + detail::describe_token(t));
      }
      ts.expect(Tok::Colon, "':'");
      b.body = map_expr(ts);
      finish(ts);
      spec.map.branches.push_back(std::move(b));
    }
    if (fallback) {
      TokenStream ts = stream(*fallback);
      spec.map.fallback = map_expr(ts);
      finish(ts);
    }
  }

  void parse_params(ProblemSpec& spec) {
    auto read = [&](const char* key) -> std::optional<Scalar> {
      const Entry* e = find(key);
      if (!e) return std::nullopt;
      TokenStream ts = stream(*e);
      const Token at = ts.peek();
      Expr ex = detail::parse_expression(ts, {});
      finish(ts);
      const double v = evaluate_constant(ts, at, ex);
      return Scalar{std::move(ex), v};
    };
    if (const Entry* e = find("class")) {
      TokenStream ts = stream(*e);
      const Token t = ts.expect(Tok::Ident, "an operator class name");
      finish(ts);
      spec.declared_class = class_from_name(t.text);
      if (!spec.declared_class) ts.fail_semantic(t, "unknown operator class '" + std::string(t.text) + "'");
    }
    spec.alpha = read("alpha");
    spec.beta = read("beta");
    spec.gamma = read("gamma");
  }

  void parse_run(ProblemSpec& spec) {
    const Entry& eps = require("epsilon", Section::Run);
    {
      TokenStream ts = stream(eps);
      do {
        const Token at = ts.peek();
        const double v = constant(ts);
        if (!(v > 0.0)) ts.fail_semantic(at, "epsilon must be positive");
        spec.epsilons.push_back(v);
      } while (ts.accept(Tok::Comma));
      finish(ts);
    }
    auto positive_real = [&](const char* key, double& out) {
      if (const Entry* e = find(key)) {
        TokenStream ts = stream(*e);
        const Token at = ts.peek();
        out = constant(ts);
        finish(ts);
        if (!(out > 0.0)) ts.fail_semantic(at, std::string(key) + " must be positive");
      }
    };
    auto positive_int = [&](const char* key, auto& out) {
      if (const Entry* e = find(key)) {
        TokenStream ts = stream(*e);
        const Token at = ts.peek();
        const long v = integer(ts, key);
        finish(ts);
        if (v < 1) ts.fail_semantic(at, std::string(key) + " must be a positive integer");
        out = static_cast<std::remove_reference_t<decltype(out)>>(v);
      }
    };
    positive_real("grid", spec.grid.h);
    positive_int("max_points", spec.grid.max_points);
    positive_int("max_iter", spec.solver.max_iter);
    positive_int("budget", spec.budget);
    if (const Entry* e = find("divergence_factor")) {
      TokenStream ts = stream(*e);
      const Token at = ts.peek();
      spec.solver.divergence_factor = constant(ts);
      finish(ts);
      if (!(spec.solver.divergence_factor > 1.0)) ts.fail_semantic(at, "divergence_factor must exceed 1");
    }
    if (const Entry* e = find("x0")) {
      TokenStream ts = stream(*e);
      spec.solver.x0 = constant(ts);
      finish(ts);
    }
    if (const Entry* e = find("seed")) {
      TokenStream ts = stream(*e);
      const Token at = ts.peek();
      const long v = integer(ts, "seed");
      finish(ts);
      if (v < 0) ts.fail_semantic(at, "seed must be non-negative");
      spec.seed = static_cast<std::uint64_t>(v);
    }
  }

  std::string_view text_;
  std::set<Section> seen_sections_;
  std::map<std::string, Entry> entries_;
  std::vector<Entry> branches_;
};

std::string guard_str(const Guard& g) {
  if (const auto* iv = std::get_if<Interval>(&g)) return iv->str();
  return "X" + std::to_string(std::get<SetGuard>(g).index + 1);
}

}  // namespace

ProblemSpec parse_spec(std::string_view text) { return SpecParser(text).run(); }

ProblemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open problem file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string serialize_spec(const ProblemSpec& spec) {
  std::ostringstream os;
  os << "[space]\n";
  os << "m = " << spec.m << "\n";
  for (std::size_t i = 0; i < spec.subsets.size(); ++i) os << "X" << (i + 1) << " = " << spec.subsets[i].str() << "\n";
  os << "metric = " << spec.gmetric.str() << "\n";

  os << "\n[map]\n";
  if (spec.map.is_single_expression()) {
    os << "map = " << spec.map.fallback->str() << "\n";
  } else {
    for (const auto& b : spec.map.branches) os << "branch = " << guard_str(b.guard) << " : " << b.body.str() << "\n";
    if (spec.map.fallback) os << "default = " << spec.map.fallback->str() << "\n";
  }

  os << "\n[params]\n";
  if (spec.declared_class) os << "class = " << class_name(*spec.declared_class) << "\n";
  if (spec.alpha) os << "alpha = " << spec.alpha->expr.str() << "\n";
  if (spec.beta) os << "beta = " << spec.beta->expr.str() << "\n";
  if (spec.gamma) os << "gamma = " << spec.gamma->expr.str() << "\n";

  os << "\n[run]\n";
  os << "epsilon = ";
  for (std::size_t i = 0; i < spec.epsilons.size(); ++i) os << (i ? ", " : "") << format_number(spec.epsilons[i]);
  os << "\n";
  os << "grid = " << format_number(spec.grid.h) << "\n";
  os << "max_points = " << spec.grid.max_points << "\n";
  if (spec.solver.x0) os << "x0 = " << format_number(*spec.solver.x0) << "\n";
  os << "max_iter = " << spec.solver.max_iter << "\n";
  os << "divergence_factor = " << format_number(spec.solver.divergence_factor) << "\n";
  os << "budget = " << spec.budget << "\n";
  os << "seed = " << spec.seed << "\n";
  return os.str();
}

}  // namespace afp
