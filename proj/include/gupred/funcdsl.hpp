/**
 * @file funcdsl.hpp
 * @brief Arithmetic expressions for deformation functions, potentials and Hamiltonians.
 *
 * Grammar (whitespace-insensitive):
 *
 *   expr    ::= term { ("+" | "-") term }
 *   term    ::= unary { ("*" | "/") unary }
 *   unary   ::= "-" unary | power
 *   power   ::= primary [ "^" unary ]          (right associative, binds tighter than unary -)
 *   primary ::= number | variable | func "(" expr ")" | "(" expr ")"
 *
 * Variables are q0..q9, p0..p9, t and psq (sum of squared momenta of the
 * active layout). Functions: exp, sqrt, sin, cos, sgn.
 */
#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gupred/numcalc.hpp"
#include "gupred/sampling.hpp"
#include "gupred/types.hpp"

namespace gupred::dsl {

struct ParseError : Error {
  ParseError(std::size_t at, std::vector<std::string> expect, const std::string& found)
      : Error(make_message(at, expect, found)), offset(at), expected(std::move(expect)) {}

  std::size_t offset;
  std::vector<std::string> expected;

 private:
  static std::string make_message(std::size_t at, const std::vector<std::string>& expect,
                                  const std::string& found) {
    std::string msg = "parse error at offset " + std::to_string(at) + ": expected ";
    for (std::size_t i = 0; i < expect.size(); ++i) {
      msg += (i ? " | " : "") + expect[i];
    }
    return msg + ", found " + found;
  }
};

struct UnknownIdentifier : Error {
  UnknownIdentifier(std::string id, std::size_t at)
      : Error("unknown identifier '" + id + "' at offset " + std::to_string(at)), name(std::move(id)), offset(at) {}
  std::string name;
  std::size_t offset;
};

struct ArityError : Error {
  using Error::Error;
};

struct UnboundVariable : Error {
  explicit UnboundVariable(const std::string& id) : Error("unbound variable '" + id + "'"), name(id) {}
  std::string name;
};

enum class BinaryOp : char { add = '+', sub = '-', mul = '*', div = '/', pow = '^' };
enum class Function { exp, sqrt, sin, cos, sgn };

inline const char* function_name(Function f) {
  switch (f) {
    case Function::exp: return "exp";
    case Function::sqrt: return "sqrt";
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::sgn: return "sgn";
  }
  return "?";
}

inline std::optional<Function> lookup_function(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, Function>, 5> table{{
      {"exp", Function::exp}, {"sqrt", Function::sqrt}, {"sin", Function::sin},
      {"cos", Function::cos}, {"sgn", Function::sgn}}};
  for (const auto& [n, f] : table) {
    if (n == name) {
      return f;
    }
  }
  return std::nullopt;
}

/// Slot values used by bound expressions.
inline constexpr int kUnboundSlot = -1;
inline constexpr int kPsqSlot = -2;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { number, variable, negate, binary, call };

  Kind kind = Kind::number;
  double value = 0.0;
  std::string name{};
  int slot = kUnboundSlot;
  BinaryOp op = BinaryOp::add;
  Function func = Function::exp;
  NodePtr lhs{};
  NodePtr rhs{};
};

inline bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) {
    return a == b;
  }
  if (a->kind != b->kind) {
    return false;
  }
  switch (a->kind) {
    case Node::Kind::number: return a->value == b->value;
    case Node::Kind::variable: return a->name == b->name;
    case Node::Kind::negate: return same_tree(a->lhs, b->lhs);
    case Node::Kind::binary: return a->op == b->op && same_tree(a->lhs, b->lhs) && same_tree(a->rhs, b->rhs);
    case Node::Kind::call: return a->func == b->func && same_tree(a->lhs, b->lhs);
  }
  return false;
}

/// Immutable parsed expression; cheap to copy and share across threads.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  [[nodiscard]] const NodePtr& root() const { return root_; }
  [[nodiscard]] bool empty() const { return !root_; }

  friend bool operator==(const Expr& a, const Expr& b) { return same_tree(a.root_, b.root_); }

  /// Fully parenthesised text; parse(print(e)) reproduces e.
  [[nodiscard]] std::string print() const { return print_node(root_); }

  /// Names of all free variables.
  [[nodiscard]] std::set<std::string> variables() const {
    std::set<std::string> out;
    collect(root_, out);
    return out;
  }

 private:
  static std::string print_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  static std::string print_node(const NodePtr& n) {
    if (!n) {
      return "";
    }
    switch (n->kind) {
      case Node::Kind::number: return print_number(n->value);
      case Node::Kind::variable: return n->name;
      case Node::Kind::negate: return "(-" + print_node(n->lhs) + ")";
      case Node::Kind::binary:
        return "(" + print_node(n->lhs) + " " + static_cast<char>(n->op) + " " + print_node(n->rhs) + ")";
      case Node::Kind::call: return std::string(function_name(n->func)) + "(" + print_node(n->lhs) + ")";
    }
    return "";
  }

  static void collect(const NodePtr& n, std::set<std::string>& out) {
    if (!n) {
      return;
    }
    if (n->kind == Node::Kind::variable) {
      out.insert(n->name);
    }
    collect(n->lhs, out);
    collect(n->rhs, out);
  }

  NodePtr root_{};
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_variable_name(std::string_view id) {
  if (id == "t" || id == "psq") {
    return true;
  }
  return id.size() == 2 && (id[0] == 'q' || id[0] == 'p') && id[1] >= '0' && id[1] <= '9';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    skip_space();
    if (pos_ >= src_.size()) {
      throw ParseError(pos_, {"expression"}, "end of input");
    }
    NodePtr root = expression();
    skip_space();
    if (pos_ < src_.size()) {
      throw ParseError(pos_, {"operator", "end of input"}, quote(src_[pos_]));
    }
    return Expr(std::move(root));
  }

 private:
  static std::string quote(char c) { return std::string("'") + c + "'"; }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  std::string found() { return pos_ < src_.size() ? quote(src_[pos_]) : "end of input"; }

  static NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      lhs = binary(static_cast<BinaryOp>(c), lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      lhs = binary(static_cast<BinaryOp>(c), lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek() == '-') {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::negate;
      n->lhs = unary();
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek() == '^') {
      ++pos_;
      return binary(BinaryOp::pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const char c = peek();
    const std::size_t start = pos_;
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      if (peek() != ')') {
        throw ParseError(pos_, {"')'"}, found());
      }
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string id(src_.substr(start, pos_ - start));
      if (auto fn = lookup_function(id)) {
        return call(*fn, id, start);
      }
      if (peek() == '(') {
        throw UnknownIdentifier(id, start);
      }
      if (!is_variable_name(id)) {
        throw UnknownIdentifier(id, start);
      }
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::variable;
      n->name = id;
      return n;
    }
    throw ParseError(pos_, {"number", "identifier", "'('", "'-'"}, found());
  }

  NodePtr call(Function fn, const std::string& id, std::size_t start) {
    if (peek() != '(') {
      throw ParseError(pos_, {"'('"}, found());
    }
    ++pos_;
    if (peek() == ')') {
      throw ArityError("function '" + id + "' at offset " + std::to_string(start) + " takes 1 argument, got 0");
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::call;
    n->func = fn;
    n->lhs = expression();
    std::size_t args = 1;
    while (peek() == ',') {
      ++pos_;
      expression();
      ++args;
    }
    if (args != 1) {
      throw ArityError("function '" + id + "' at offset " + std::to_string(start) + " takes 1 argument, got " +
                       std::to_string(args));
    }
    if (peek() != ')') {
      throw ParseError(pos_, {"')'"}, found());
    }
    ++pos_;
    return n;
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) {
        ++look;
      }
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          ++pos_;
        }
      }
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(start, {"number"}, "'" + std::string(first, last) + "'");
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = v;
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline double apply(Function f, double x) {
  switch (f) {
    case Function::exp: return std::exp(x);
    case Function::sqrt: return std::sqrt(x);
    case Function::sin: return std::sin(x);
    case Function::cos: return std::cos(x);
    case Function::sgn: return static_cast<double>((x > 0.0) - (x < 0.0));
  }
  return 0.0;
}

inline double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::pow: return std::pow(a, b);
  }
  return 0.0;
}

inline double finite_or_throw(double v, const Node& n) {
  if (!std::isfinite(v)) {
    std::string where;
    switch (n.kind) {
      case Node::Kind::binary: where = std::string("operator '") + static_cast<char>(n.op) + "'"; break;
      case Node::Kind::call: where = std::string("function '") + function_name(n.func) + "'"; break;
      default: where = "operand"; break;
    }
    throw NonFiniteResult("non-finite value produced by " + where);
  }
  return v;
}

template <class Lookup>
double evaluate(const Node& n, const Lookup& lookup) {
  switch (n.kind) {
    case Node::Kind::number: return n.value;
    case Node::Kind::variable: return finite_or_throw(lookup(n), n);
    case Node::Kind::negate: return -evaluate(*n.lhs, lookup);
    case Node::Kind::binary:
      return finite_or_throw(apply(n.op, evaluate(*n.lhs, lookup), evaluate(*n.rhs, lookup)), n);
    case Node::Kind::call: return finite_or_throw(apply(n.func, evaluate(*n.lhs, lookup)), n);
  }
  return 0.0;
}

}  // namespace detail

inline Expr parse(std::string_view src) { return detail::Parser(src).run(); }

/// IEEE evaluation with named bindings. psq must be bound explicitly here.
inline double eval(const Expr& e, const std::map<std::string, double>& bindings) {
  if (e.empty()) {
    throw UnboundVariable("<empty expression>");
  }
  return detail::evaluate(*e.root(), [&](const Node& n) {
    auto it = bindings.find(n.name);
    if (it == bindings.end()) {
      throw UnboundVariable(n.name);
    }
    return it->second;
  });
}

// ---------------------------------------------------------------------------
// Layouts: how expression variables map onto phase-space coordinates
// ---------------------------------------------------------------------------

/// Coordinates are named q{first}..q{first+dim-1}, p{first}..; index 0 is only
/// used by the Bianchi layout (q0 is the Misner volume variable).
struct VariableLayout {
  int dim = 1;
  int first_index = 1;

  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (char block : {'q', 'p'}) {
      for (int i = 0; i < dim; ++i) {
        out.push_back(std::string(1, block) + std::to_string(first_index + i));
      }
    }
    return out;
  }

  /// Phase-space slot of a variable name, kPsqSlot for psq, kUnboundSlot otherwise.
  [[nodiscard]] int slot_of(const std::string& name) const {
    if (name == "psq") {
      return kPsqSlot;
    }
    if (name.size() == 2 && (name[0] == 'q' || name[0] == 'p')) {
      const int idx = name[1] - '0' - first_index;
      if (idx >= 0 && idx < dim) {
        return (name[0] == 'q' ? 0 : dim) + idx;
      }
    }
    return kUnboundSlot;
  }
};

/// Throws UnknownIdentifier for any variable the layout cannot resolve.
/// The time variable t is accepted only when allow_time is set.
inline void check_resolvable(const Expr& e, const VariableLayout& layout, bool allow_time = false) {
  for (const auto& v : e.variables()) {
    if (v == "t" && allow_time) {
      continue;
    }
    if (layout.slot_of(v) == kUnboundSlot) {
      throw UnknownIdentifier(v, 0);
    }
  }
}

namespace detail {

inline NodePtr bind_slots(const NodePtr& n, const std::map<std::string, int>& slots) {
  if (!n) {
    return n;
  }
  auto out = std::make_shared<Node>(*n);
  if (n->kind == Node::Kind::variable) {
    auto it = slots.find(n->name);
    if (it == slots.end()) {
      throw UnknownIdentifier(n->name, 0);
    }
    out->slot = it->second;
  }
  out->lhs = bind_slots(n->lhs, slots);
  out->rhs = bind_slots(n->rhs, slots);
  return out;
}

}  // namespace detail

/// Scalar field over a phase space of the given layout (arity 2*dim).
inline ScalarField phase_field(const Expr& e, const VariableLayout& layout) {
  check_resolvable(e, layout);
  std::map<std::string, int> slots;
  for (const auto& v : e.variables()) {
    slots[v] = layout.slot_of(v);
  }
  const NodePtr bound = detail::bind_slots(e.root(), slots);
  const int d = layout.dim;
  return ScalarField(2 * d, [bound, d](const Vector& x) {
    return detail::evaluate(*bound, [&](const Node& n) {
      if (n.slot == kPsqSlot) {
        return x.tail(d).squaredNorm();
      }
      return x(n.slot);
    });
  });
}

/// Scalar field over an explicit ordered list of variable names.
inline ScalarField named_field(const Expr& e, const std::vector<std::string>& names) {
  std::map<std::string, int> slots;
  for (std::size_t i = 0; i < names.size(); ++i) {
    slots[names[i]] = static_cast<int>(i);
  }
  for (const auto& v : e.variables()) {
    if (!slots.count(v)) {
      throw UnknownIdentifier(v, 0);
    }
  }
  const NodePtr bound = detail::bind_slots(e.root(), slots);
  return ScalarField(static_cast<int>(names.size()), [bound](const Vector& x) {
    return detail::evaluate(*bound, [&](const Node& n) { return x(n.slot); });
  });
}

// ---------------------------------------------------------------------------
// Rotational guard
// ---------------------------------------------------------------------------

struct GuardOptions {
  int samples = 50;
  int rotations = 10;
  double tolerance = 1e-9;
  std::uint64_t seed = 20240531;
};

/// Numerical test that the momentum dependence of e factors through |p|:
/// e(q, R p) == e(q, p) for seeded p and rotations R. Deviations are measured
/// relative to max(1, |e(q, p)|).
inline bool rotational_guard(const Expr& e, int dim, const GuardOptions& opt = {}) {
  const VariableLayout layout{dim, 1};
  const ScalarField field = phase_field(e, layout);
  Sampler sampler(opt.seed);
  for (int s = 0; s < opt.samples; ++s) {
    const Vector q = sampler.uniform(dim, -2.0, 2.0);
    const Vector p = sampler.uniform(dim, -2.0, 2.0);
    double base = 0.0;
    try {
      base = field(PhasePoint(q, p).coords());
    } catch (const NonFiniteResult&) {
      continue;
    }
    for (int r = 0; r < opt.rotations; ++r) {
      const Matrix rot = sampler.rotation(dim);
      double turned = 0.0;
      try {
        turned = field(PhasePoint(q, rot * p).coords());
      } catch (const NonFiniteResult&) {
        return false;
      }
      if (std::abs(turned - base) > opt.tolerance * std::max(1.0, std::abs(base))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace gupred::dsl
