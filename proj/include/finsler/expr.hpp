#pragma once

// A small arithmetic expression language for metric coefficients.
//
// Grammar (precedence from loosest to tightest):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          -- right associative
//   primary := number | xN | yN | fn '(' expr ')' | '(' expr ')'
// with fn one of sqrt, exp, ln, sin, cos. Variables are 1-based.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

enum class VarKind { X, Y };
enum class UnaryFn { Neg, Sqrt, Exp, Ln, Sin, Cos };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

class Expr {
 public:
  struct Literal {
    double value;
  };
  struct Variable {
    VarKind kind;
    int index;  // 0-based
  };
  struct Unary;
  struct Binary;
  using Payload = std::variant<Literal, Variable, Unary, Binary>;

  Expr();
  Expr(Literal l);
  Expr(Variable v);
  Expr(Unary u);
  Expr(Binary b);

  static Expr lit(double v);
  static Expr x(int i);
  static Expr y(int i);

  const Payload& payload() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(node_.get());
  }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Payload> node_;
};

struct Expr::Unary {
  UnaryFn fn;
  Expr operand;
};
struct Expr::Binary {
  BinaryOp op;
  Expr lhs, rhs;
};

inline Expr::Expr() : Expr(Literal{0.0}) {}
inline Expr::Expr(Literal l) : node_(std::make_shared<const Payload>(l)) {}
inline Expr::Expr(Variable v) : node_(std::make_shared<const Payload>(v)) {}
inline Expr::Expr(Unary u) : node_(std::make_shared<const Payload>(std::move(u))) {}
inline Expr::Expr(Binary b) : node_(std::make_shared<const Payload>(std::move(b))) {}

inline const Expr::Payload& Expr::payload() const { return *node_; }

inline Expr Expr::lit(double v) { return Literal{v}; }
inline Expr Expr::x(int i) { return Variable{VarKind::X, i}; }
inline Expr Expr::y(int i) { return Variable{VarKind::Y, i}; }

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& pa = a.payload();
  const auto& pb = b.payload();
  if (pa.index() != pb.index()) return false;
  if (auto l = a.as<Expr::Literal>()) return l->value == b.as<Expr::Literal>()->value;
  if (auto v = a.as<Expr::Variable>()) {
    auto w = b.as<Expr::Variable>();
    return v->kind == w->kind && v->index == w->index;
  }
  if (auto u = a.as<Expr::Unary>()) {
    auto w = b.as<Expr::Unary>();
    return u->fn == w->fn && u->operand == w->operand;
  }
  auto p = a.as<Expr::Binary>();
  auto q = b.as<Expr::Binary>();
  return p->op == q->op && p->lhs == q->lhs && p->rhs == q->rhs;
}

inline Expr operator+(Expr a, Expr b) { return Expr::Binary{BinaryOp::Add, std::move(a), std::move(b)}; }
inline Expr operator-(Expr a, Expr b) { return Expr::Binary{BinaryOp::Sub, std::move(a), std::move(b)}; }
inline Expr operator*(Expr a, Expr b) { return Expr::Binary{BinaryOp::Mul, std::move(a), std::move(b)}; }
inline Expr operator/(Expr a, Expr b) { return Expr::Binary{BinaryOp::Div, std::move(a), std::move(b)}; }
inline Expr operator-(Expr a) { return Expr::Unary{UnaryFn::Neg, std::move(a)}; }
inline Expr pow(Expr a, Expr b) { return Expr::Binary{BinaryOp::Pow, std::move(a), std::move(b)}; }
inline Expr call(UnaryFn fn, Expr a) { return Expr::Unary{fn, std::move(a)}; }

// ---------------------------------------------------------------------------
// Parsing

namespace expr_detail {

struct FunctionName {
  std::string_view name;
  UnaryFn fn;
};
inline constexpr FunctionName kFunctions[] = {{"sqrt", UnaryFn::Sqrt},
                                              {"exp", UnaryFn::Exp},
                                              {"ln", UnaryFn::Ln},
                                              {"sin", UnaryFn::Sin},
                                              {"cos", UnaryFn::Cos}};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = lhs + term();
      else if (accept('-'))
        lhs = lhs - term();
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = lhs * unary();
      else if (accept('/'))
        lhs = lhs / unary();
      else
        return lhs;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        digits();
      else
        pos_ = save;
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::lit(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    for (const auto& f : kFunctions) {
      if (name != f.name) continue;
      if (!accept('(')) {
        pos_ = start;
        fail("function '" + std::string(name) + "' needs one argument in parentheses");
      }
      Expr arg = expr();
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') fail("function '" + std::string(name) + "' takes exactly one argument");
      if (!accept(')')) fail("expected ')'");
      return call(f.fn, arg);
    }
    if ((name[0] == 'x' || name[0] == 'y') && name.size() >= 2) {
      int idx = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc() && res.ptr == name.data() + name.size() && idx >= 1 && name[1] != '0') {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') fail("variable '" + std::string(name) + "' cannot be called");
        return name[0] == 'x' ? Expr::x(idx - 1) : Expr::y(idx - 1);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace expr_detail

inline Expr parse(std::string_view text) { return expr_detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printing

namespace expr_detail {

inline int precedence(const Expr& e) {
  if (auto b = e.as<Expr::Binary>()) {
    switch (b->op) {
      case BinaryOp::Add:
      case BinaryOp::Sub: return 1;
      case BinaryOp::Mul:
      case BinaryOp::Div: return 2;
      case BinaryOp::Pow: return 4;
    }
  }
  if (auto u = e.as<Expr::Unary>(); u && u->fn == UnaryFn::Neg) return 3;
  return 5;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print(const Expr& e, std::string& out);

inline void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

inline void print(const Expr& e, std::string& out) {
  if (auto l = e.as<Expr::Literal>()) {
    if (l->value < 0 || std::signbit(l->value)) {
      out += "(-" + format_number(-l->value) + ")";
    } else {
      out += format_number(l->value);
    }
  } else if (auto v = e.as<Expr::Variable>()) {
    out += (v->kind == VarKind::X ? 'x' : 'y');
    out += std::to_string(v->index + 1);
  } else if (auto u = e.as<Expr::Unary>()) {
    if (u->fn == UnaryFn::Neg) {
      out += '-';
      print_wrapped(u->operand, precedence(u->operand) < 3, out);
    } else {
      for (const auto& f : kFunctions)
        if (f.fn == u->fn) out += f.name;
      out += '(';
      print(u->operand, out);
      out += ')';
    }
  } else {
    auto b = e.as<Expr::Binary>();
    const int p = precedence(e);
    if (b->op == BinaryOp::Pow) {
      print_wrapped(b->lhs, precedence(b->lhs) <= p, out);
      out += '^';
      print_wrapped(b->rhs, precedence(b->rhs) < p, out);
      return;
    }
    print_wrapped(b->lhs, precedence(b->lhs) < p, out);
    static constexpr const char* sym[] = {" + ", " - ", "*", "/"};
    out += sym[static_cast<int>(b->op)];
    print_wrapped(b->rhs, precedence(b->rhs) <= p, out);
  }
}

}  // namespace expr_detail

inline std::string to_string(const Expr& e) {
  std::string out;
  expr_detail::print(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Largest 0-based index of a variable of the given kind, or -1.
inline int max_variable_index(const Expr& e, VarKind kind) {
  if (auto v = e.as<Expr::Variable>()) return v->kind == kind ? v->index : -1;
  if (auto u = e.as<Expr::Unary>()) return max_variable_index(u->operand, kind);
  if (auto b = e.as<Expr::Binary>())
    return std::max(max_variable_index(b->lhs, kind), max_variable_index(b->rhs, kind));
  return -1;
}

inline bool is_constant(const Expr& e) {
  return max_variable_index(e, VarKind::X) < 0 && max_variable_index(e, VarKind::Y) < 0;
}

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

namespace expr_detail {

template <class T>
T make_constant(double v, std::span<const T> xs, std::span<const T> ys) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    const T* ref = !xs.empty() ? &xs[0] : (!ys.empty() ? &ys[0] : nullptr);
    if (!ref) return T::constant(0, 0, v);
    return T::constant(ref->num_vars(), ref->order(), v);
  }
}

}  // namespace expr_detail

/// Evaluates e with x-variables bound to xs and y-variables to ys. T is
/// double or MultiJet; domain violations raise SingularEvaluation.
template <class T>
T evaluate(const Expr& e, std::span<const T> xs, std::span<const T> ys = {}) {
  if (auto l = e.as<Expr::Literal>()) return expr_detail::make_constant<T>(l->value, xs, ys);
  if (auto v = e.as<Expr::Variable>()) {
    auto vals = v->kind == VarKind::X ? xs : ys;
    if (v->index >= static_cast<int>(vals.size()))
      throw UnboundVariable("unbound variable " + std::string(v->kind == VarKind::X ? "x" : "y") +
                            std::to_string(v->index + 1));
    return vals[v->index];
  }
  if (auto u = e.as<Expr::Unary>()) {
    T a = evaluate<T>(u->operand, xs, ys);
    switch (u->fn) {
      case UnaryFn::Neg: return -a;
      case UnaryFn::Sqrt: return math::sqrt(a);
      case UnaryFn::Exp: return math::exp(a);
      case UnaryFn::Ln: return math::log(a);
      case UnaryFn::Sin: return math::sin(a);
      case UnaryFn::Cos: return math::cos(a);
    }
  }
  auto b = e.as<Expr::Binary>();
  if (b->op == BinaryOp::Pow) {
    T base = evaluate<T>(b->lhs, xs, ys);
    if (is_constant(b->rhs)) return math::pow(base, evaluate<double>(b->rhs, {}, {}));
    return math::pow(base, evaluate<T>(b->rhs, xs, ys));
  }
  T lhs = evaluate<T>(b->lhs, xs, ys);
  T rhs = evaluate<T>(b->rhs, xs, ys);
  switch (b->op) {
    case BinaryOp::Add: return lhs + rhs;
    case BinaryOp::Sub: return lhs - rhs;
    case BinaryOp::Mul: return lhs * rhs;
    case BinaryOp::Div: return math::div(lhs, rhs);
    case BinaryOp::Pow: break;
  }
  return lhs;
}

template <class T>
T evaluate(const Expr& e, const std::vector<T>& xs, const std::vector<T>& ys = {}) {
  return evaluate<T>(e, std::span<const T>(xs), std::span<const T>(ys));
}

}  // namespace finsler
