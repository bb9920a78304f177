// SPDX-License-Identifier: Apache-2.0

#include "lipr/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lipr {

namespace {
enum class Op { constant, var, add, sub, mul, div, pow, neg, fsin, fcos, fexp, ftanh };
}

struct Expr::Node {
  Op op;
  double k = 0.0;  // constant value
  int var = 0;     // variable index: 0 = x, 1 = t
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression parse error at position " +
                                std::to_string(pos) + ": " + what + " in '" +
                                s + "'");
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  static NodePtr constant(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::constant;
    n->k = v;
    return n;
  }

  NodePtr parse_expression() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+'))
        lhs = make(Op::add, lhs, parse_term());
      else if (eat('-'))
        lhs = make(Op::sub, lhs, parse_term());
      else
        return lhs;
    }
  }
  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (eat('*'))
        lhs = make(Op::mul, lhs, parse_unary());
      else if (eat('/'))
        lhs = make(Op::div, lhs, parse_unary());
      else
        return lhs;
    }
  }
  NodePtr parse_unary() {
    if (eat('-')) return make(Op::neg, parse_unary());
    return parse_power();
  }
  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) {
      NodePtr e = parse_unary();  // right-assoc
      // Fold a leading minus; anything non-constant is rejected up front.
      if (e->op == Op::neg && e->a->op == Op::constant)
        e = constant(-e->a->k);
      if (e->op != Op::constant)
        fail("exponent must be a numeric constant");
      return make(Op::pow, base, e);
    }
    return base;
  }
  NodePtr parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = parse_expression();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s.substr(pos), &used);
      pos += used;
      return constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos;
      while (end < s.size() &&
             std::isalpha(static_cast<unsigned char>(s[end])))
        ++end;
      const std::string name = s.substr(pos, end - pos);
      pos = end;
      if (name == "x") {
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::var;
        n->var = 0;
        return n;
      }
      if (name == "t") {
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::var;
        n->var = 1;
        return n;
      }
      if (name == "pi") return constant(M_PI);
      if (name == "e") return constant(M_E);
      Op fn;
      if (name == "sin")
        fn = Op::fsin;
      else if (name == "cos")
        fn = Op::fcos;
      else if (name == "exp")
        fn = Op::fexp;
      else if (name == "tanh")
        fn = Op::ftanh;
      else
        fail("unknown identifier '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      NodePtr arg = parse_expression();
      if (!eat(')')) fail("expected ')'");
      return make(fn, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

Jet3 eval_node(const Expr::Node& n, std::span<const double> in, int dim) {
  switch (n.op) {
    case Op::constant:
      return Jet3::constant(dim, n.k);
    case Op::var:
      if (n.var >= static_cast<int>(in.size()))
        throw std::invalid_argument("expression references variable 't' but "
                                    "the problem has no time coordinate");
      return Jet3::variable(dim, n.var, in[n.var]);
    case Op::add:
      return eval_node(*n.a, in, dim) + eval_node(*n.b, in, dim);
    case Op::sub:
      return eval_node(*n.a, in, dim) - eval_node(*n.b, in, dim);
    case Op::mul:
      return eval_node(*n.a, in, dim) * eval_node(*n.b, in, dim);
    case Op::div:
      return eval_node(*n.a, in, dim) / eval_node(*n.b, in, dim);
    case Op::pow: {
      if (n.b->op != Op::constant)
        throw std::invalid_argument(
            "expression: exponent must be a numeric constant");
      return pow(eval_node(*n.a, in, dim), n.b->k);
    }
    case Op::neg:
      return -eval_node(*n.a, in, dim);
    case Op::fsin:
      return sin(eval_node(*n.a, in, dim));
    case Op::fcos:
      return cos(eval_node(*n.a, in, dim));
    case Op::fexp:
      return exp(eval_node(*n.a, in, dim));
    case Op::ftanh:
      return tanh(eval_node(*n.a, in, dim));
  }
  throw std::logic_error("expression: unreachable");
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  Expr e;
  e.root_ = p.parse_expression();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  e.text_ = text;
  return e;
}

Jet3 Expr::eval(std::span<const double> inputs, int dim) const {
  if (!root_) throw std::logic_error("empty expression");
  return eval_node(*root_, inputs, dim);
}

double Expr::value(std::span<const double> inputs) const {
  return eval(inputs, static_cast<int>(inputs.size())).value();
}

}  // namespace lipr
