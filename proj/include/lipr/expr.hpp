// SPDX-License-Identifier: Apache-2.0
//
// Small expression grammar for closed-form exact solutions. Supported:
// + - * / ^, unary minus, sin cos exp tanh, constants pi and e, and the
// variables x (and t for space-time problems). Expressions are evaluated
// on jets, so an exact solution is differentiated by the same engine that
// differentiates networks.

#ifndef LIPR_EXPR_HPP
#define LIPR_EXPR_HPP

#include <memory>
#include <span>
#include <string>

#include "lipr/jet.hpp"

namespace lipr {

class Expr {
 public:
  // Throws std::invalid_argument with a position hint on parse failure.
  static Expr parse(const std::string& text);

  Expr() = default;
  bool valid() const { return root_ != nullptr; }
  const std::string& text() const { return text_; }

  // inputs[0] = x, inputs[1] = t (when present). Size must be >= the
  // variables referenced by the expression.
  Jet3 eval(std::span<const double> inputs, int dim) const;
  double value(std::span<const double> inputs) const;

  struct Node;  // definition local to expr.cpp

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace lipr

#endif  // LIPR_EXPR_HPP
