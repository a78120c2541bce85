#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "magnomech/linalg.hpp"

namespace magnomech {

// Arithmetic expression over q1..qn (and optionally p1..pn). Variables are
// addressed by a stacked index: q_i -> i-1, p_i -> n+i-1.
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0
  explicit Expression(double value);

  // Throws ParseError (with position) or UnknownIdentifier.
  static Expression parse(std::string_view text, Index n, bool allow_momenta);

  Index dim() const { return n_; }
  // `vars` holds q (size n) or the stacked (q, p) (size 2n).
  double eval(const Vec& vars) const;
  Expression derivative(Index var) const;
  bool depends_on(Index var) const;
  bool depends_on_momenta() const;
  bool is_constant() const;
  std::string to_string() const;

  // Arithmetic on already-built expressions (used for generated fields).
  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

 private:
  Expression(std::shared_ptr<const Node> node, Index n) : node_(std::move(node)), n_(n) {}

  std::shared_ptr<const Node> node_;
  Index n_ = 0;
};

}  // namespace magnomech
