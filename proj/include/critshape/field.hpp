#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "critshape/geometry.hpp"

namespace critshape {

// Immutable expression tree over the variables x and y. Nodes are shared,
// so derivative trees reuse the subtrees of their primal.
class Expr {
 public:
  enum class Op { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sin, Cos, Sqrt, Abs };

  static Expr constant(double v);
  static Expr x();
  static Expr y();

  Op op() const;
  double value() const;  // only for Const
  bool is_constant(double v) const;

  double eval(double x, double y) const;
  Expr diff(int var) const;  // var 0 = x, 1 = y
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr apply(Op fn, const Expr& a);

 struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Op op, Expr lhs, Expr rhs);

  std::shared_ptr<const Node> node_;
};

// Parses an infix expression. Grammar (whitespace-insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | 'x' | 'y' | 'u' | 'pi' | 'e'
//            | fn '(' expr ')' | '(' expr ')'
//   fn      := exp | log | sin | cos | sqrt | abs
// 'u' is an alias of 'x' for one-variable nonlinearities g(u).
Expr parse_expression(const std::string& text);

struct Jet {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

// f(x, y) with symbolic first and second derivatives. The mixed derivative
// is built once, so the Hessian is exactly symmetric.
class ScalarField {
 public:
  explicit ScalarField(Expr expr);
  explicit ScalarField(const std::string& text) : ScalarField(parse_expression(text)) {}

  const Expr& expr() const { return f_; }
  std::string str() const { return f_.str(); }

  double operator()(const Point& z) const;
  double operator()(double x) const { return (*this)(Point(x, 0.0)); }
  Eigen::Vector2d gradient(const Point& z) const;
  double laplacian(const Point& z) const;
  // dg/du for one-variable fields
  double derivative(double u) const;
  Jet eval_jet(const Point& z) const;
  ScalarField derivative_field(int var) const { return ScalarField(f_.diff(var)); }

 private:
  Expr f_, fx_, fy_, fxx_, fxy_, fyy_;
};

Jet eval_jet(const ScalarField& field, const Point& z);

// f * lap(f) - |grad f|^2, equal to f^2 * lap(log f). Throws NonpositiveField
// if f(z) <= 0.
double log_laplacian_defect(const ScalarField& field, const Point& z);

double normal_derivative(const ScalarField& field, const BoundaryFrame& frame);

}  // namespace critshape
