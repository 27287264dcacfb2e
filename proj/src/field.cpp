#include "critshape/field.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "critshape/error.hpp"

namespace critshape {

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

bool is_integer(double v) { return std::isfinite(v) && v == std::round(v); }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const char* function_name(Expr::Op op) {
  switch (op) {
    case Expr::Op::Exp: return "exp";
    case Expr::Op::Log: return "log";
    case Expr::Op::Sin: return "sin";
    case Expr::Op::Cos: return "cos";
    case Expr::Op::Sqrt: return "sqrt";
    case Expr::Op::Abs: return "abs";
    default: return nullptr;
  }
}

}  // namespace

Expr Expr::constant(double v) { return Expr(std::make_shared<const Node>(Node{Op::Const, v, nullptr, nullptr})); }
Expr Expr::x() { return Expr(std::make_shared<const Node>(Node{Op::X, 0.0, nullptr, nullptr})); }
Expr Expr::y() { return Expr(std::make_shared<const Node>(Node{Op::Y, 0.0, nullptr, nullptr})); }

Expr::Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
bool Expr::is_constant(double v) const { return node_->op == Op::Const && node_->value == v; }

Expr Expr::make(Op op, Expr lhs, Expr rhs) {
  const bool lc = lhs.node_ && lhs.op() == Op::Const;
  const bool rc = rhs.node_ && rhs.op() == Op::Const;
  // constant folding and neutral elements
  switch (op) {
    case Op::Add:
      if (lc && rc) return constant(lhs.value() + rhs.value());
      if (lhs.is_constant(0.0)) return rhs;
      if (rhs.is_constant(0.0)) return lhs;
      break;
    case Op::Sub:
      if (lc && rc) return constant(lhs.value() - rhs.value());
      if (rhs.is_constant(0.0)) return lhs;
      if (lhs.is_constant(0.0)) return make(Op::Neg, rhs, Expr(nullptr));
      break;
    case Op::Mul:
      if (lc && rc) return constant(lhs.value() * rhs.value());
      if (lhs.is_constant(0.0) || rhs.is_constant(0.0)) return constant(0.0);
      if (lhs.is_constant(1.0)) return rhs;
      if (rhs.is_constant(1.0)) return lhs;
      break;
    case Op::Div:
      if (lc && rc && rhs.value() != 0.0) return constant(lhs.value() / rhs.value());
      if (lhs.is_constant(0.0)) return constant(0.0);
      if (rhs.is_constant(1.0)) return lhs;
      break;
    case Op::Pow:
      if (rhs.is_constant(0.0)) return constant(1.0);
      if (rhs.is_constant(1.0)) return lhs;
      if (lc && rc && lhs.value() > 0.0) return constant(std::pow(lhs.value(), rhs.value()));
      break;
    case Op::Neg:
      if (lc) return constant(-lhs.value());
      if (lhs.op() == Op::Neg) return Expr(lhs.node_->lhs);
      break;
    default:
      break;
  }
  return Expr(std::make_shared<const Node>(Node{op, 0.0, std::move(lhs.node_), std::move(rhs.node_)}));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Op::Neg, a, Expr(nullptr)); }
Expr pow(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Pow, a, b); }
Expr apply(Expr::Op fn, const Expr& a) {
  if (a.op() == Expr::Op::Const) {
    const double v = a.value();
    switch (fn) {
      case Expr::Op::Exp: return Expr::constant(std::exp(v));
      case Expr::Op::Sin: return Expr::constant(std::sin(v));
      case Expr::Op::Cos: return Expr::constant(std::cos(v));
      case Expr::Op::Abs: return Expr::constant(std::abs(v));
      case Expr::Op::Log:
        if (v > 0) return Expr::constant(std::log(v));
        break;
      case Expr::Op::Sqrt:
        if (v >= 0) return Expr::constant(std::sqrt(v));
        break;
      default: break;
    }
  }
  return Expr::make(fn, a, Expr(nullptr));
}

namespace {

std::string node_str(const Expr::Node& n);

[[noreturn]] void singular(const Expr::Node& at, const std::string& why, double x, double y) {
  throw Error(ErrorKind::DomainError, why + " in '" + node_str(at) + "' at (" + format_number(x) + ", " +
                                          format_number(y) + ")");
}

double eval_node(const Expr::Node& n, double x, double y) {
  using Op = Expr::Op;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::X: return x;
    case Op::Y: return y;
    default: break;
  }
  const double a = eval_node(*n.lhs, x, y);
  switch (n.op) {
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Abs: return std::abs(a);
    case Op::Log:
      if (!(a > 0.0)) singular(n, "log of nonpositive value", x, y);
      return std::log(a);
    case Op::Sqrt:
      if (!(a >= 0.0)) singular(n, "sqrt of negative value", x, y);
      return std::sqrt(a);
    default: break;
  }
  const double b = eval_node(*n.rhs, x, y);
  switch (n.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) singular(n, "division by zero", x, y);
      return a / b;
    case Op::Pow:
      if (a < 0.0 && !is_integer(b)) singular(n, "negative base with fractional exponent", x, y);
      if (a == 0.0 && b < 0.0) singular(n, "zero base with negative exponent", x, y);
      return std::pow(a, b);
    default: break;
  }
  throw Error(ErrorKind::DomainError, "corrupt expression node");
}

std::string node_str(const Expr::Node& n) {
  using Op = Expr::Op;
  switch (n.op) {
    case Op::Const: return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
    case Op::X: return "x";
    case Op::Y: return "y";
    case Op::Neg: return "(-" + node_str(*n.lhs) + ")";
    case Op::Add: return "(" + node_str(*n.lhs) + " + " + node_str(*n.rhs) + ")";
    case Op::Sub: return "(" + node_str(*n.lhs) + " - " + node_str(*n.rhs) + ")";
    case Op::Mul: return "(" + node_str(*n.lhs) + "*" + node_str(*n.rhs) + ")";
    case Op::Div: return "(" + node_str(*n.lhs) + "/" + node_str(*n.rhs) + ")";
    case Op::Pow: return "(" + node_str(*n.lhs) + "^" + node_str(*n.rhs) + ")";
    default: return std::string(function_name(n.op)) + "(" + node_str(*n.lhs) + ")";
  }
}

}  // namespace

double Expr::eval(double x, double y) const { return eval_node(*node_, x, y); }

Expr Expr::diff(int var) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return constant(0.0);
    case Op::X: return constant(var == 0 ? 1.0 : 0.0);
    case Op::Y: return constant(var == 1 ? 1.0 : 0.0);
    default: break;
  }
  const Expr a(n.lhs);
  const Expr da = a.diff(var);
  switch (n.op) {
    case Op::Neg: return -da;
    case Op::Exp: return *this * da;
    case Op::Log: return da / a;
    case Op::Sin: return apply(Op::Cos, a) * da;
    case Op::Cos: return -(apply(Op::Sin, a) * da);
    case Op::Sqrt: return da / (constant(2.0) * *this);
    case Op::Abs: return (a / *this) * da;
    default: break;
  }
  const Expr b(n.rhs);
  const Expr db = b.diff(var);
  switch (n.op) {
    case Op::Add: return da + db;
    case Op::Sub: return da - db;
    case Op::Mul: return da * b + a * db;
    case Op::Div: return da / b - a * db / (b * b);
    case Op::Pow:
      if (b.op() == Op::Const) return b * pow(a, constant(b.value() - 1.0)) * da;
      return *this * (db * apply(Op::Log, a) + b * da / a);
    default: break;
  }
  throw Error(ErrorKind::DomainError, "corrupt expression node");
}

std::string Expr::str() const { return node_str(*node_); }

// ---------------------------------------------------------------------------
// parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
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
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::ParseError, why + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
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
    if (accept('(')) {
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x" || name == "u") return Expr::x();
      if (name == "y") return Expr::y();
      if (name == "pi") return Expr::constant(std::numbers::pi);
      if (name == "e") return Expr::constant(std::numbers::e);
      static const std::pair<const char*, Expr::Op> fns[] = {
          {"exp", Expr::Op::Exp},   {"log", Expr::Op::Log},   {"sin", Expr::Op::Sin},
          {"cos", Expr::Op::Cos},   {"sqrt", Expr::Op::Sqrt}, {"abs", Expr::Op::Abs},
      };
      for (const auto& [fn, op] : fns) {
        if (name == fn) {
          if (!accept('(')) fail("expected '(' after " + name);
          Expr arg = expr();
          if (!accept(')')) fail("expected ')'");
          return apply(op, arg);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(const std::string& text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Expr expr)
    : f_(std::move(expr)),
      fx_(f_.diff(0)),
      fy_(f_.diff(1)),
      fxx_(fx_.diff(0)),
      fxy_(fx_.diff(1)),
      fyy_(fy_.diff(1)) {}

double ScalarField::operator()(const Point& z) const { return f_.eval(z.x(), z.y()); }

Eigen::Vector2d ScalarField::gradient(const Point& z) const {
  return {fx_.eval(z.x(), z.y()), fy_.eval(z.x(), z.y())};
}

double ScalarField::laplacian(const Point& z) const { return fxx_.eval(z.x(), z.y()) + fyy_.eval(z.x(), z.y()); }

double ScalarField::derivative(double u) const { return fx_.eval(u, 0.0); }

Jet ScalarField::eval_jet(const Point& z) const {
  Jet j;
  j.value = (*this)(z);
  j.gradient = gradient(z);
  const double xy = fxy_.eval(z.x(), z.y());
  j.hessian << fxx_.eval(z.x(), z.y()), xy, xy, fyy_.eval(z.x(), z.y());
  return j;
}

Jet eval_jet(const ScalarField& field, const Point& z) { return field.eval_jet(z); }

double log_laplacian_defect(const ScalarField& field, const Point& z) {
  const Jet j = field.eval_jet(z);
  if (!(j.value > 0.0))
    throw Error(ErrorKind::NonpositiveField, "field value " + format_number(j.value) + " at (" +
                                                 format_number(z.x()) + ", " + format_number(z.y()) + ")");
  return j.value * j.hessian.trace() - j.gradient.squaredNorm();
}

double normal_derivative(const ScalarField& field, const BoundaryFrame& frame) {
  return field.gradient(frame.point).dot(frame.normal);
}

}  // namespace critshape
