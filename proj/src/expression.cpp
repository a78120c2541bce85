#include "magnomech/expression.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magnomech/errors.hpp"

namespace magnomech {

enum class Op { kNum, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };
enum class Fn { kSin, kCos, kTan, kExp, kLog, kSqrt, kSinh, kCosh, kAsinh, kAtan };

struct Expression::Node {
  Op op = Op::kNum;
  double value = 0.0;
  Index var = 0;
  Fn fn = Fn::kSin;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct FnName {
  std::string_view name;
  Fn fn;
};

constexpr std::array<FnName, 10> kFunctions{{{"sin", Fn::kSin},
                                             {"cos", Fn::kCos},
                                             {"tan", Fn::kTan},
                                             {"exp", Fn::kExp},
                                             {"log", Fn::kLog},
                                             {"sqrt", Fn::kSqrt},
                                             {"sinh", Fn::kSinh},
                                             {"cosh", Fn::kCosh},
                                             {"asinh", Fn::kAsinh},
                                             {"atan", Fn::kAtan}}};

std::string_view fn_name(Fn fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

NodePtr num(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::kNum;
  n->value = v;
  return n;
}

NodePtr var(Index i) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::kVar;
  n->var = i;
  return n;
}

bool is_num(const NodePtr& n, double v) { return n->op == Op::kNum && n->value == v; }
bool is_num(const NodePtr& n) { return n->op == Op::kNum; }

NodePtr unary(Op op, NodePtr a) {
  if (op == Op::kNeg) {
    if (is_num(a)) return num(-a->value);
    if (a->op == Op::kNeg) return a->a;
  }
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

double apply(Fn fn, double x) {
  switch (fn) {
    case Fn::kSin: return std::sin(x);
    case Fn::kCos: return std::cos(x);
    case Fn::kTan: return std::tan(x);
    case Fn::kExp: return std::exp(x);
    case Fn::kLog: return std::log(x);
    case Fn::kSqrt: return std::sqrt(x);
    case Fn::kSinh: return std::sinh(x);
    case Fn::kCosh: return std::cosh(x);
    case Fn::kAsinh: return std::asinh(x);
    case Fn::kAtan: return std::atan(x);
  }
  return 0.0;
}

NodePtr call(Fn fn, NodePtr a) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::kCall;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) {
    const double x = a->value;
    const double y = b->value;
    switch (op) {
      case Op::kAdd: return num(x + y);
      case Op::kSub: return num(x - y);
      case Op::kMul: return num(x * y);
      case Op::kDiv:
        if (y != 0.0) return num(x / y);
        break;
      case Op::kPow: {
        const double r = std::pow(x, y);
        if (std::isfinite(r)) return num(r);
        break;
      }
      default: break;
    }
  }
  switch (op) {
    case Op::kAdd:
      if (is_num(a, 0.0)) return b;
      if (is_num(b, 0.0)) return a;
      if (b->op == Op::kNeg) return binary(Op::kSub, a, b->a);
      break;
    case Op::kSub:
      if (is_num(b, 0.0)) return a;
      if (is_num(a, 0.0)) return unary(Op::kNeg, b);
      if (b->op == Op::kNeg) return binary(Op::kAdd, a, b->a);
      break;
    case Op::kMul:
      if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
      if (is_num(a, 1.0)) return b;
      if (is_num(b, 1.0)) return a;
      if (is_num(a, -1.0)) return unary(Op::kNeg, b);
      if (is_num(b, -1.0)) return unary(Op::kNeg, a);
      if (a->op == Op::kNeg) return unary(Op::kNeg, binary(Op::kMul, a->a, b));
      if (b->op == Op::kNeg) return unary(Op::kNeg, binary(Op::kMul, a, b->a));
      break;
    case Op::kDiv:
      if (is_num(a, 0.0) && !is_num(b, 0.0)) return num(0.0);
      if (is_num(b, 1.0)) return a;
      break;
    case Op::kPow:
      if (is_num(b, 1.0)) return a;
      if (is_num(b, 0.0)) return num(1.0);
      break;
    default: break;
  }
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double eval_node(const Expression::Node& n, const Vec& vars) {
  switch (n.op) {
    case Op::kNum: return n.value;
    case Op::kVar:
      if (n.var >= vars.size()) throw UnknownIdentifier("momentum variable used where only q is bound");
      return vars(n.var);
    case Op::kNeg: return -eval_node(*n.a, vars);
    case Op::kAdd: return eval_node(*n.a, vars) + eval_node(*n.b, vars);
    case Op::kSub: return eval_node(*n.a, vars) - eval_node(*n.b, vars);
    case Op::kMul: return eval_node(*n.a, vars) * eval_node(*n.b, vars);
    case Op::kDiv: {
      const double den = eval_node(*n.b, vars);
      if (den == 0.0) throw DivisionByZero("division by zero");
      return eval_node(*n.a, vars) / den;
    }
    case Op::kPow: {
      const double base = eval_node(*n.a, vars);
      const double ex = eval_node(*n.b, vars);
      if (base == 0.0 && ex < 0.0) throw DivisionByZero("zero raised to a negative power");
      return std::pow(base, ex);
    }
    case Op::kCall: return apply(n.fn, eval_node(*n.a, vars));
  }
  return 0.0;
}

bool depends(const Expression::Node& n, Index v) {
  switch (n.op) {
    case Op::kNum: return false;
    case Op::kVar: return n.var == v;
    case Op::kNeg:
    case Op::kCall: return depends(*n.a, v);
    default: return depends(*n.a, v) || depends(*n.b, v);
  }
}

bool has_var_at_least(const Expression::Node& n, Index lo) {
  switch (n.op) {
    case Op::kNum: return false;
    case Op::kVar: return n.var >= lo;
    case Op::kNeg:
    case Op::kCall: return has_var_at_least(*n.a, lo);
    default: return has_var_at_least(*n.a, lo) || has_var_at_least(*n.b, lo);
  }
}

NodePtr diff(const NodePtr& n, Index v) {
  switch (n->op) {
    case Op::kNum: return num(0.0);
    case Op::kVar: return num(n->var == v ? 1.0 : 0.0);
    case Op::kNeg: return unary(Op::kNeg, diff(n->a, v));
    case Op::kAdd: return binary(Op::kAdd, diff(n->a, v), diff(n->b, v));
    case Op::kSub: return binary(Op::kSub, diff(n->a, v), diff(n->b, v));
    case Op::kMul:
      return binary(Op::kAdd, binary(Op::kMul, diff(n->a, v), n->b),
                    binary(Op::kMul, n->a, diff(n->b, v)));
    case Op::kDiv: {
      // (a' b - a b') / b^2
      const NodePtr top = binary(Op::kSub, binary(Op::kMul, diff(n->a, v), n->b),
                                 binary(Op::kMul, n->a, diff(n->b, v)));
      return binary(Op::kDiv, top, binary(Op::kPow, n->b, num(2.0)));
    }
    case Op::kPow: {
      const NodePtr da = diff(n->a, v);
      if (!depends(*n->b, v)) {
        const NodePtr lowered = binary(Op::kPow, n->a, binary(Op::kSub, n->b, num(1.0)));
        return binary(Op::kMul, binary(Op::kMul, n->b, lowered), da);
      }
      // a^b (b' log a + b a' / a)
      const NodePtr inner =
          binary(Op::kAdd, binary(Op::kMul, diff(n->b, v), call(Fn::kLog, n->a)),
                 binary(Op::kDiv, binary(Op::kMul, n->b, da), n->a));
      return binary(Op::kMul, n, inner);
    }
    case Op::kCall: {
      const NodePtr da = diff(n->a, v);
      if (is_num(da, 0.0)) return num(0.0);
      const NodePtr& a = n->a;
      NodePtr outer;
      switch (n->fn) {
        case Fn::kSin: outer = call(Fn::kCos, a); break;
        case Fn::kCos: outer = unary(Op::kNeg, call(Fn::kSin, a)); break;
        case Fn::kTan:
          outer = binary(Op::kAdd, num(1.0), binary(Op::kPow, call(Fn::kTan, a), num(2.0)));
          break;
        case Fn::kExp: outer = n; break;
        case Fn::kLog: return binary(Op::kDiv, da, a);
        case Fn::kSqrt: return binary(Op::kDiv, da, binary(Op::kMul, num(2.0), n));
        case Fn::kSinh: outer = call(Fn::kCosh, a); break;
        case Fn::kCosh: outer = call(Fn::kSinh, a); break;
        case Fn::kAsinh:
          return binary(Op::kDiv, da,
                        call(Fn::kSqrt, binary(Op::kAdd, binary(Op::kPow, a, num(2.0)), num(1.0))));
        case Fn::kAtan:
          return binary(Op::kDiv, da, binary(Op::kAdd, num(1.0), binary(Op::kPow, a, num(2.0))));
      }
      return binary(Op::kMul, outer, da);
    }
  }
  return num(0.0);
}

int precedence(const Expression::Node& n) {
  switch (n.op) {
    case Op::kNum: return n.value < 0.0 ? 3 : 5;
    case Op::kVar:
    case Op::kCall: return 5;
    case Op::kPow: return 4;
    case Op::kNeg: return 3;
    case Op::kMul:
    case Op::kDiv: return 2;
    case Op::kAdd:
    case Op::kSub: return 1;
  }
  return 0;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string print(const Expression::Node& n, Index dim);

std::string wrap(const Expression::Node& n, Index dim, int min_prec) {
  std::string s = print(n, dim);
  if (precedence(n) < min_prec) return "(" + s + ")";
  return s;
}

std::string print(const Expression::Node& n, Index dim) {
  switch (n.op) {
    case Op::kNum: return format_number(n.value);
    case Op::kVar:
      return n.var < dim ? "q" + std::to_string(n.var + 1) : "p" + std::to_string(n.var - dim + 1);
    case Op::kNeg: return "-" + wrap(*n.a, dim, 4);
    case Op::kAdd: return wrap(*n.a, dim, 1) + " + " + wrap(*n.b, dim, 2);
    case Op::kSub: return wrap(*n.a, dim, 1) + " - " + wrap(*n.b, dim, 2);
    case Op::kMul: return wrap(*n.a, dim, 2) + "*" + wrap(*n.b, dim, 3);
    case Op::kDiv: return wrap(*n.a, dim, 2) + "/" + wrap(*n.b, dim, 3);
    case Op::kPow: return wrap(*n.a, dim, 5) + "^" + wrap(*n.b, dim, 4);
    case Op::kCall: return std::string(fn_name(n.fn)) + "(" + print(*n.a, dim) + ")";
  }
  return {};
}

// Recursive-descent parser; see docs/expression-grammar.md.
class Parser {
 public:
  Parser(std::string_view text, Index n, bool allow_momenta)
      : text_(text), n_(n), allow_momenta_(allow_momenta) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = binary(Op::kAdd, lhs, term());
      } else if (accept('-')) {
        lhs = binary(Op::kSub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      if (accept('*')) {
        lhs = binary(Op::kMul, lhs, factor());
      } else if (accept('/')) {
        lhs = binary(Op::kDiv, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return unary(Op::kNeg, factor());
    if (accept('+')) return factor();
    NodePtr base = primary();
    if (accept('^')) return binary(Op::kPow, base, factor());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return num(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      for (const auto& f : kFunctions) {
        if (f.name == name) {
          ++pos_;
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          return call(f.fn, arg);
        }
      }
      throw UnknownIdentifier("unknown function '" + std::string(name) + "' at position " +
                              std::to_string(start));
    }
    if (name == "pi") return num(std::numbers::pi);
    if (name.size() >= 2 && (name[0] == 'q' || name[0] == 'p')) {
      Index idx = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc() && res.ptr == name.data() + name.size() && idx >= 1 && idx <= n_ &&
          name[1] != '0') {
        if (name[0] == 'q') return var(idx - 1);
        if (allow_momenta_) return var(n_ + idx - 1);
      }
    }
    throw UnknownIdentifier("unknown identifier '" + std::string(name) + "' at position " +
                            std::to_string(start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Index n_;
  bool allow_momenta_;
};

}  // namespace

Expression::Expression() : node_(num(0.0)) {}

Expression::Expression(double value) : node_(num(value)) {}

Expression Expression::parse(std::string_view text, Index n, bool allow_momenta) {
  Parser parser(text, n, allow_momenta);
  return {parser.parse(), n};
}

double Expression::eval(const Vec& vars) const { return eval_node(*node_, vars); }

Expression Expression::derivative(Index v) const { return {diff(node_, v), n_}; }

bool Expression::depends_on(Index v) const { return depends(*node_, v); }

bool Expression::depends_on_momenta() const { return has_var_at_least(*node_, n_); }

bool Expression::is_constant() const { return node_->op == Op::kNum; }

std::string Expression::to_string() const { return print(*node_, n_); }

namespace {
Index joint_dim(const Expression& a, const Expression& b) { return std::max(a.dim(), b.dim()); }
}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  return {binary(Op::kAdd, a.node_, b.node_), joint_dim(a, b)};
}

Expression operator-(const Expression& a, const Expression& b) {
  return {binary(Op::kSub, a.node_, b.node_), joint_dim(a, b)};
}

Expression operator*(const Expression& a, const Expression& b) {
  return {binary(Op::kMul, a.node_, b.node_), joint_dim(a, b)};
}

Expression operator-(const Expression& a) { return {unary(Op::kNeg, a.node_), a.n_}; }

}  // namespace magnomech
