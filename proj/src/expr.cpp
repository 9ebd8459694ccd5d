#include "tgfl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace tgfl {

namespace {

bool is_zero(const Dual& a) {
  return a.v == 0.0 && a.d[0] == 0.0 && a.d[1] == 0.0 && a.d[2] == 0.0;
}

void check_finite(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::EvaluationError, "non-finite value in field evaluation");
}

}  // namespace

Dual operator+(const Dual& a, const Dual& b) {
  return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}};
}

Dual operator-(const Dual& a, const Dual& b) {
  return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}};
}

Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v,
          {a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1],
           a.d[2] * b.v + a.v * b.d[2]}};
}

Dual operator/(const Dual& a, const Dual& b) {
  if (b.v == 0.0) fail(ErrorKind::EvaluationError, "division by zero");
  double inv = 1.0 / b.v;
  double q = a.v * inv;
  return {q,
          {(a.d[0] - q * b.d[0]) * inv, (a.d[1] - q * b.d[1]) * inv,
           (a.d[2] - q * b.d[2]) * inv}};
}

Expr Expr::constant(double c) {
  Expr e;
  e.nodes_.push_back({Op::Const, -1, -1, c});
  e.root_ = 0;
  return e;
}

Expr Expr::coord(int axis) {
  if (axis < 0 || axis > 2) fail(ErrorKind::InvalidParameter, "coordinate axis out of range");
  Expr e;
  e.nodes_.push_back({Op::Coord, axis, -1, 0.0});
  e.root_ = 0;
  return e;
}

int32_t Expr::append(const Expr& other) {
  int32_t offset = static_cast<int32_t>(nodes_.size());
  for (const Node& n : other.nodes_) {
    Node m = n;
    if (m.op != Op::Coord) {
      if (m.a >= 0) m.a += offset;
      if (m.b >= 0) m.b += offset;
    }
    nodes_.push_back(m);
  }
  return other.root_ + offset;
}

Expr Expr::binary(Op op, const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) fail(ErrorKind::InvalidParameter, "operand on empty expression");
  Expr e;
  int32_t ia = e.append(a);
  int32_t ib = e.append(b);
  e.nodes_.push_back({op, ia, ib, 0.0});
  e.root_ = static_cast<int32_t>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::unary(Op op, const Expr& a, double value) {
  if (a.empty()) fail(ErrorKind::InvalidParameter, "operand on empty expression");
  Expr e;
  int32_t ia = e.append(a);
  e.nodes_.push_back({op, ia, -1, value});
  e.root_ = static_cast<int32_t>(e.nodes_.size()) - 1;
  return e;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Expr::Op::Neg, a); }

Expr Expr::pow(const Expr& a, double exponent) { return unary(Op::Pow, a, exponent); }
Expr Expr::sin(const Expr& a) { return unary(Op::Sin, a); }
Expr Expr::cos(const Expr& a) { return unary(Op::Cos, a); }
Expr Expr::exp(const Expr& a) { return unary(Op::Exp, a); }
Expr Expr::bump(const Expr& a) { return unary(Op::Bump, a); }
Expr Expr::gate(const Expr& plateau, const Expr& f) { return binary(Op::Gate, plateau, f); }

double Expr::eval_node(int32_t idx, const Point& x) const {
  const Node& n = nodes_[static_cast<size_t>(idx)];
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Coord:
      return x[static_cast<size_t>(n.a)];
    case Op::Add:
      return eval_node(n.a, x) + eval_node(n.b, x);
    case Op::Sub:
      return eval_node(n.a, x) - eval_node(n.b, x);
    case Op::Mul:
      return eval_node(n.a, x) * eval_node(n.b, x);
    case Op::Div: {
      double num = eval_node(n.a, x);
      double den = eval_node(n.b, x);
      if (den == 0.0) fail(ErrorKind::EvaluationError, "division by zero");
      return num / den;
    }
    case Op::Neg:
      return -eval_node(n.a, x);
    case Op::Pow: {
      double base = eval_node(n.a, x);
      double e = n.value;
      if (e == std::floor(e)) {
        if (base == 0.0 && e < 0.0)
          fail(ErrorKind::EvaluationError, "zero base with negative exponent");
        return std::pow(base, e);
      }
      if (base < 0.0) fail(ErrorKind::EvaluationError, "negative base with non-integer exponent");
      return std::pow(base, e);
    }
    case Op::Sin:
      return std::sin(eval_node(n.a, x));
    case Op::Cos:
      return std::cos(eval_node(n.a, x));
    case Op::Exp:
      return std::exp(eval_node(n.a, x));
    case Op::Bump: {
      double s = eval_node(n.a, x);
      return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
    }
    case Op::Gate: {
      double g = eval_node(n.a, x);
      if (g == 0.0) return 0.0;
      return g * eval_node(n.b, x);
    }
  }
  fail(ErrorKind::EvaluationError, "corrupt expression node");
}

Dual Expr::eval_dual_node(int32_t idx, const Point& x) const {
  const Node& n = nodes_[static_cast<size_t>(idx)];
  switch (n.op) {
    case Op::Const:
      return Dual::constant(n.value);
    case Op::Coord:
      return Dual::seed(x[static_cast<size_t>(n.a)], n.a);
    case Op::Add:
      return eval_dual_node(n.a, x) + eval_dual_node(n.b, x);
    case Op::Sub:
      return eval_dual_node(n.a, x) - eval_dual_node(n.b, x);
    case Op::Mul:
      return eval_dual_node(n.a, x) * eval_dual_node(n.b, x);
    case Op::Div:
      return eval_dual_node(n.a, x) / eval_dual_node(n.b, x);
    case Op::Neg: {
      Dual a = eval_dual_node(n.a, x);
      return Dual{-a.v, {-a.d[0], -a.d[1], -a.d[2]}};
    }
    case Op::Pow: {
      Dual a = eval_dual_node(n.a, x);
      double e = n.value;
      double v, f;
      if (e == std::floor(e)) {
        if (a.v == 0.0 && e < 0.0)
          fail(ErrorKind::EvaluationError, "zero base with negative exponent");
        v = std::pow(a.v, e);
        f = a.v == 0.0 ? (e == 1.0 ? 1.0 : 0.0) : e * v / a.v;
      } else {
        if (a.v < 0.0) fail(ErrorKind::EvaluationError, "negative base with non-integer exponent");
        if (a.v == 0.0 && e < 1.0 && e != 0.0)
          fail(ErrorKind::EvaluationError, "non-differentiable power at zero");
        v = std::pow(a.v, e);
        f = a.v == 0.0 ? 0.0 : e * v / a.v;
      }
      return Dual{v, {f * a.d[0], f * a.d[1], f * a.d[2]}};
    }
    case Op::Sin: {
      Dual a = eval_dual_node(n.a, x);
      double c = std::cos(a.v);
      return Dual{std::sin(a.v), {c * a.d[0], c * a.d[1], c * a.d[2]}};
    }
    case Op::Cos: {
      Dual a = eval_dual_node(n.a, x);
      double s = -std::sin(a.v);
      return Dual{std::cos(a.v), {s * a.d[0], s * a.d[1], s * a.d[2]}};
    }
    case Op::Exp: {
      Dual a = eval_dual_node(n.a, x);
      double v = std::exp(a.v);
      return Dual{v, {v * a.d[0], v * a.d[1], v * a.d[2]}};
    }
    case Op::Bump: {
      Dual a = eval_dual_node(n.a, x);
      if (a.v <= 0.0) return Dual::constant(0.0);
      double v = std::exp(-1.0 / a.v);
      double f = v / (a.v * a.v);
      return Dual{v, {f * a.d[0], f * a.d[1], f * a.d[2]}};
    }
    case Op::Gate: {
      Dual g = eval_dual_node(n.a, x);
      if (is_zero(g)) return Dual::constant(0.0);
      return g * eval_dual_node(n.b, x);
    }
  }
  fail(ErrorKind::EvaluationError, "corrupt expression node");
}

double Expr::eval(const Point& x) const {
  if (empty()) fail(ErrorKind::EvaluationError, "empty expression");
  double v = eval_node(root_, x);
  check_finite(v);
  return v;
}

Dual Expr::eval_dual(const Point& x) const {
  if (empty()) fail(ErrorKind::EvaluationError, "empty expression");
  Dual v = eval_dual_node(root_, x);
  check_finite(v.v);
  check_finite(v.d[0]);
  check_finite(v.d[1]);
  check_finite(v.d[2]);
  return v;
}

double Expr::derivative(const Point& x, const std::array<double, 3>& dir) const {
  Dual v = eval_dual(x);
  return v.d[0] * dir[0] + v.d[1] * dir[1] + v.d[2] * dir[2];
}

double Expr::partial(const Point& x, int axis) const {
  Dual v = eval_dual(x);
  return v.d[static_cast<size_t>(axis)];
}

void Expr::print_node(int32_t idx, std::string& out) const {
  const Node& n = nodes_[static_cast<size_t>(idx)];
  char buf[40];
  switch (n.op) {
    case Op::Const:
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    case Op::Coord:
      out += 'x';
      out += static_cast<char>('1' + n.a);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char* sym = n.op == Op::Add   ? "+"
                        : n.op == Op::Sub ? "-"
                        : n.op == Op::Mul ? "*"
                                          : "/";
      out += '(';
      out += sym;
      out += ' ';
      print_node(n.a, out);
      out += ' ';
      print_node(n.b, out);
      out += ')';
      return;
    }
    case Op::Neg:
      out += "(neg ";
      print_node(n.a, out);
      out += ')';
      return;
    case Op::Pow:
      out += "(pow ";
      print_node(n.a, out);
      std::snprintf(buf, sizeof buf, " %.17g)", n.value);
      out += buf;
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Bump: {
      const char* sym = n.op == Op::Sin   ? "sin"
                        : n.op == Op::Cos ? "cos"
                        : n.op == Op::Exp ? "exp"
                                          : "bump";
      out += '(';
      out += sym;
      out += ' ';
      print_node(n.a, out);
      out += ')';
      return;
    }
    case Op::Gate:
      out += "(gate ";
      print_node(n.a, out);
      out += ' ';
      print_node(n.b, out);
      out += ')';
      return;
  }
}

std::string Expr::to_string() const {
  if (empty()) return "0";
  std::string out;
  print_node(root_, out);
  return out;
}

namespace {

struct Parser {
  const char* p;
  const char* end;

  void skip_ws() {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  }

  std::string token() {
    skip_ws();
    const char* start = p;
    while (p < end && !std::isspace(static_cast<unsigned char>(*p)) && *p != '(' && *p != ')') ++p;
    return std::string(start, p);
  }

  Expr parse_expr() {
    skip_ws();
    if (p >= end) fail(ErrorKind::ParseError, "unexpected end of expression");
    if (*p == '(') {
      ++p;
      std::string head = token();
      Expr result;
      if (head == "+" || head == "-" || head == "*" || head == "/") {
        Expr a = parse_expr();
        Expr b = parse_expr();
        if (head == "+") result = a + b;
        else if (head == "-") result = a - b;
        else if (head == "*") result = a * b;
        else result = a / b;
      } else if (head == "neg") {
        result = -parse_expr();
      } else if (head == "pow") {
        Expr a = parse_expr();
        skip_ws();
        std::string t = token();
        result = Expr::pow(a, std::stod(t));
      } else if (head == "sin") {
        result = Expr::sin(parse_expr());
      } else if (head == "cos") {
        result = Expr::cos(parse_expr());
      } else if (head == "exp") {
        result = Expr::exp(parse_expr());
      } else if (head == "bump") {
        result = Expr::bump(parse_expr());
      } else if (head == "gate") {
        Expr a = parse_expr();
        Expr b = parse_expr();
        result = Expr::gate(a, b);
      } else {
        fail(ErrorKind::ParseError, "unknown operator: " + head);
      }
      skip_ws();
      if (p >= end || *p != ')') fail(ErrorKind::ParseError, "missing closing parenthesis");
      ++p;
      return result;
    }
    std::string t = token();
    if (t.empty()) fail(ErrorKind::ParseError, "empty token");
    if (t == "x1") return Expr::coord(0);
    if (t == "x2") return Expr::coord(1);
    if (t == "x3") return Expr::coord(2);
    try {
      size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) fail(ErrorKind::ParseError, "bad numeric token: " + t);
      return Expr::constant(v);
    } catch (const std::invalid_argument&) {
      fail(ErrorKind::ParseError, "bad token: " + t);
    }
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser parser{text.data(), text.data() + text.size()};
  Expr e = parser.parse_expr();
  parser.skip_ws();
  if (parser.p != parser.end) fail(ErrorKind::ParseError, "trailing input after expression");
  return e;
}

Expr Expr::substitute(int axis, double value) const {
  Expr e = *this;
  for (Node& n : e.nodes_) {
    if (n.op == Op::Coord && n.a == axis) {
      n.op = Op::Const;
      n.a = -1;
      n.value = value;
    }
  }
  return e;
}

Expr smooth_step(const Expr& t) {
  Expr bt = Expr::bump(t);
  Expr bo = Expr::bump(1.0 - t);
  return bt / (bt + bo);
}

Expr plateau(const Expr& t, double a, double b, double w) {
  if (!(w > 0.0) || a + w > b - w)
    fail(ErrorKind::InvalidParameter, "plateau needs a+w <= b-w with w > 0");
  Expr rise = smooth_step((t - a) / w);
  Expr drop = smooth_step((Expr::constant(b) - t) / w);
  return rise * drop;
}

}  // namespace tgfl
