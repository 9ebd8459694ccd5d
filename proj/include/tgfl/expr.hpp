#ifndef TGFL_EXPR_HPP
#define TGFL_EXPR_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tgfl {

// Error kinds shared across the library. Every failure carries one so tests
// can assert on the class of failure, not on message strings.
enum class ErrorKind {
  OutOfDomain,
  EvaluationError,
  InvalidParameter,
  ParseError,
  MixedLeaf,
  NotQuasiFibered,
  DegenerateFrame,
  AmbiguousSign,
  QuotientUndefined,
  NotTransverseInTube,
  NoCollar,
  OrientationMismatch,
  FormMismatch,
  AttractiveLeafOutsideU,
  OddAttractiveCount,
  NoInvariantDirection,
  AdaptednessFailed,
  SignChangeInBeta,
  NotTransverse,
  SignatureLossInBlend,
  IncompatibleNormalMetrics,
  ClassificationMargin,
  DegenerateMetric,
  NotOnLeaf,
  LeftAtlas,
  StepUnderflow,
  LoopNotClosed,
  NeighborsMixedType,
  NotOrientableBase,
  NotAdmissible,
  ConstructionFailed,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Forward-mode dual number carrying a full 3-gradient. One evaluation of a
/// field yields the value together with all three coordinate partials.
struct Dual {
  double v = 0.0;
  std::array<double, 3> d{0.0, 0.0, 0.0};

  static Dual constant(double c) { return Dual{c, {0, 0, 0}}; }
  static Dual seed(double x, int axis) {
    Dual r{x, {0, 0, 0}};
    r.d[static_cast<size_t>(axis)] = 1.0;
    return r;
  }
};

Dual operator+(const Dual& a, const Dual& b);
Dual operator-(const Dual& a, const Dual& b);
Dual operator*(const Dual& a, const Dual& b);
Dual operator/(const Dual& a, const Dual& b);

using Point = std::array<double, 3>;

// Expression trees over the three chart coordinates. Nodes live in a flat
// pool; children are referenced by index. Trees are immutable after
// construction and evaluated, never rewritten.
//
// Grammar (s-expression form): constants, x1 x2 x3, (+ a b), (- a b),
// (* a b), (/ a b), (neg a), (pow a c) with a constant real exponent,
// (sin a), (cos a), (exp a), (bump a) and (gate g f).
//
// bump(s) = exp(-1/s) for s > 0 and 0 for s <= 0 -- the flat primitive that
// the closed-form foliation profiles are built from.
//
// gate(g, f) = g * f, with the convention that f is not evaluated when g and
// its derivatives vanish at the point. It is the plateau-gated product used
// by blended metrics, where g is a bump plateau that is identically zero on
// a neighbourhood wherever f is singular.
class Expr {
public:
  enum class Op : uint8_t {
    Const,
    Coord,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,
    Sin,
    Cos,
    Exp,
    Bump,
    Gate,
  };

  struct Node {
    Op op;
    int32_t a = -1;
    int32_t b = -1;
    double value = 0.0;  // Const payload or Pow exponent.
  };

  Expr() = default;

  static Expr constant(double c);
  static Expr coord(int axis);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  static Expr pow(const Expr& a, double exponent);
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr exp(const Expr& a);
  static Expr bump(const Expr& a);
  static Expr gate(const Expr& plateau, const Expr& f);
  static Expr sqrt(const Expr& a) { return pow(a, 0.5); }

  bool empty() const { return nodes_.empty(); }
  size_t size() const { return nodes_.size(); }

  double eval(const Point& x) const;
  Dual eval_dual(const Point& x) const;
  /// Directional derivative along `dir` (forward mode, exact).
  double derivative(const Point& x, const std::array<double, 3>& dir) const;
  /// Partial derivative along a coordinate axis.
  double partial(const Point& x, int axis) const;

  std::string to_string() const;
  static Expr parse(const std::string& text);

  /// Copy of the tree with coordinate `axis` replaced by the constant value
  /// (partial evaluation; used to extend locus data along the normal axis).
  Expr substitute(int axis, double value) const;

private:
  std::vector<Node> nodes_;
  int32_t root_ = -1;

  int32_t append(const Expr& other);  // returns new index of other's root
  static Expr binary(Op op, const Expr& a, const Expr& b);
  static Expr unary(Op op, const Expr& a, double value = 0.0);

  double eval_node(int32_t idx, const Point& x) const;
  Dual eval_dual_node(int32_t idx, const Point& x) const;
  void print_node(int32_t idx, std::string& out) const;
};

// Convenience mixed-operand overloads.
inline Expr operator+(const Expr& a, double c) { return a + Expr::constant(c); }
inline Expr operator+(double c, const Expr& a) { return Expr::constant(c) + a; }
inline Expr operator-(const Expr& a, double c) { return a - Expr::constant(c); }
inline Expr operator-(double c, const Expr& a) { return Expr::constant(c) - a; }
inline Expr operator*(const Expr& a, double c) { return a * Expr::constant(c); }
inline Expr operator*(double c, const Expr& a) { return Expr::constant(c) * a; }
inline Expr operator/(const Expr& a, double c) { return a / Expr::constant(c); }
inline Expr operator/(double c, const Expr& a) { return Expr::constant(c) / a; }

/// bump(t)/(bump(t)+bump(1-t)): smooth, 0 for t<=0, 1 for t>=1, C-infinity
/// flat at both ends. The denominator is bounded below by bump(1/2).
Expr smooth_step(const Expr& t);

/// Plateau equal to 1 on [a+w, b-w] and 0 outside [a, b], flat everywhere.
Expr plateau(const Expr& t, double a, double b, double w);

}  // namespace tgfl

#endif  // TGFL_EXPR_HPP
