#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "tgfl/expr.hpp"

using namespace tgfl;

namespace {

// Independent derivative oracle: central finite differences.
double central_fd(const Expr& e, const Point& x, int axis, double h = 1e-6) {
  Point lo = x, hi = x;
  lo[axis] -= h;
  hi[axis] += h;
  return (e.eval(hi) - e.eval(lo)) / (2 * h);
}

Expr x1() { return Expr::coord(0); }
Expr x2() { return Expr::coord(1); }
Expr x3() { return Expr::coord(2); }

}  // namespace

TEST_CASE("polynomial evaluation") {
  Expr f = x1() * x1() + x2();
  CHECK(f.eval({2, 1, 0}) == doctest::Approx(5.0));
}

TEST_CASE("bump is flat at zero") {
  Expr f = Expr::bump(x1());
  CHECK(f.eval({0, 0, 0}) == 0.0);
  Dual d = f.eval_dual({0, 0, 0});
  CHECK(d.v == 0.0);
  CHECK(d.d[0] == 0.0);
  CHECK(f.eval({1, 0, 0}) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("sin times coordinate") {
  Expr f = Expr::sin(x2()) * x1();
  CHECK(f.eval({0.5, 3.14159265358979323846 / 2, 0}) == doctest::Approx(0.5));
}

TEST_CASE("forward derivative of x^2") {
  Expr f = x1() * x1();
  CHECK(f.partial({3, 0, 0}, 0) == doctest::Approx(6.0));
}

TEST_CASE("directional derivative of exp(x2)*x1 at (1,0,0) along (1,1,0)") {
  Expr f = Expr::exp(x2()) * x1();
  double d = f.derivative({1, 0, 0}, {1, 1, 0});
  CHECK(d == doctest::Approx(2.0).epsilon(1e-12));
  // independent oracle
  double fd = central_fd(f, {1, 0, 0}, 0) + central_fd(f, {1, 0, 0}, 1);
  CHECK(d == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("dual vs central differences on a messy expression") {
  Expr f = Expr::sin(x1() * x2()) + Expr::exp(x3() * 0.3) / (2.0 + Expr::cos(x1())) +
           Expr::bump((x1() - 0.2) / 0.7) + Expr::pow(1.2 + x2() * x2(), 1.5);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int i = 0; i < 1000; ++i) {
    Point x{dist(rng), dist(rng), dist(rng)};
    Dual d = f.eval_dual(x);
    for (int axis = 0; axis < 3; ++axis) {
      double fd = central_fd(f, x, axis);
      CHECK(std::abs(d.d[axis] - fd) < 1e-5 * (1.0 + std::abs(d.v) + std::abs(fd)));
    }
  }
}

TEST_CASE("division guard") {
  Expr f = Expr::constant(1.0) / x1();
  CHECK_THROWS_AS((void)f.eval({0, 1, 1}), Error);
  try {
    (void)f.eval({0, 1, 1});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvaluationError);
  }
}

TEST_CASE("gate short-circuits singular factors") {
  // plateau identically zero for x1 <= 0.5, singular factor beyond
  Expr g = Expr::bump(x1() - 0.5);
  Expr f = Expr::gate(g, 1.0 / (x1() - 0.2));
  CHECK(f.eval({0.2, 0, 0}) == 0.0);  // 1/(x-0.2) would blow up here
  Dual d = f.eval_dual({0.2, 0, 0});
  CHECK(d.v == 0.0);
  CHECK(d.d[0] == 0.0);
  CHECK(f.eval({0.7, 0, 0}) ==
        doctest::Approx(std::exp(-1.0 / 0.2) * (1.0 / 0.5)).epsilon(1e-12));
}

TEST_CASE("smooth step endpoints and monotonicity") {
  Expr s = smooth_step(x1());
  CHECK(s.eval({-0.3, 0, 0}) == 0.0);
  CHECK(s.eval({0.0, 0, 0}) == 0.0);
  CHECK(s.eval({1.0, 0, 0}) == 1.0);
  CHECK(s.eval({2.0, 0, 0}) == 1.0);
  double prev = -1;
  for (int i = 0; i <= 20; ++i) {
    double v = s.eval({i / 20.0, 0, 0});
    CHECK(v >= prev);
    prev = v;
  }
  // flat at both ends
  CHECK(s.eval_dual({0.0, 0, 0}).d[0] == 0.0);
  CHECK(s.eval_dual({1.0, 0, 0}).d[0] == 0.0);
}

TEST_CASE("parse and print round trip preserves evaluation") {
  const char* text = "(+ (* 2 x1) (sin x2))";
  Expr e = Expr::parse(text);
  CHECK(e.eval({1.5, 0.4, 0}) == doctest::Approx(3.0 + std::sin(0.4)).epsilon(1e-15));
  Expr again = Expr::parse(e.to_string());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int i = 0; i < 100; ++i) {
    Point x{dist(rng), dist(rng), dist(rng)};
    CHECK(std::abs(e.eval(x) - again.eval(x)) < 1e-12);
  }
}

TEST_CASE("round trip of every operator") {
  Expr e = Expr::gate(plateau(x1(), 0.1, 0.9, 0.2),
                      Expr::pow(2.0 + Expr::cos(-x2()), 0.5) / (1.0 + Expr::bump(x3())));
  Expr round = Expr::parse(e.to_string());
  for (double t : {0.15, 0.3, 0.5, 0.77}) {
    Point x{t, t * 0.5, t * 0.25};
    CHECK(std::abs(e.eval(x) - round.eval(x)) < 1e-12);
  }
}

TEST_CASE("substitute freezes a coordinate") {
  Expr f = x1() * x2() + x3();
  Expr frozen = f.substitute(0, 2.0);
  CHECK(frozen.eval({99.0, 3.0, 1.0}) == doctest::Approx(7.0));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS((void)Expr::parse("(+ x1)"), Error);
  CHECK_THROWS_AS((void)Expr::parse("(frob x1 x2)"), Error);
  CHECK_THROWS_AS((void)Expr::parse("x4"), Error);
}
