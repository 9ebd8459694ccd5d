#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tgfl/atlas.hpp"

using namespace tgfl;

TEST_CASE("eval_field respects chart domains") {
  Chart chart;
  chart.id = "c";
  chart.lower = {0, 0, 0};
  chart.upper = {1, 1, 1};
  ScalarField f{"c", Expr::coord(0) * Expr::coord(0) + Expr::coord(1)};
  CHECK(eval_field(chart, f, {0.5, 0.25, 0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)eval_field(chart, f, {2, 0, 0}), Error);
}

TEST_CASE("periodic reduction wraps evaluation points") {
  Chart chart;
  chart.id = "c";
  chart.lower = {0, 0, 0};
  chart.upper = {1, 1, 1};
  chart.periodic = {true, false, false};
  ScalarField f{"c", Expr::coord(0)};
  CHECK(eval_field(chart, f, {1.25, 0.5, 0.5}) == doctest::Approx(0.25));
  CHECK(chart.distance({0.95, 0, 0}, {0.05, 0, 0}) == doctest::Approx(0.1));
}

TEST_CASE("transition jacobian of identity and linear maps") {
  SmoothMap id;
  id.source = id.target = "c";
  id.components = {Expr::coord(0), Expr::coord(1), Expr::coord(2)};
  Matrix3 j = transition_jacobian(id, {0.3, 0.4, 0.5});
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) CHECK(j[i][k] == doctest::Approx(i == k ? 1.0 : 0.0));

  SmoothMap lin;
  lin.source = lin.target = "c";
  lin.components = {2.0 * Expr::coord(0) + Expr::coord(1), Expr::coord(0) + Expr::coord(1),
                    Expr::coord(2)};
  Matrix3 a = transition_jacobian(lin, {0.7, 0.1, 0.9});
  CHECK(a[0][0] == doctest::Approx(2));
  CHECK(a[0][1] == doctest::Approx(1));
  CHECK(a[1][0] == doctest::Approx(1));
  CHECK(a[1][1] == doctest::Approx(1));
  CHECK(a[2][2] == doctest::Approx(1));
}

TEST_CASE("builtin atlases pass check_atlas") {
  for (BuiltinAtlas which : {BuiltinAtlas::T3Flat, BuiltinAtlas::SolidTorus,
                             BuiltinAtlas::T2Interval, BuiltinAtlas::S3Hopf,
                             BuiltinAtlas::T3Hyperbolic}) {
    AtlasManifold atlas = builtin_atlas(which);
    AtlasReport report = check_atlas(atlas, 8);
    INFO(atlas.name);
    CHECK(report.pass);
    CHECK(report.max_inverse_residual < 1e-9);
    CHECK(report.max_cocycle_residual < 1e-9);
  }
}

TEST_CASE("single chart atlas has zero residuals") {
  AtlasManifold atlas = builtin_atlas(BuiltinAtlas::T3Flat);
  AtlasReport report = check_atlas(atlas, 4);
  CHECK(report.max_inverse_residual == 0.0);
  CHECK(report.max_cocycle_residual == 0.0);
  CHECK(report.pass);
}

TEST_CASE("corrupted transition is caught with a matching residual") {
  AtlasManifold atlas = builtin_atlas(BuiltinAtlas::S3Hopf);
  atlas.transitions[0].components[0] = atlas.transitions[0].components[0] + 1e-3;
  AtlasReport report = check_atlas(atlas, 6);
  CHECK_FALSE(report.pass);
  CHECK(report.max_inverse_residual == doctest::Approx(1e-3).epsilon(0.3));
}

TEST_CASE("hyperbolic torus bundle transition has cat-map eigenvalues") {
  AtlasManifold atlas = builtin_atlas(BuiltinAtlas::T3Hyperbolic, {{{2, 1}, {1, 1}}});
  // find the wrap transition (the non-identity one)
  const SmoothMap* wrap = nullptr;
  for (const SmoothMap& m : atlas.transitions) {
    Matrix3 j = transition_jacobian(m, {0.2, 0.3, 1.05});
    if (std::abs(j[0][0] - 1) > 0.5) {
      wrap = &m;
      break;
    }
  }
  REQUIRE(wrap != nullptr);
  Matrix3 j = transition_jacobian(*wrap, {0.2, 0.3, 1.05});
  // eigenvalues of [[2,1],[1,1]] are (3 +- sqrt 5)/2
  double tr = j[0][0] + j[1][1];
  double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  CHECK(tr == doctest::Approx(3.0));
  CHECK(det == doctest::Approx(1.0));
  double l1 = (3 + std::sqrt(5.0)) / 2;
  double l2 = (3 - std::sqrt(5.0)) / 2;
  CHECK(l1 * l2 == doctest::Approx(det).epsilon(1e-12));
  CHECK(l1 + l2 == doctest::Approx(tr).epsilon(1e-12));
}

TEST_CASE("invalid torus maps are rejected") {
  CHECK_THROWS_AS((void)builtin_atlas(BuiltinAtlas::T3Hyperbolic, {{{1, 1}, {0, 1}}}), Error);
  CHECK_THROWS_AS((void)builtin_atlas(BuiltinAtlas::T3Hyperbolic, {{{2, 0}, {0, 2}}}), Error);
}

TEST_CASE("hopf gluing has nonzero jacobian determinant") {
  AtlasManifold atlas = builtin_atlas(BuiltinAtlas::S3Hopf);
  Matrix3 j = transition_jacobian(atlas.transitions[0], {1.0, 0.3, 0.8});
  // finite-difference oracle on the explicit gluing formula
  const SmoothMap& m = atlas.transitions[0];
  double h = 1e-6;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Point lo{1.0, 0.3, 0.8}, hi{1.0, 0.3, 0.8};
      lo[k] -= h;
      hi[k] += h;
      double fd = (m.components[i].eval(hi) - m.components[i].eval(lo)) / (2 * h);
      CHECK(std::abs(j[i][k] - fd) < 1e-6);
    }
  CHECK(std::abs(det3(j)) > 1e-9);
}

TEST_CASE("chain rule: jacobian of a composition is the product") {
  AtlasManifold atlas = builtin_atlas(BuiltinAtlas::S3Hopf);
  const SmoothMap& ab = atlas.transitions[0];
  const SmoothMap& ba = atlas.transitions[1];
  Point x{0.95, 1.1, 2.2};
  Point y = ab(x);
  Matrix3 j1 = transition_jacobian(ab, x);
  Matrix3 j2 = transition_jacobian(ba, y);
  Matrix3 prod = matmul(j2, j1);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) CHECK(std::abs(prod[i][k] - (i == k ? 1.0 : 0.0)) < 1e-9);
}

TEST_CASE("grid samples stay clear of box faces") {
  Sampler sampler;
  Chart chart;
  chart.id = "c";
  chart.lower = {0, 0, 0};
  chart.upper = {1, 2, 3};
  auto pts = sampler.grid(chart, 5);
  CHECK(pts.size() == 125);
  for (const Point& p : pts) {
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[2] > 0.0);
    CHECK(p[2] < 3.0);
  }
}

TEST_CASE("seeded sampler is reproducible") {
  Chart chart;
  chart.id = "c";
  chart.lower = {0, 0, 0};
  chart.upper = {1, 1, 1};
  Sampler s1(42), s2(42);
  auto a = s1.random(chart, 10);
  auto b = s2.random(chart, 10);
  for (size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(a[i][k] == b[i][k]);
}
