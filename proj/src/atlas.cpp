#include "tgfl/atlas.hpp"

#include <algorithm>
#include <cmath>

namespace tgfl {

namespace {

double wrap_delta(double d, double period) {
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

bool Chart::contains(const Point& x, double margin) const {
  for (int k = 0; k < kDim; ++k) {
    if (periodic[k]) continue;
    if (x[k] < lower[k] - margin || x[k] > upper[k] + margin) return false;
  }
  return true;
}

Point Chart::reduce(const Point& x) const {
  Point r = x;
  for (int k = 0; k < kDim; ++k) {
    if (!periodic[k]) continue;
    double p = period(k);
    r[k] = lower[k] + std::fmod(std::fmod(x[k] - lower[k], p) + p, p);
  }
  return r;
}

double Chart::distance(const Point& a, const Point& b) const {
  double m = 0.0;
  for (int k = 0; k < kDim; ++k) {
    double d = a[k] - b[k];
    if (periodic[k]) d = wrap_delta(d, period(k));
    m = std::max(m, std::abs(d));
  }
  return m;
}

void Chart::validate() const {
  for (int k = 0; k < kDim; ++k) {
    if (!(lower[k] < upper[k]))
      fail(ErrorKind::InvalidParameter, "chart " + id + ": degenerate axis " + std::to_string(k));
    if (periodic[k] && !(period(k) > 0))
      fail(ErrorKind::InvalidParameter, "chart " + id + ": periodic axis needs positive period");
  }
}

bool Box::contains(const Point& x, const Chart& chart, double margin) const {
  for (int k = 0; k < kDim; ++k) {
    double v = x[k];
    if (chart.periodic[k]) {
      // compare against the box after reducing relative to the box start
      double p = chart.period(k);
      double len = upper[k] - lower[k];
      if (len >= p - 1e-12) continue;  // box spans the whole period
      double d = std::fmod(std::fmod(v - lower[k], p) + p, p);
      if (d > len + margin) return false;
      continue;
    }
    if (v < lower[k] - margin || v > upper[k] + margin) return false;
  }
  return true;
}

const Chart& AtlasManifold::chart(const std::string& id) const {
  for (const Chart& c : charts)
    if (c.id == id) return c;
  fail(ErrorKind::InvalidParameter, "unknown chart: " + id);
}

int AtlasManifold::chart_index(const std::string& id) const {
  for (size_t i = 0; i < charts.size(); ++i)
    if (charts[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<Point> Sampler::grid(const Chart& chart, int per_axis) const {
  Box box{chart.lower, chart.upper};
  return grid(box, per_axis);
}

std::vector<Point> Sampler::grid(const Box& box, int per_axis) const {
  if (per_axis < 1) fail(ErrorKind::InvalidParameter, "samples must be >= 1");
  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(per_axis) * per_axis * per_axis);
  auto coord = [&](int k, int i) {
    double t = (i + 0.5) / per_axis;
    return box.lower[k] + t * (box.upper[k] - box.lower[k]);
  };
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k)
        pts.push_back({coord(0, i), coord(1, j), coord(2, k)});
  return pts;
}

std::vector<Point> Sampler::random(const Chart& chart, int count) {
  Box box{chart.lower, chart.upper};
  return random(box, count);
}

std::vector<Point> Sampler::random(const Box& box, int count) {
  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Point p;
    for (int k = 0; k < kDim; ++k) p[k] = uniform(box.lower[k], box.upper[k]);
    pts.push_back(p);
  }
  return pts;
}

double Sampler::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng_);
}

double eval_field(const Chart& chart, const ScalarField& f, const Point& x) {
  if (!chart.contains(x))
    fail(ErrorKind::OutOfDomain, "point outside chart " + chart.id);
  return f.expr.eval(chart.reduce(x));
}

double eval_derivative(const Chart& chart, const ScalarField& f, const Point& x,
                       const std::array<double, 3>& direction) {
  if (!chart.contains(x))
    fail(ErrorKind::OutOfDomain, "point outside chart " + chart.id);
  return f.expr.derivative(chart.reduce(x), direction);
}

double eval_derivative(const Chart& chart, const ScalarField& f, const Point& x, int axis) {
  std::array<double, 3> dir{0, 0, 0};
  dir[axis] = 1.0;
  return eval_derivative(chart, f, x, dir);
}

Matrix3 transition_jacobian(const SmoothMap& map, const Point& x) {
  Matrix3 jac{};
  for (int i = 0; i < kDim; ++i) {
    Dual v = map.components[i].eval_dual(x);
    for (int j = 0; j < kDim; ++j) jac[i][j] = v.d[j];
  }
  return jac;
}

double det3(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Matrix3 invert3(const Matrix3& m, ErrorKind on_singular) {
  double det = det3(m);
  if (det == 0.0) fail(on_singular, "singular 3x3 matrix");
  double inv = 1.0 / det;
  Matrix3 r;
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv;
  return r;
}

Matrix3 matmul(const Matrix3& a, const Matrix3& b) {
  Matrix3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

AtlasReport check_atlas(const AtlasManifold& atlas, int samples_per_axis, double tolerance) {
  if (samples_per_axis < 1) fail(ErrorKind::InvalidParameter, "samples must be >= 1");
  AtlasReport report;
  Sampler sampler;
  for (const Chart& c : atlas.charts) c.validate();

  // Inverse consistency: for each transition find the reverse map and check
  // the round trip on the overlap.
  for (const SmoothMap& fwd : atlas.transitions) {
    const Chart& src = atlas.chart(fwd.source);
    const Chart& dst = atlas.chart(fwd.target);
    for (const SmoothMap& rev : atlas.transitions) {
      if (rev.source != fwd.target || rev.target != fwd.source) continue;
      bool used = false;
      for (const Point& x : sampler.grid(fwd.overlap_source, samples_per_axis)) {
        Point y = fwd(x);
        if (!rev.overlap_source.contains(dst.reduce(y), dst, 1e-9)) continue;
        used = true;
        Point back = rev(dst.reduce(y));
        report.max_inverse_residual =
            std::max(report.max_inverse_residual, src.distance(back, x));
      }
      if (used) ++report.pairs_checked;
    }
  }

  // Target containment doubles as a domain sanity check.
  for (const SmoothMap& map : atlas.transitions) {
    const Chart& dst = atlas.chart(map.target);
    for (const Point& x : sampler.grid(map.overlap_source, samples_per_axis)) {
      Point y = dst.reduce(map(x));
      if (!map.overlap_target.contains(y, dst, 1e-7))
        report.max_inverse_residual = std::max(report.max_inverse_residual, 1.0);
    }
  }

  // Cocycle condition on chained overlaps.
  for (const SmoothMap& m1 : atlas.transitions) {
    for (const SmoothMap& m2 : atlas.transitions) {
      if (m2.source != m1.target) continue;
      for (const SmoothMap& m3 : atlas.transitions) {
        if (m3.source != m1.source || m3.target != m2.target) continue;
        if (&m3 == &m1 || &m1 == &m2) continue;
        const Chart& mid = atlas.chart(m1.target);
        const Chart& dst = atlas.chart(m2.target);
        bool used = false;
        for (const Point& x : sampler.grid(m1.overlap_source, samples_per_axis)) {
          if (!m3.overlap_source.contains(x, atlas.chart(m1.source), 0.0)) continue;
          Point y = mid.reduce(m1(x));
          if (!m2.overlap_source.contains(y, mid, 0.0)) continue;
          used = true;
          Point via = dst.reduce(m2(y));
          Point direct = dst.reduce(m3(x));
          report.max_cocycle_residual =
              std::max(report.max_cocycle_residual, dst.distance(via, direct));
        }
        if (used) ++report.triples_checked;
      }
    }
  }

  report.pass = report.max_inverse_residual < tolerance && report.max_cocycle_residual < tolerance;
  return report;
}

namespace {

Chart make_chart(const std::string& id, Point lo, Point hi, std::array<bool, 3> per,
                 std::array<std::string, 3> names) {
  Chart c;
  c.id = id;
  c.lower = lo;
  c.upper = hi;
  c.periodic = per;
  c.coordinate_names = names;
  c.validate();
  return c;
}

Expr lin(double c0, double cx, double cy, double cz) {
  Expr e = Expr::constant(c0);
  if (cx != 0) e = e + cx * Expr::coord(0);
  if (cy != 0) e = e + cy * Expr::coord(1);
  if (cz != 0) e = e + cz * Expr::coord(2);
  return e;
}

}  // namespace

AtlasManifold builtin_atlas(BuiltinAtlas which, const std::array<std::array<long, 2>, 2>& torus_map) {
  AtlasManifold m;
  switch (which) {
    case BuiltinAtlas::T3Flat: {
      m.name = "t3_flat";
      m.charts.push_back(make_chart("t3", {0, 0, 0}, {1, 1, 1}, {true, true, true},
                                    {"x", "y", "z"}));
      return m;
    }
    case BuiltinAtlas::SolidTorus: {
      m.name = "solid_torus";
      m.charts.push_back(make_chart("st", {0, 0, 0}, {1, 2 * kPi, 2 * kPi},
                                    {false, true, true}, {"r", "theta", "z"}));
      return m;
    }
    case BuiltinAtlas::T2Interval: {
      m.name = "t2_interval";
      m.charts.push_back(make_chart("t2i", {0, 0, 0}, {1, 1, 1}, {true, true, false},
                                    {"x", "y", "s"}));
      return m;
    }
    case BuiltinAtlas::S3Hopf: {
      // Two solid tori, radial coordinate extended past the common boundary
      // torus at r = 1; glued by the meridian/longitude exchange.
      m.name = "s3_hopf";
      m.charts.push_back(make_chart("ta", {0, 0, 0}, {1.2, 2 * kPi, 2 * kPi},
                                    {false, true, true}, {"r", "theta", "z"}));
      m.charts.push_back(make_chart("tb", {0, 0, 0}, {1.2, 2 * kPi, 2 * kPi},
                                    {false, true, true}, {"r", "theta", "z"}));
      SmoothMap ab;
      ab.source = "ta";
      ab.target = "tb";
      ab.components = {2.0 - Expr::coord(0), Expr::coord(2), Expr::coord(1)};
      ab.overlap_source = {{0.8, 0, 0}, {1.2, 2 * kPi, 2 * kPi}};
      ab.overlap_target = {{0.8, 0, 0}, {1.2, 2 * kPi, 2 * kPi}};
      SmoothMap ba = ab;
      ba.source = "tb";
      ba.target = "ta";
      m.transitions.push_back(ab);
      m.transitions.push_back(ba);
      return m;
    }
    case BuiltinAtlas::T3Hyperbolic: {
      long a = torus_map[0][0], b = torus_map[0][1];
      long c = torus_map[1][0], d = torus_map[1][1];
      long det = a * d - b * c;
      long tr = a + d;
      if (det != 1 || std::abs(tr) <= 2)
        fail(ErrorKind::InvalidParameter,
             "torus map must be unimodular with |trace| > 2");
      m.name = "t3_hyperbolic";
      m.charts.push_back(make_chart("c0", {0, 0, 0.0}, {1, 1, 0.6}, {true, true, false},
                                    {"x", "y", "s"}));
      m.charts.push_back(make_chart("c1", {0, 0, 0.4}, {1, 1, 1.1}, {true, true, false},
                                    {"x", "y", "s"}));

      SmoothMap mid01;
      mid01.source = "c0";
      mid01.target = "c1";
      mid01.components = {Expr::coord(0), Expr::coord(1), Expr::coord(2)};
      mid01.overlap_source = {{0, 0, 0.4}, {1, 1, 0.6}};
      mid01.overlap_target = {{0, 0, 0.4}, {1, 1, 0.6}};
      SmoothMap mid10 = mid01;
      mid10.source = "c1";
      mid10.target = "c0";

      // (v, 1) ~ (Av, 0): leaving c1 upward re-enters c0 through the fiber map.
      SmoothMap wrap10;
      wrap10.source = "c1";
      wrap10.target = "c0";
      wrap10.components = {lin(0, double(a), double(b), 0), lin(0, double(c), double(d), 0),
                           Expr::coord(2) - 1.0};
      wrap10.overlap_source = {{0, 0, 1.0}, {1, 1, 1.1}};
      wrap10.overlap_target = {{0, 0, 0.0}, {1, 1, 0.1}};

      SmoothMap wrap01;
      wrap01.source = "c0";
      wrap01.target = "c1";
      wrap01.components = {lin(0, double(d), double(-b), 0), lin(0, double(-c), double(a), 0),
                           Expr::coord(2) + 1.0};
      wrap01.overlap_source = {{0, 0, 0.0}, {1, 1, 0.1}};
      wrap01.overlap_target = {{0, 0, 1.0}, {1, 1, 1.1}};

      m.transitions.push_back(mid01);
      m.transitions.push_back(mid10);
      m.transitions.push_back(wrap10);
      m.transitions.push_back(wrap01);
      return m;
    }
  }
  fail(ErrorKind::InvalidParameter, "unknown builtin atlas");
}

}  // namespace tgfl
