#include "tgfl/foliation.hpp"

#include <algorithm>
#include <cmath>

#include "tgfl/metric.hpp"

namespace tgfl {

namespace {

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

// Residual of v being a positive multiple of w: distance from v to the ray
// through w, plus a penalty when the factor is not positive.
double ray_residual(const std::array<double, 3>& v, const std::array<double, 3>& w,
                    bool* positive) {
  double nw2 = dot3(w, w);
  if (nw2 == 0.0) return norm3(v);
  double factor = dot3(v, w) / nw2;
  if (positive) *positive = factor > 0.0;
  std::array<double, 3> proj{v[0] - factor * w[0], v[1] - factor * w[1], v[2] - factor * w[2]};
  double scale = std::max(1.0, norm3(v));
  return norm3(proj) / scale;
}

bool near_locus(const TangencyLeaf& leaf, const Point& x, double band) {
  double f = leaf.locus_field.expr.eval(x);
  return std::abs(f - leaf.level) <= band;
}

}  // namespace

const VectorField& FlowSpec::field(const std::string& chart) const {
  for (const VectorField& f : fields)
    if (f.chart == chart) return f;
  fail(ErrorKind::InvalidParameter, "flow has no field on chart " + chart);
}

const OneForm& FoliationSpec::form(const std::string& chart) const {
  for (const OneForm& f : forms)
    if (f.chart == chart) return f;
  fail(ErrorKind::InvalidParameter, "foliation has no form on chart " + chart);
}

FoliationCheck validate_foliation(const AtlasManifold& atlas, const FoliationSpec& F,
                                  const SamplingOptions& opts, double tolerance) {
  FoliationCheck check;
  check.min_form_norm = 1e300;
  Sampler sampler(opts.seed);

  for (const OneForm& form : F.forms) {
    const Chart& chart = atlas.chart(form.chart);
    for (const Point& x : sampler.grid(chart, opts.per_axis)) {
      Dual w0 = form.components[0].eval_dual(x);
      Dual w1 = form.components[1].eval_dual(x);
      Dual w2 = form.components[2].eval_dual(x);
      // 3D Frobenius condition: w . curl w = 0.
      double curl0 = w2.d[1] - w1.d[2];
      double curl1 = w0.d[2] - w2.d[0];
      double curl2 = w1.d[0] - w0.d[1];
      double frob = std::abs(w0.v * curl0 + w1.v * curl1 + w2.v * curl2);
      check.max_frobenius = std::max(check.max_frobenius, frob);
      double n2 = w0.v * w0.v + w1.v * w1.v + w2.v * w2.v;
      check.min_form_norm = std::min(check.min_form_norm, n2);
    }
  }

  // Transversal orientability across transitions: pullback of the target
  // form must be a positive multiple of the source form.
  for (const SmoothMap& map : atlas.transitions) {
    bool has_src = false, has_dst = false;
    for (const OneForm& f : F.forms) {
      has_src |= f.chart == map.source;
      has_dst |= f.chart == map.target;
    }
    if (!has_src || !has_dst) continue;
    const OneForm& src = F.form(map.source);
    const OneForm& dst = F.form(map.target);
    const Chart& target_chart = atlas.chart(map.target);
    for (const Point& x : sampler.grid(map.overlap_source, opts.per_axis)) {
      Point y = target_chart.reduce(map(x));
      Matrix3 jac = transition_jacobian(map, x);
      auto wy = dst(y);
      std::array<double, 3> pulled{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) pulled[i] += jac[j][i] * wy[j];
      bool positive = true;
      double res = ray_residual(pulled, src(x), &positive);
      check.max_overlap_residual = std::max(check.max_overlap_residual, res);
      if (!positive) check.orientation_consistent = false;
    }
  }

  check.pass = check.max_frobenius < tolerance && check.min_form_norm > 1e-12 &&
               check.max_overlap_residual < tolerance && check.orientation_consistent;
  return check;
}

FlowCheck validate_flow(const AtlasManifold& atlas, const FlowSpec& phi,
                        const SamplingOptions& opts, double tolerance) {
  FlowCheck check;
  check.min_norm = 1e300;
  Sampler sampler(opts.seed);

  for (const VectorField& f : phi.fields) {
    const Chart& chart = atlas.chart(f.chart);
    for (const Point& x : sampler.grid(chart, opts.per_axis)) {
      auto v = f(x);
      check.min_norm = std::min(check.min_norm, dot3(v, v));
    }
  }

  for (const SmoothMap& map : atlas.transitions) {
    bool has_src = false, has_dst = false;
    for (const VectorField& f : phi.fields) {
      has_src |= f.chart == map.source;
      has_dst |= f.chart == map.target;
    }
    if (!has_src || !has_dst) continue;
    const VectorField& src = phi.field(map.source);
    const VectorField& dst = phi.field(map.target);
    const Chart& target_chart = atlas.chart(map.target);
    for (const Point& x : sampler.grid(map.overlap_source, opts.per_axis)) {
      Point y = target_chart.reduce(map(x));
      Matrix3 jac = transition_jacobian(map, x);
      auto vx = src(x);
      std::array<double, 3> pushed{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) pushed[i] += jac[i][j] * vx[j];
      bool positive = true;
      double res = ray_residual(pushed, dst(y), &positive);
      check.max_overlap_residual = std::max(check.max_overlap_residual, res);
      if (!positive) check.orientation_consistent = false;
    }
  }

  check.pass = check.min_norm > 1e-12 && check.max_overlap_residual < tolerance &&
               check.orientation_consistent;
  return check;
}

double form_on_flow(const FoliationSpec& F, const FlowSpec& phi, const std::string& chart,
                    const Point& x) {
  auto w = F.form(chart)(x);
  auto v = phi.field(chart)(x);
  return dot3(w, v);
}

LeafwisePosition check_leafwise_position(const AtlasManifold& atlas, const FoliationSpec& F,
                                         const FlowSpec& phi, const SamplingOptions& opts,
                                         double locus_band, double zero_tol) {
  LeafwisePosition result;
  Sampler sampler(opts.seed);
  std::vector<LeafwiseWitness> undeclared;

  for (const OneForm& form : F.forms) {
    const Chart& chart = atlas.chart(form.chart);
    const VectorField& X = phi.field(form.chart);
    for (const Point& x : sampler.grid(chart, opts.per_axis)) {
      double wx = dot3(form(x), X(x));
      bool on_locus = false;
      for (const TangencyLeaf& leaf : F.tangency_leaves)
        if (leaf.chart == form.chart && near_locus(leaf, x, locus_band)) on_locus = true;
      if (on_locus) {
        ++result.tangent_samples;
        continue;  // w(X) may take any small value inside the band
      }
      if (std::abs(wx) <= zero_tol) {
        undeclared.push_back({form.chart, x, wx});
      } else {
        ++result.transverse_samples;
      }
    }
    // On-locus tangency: sample the locus itself.
    for (const TangencyLeaf& leaf : F.tangency_leaves) {
      if (leaf.chart != form.chart) continue;
      Box face{chart.lower, chart.upper};
      face.lower[leaf.normal_axis] = leaf.level;
      face.upper[leaf.normal_axis] = leaf.level;
      for (Point x : sampler.grid(face, opts.per_axis)) {
        x[leaf.normal_axis] = leaf.level;
        if (!chart.contains(x)) continue;
        double wx = dot3(form(x), X(x));
        if (std::abs(wx) > zero_tol)
          result.failures.push_back({form.chart, x, wx});
        else
          ++result.tangent_samples;
      }
    }
  }

  if (!undeclared.empty()) {
    fail(ErrorKind::MixedLeaf,
         "flow tangency outside every declared locus (first witness on chart " +
             undeclared.front().chart + ")");
  }
  result.pass = result.failures.empty();
  return result;
}

VectorField make_basic_transverse(const AtlasManifold& atlas, const TangencyLeaf& leaf,
                                  const FlowSpec& phi, const MetricField& gamma,
                                  const SamplingOptions& opts) {
  if (gamma.signature != MetricSignature::Riemannian)
    fail(ErrorKind::NotQuasiFibered, "auxiliary metric must be riemannian");
  const Chart& chart = atlas.chart(leaf.chart);
  Box region{chart.lower, chart.upper};
  double pad = 0.05 * (chart.upper[leaf.normal_axis] - chart.lower[leaf.normal_axis]);
  region.lower[leaf.normal_axis] = std::max(chart.lower[leaf.normal_axis], leaf.level - pad);
  region.upper[leaf.normal_axis] = std::min(chart.upper[leaf.normal_axis], leaf.level + pad);
  QuasiFiberedReport qf = check_quasi_fibered(atlas, gamma, phi, {{leaf.chart, region}}, opts);
  if (!qf.pass)
    fail(ErrorKind::NotQuasiFibered, "auxiliary metric is not quasi-fibered near the locus");

  // gamma-inverse applied to d(locus field), frozen on the locus and
  // extended constantly along the normal coordinate.
  const ChartMetric& cm = gamma.chart_metric(leaf.chart);
  std::array<Expr, 3> df;
  {
    // Build exact coordinate differentials of the locus field via dual
    // evaluation is pointwise; here the gallery loci are coordinate levels,
    // so d(f) has constant components. Verify and freeze.
    Sampler sampler(opts.seed);
    Dual probe = leaf.locus_field.expr.eval_dual(
        {0.5 * (region.lower[0] + region.upper[0]), 0.5 * (region.lower[1] + region.upper[1]),
         0.5 * (region.lower[2] + region.upper[2])});
    for (const Point& x : sampler.grid(region, 4)) {
      Dual d = leaf.locus_field.expr.eval_dual(x);
      for (int k = 0; k < 3; ++k)
        if (std::abs(d.d[k] - probe.d[k]) > 1e-9)
          fail(ErrorKind::InvalidParameter,
               "basic transverse construction needs a locus field with constant differential");
    }
    for (int k = 0; k < 3; ++k) df[k] = Expr::constant(probe.d[k]);
  }

  // Symbolic inverse of the 3x3 metric block times df, then substitute the
  // normal coordinate by the locus level.
  std::array<std::array<Expr, 3>, 3> g;
  g[0][0] = cm.upper[0]; g[0][1] = cm.upper[1]; g[0][2] = cm.upper[2];
  g[1][0] = cm.upper[1]; g[1][1] = cm.upper[3]; g[1][2] = cm.upper[4];
  g[2][0] = cm.upper[2]; g[2][1] = cm.upper[4]; g[2][2] = cm.upper[5];
  Expr det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
             g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
             g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  auto cofactor = [&](int i, int j) {
    int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
    return g[i1][j1] * g[i2][j2] - g[i1][j2] * g[i2][j1];
  };
  VectorField Z;
  Z.chart = leaf.chart;
  for (int i = 0; i < 3; ++i) {
    Expr num = Expr::constant(0.0);
    for (int j = 0; j < 3; ++j) num = num + cofactor(j, i) * df[j];
    Expr zi = num / det;
    Z.components[i] = zi.substitute(leaf.normal_axis, leaf.level);
  }

  // Basic check: [X, Z] parallel to X near the locus.
  const VectorField& X = phi.field(leaf.chart);
  Sampler sampler(opts.seed);
  for (const Point& x : sampler.grid(region, opts.per_axis)) {
    std::array<double, 3> bracket{};
    for (int i = 0; i < 3; ++i) {
      Dual zi = Z.components[i].eval_dual(x);
      Dual xi = X.components[i].eval_dual(x);
      auto xv = X(x);
      auto zv = Z(x);
      bracket[i] = dot3(xv, zi.d) - dot3(zv, xi.d);
    }
    bool positive = true;
    double res = ray_residual(bracket, X(x), &positive);
    if (norm3(bracket) > 1e-7 && res > 1e-7)
      fail(ErrorKind::NotQuasiFibered, "constructed transverse field is not basic");
  }
  return Z;
}

FrameData frame_fields(const AtlasManifold& atlas, const FoliationSpec& F, const FlowSpec& phi,
                       const VectorField& Z, const TangencyLeaf& leaf, const Box& neighborhood,
                       const SamplingOptions& opts) {
  (void)atlas;
  const OneForm& w = F.form(leaf.chart);
  const VectorField& X = phi.field(leaf.chart);
  if (Z.chart != leaf.chart)
    fail(ErrorKind::InvalidParameter, "transverse field lives on the wrong chart");

  Expr wX = w.components[0] * X.components[0] + w.components[1] * X.components[1] +
            w.components[2] * X.components[2];
  Expr wZ = w.components[0] * Z.components[0] + w.components[1] * Z.components[1] +
            w.components[2] * Z.components[2];
  Expr norm = Expr::sqrt(wX * wX + wZ * wZ);

  FrameData frame;
  frame.chart = leaf.chart;
  frame.leaf = leaf;
  frame.flow_field = X;
  frame.transverse_field = Z;
  frame.tangent_weight = {leaf.chart, wZ / norm};
  frame.transverse_weight = {leaf.chart, Expr::constant(0.0) - wX / norm};
  frame.neighborhood = neighborhood;
  for (int i = 0; i < 3; ++i)
    frame.leaf_field.components[i] = frame.tangent_weight.expr * X.components[i] +
                                     frame.transverse_weight.expr * Z.components[i];
  frame.leaf_field.chart = leaf.chart;

  Sampler sampler(opts.seed);
  for (const Point& x : sampler.grid(neighborhood, opts.per_axis)) {
    double nx = 0.0;
    try {
      nx = norm.eval(x);
    } catch (const Error&) {
      fail(ErrorKind::DegenerateFrame, "w(X) and w(Z) vanish together");
    }
    if (nx < 1e-12) fail(ErrorKind::DegenerateFrame, "w(X) and w(Z) vanish together");
    double a = frame.tangent_weight.expr.eval(x);
    double b = frame.transverse_weight.expr.eval(x);
    if (std::abs(a * a + b * b - 1.0) > 1e-9)
      fail(ErrorKind::DegenerateFrame, "frame normalization failed");
    double wy = dot3(w(x), frame.leaf_field(x));
    if (std::abs(wy) > 1e-9) fail(ErrorKind::DegenerateFrame, "Y is not tangent to the foliation");
  }
  return frame;
}

Attractiveness attractiveness(const AtlasManifold& atlas, const FrameData& frame, double offset,
                              const SamplingOptions& opts, double zero_tol) {
  const Chart& chart = atlas.chart(frame.chart);
  int axis = frame.leaf.normal_axis;
  double level = frame.leaf.level;
  bool below_ok = level - offset >= chart.lower[axis] || chart.periodic[axis];
  bool above_ok = level + offset <= chart.upper[axis] || chart.periodic[axis];
  if (!below_ok || !above_ok) return Attractiveness::OneSided;

  Sampler sampler(opts.seed);
  auto side_sign = [&](double shifted_level) {
    Box face = frame.neighborhood;
    face.lower[axis] = shifted_level;
    face.upper[axis] = shifted_level;
    int sign = 0;
    for (Point x : sampler.grid(face, opts.per_axis)) {
      x[axis] = shifted_level;
      double b = frame.transverse_weight.expr.eval(x);
      if (std::abs(b) < zero_tol)
        fail(ErrorKind::AmbiguousSign, "b vanishes off the tangency locus");
      int s = b > 0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (sign != s) fail(ErrorKind::AmbiguousSign, "b changes sign within one side");
    }
    return sign;
  };
  int lower_sign = side_sign(level - offset);
  int upper_sign = side_sign(level + offset);
  return lower_sign != upper_sign ? Attractiveness::Attractive : Attractiveness::NotAttractive;
}

AdaptedReport check_adapted(const AtlasManifold& atlas, const FrameData& frame,
                            const ScalarField& beta, const ScalarField& quotient,
                            const SamplingOptions& opts) {
  (void)atlas;
  if (quotient.expr.empty())
    fail(ErrorKind::QuotientUndefined, "b/beta must be supplied in evaluable form");
  AdaptedReport report;
  report.quotient_min = 1e300;
  Sampler sampler(opts.seed);
  const VectorField& X = frame.flow_field;
  for (const Point& x : sampler.grid(frame.neighborhood, opts.per_axis)) {
    double xb = std::abs(beta.expr.derivative(x, X(x)));
    report.max_flow_derivative = std::max(report.max_flow_derivative, xb);
    double q;
    try {
      q = quotient.expr.eval(x);
    } catch (const Error&) {
      fail(ErrorKind::QuotientUndefined, "quotient does not evaluate on the neighborhood");
    }
    report.quotient_min = std::min(report.quotient_min, std::abs(q));
    report.quotient_max = std::max(report.quotient_max, std::abs(q));
    double b = frame.transverse_weight.expr.eval(x);
    double res = std::abs(q * beta.expr.eval(x) - b);
    report.consistency_residual = std::max(report.consistency_residual, res);
  }
  report.pass = report.max_flow_derivative < 1e-7 && report.quotient_min > 1e-6 &&
                report.quotient_max < 1e6 && report.consistency_residual < 1e-9;
  return report;
}

FoliationSpec reeb_solid_torus(double flatness, int orientation) {
  if (!(flatness > 0.0) || flatness >= 1.0)
    fail(ErrorKind::InvalidParameter, "flatness must lie in (0, 1)");
  if (orientation != 1 && orientation != -1)
    fail(ErrorKind::InvalidParameter, "orientation must be +1 or -1");
  double twist_start = 1.0 - flatness;
  Expr r = Expr::coord(0);
  Expr angle = (3.14159265358979323846 / 2.0) * smooth_step((r - twist_start) / flatness);
  Expr lambda = Expr::cos(angle);
  Expr mu = Expr::sin(angle);

  FoliationSpec F;
  F.name = orientation == 1 ? "reeb_solid_torus" : "reeb_solid_torus_reversed";
  F.orientation = orientation;
  OneForm w;
  w.chart = "st";
  double s = orientation;
  w.components = {s * mu, Expr::constant(0.0), s * lambda};
  F.forms.push_back(w);
  TangencyLeaf boundary;
  boundary.chart = "st";
  boundary.locus_field = {"st", Expr::coord(0)};
  boundary.level = 1.0;
  boundary.normal_axis = 0;
  boundary.compact = true;
  F.tangency_leaves.push_back(boundary);
  return F;
}

FoliationSpec turbulize(const AtlasManifold& atlas, const FoliationSpec& F, const TubeSpec& tube,
                        int orientation, const SamplingOptions& opts) {
  if (orientation != 1 && orientation != -1)
    fail(ErrorKind::InvalidParameter, "orientation must be +1 or -1");
  const Chart& chart = atlas.chart(tube.chart);
  const OneForm& old_form = F.form(tube.chart);

  // Radial squared coordinate and its differential (smooth in both modes).
  Expr tau, dtau0, dtau1, dtau2;
  double tau_leaf, tau_lo, tau_hi;
  if (tube.radial_mode) {
    tau = Expr::coord(tube.radial_axis);
    dtau0 = Expr::constant(tube.radial_axis == 0 ? 1.0 : 0.0);
    dtau1 = Expr::constant(tube.radial_axis == 1 ? 1.0 : 0.0);
    dtau2 = Expr::constant(tube.radial_axis == 2 ? 1.0 : 0.0);
    tau_leaf = tube.rho0;
    tau_lo = tube.rho0 - tube.twist_width;
    tau_hi = tube.rho0 + tube.twist_width;
  } else {
    Expr da = Expr::coord(tube.axis_a) - tube.center_a;
    Expr db = Expr::coord(tube.axis_b) - tube.center_b;
    tau = da * da + db * db;
    std::array<Expr, 3> d{Expr::constant(0.0), Expr::constant(0.0), Expr::constant(0.0)};
    d[tube.axis_a] = 2.0 * da;
    d[tube.axis_b] = 2.0 * db;
    dtau0 = d[0];
    dtau1 = d[1];
    dtau2 = d[2];
    tau_leaf = tube.rho0 * tube.rho0;
    double rl = tube.rho0 - tube.twist_width, rh = tube.rho0 + tube.twist_width;
    tau_lo = rl * rl;
    tau_hi = rh * rh;
  }
  double pad = tube.support_pad * (tube.radial_mode ? 1.0 : 2.0 * tube.rho0);
  double support_lo = tau_lo - pad;
  double support_hi = tau_hi + pad;

  // The old form inside the tube support must be q0 * d(core axis).
  Sampler sampler(opts.seed);
  double q0 = 0.0;
  bool q0_set = false;
  for (const Point& x : sampler.grid(chart, opts.per_axis)) {
    double t = tau.eval(x);
    if (t > support_hi) continue;
    auto w = old_form(x);
    double core = w[tube.core_axis];
    if (std::abs(core) < 1e-9)
      fail(ErrorKind::NotTransverseInTube, "foliation not transverse to the tube core direction");
    for (int k = 0; k < 3; ++k) {
      if (k == tube.core_axis) continue;
      if (std::abs(w[k]) > 1e-9)
        fail(ErrorKind::NotTransverseInTube, "tube interior is not a product zone of the foliation");
    }
    if (!q0_set) {
      q0 = core;
      q0_set = true;
    } else if (std::abs(core - q0) > 1e-9) {
      fail(ErrorKind::NotTransverseInTube, "core coefficient varies inside the tube");
    }
  }
  if (!q0_set) fail(ErrorKind::NotTransverseInTube, "tube misses the sampled chart domain");

  double w2 = 0.5 * (tau_hi - tau_lo);
  Expr rise = smooth_step((tau - tau_leaf) / w2);
  Expr drop = smooth_step((tau_leaf - tau) / w2);
  // +1: sign change across the new leaf (attractive); -1: symmetric dip.
  Expr dip = orientation == 1 ? rise - drop : rise + drop;
  double mpad = 0.5 * pad;
  Expr radial_profile = plateau(tau, support_lo, support_hi, mpad);

  FoliationSpec result = F;
  result.name = F.name + "+turbulized";
  for (OneForm& form : result.forms) {
    if (form.chart != tube.chart) continue;
    form.components[tube.core_axis] =
        form.components[tube.core_axis] + q0 * (dip - 1.0);
    std::array<Expr, 3> dtau{dtau0, dtau1, dtau2};
    for (int k = 0; k < 3; ++k) {
      if (k == tube.core_axis) continue;
      form.components[k] = form.components[k] + q0 * radial_profile * dtau[k];
    }
  }
  TangencyLeaf leaf;
  leaf.chart = tube.chart;
  leaf.locus_field = {tube.chart, tau};
  leaf.level = tau_leaf;
  leaf.normal_axis = tube.radial_mode ? tube.radial_axis : tube.axis_a;
  leaf.compact = true;
  result.tangency_leaves.push_back(leaf);
  return result;
}

FoliationSpec spin_to_boundary(const AtlasManifold& atlas, const FoliationSpec& F,
                               const std::string& chart_id, int axis, bool upper_end,
                               double collar_width, const SamplingOptions& opts) {
  const Chart& chart = atlas.chart(chart_id);
  if (chart.periodic[axis]) fail(ErrorKind::NoCollar, "boundary axis is periodic");
  double level = upper_end ? chart.upper[axis] : chart.lower[axis];
  const OneForm& old_form = F.form(chart_id);

  // Signed distance into the chart from the boundary face.
  Expr delta = upper_end ? (Expr::constant(level) - Expr::coord(axis))
                         : (Expr::coord(axis) - level);

  // Already tangent? Then spinning is the identity.
  Sampler sampler(opts.seed);
  Box face{chart.lower, chart.upper};
  face.lower[axis] = level;
  face.upper[axis] = level;
  bool tangent = true;
  double q0 = 0.0;
  bool q0_set = false;
  for (Point x : sampler.grid(face, opts.per_axis)) {
    x[axis] = level;
    auto w = old_form(x);
    for (int k = 0; k < 3; ++k)
      if (k != axis && std::abs(w[k]) > 1e-9) tangent = false;
  }
  if (tangent) return F;

  // Model collar: the form inside the collar must be a constant multiple of
  // one coordinate differential transverse to the boundary.
  int fiber_axis = -1;
  Box collar{chart.lower, chart.upper};
  if (upper_end)
    collar.lower[axis] = level - collar_width;
  else
    collar.upper[axis] = level + collar_width;
  for (const Point& x : sampler.grid(collar, opts.per_axis)) {
    auto w = old_form(x);
    for (int k = 0; k < 3; ++k) {
      if (std::abs(w[k]) < 1e-9) continue;
      if (k == axis) fail(ErrorKind::NoCollar, "form has a normal component inside the collar");
      if (fiber_axis == -1) fiber_axis = k;
      if (fiber_axis != k) fail(ErrorKind::NoCollar, "collar form is not a coordinate multiple");
      if (!q0_set) {
        q0 = w[k];
        q0_set = true;
      } else if (std::abs(w[k] - q0) > 1e-9) {
        fail(ErrorKind::NoCollar, "collar coefficient is not constant");
      }
    }
  }
  if (fiber_axis == -1) fail(ErrorKind::NoCollar, "form vanishes inside the collar");

  Expr ramp = smooth_step(delta / collar_width);          // 0 flat at the face
  Expr hold = smooth_step((collar_width * 0.9 - delta) / (0.4 * collar_width));
  double normal_sign = upper_end ? -1.0 : 1.0;  // co-orientation into the chart

  FoliationSpec result = F;
  result.name = F.name + "+spun";
  for (OneForm& form : result.forms) {
    if (form.chart != chart_id) continue;
    form.components[fiber_axis] = form.components[fiber_axis] + q0 * (ramp - 1.0);
    form.components[axis] = form.components[axis] + (q0 * normal_sign) * hold;
  }
  TangencyLeaf leaf;
  leaf.chart = chart_id;
  leaf.locus_field = {chart_id, Expr::coord(axis)};
  leaf.level = level;
  leaf.normal_axis = axis;
  leaf.compact = true;
  result.tangency_leaves.push_back(leaf);
  return result;
}

FoliationSpec glue_foliations(const AtlasManifold& atlas, const std::vector<FoliationSpec>& pieces,
                              const SamplingOptions& opts, double tolerance) {
  FoliationSpec glued;
  glued.name = "glued";
  for (const FoliationSpec& piece : pieces) {
    for (const OneForm& f : piece.forms) {
      for (const OneForm& existing : glued.forms)
        if (existing.chart == f.chart)
          fail(ErrorKind::InvalidParameter, "two pieces define a form on chart " + f.chart);
      glued.forms.push_back(f);
    }
    for (const TangencyLeaf& leaf : piece.tangency_leaves) glued.tangency_leaves.push_back(leaf);
  }

  FoliationCheck check = validate_foliation(atlas, glued, opts, tolerance);
  if (!check.orientation_consistent)
    fail(ErrorKind::OrientationMismatch, "piece co-orientations disagree on an overlap");
  if (check.max_overlap_residual >= tolerance)
    fail(ErrorKind::FormMismatch, "piece forms disagree on an overlap (residual " +
                                      std::to_string(check.max_overlap_residual) + ")");
  if (!check.pass) fail(ErrorKind::FormMismatch, "glued foliation failed validation");

  // Each declared tangency leaf must be a leaf: on the locus the form has
  // only a normal component.
  Sampler sampler(opts.seed);
  for (const TangencyLeaf& leaf : glued.tangency_leaves) {
    const Chart& chart = atlas.chart(leaf.chart);
    const OneForm& form = glued.form(leaf.chart);
    Box face{chart.lower, chart.upper};
    face.lower[leaf.normal_axis] = leaf.level;
    face.upper[leaf.normal_axis] = leaf.level;
    for (Point x : sampler.grid(face, opts.per_axis)) {
      x[leaf.normal_axis] = leaf.level;
      if (!chart.contains(x)) continue;
      auto w = form(x);
      for (int k = 0; k < 3; ++k)
        if (k != leaf.normal_axis && std::abs(w[k]) > tolerance)
          fail(ErrorKind::FormMismatch, "declared boundary is not a leaf on chart " + leaf.chart);
    }
  }
  return glued;
}

}  // namespace tgfl
