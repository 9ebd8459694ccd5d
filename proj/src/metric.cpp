#include "tgfl/metric.hpp"

#include <algorithm>
#include <cmath>

namespace tgfl {

namespace {

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Eigenvalues of a symmetric 3x3 matrix (analytic, Smith's trigonometric
// method). Good enough for sign counting.
std::array<double, 3> sym_eigenvalues(const Matrix3& m) {
  double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  if (p1 == 0.0) return {m[0][0], m[1][1], m[2][2]};
  double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
              (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  Matrix3 b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  double r = det3(b) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  double e1 = q + 2.0 * p * std::cos(phi);
  double e3 = q + 2.0 * p * std::cos(phi + 2.0 * 3.14159265358979323846 / 3.0);
  double e2 = 3.0 * q - e1 - e3;
  return {e1, e2, e3};
}

bool signature_matches(const Matrix3& m, MetricSignature sig) {
  auto ev = sym_eigenvalues(m);
  int neg = 0, pos = 0;
  for (double e : ev) (e < 0 ? neg : pos)++;
  if (sig == MetricSignature::Riemannian) return pos == 3;
  return neg == 1 && pos == 2;
}

}  // namespace

const ChartMetric& MetricField::chart_metric(const std::string& chart) const {
  for (const ChartMetric& c : charts)
    if (c.chart == chart) return c;
  fail(ErrorKind::InvalidParameter, "metric " + name + " has no components on chart " + chart);
}

Matrix3 MetricField::matrix_at(const std::string& chart, const Point& x) const {
  const ChartMetric& c = chart_metric(chart);
  double g11 = c.upper[0].eval(x), g12 = c.upper[1].eval(x), g13 = c.upper[2].eval(x);
  double g22 = c.upper[3].eval(x), g23 = c.upper[4].eval(x), g33 = c.upper[5].eval(x);
  return {{{g11, g12, g13}, {g12, g22, g23}, {g13, g23, g33}}};
}

std::array<Dual, 6> MetricField::dual_at(const std::string& chart, const Point& x) const {
  const ChartMetric& c = chart_metric(chart);
  std::array<Dual, 6> out;
  for (int k = 0; k < 6; ++k) out[k] = c.upper[k].eval_dual(x);
  return out;
}

double MetricField::pairing(const std::string& chart, const Point& x,
                            const std::array<double, 3>& u, const std::array<double, 3>& v) const {
  Matrix3 g = matrix_at(chart, x);
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g[i][j] * u[i] * v[j];
  return s;
}

const ScalarField& WeightedMetric::weight(const std::string& chart) const {
  for (const ScalarField& w : weights)
    if (w.chart == chart) return w;
  fail(ErrorKind::InvalidParameter, "blend piece has no weight on chart " + chart);
}

SignatureReport check_signature(const AtlasManifold& atlas, const MetricField& g, int samples,
                                const std::vector<Region>& domains, uint64_t seed,
                                double det_floor) {
  (void)atlas;
  SignatureReport report;
  report.min_abs_det = 1e300;
  report.pass = true;
  Sampler sampler(seed);
  if (domains.empty()) fail(ErrorKind::InvalidParameter, "signature check needs sample domains");
  int per_domain = std::max(1, samples / static_cast<int>(domains.size()));
  for (const Region& region : domains) {
    for (const Point& x : sampler.random(region.box, per_domain)) {
      Matrix3 m = g.matrix_at(region.chart, x);
      double det = det3(m);
      report.min_abs_det = std::min(report.min_abs_det, std::abs(det));
      ++report.samples;
      if (std::abs(det) <= det_floor || !signature_matches(m, g.signature)) {
        report.pass = false;
        if (!report.witness) report.witness = {{region.chart, x}};
      }
    }
  }
  return report;
}

MetricCompatReport check_metric_compat(const AtlasManifold& atlas, const MetricField& g,
                                       const SamplingOptions& opts, double tolerance) {
  MetricCompatReport report;
  Sampler sampler(opts.seed);
  for (const SmoothMap& map : atlas.transitions) {
    bool has_src = false, has_dst = false;
    for (const ChartMetric& c : g.charts) {
      has_src |= c.chart == map.source;
      has_dst |= c.chart == map.target;
    }
    if (!has_src || !has_dst) continue;
    const Chart& target_chart = atlas.chart(map.target);
    for (const Point& x : sampler.grid(map.overlap_source, opts.per_axis)) {
      Point y = target_chart.reduce(map(x));
      Matrix3 jac = transition_jacobian(map, x);
      Matrix3 gy = g.matrix_at(map.target, y);
      Matrix3 gx = g.matrix_at(map.source, x);
      // pullback: (psi* g)_ij = J^T g J
      double scale = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(gx[i][j]));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double pulled = 0;
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) pulled += jac[k][i] * gy[k][l] * jac[l][j];
          double res = std::abs(pulled - gx[i][j]) / std::max(1.0, scale);
          report.max_residual = std::max(report.max_residual, res);
        }
    }
  }
  report.pass = report.max_residual < tolerance;
  return report;
}

MetricField build_tangency_metric(const AtlasManifold& atlas, const FrameData& frame,
                                  const ScalarField& beta, const ScalarField& quotient,
                                  const ScalarField& gamma_P, const VectorField& P_frame,
                                  const SamplingOptions& opts) {
  AdaptedReport adapted = check_adapted(atlas, frame, beta, quotient, opts);
  if (!adapted.pass) fail(ErrorKind::AdaptednessFailed, "frame/beta pair is not adapted");

  Sampler sampler(opts.seed);
  const int axis = frame.leaf.normal_axis;
  const double level = frame.leaf.level;

  // beta must keep one sign per side of the locus.
  auto side_sign_scan = [&](double lo, double hi) {
    int sign = 0;
    Box side = frame.neighborhood;
    side.lower[axis] = lo;
    side.upper[axis] = hi;
    if (!(lo < hi)) return 0;
    for (const Point& x : sampler.grid(side, opts.per_axis)) {
      double b = beta.expr.eval(x);
      if (std::abs(b) < 1e-12) continue;
      int s = b > 0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (s != sign) fail(ErrorKind::SignChangeInBeta, "beta changes sign within one side");
    }
    return sign;
  };
  side_sign_scan(frame.neighborhood.lower[axis], level - 1e-6);
  side_sign_scan(level + 1e-6, frame.neighborhood.upper[axis]);

  // P must lie in ker(w) and be independent of the frame plane.
  for (const Point& x : sampler.grid(frame.neighborhood, opts.per_axis)) {
    auto p = P_frame(x);
    auto y = frame.leaf_field(x);
    auto xv = frame.flow_field(x);
    (void)y;
    (void)xv;
    double gp = gamma_P.expr.eval(x);
    if (!(gp > 0)) fail(ErrorKind::InvalidParameter, "gamma_P must be positive");
    if (dot3(p, p) < 1e-12) fail(ErrorKind::InvalidParameter, "P frame field vanishes");
  }

  // Frame matrix entries, written so they evaluate on the locus.
  const Expr& a = frame.tangent_weight.expr;
  const Expr& b = frame.transverse_weight.expr;
  const Expr& q = quotient.expr;
  Expr e_xx = Expr::constant(0.0) - b * q;  // -b^2/beta
  Expr e_xz = a * q;                        //  ab/beta
  Expr e_zz = b * q;                        //  b^2/beta

  // Congruence to coordinates: g = F^{-T} G F^{-1} with F = [X | Z | P].
  std::array<std::array<Expr, 3>, 3> F;
  for (int i = 0; i < 3; ++i) {
    F[i][0] = frame.flow_field.components[i];
    F[i][1] = frame.transverse_field.components[i];
    F[i][2] = P_frame.components[i];
  }
  Expr det = F[0][0] * (F[1][1] * F[2][2] - F[1][2] * F[2][1]) -
             F[0][1] * (F[1][0] * F[2][2] - F[1][2] * F[2][0]) +
             F[0][2] * (F[1][0] * F[2][1] - F[1][1] * F[2][0]);
  // Cofactor matrix C: F^{-1} = C^T / det, so g = C G C^T / det^2.
  std::array<std::array<Expr, 3>, 3> C;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      C[i][j] = F[i1][j1] * F[i2][j2] - F[i1][j2] * F[i2][j1];
    }
  std::array<std::array<Expr, 3>, 3> G;
  G[0][0] = e_xx; G[0][1] = e_xz; G[0][2] = Expr::constant(0.0);
  G[1][0] = e_xz; G[1][1] = e_zz; G[1][2] = Expr::constant(0.0);
  G[2][0] = Expr::constant(0.0); G[2][1] = Expr::constant(0.0); G[2][2] = gamma_P.expr;

  Expr det2 = det * det;
  auto entry = [&](int i, int j) {
    Expr s = Expr::constant(0.0);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) s = s + C[i][k] * G[k][l] * C[j][l];
    return s / det2;
  };

  MetricField g;
  g.name = "tangency_metric(" + frame.chart + ")";
  g.signature = MetricSignature::Lorentzian;
  ChartMetric cm;
  cm.chart = frame.chart;
  cm.upper = {entry(0, 0), entry(0, 1), entry(0, 2), entry(1, 1), entry(1, 2), entry(2, 2)};
  g.charts.push_back(cm);
  return g;
}

MetricField build_transverse_metric(const AtlasManifold& atlas, const FoliationSpec& F,
                                    const FlowSpec& phi, const TransverseRecipe& recipe,
                                    const std::vector<Region>& region,
                                    const SamplingOptions& opts) {
  (void)atlas;
  Sampler sampler(opts.seed);
  MetricField g;
  g.name = "transverse_metric";
  g.signature = MetricSignature::Lorentzian;
  for (const TransverseRecipe::ChartPart& part : recipe.parts) {
    const OneForm& w = F.form(part.chart);
    const VectorField& X = phi.field(part.chart);

    // Transversality and coframe checks on the declared region.
    for (const Region& reg : region) {
      if (reg.chart != part.chart) continue;
      for (const Point& x : sampler.grid(reg.box, opts.per_axis)) {
        double wx = dot3(w(x), X(x));
        if (std::abs(wx) < 1e-9)
          fail(ErrorKind::NotTransverse, "flow tangent to the foliation inside the region");
        auto xv = X(x);
        double n1 = part.coframe1[0].eval(x) * xv[0] + part.coframe1[1].eval(x) * xv[1] +
                    part.coframe1[2].eval(x) * xv[2];
        double n2 = part.coframe2[0].eval(x) * xv[0] + part.coframe2[1].eval(x) * xv[1] +
                    part.coframe2[2].eval(x) * xv[2];
        if (std::abs(n1) > 1e-9 || std::abs(n2) > 1e-9)
          fail(ErrorKind::InvalidParameter, "complement coframes must annihilate the flow");
        if (!(part.coef1.eval(x) > 0) || !(part.coef2.eval(x) > 0))
          fail(ErrorKind::InvalidParameter, "recipe coefficients must be positive");
      }
    }

    Expr wX = w.components[0] * X.components[0] + w.components[1] * X.components[1] +
              w.components[2] * X.components[2];
    Expr scale = part.flow_scale.empty() ? Expr::constant(1.0) : part.flow_scale;
    std::array<Expr, 3> flow_coframe;
    for (int i = 0; i < 3; ++i) flow_coframe[i] = w.components[i] * scale / wX;

    ChartMetric cm;
    cm.chart = part.chart;
    int idx = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Expr e = part.flow_sign * (flow_coframe[i] * flow_coframe[j]) +
                 part.sign1 * part.coef1 * (part.coframe1[i] * part.coframe1[j]) +
                 part.sign2 * part.coef2 * (part.coframe2[i] * part.coframe2[j]);
        cm.upper[idx++] = e;
      }
    g.charts.push_back(cm);
  }
  return g;
}

MetricField glue_metrics(const AtlasManifold& atlas, const std::vector<WeightedMetric>& pieces,
                         const FlowSpec& phi, const std::vector<Region>& sample_domains,
                         GlueReport* report_out, int signature_samples,
                         const SamplingOptions& opts) {
  if (pieces.empty()) fail(ErrorKind::InvalidParameter, "nothing to glue");
  GlueReport report;
  report.min_abs_det = 1e300;
  Sampler sampler(opts.seed);

  // Assemble gated sums per chart.
  MetricField g;
  g.name = "glued_metric";
  g.signature = MetricSignature::Lorentzian;
  std::vector<std::string> chart_ids;
  for (const WeightedMetric& piece : pieces)
    for (const ChartMetric& cm : piece.metric.charts)
      if (std::find(chart_ids.begin(), chart_ids.end(), cm.chart) == chart_ids.end())
        chart_ids.push_back(cm.chart);

  for (const std::string& chart_id : chart_ids) {
    ChartMetric blended;
    blended.chart = chart_id;
    bool first = true;
    for (const WeightedMetric& piece : pieces) {
      bool covers = false;
      for (const ChartMetric& cm : piece.metric.charts) covers |= cm.chart == chart_id;
      if (!covers) continue;
      const ChartMetric& cm = piece.metric.chart_metric(chart_id);
      const ScalarField& weight = piece.weight(chart_id);
      for (int k = 0; k < 6; ++k) {
        Expr gated = Expr::gate(weight.expr, cm.upper[k]);
        blended.upper[k] = first ? gated : blended.upper[k] + gated;
      }
      first = false;
    }
    if (first) fail(ErrorKind::InvalidParameter, "no piece covers chart " + chart_id);
    g.charts.push_back(blended);
  }

  // Partition of unity + flow-basic weights + causal agreement.
  for (const std::string& chart_id : chart_ids) {
    const Chart& chart = atlas.chart(chart_id);
    const VectorField& X = phi.field(chart_id);
    for (const Point& x : sampler.grid(chart, opts.per_axis)) {
      double sum = 0.0;
      double flow_sign_ref = 0.0;
      for (const WeightedMetric& piece : pieces) {
        bool covers = false;
        for (const ChartMetric& cm : piece.metric.charts) covers |= cm.chart == chart_id;
        if (!covers) continue;
        const ScalarField& weight = piece.weight(chart_id);
        double wv = weight.expr.eval(x);
        sum += wv;
        report.max_weight_flow_derivative = std::max(
            report.max_weight_flow_derivative, std::abs(weight.expr.derivative(x, X(x))));
        if (wv > 0.05) {
          double gxx = piece.metric.pairing(chart_id, x, X(x), X(x));
          if (std::abs(gxx) > 1e-9) {
            double s = gxx > 0 ? 1.0 : -1.0;
            if (flow_sign_ref == 0.0) flow_sign_ref = s;
            if (s != flow_sign_ref)
              fail(ErrorKind::IncompatibleNormalMetrics,
                   "pieces disagree on the causal type of the flow in a blend zone");
          }
        }
      }
      report.max_weight_sum_error = std::max(report.max_weight_sum_error, std::abs(sum - 1.0));
    }
  }

  // Signature sampling.
  SignatureReport sig = check_signature(atlas, g, signature_samples, sample_domains, opts.seed);
  report.min_abs_det = sig.min_abs_det;
  if (!sig.pass) {
    std::string where = sig.witness ? sig.witness->first : "?";
    fail(ErrorKind::SignatureLossInBlend, "blend loses the Lorentzian signature on chart " + where);
  }
  report.pass = report.max_weight_sum_error < 1e-9 && report.max_weight_flow_derivative < 1e-7;
  if (report_out) *report_out = report;
  return g;
}

QuasiFiberedReport check_quasi_fibered(const AtlasManifold& atlas, const MetricField& g,
                                       const FlowSpec& phi, const std::vector<Region>& region,
                                       const SamplingOptions& opts, double tolerance) {
  QuasiFiberedReport report;
  Sampler sampler(opts.seed);
  for (const Region& reg : region) {
    const Chart& chart = atlas.chart(reg.chart);
    (void)chart;
    const VectorField& Xf = phi.field(reg.chart);
    const ChartMetric& cm = g.chart_metric(reg.chart);
    for (const Point& x : sampler.grid(reg.box, opts.per_axis)) {
      auto xv = Xf(x);

      // (L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k
      std::array<Dual, 6> gd;
      for (int k = 0; k < 6; ++k) gd[k] = cm.upper[k].eval_dual(x);
      auto comp = [&](int i, int j) -> const Dual& {
        static const int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return gd[idx[i][j]];
      };
      std::array<std::array<double, 3>, 3> dX;
      for (int i = 0; i < 3; ++i) {
        Dual xi = Xf.components[i].eval_dual(x);
        dX[i] = xi.d;
      }
      Matrix3 lie{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double v = dot3(xv, comp(i, j).d);
          for (int k = 0; k < 3; ++k) v += comp(k, j).v * dX[k][i] + comp(i, k).v * dX[k][j];
          lie[i][j] = v;
        }

      // Two euclidean-orthogonal complements of X.
      double nx2 = dot3(xv, xv);
      int weakest = 0;
      for (int k = 1; k < 3; ++k)
        if (std::abs(xv[k]) < std::abs(xv[weakest])) weakest = k;
      std::array<double, 3> e{0, 0, 0};
      e[weakest] = 1.0;
      std::array<double, 3> v1 = cross3(xv, e);
      std::array<double, 3> v2 = cross3(xv, v1);
      double n1 = std::sqrt(dot3(v1, v1)), n2 = std::sqrt(dot3(v2, v2));
      for (int k = 0; k < 3; ++k) {
        v1[k] /= n1;
        v2[k] /= n2;
      }
      (void)nx2;
      std::array<std::array<double, 3>, 2> vs{v1, v2};
      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
          double r = 0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r += lie[i][j] * vs[a][i] * vs[b][j];
          report.max_residual = std::max(report.max_residual, std::abs(r));
        }
    }
  }
  report.pass = report.max_residual < tolerance;
  return report;
}

LeafTypeReport leaf_type(const AtlasManifold& atlas, const MetricField& g, const FoliationSpec& F,
                         const std::vector<std::pair<std::string, Point>>& points,
                         double light_tol, double margin_floor) {
  (void)atlas;
  LeafTypeReport report;
  bool first = true;
  CausalType agg = CausalType::Space;
  bool mixed = false;
  for (const auto& [chart_id, x] : points) {
    auto w = F.form(chart_id)(x);
    double nw = std::sqrt(dot3(w, w));
    if (nw < 1e-12) fail(ErrorKind::InvalidParameter, "defining form vanishes at a sample");
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(w[i]) < std::abs(w[k])) k = i;
    std::array<double, 3> e{0, 0, 0};
    e[k] = 1.0;
    auto u1 = cross3(w, e);
    auto u2 = cross3(w, u1);
    double m1 = std::sqrt(dot3(u1, u1)), m2 = std::sqrt(dot3(u2, u2));
    for (int i = 0; i < 3; ++i) {
      u1[i] /= m1;
      u2[i] /= m2;
    }
    double a = g.pairing(chart_id, x, u1, u1);
    double b = g.pairing(chart_id, x, u1, u2);
    double c = g.pairing(chart_id, x, u2, u2);
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-30});
    double det = (a * c - b * b) / (scale * scale);
    CausalType type;
    if (std::abs(det) <= margin_floor) {
      type = CausalType::Light;
    } else if (std::abs(det) < light_tol) {
      fail(ErrorKind::ClassificationMargin, "ambiguous leaf restriction at a sample point");
    } else if (det > 0) {
      type = CausalType::Space;
    } else {
      type = CausalType::Time;
    }
    report.points.push_back({chart_id, x, type});
    switch (type) {
      case CausalType::Space: ++report.space; break;
      case CausalType::Time: ++report.time; break;
      case CausalType::Light: ++report.light; break;
    }
    if (first) {
      agg = type;
      first = false;
    } else if (type != agg) {
      mixed = true;
    }
  }
  if (!first && !mixed) report.aggregate = agg;
  return report;
}

CompatibilityReport check_globally_compatible(
    const AtlasManifold& atlas, const FoliationSpec& F, const FlowSpec& phi,
    const std::vector<std::pair<TangencyLeaf, Attractiveness>>& leaves,
    const std::vector<std::vector<Region>>& U_components, const VectorField* invariant_direction,
    const SamplingOptions& opts) {
  CompatibilityReport report;
  auto inside_U = [&](const TangencyLeaf& leaf) {
    for (const auto& component : U_components)
      for (const Region& reg : component) {
        if (reg.chart != leaf.chart) continue;
        double lo = reg.box.lower[leaf.normal_axis];
        double hi = reg.box.upper[leaf.normal_axis];
        if (leaf.level >= lo && leaf.level <= hi) return true;
      }
    return false;
  };

  for (const auto& [leaf, att] : leaves) {
    if (att != Attractiveness::Attractive) continue;
    ++report.attractive_leaves;
    if (!inside_U(leaf))
      fail(ErrorKind::AttractiveLeafOutsideU,
           "attractive tangency leaf outside the declared timelike region");
  }

  // A transversal path across a component crosses each attractive locus
  // level inside the component's normal extent exactly once.
  for (const auto& component : U_components) {
    int crossings = 0;
    for (const auto& [leaf, att] : leaves) {
      if (att != Attractiveness::Attractive) continue;
      for (const Region& reg : component) {
        if (reg.chart != leaf.chart) continue;
        double lo = reg.box.lower[leaf.normal_axis];
        double hi = reg.box.upper[leaf.normal_axis];
        if (leaf.level >= lo && leaf.level <= hi) {
          ++crossings;
          break;
        }
      }
    }
    ++report.components_checked;
    if (crossings != 2)
      fail(ErrorKind::OddAttractiveCount,
           "a transversal across a component of U meets " + std::to_string(crossings) +
               " attractive leaves (2 required)");
  }
  if (report.attractive_leaves > 0 && U_components.empty())
    fail(ErrorKind::OddAttractiveCount, "attractive leaves present but U is empty");

  // Constructive certificate: a basic direction field transverse to the flow
  // on U (gives the transversally lorentzian quasi-fibered metric).
  if (!U_components.empty()) {
    if (invariant_direction == nullptr)
      fail(ErrorKind::NoInvariantDirection, "no invariant direction certificate supplied for U");
    Sampler sampler(opts.seed);
    for (const auto& component : U_components) {
      for (const Region& reg : component) {
        if (invariant_direction->chart != reg.chart) continue;
        const VectorField& W = *invariant_direction;
        const VectorField& X = phi.field(reg.chart);
        for (const Point& x : sampler.grid(reg.box, opts.per_axis)) {
          auto wv = W(x);
          auto xv = X(x);
          double nw2 = 0, nx2 = 0, dot = 0;
          for (int k = 0; k < 3; ++k) {
            nw2 += wv[k] * wv[k];
            nx2 += xv[k] * xv[k];
            dot += wv[k] * xv[k];
          }
          if (nw2 < 1e-12 || nw2 * nx2 - dot * dot < 1e-12 * nw2 * nx2)
            fail(ErrorKind::NoInvariantDirection, "certificate field parallel to the flow");
          std::array<double, 3> bracket{};
          for (int i = 0; i < 3; ++i) {
            Dual wi = W.components[i].eval_dual(x);
            Dual xi = X.components[i].eval_dual(x);
            double xw = 0, wx = 0;
            for (int k = 0; k < 3; ++k) {
              xw += xv[k] * wi.d[k];
              wx += wv[k] * xi.d[k];
            }
            bracket[i] = xw - wx;
          }
          // basic: [X, W] must stay tangent to the flow direction
          double nb2 = 0, bx = 0;
          for (int k = 0; k < 3; ++k) {
            nb2 += bracket[k] * bracket[k];
            bx += bracket[k] * xv[k];
          }
          double residual2 = nb2 - bx * bx / nx2;
          if (residual2 > 1e-14)
            fail(ErrorKind::NoInvariantDirection, "certificate field is not basic on U");
        }
      }
    }
  }
  report.pass = true;
  (void)atlas;
  (void)F;
  return report;
}

}  // namespace tgfl
