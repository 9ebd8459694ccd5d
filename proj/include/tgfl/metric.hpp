#ifndef TGFL_METRIC_HPP
#define TGFL_METRIC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tgfl/foliation.hpp"

namespace tgfl {

enum class MetricSignature { Riemannian, Lorentzian };

/// Symmetric 3x3 matrix of scalar fields, upper triangle stored in the order
/// (11, 12, 13, 22, 23, 33).
struct ChartMetric {
  std::string chart;
  std::array<Expr, 6> upper;
};

struct MetricField {
  std::string name;
  MetricSignature signature = MetricSignature::Lorentzian;
  std::vector<ChartMetric> charts;

  const ChartMetric& chart_metric(const std::string& chart) const;
  Matrix3 matrix_at(const std::string& chart, const Point& x) const;
  /// Component values together with all coordinate partials.
  std::array<Dual, 6> dual_at(const std::string& chart, const Point& x) const;
  double pairing(const std::string& chart, const Point& x, const std::array<double, 3>& u,
                 const std::array<double, 3>& v) const;
};

enum class CausalType { Space, Time, Light };

struct LeafTypePoint {
  std::string chart;
  Point x{};
  CausalType type = CausalType::Space;
};

struct LeafTypeReport {
  std::vector<LeafTypePoint> points;
  std::optional<CausalType> aggregate;  // empty = mixed-error
  int space = 0, time = 0, light = 0;
};

struct SignatureReport {
  int samples = 0;
  double min_abs_det = 0.0;
  bool pass = false;
  std::optional<std::pair<std::string, Point>> witness;  // first failure
};

struct MetricCompatReport {
  double max_residual = 0.0;
  bool pass = false;
};

struct QuasiFiberedReport {
  double max_residual = 0.0;
  bool pass = false;
};

struct Region {
  std::string chart;
  Box box;
};

/// Recipe for a quasi-fibered transverse metric g = eps * (w/w(X))^2 * scale^2
/// + sum_i sign_i * c_i * nu_i (x) nu_i, with basic coefficient fields. The
/// form factor annihilates ker w, so T(phi) is g-orthogonal to the leaves.
struct TransverseRecipe {
  struct ChartPart {
    std::string chart;
    double flow_sign = -1.0;       // -1: flow timelike (spacelike leaves)
    Expr flow_scale;               // multiplies w/w(X); default 1
    std::array<Expr, 3> coframe1;  // complement coframes with nu(X) = 0
    std::array<Expr, 3> coframe2;
    Expr coef1;                    // positive coefficient fields
    Expr coef2;
    double sign1 = 1.0, sign2 = 1.0;
  };
  std::vector<ChartPart> parts;
};

/// One blending piece: a metric weighted by a flow-basic plateau per chart.
struct WeightedMetric {
  MetricField metric;
  std::vector<ScalarField> weights;  // one per chart the metric covers

  const ScalarField& weight(const std::string& chart) const;
};

struct GlueReport {
  double min_abs_det = 0.0;
  double max_weight_sum_error = 0.0;
  double max_weight_flow_derivative = 0.0;
  bool pass = false;
};

struct CompatibilityReport {
  int attractive_leaves = 0;
  int components_checked = 0;
  bool pass = false;
};

// --- operations ---

SignatureReport check_signature(const AtlasManifold& atlas, const MetricField& g, int samples,
                                const std::vector<Region>& domains, uint64_t seed = kDefaultSeed,
                                double det_floor = 1e-10);

/// Pullback of the metric under every transition vs the source expressions.
MetricCompatReport check_metric_compat(const AtlasManifold& atlas, const MetricField& g,
                                       const SamplingOptions& opts = {}, double tolerance = 1e-7);

/// The tangency-neighborhood normal form: in the frame (X, Z, P) the matrix
/// is [[-b^2/beta, ab/beta, 0], [ab/beta, b^2/beta, 0], [0, 0, gamma_P]],
/// with entries assembled as -b*q, a*q, b*q for q = b/beta so they evaluate
/// on the locus. P must span ker(w) together with Y.
MetricField build_tangency_metric(const AtlasManifold& atlas, const FrameData& frame,
                                  const ScalarField& beta, const ScalarField& quotient,
                                  const ScalarField& gamma_P, const VectorField& P_frame,
                                  const SamplingOptions& opts = {});

/// Quasi-fibered metric with T(phi) orthogonal to T(F) on a transverse
/// region, built from the recipe. Throws NotTransverse if w(X) vanishes at a
/// sample of the region.
MetricField build_transverse_metric(const AtlasManifold& atlas, const FoliationSpec& F,
                                    const FlowSpec& phi, const TransverseRecipe& recipe,
                                    const std::vector<Region>& region,
                                    const SamplingOptions& opts = {});

/// Convex combination sum_i gate(w_i, g_i) of metrics whose weights form a
/// flow-basic partition of unity. Signature is certified by sampling.
MetricField glue_metrics(const AtlasManifold& atlas, const std::vector<WeightedMetric>& pieces,
                         const FlowSpec& phi, const std::vector<Region>& sample_domains,
                         GlueReport* report = nullptr, int signature_samples = 2000,
                         const SamplingOptions& opts = {});

/// Lie derivative of the metric along the flow, evaluated on two
/// complement fields (the induced normal-bundle metric must be invariant).
QuasiFiberedReport check_quasi_fibered(const AtlasManifold& atlas, const MetricField& g,
                                       const FlowSpec& phi, const std::vector<Region>& region,
                                       const SamplingOptions& opts = {}, double tolerance = 1e-7);

/// Causal type of the leaves through the given points: restrict g to ker w
/// and classify the induced 2x2 form.
LeafTypeReport leaf_type(const AtlasManifold& atlas, const MetricField& g, const FoliationSpec& F,
                         const std::vector<std::pair<std::string, Point>>& points,
                         double light_tol = 1e-6, double margin_floor = 1e-10);

/// Causal design of a complementary region of the tangency leaves.
struct CausalDesign {
  std::vector<std::pair<Region, CausalType>> regions;
};

/// Checks the pairing condition: every attractive leaf lies inside U, every
/// transversal path through a component of U crosses exactly two attractive
/// leaves, and a basic transverse direction field exists on U. A component
/// of U is a list of chart boxes.
CompatibilityReport check_globally_compatible(
    const AtlasManifold& atlas, const FoliationSpec& F, const FlowSpec& phi,
    const std::vector<std::pair<TangencyLeaf, Attractiveness>>& leaves,
    const std::vector<std::vector<Region>>& U_components, const VectorField* invariant_direction,
    const SamplingOptions& opts = {});

}  // namespace tgfl

#endif  // TGFL_METRIC_HPP
