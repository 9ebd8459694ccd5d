#ifndef TGFL_FOLIATION_HPP
#define TGFL_FOLIATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "tgfl/atlas.hpp"

namespace tgfl {

struct MetricField;  // metric.hpp

/// Oriented 1-dimensional foliation given by a non-vanishing field per chart.
/// On overlaps the pushforwards must agree up to a positive scalar.
struct FlowSpec {
  std::string name;
  std::vector<VectorField> fields;
  int orientation = 1;

  const VectorField& field(const std::string& chart) const;
};

/// Leaf along which the flow is everywhere tangent, described as a level set
/// {locus_field = level} inside one chart.
struct TangencyLeaf {
  std::string chart;
  ScalarField locus_field;
  double level = 0.0;
  int normal_axis = 0;
  bool compact = true;
  std::optional<VectorField> transverse_field;
};

/// Codimension-1 foliation as an integrable defining 1-form per chart,
/// plus its declared tangency leaves (with respect to whichever flow the
/// surrounding construction pairs it with).
struct FoliationSpec {
  std::string name;
  std::vector<OneForm> forms;
  std::vector<TangencyLeaf> tangency_leaves;
  int orientation = 1;

  const OneForm& form(const std::string& chart) const;
};

/// Frame data (X, Z, Y = aX + bZ, a^2 + b^2 = 1) near one tangency leaf.
struct FrameData {
  std::string chart;
  TangencyLeaf leaf;
  VectorField flow_field;        // X
  VectorField transverse_field;  // Z
  VectorField leaf_field;        // Y
  ScalarField tangent_weight;    // a
  ScalarField transverse_weight; // b
  Box neighborhood;
};

struct SamplingOptions {
  int per_axis = kDefaultGridPointsPerAxis;
  uint64_t seed = kDefaultSeed;
};

struct FoliationCheck {
  double max_frobenius = 0.0;
  double min_form_norm = 0.0;
  double max_overlap_residual = 0.0;
  bool orientation_consistent = true;
  bool pass = false;
};

struct FlowCheck {
  double min_norm = 0.0;
  double max_overlap_residual = 0.0;
  bool orientation_consistent = true;
  bool pass = false;
};

struct LeafwiseWitness {
  std::string chart;
  Point x{};
  double omega_of_flow = 0.0;
};

struct LeafwisePosition {
  bool pass = false;
  int transverse_samples = 0;
  int tangent_samples = 0;
  std::vector<LeafwiseWitness> failures;
};

enum class Attractiveness { Attractive, NotAttractive, OneSided };

struct AdaptedReport {
  double max_flow_derivative = 0.0;   // |X . beta|
  double quotient_min = 0.0;          // |b/beta| range off the locus
  double quotient_max = 0.0;
  double consistency_residual = 0.0;  // |quotient * beta - b|
  bool pass = false;
};

// --- operations ---

/// Frobenius integrability, non-vanishing and transversal orientability of
/// the defining forms, sampled.
FoliationCheck validate_foliation(const AtlasManifold& atlas, const FoliationSpec& F,
                                  const SamplingOptions& opts = {}, double tolerance = 1e-9);

FlowCheck validate_flow(const AtlasManifold& atlas, const FlowSpec& phi,
                        const SamplingOptions& opts = {}, double tolerance = 1e-9);

/// Pointwise w(X) value of the defining form on the flow.
double form_on_flow(const FoliationSpec& F, const FlowSpec& phi, const std::string& chart,
                    const Point& x);

/// Checks that the flow is tangent exactly on the declared tangency loci and
/// transverse elsewhere. Throws MixedLeaf when an undeclared tangency zone
/// shows up in the samples.
LeafwisePosition check_leafwise_position(const AtlasManifold& atlas, const FoliationSpec& F,
                                         const FlowSpec& phi, const SamplingOptions& opts = {},
                                         double locus_band = 0.05, double zero_tol = 1e-9);

/// Basic (flow-preserved) vector field transverse to the tangency leaf,
/// built as the gamma-orthogonal of the leaf extended constantly along the
/// normal coordinate. gamma must be riemannian and quasi-fibered.
VectorField make_basic_transverse(const AtlasManifold& atlas, const TangencyLeaf& leaf,
                                  const FlowSpec& phi, const MetricField& gamma,
                                  const SamplingOptions& opts = {});

/// Solves w(aX + bZ) = 0 with a^2 + b^2 = 1; a = w(Z)/N, b = -w(X)/N.
FrameData frame_fields(const AtlasManifold& atlas, const FoliationSpec& F, const FlowSpec& phi,
                       const VectorField& Z, const TangencyLeaf& leaf, const Box& neighborhood,
                       const SamplingOptions& opts = {});

/// Sign of b on the two sides of the locus; attractive iff it changes.
Attractiveness attractiveness(const AtlasManifold& atlas, const FrameData& frame,
                              double offset = 0.02, const SamplingOptions& opts = {},
                              double zero_tol = 1e-9);

/// Checks X.beta = 0 and that the supplied quotient b/beta evaluates on the
/// locus with values bounded in [1e-6, 1e6], and that quotient * beta = b.
AdaptedReport check_adapted(const AtlasManifold& atlas, const FrameData& frame,
                            const ScalarField& beta, const ScalarField& quotient,
                            const SamplingOptions& opts = {});

/// Reeb foliation of the solid torus: w = lambda(r) dz + mu(r) dr with a
/// bump-flat twist profile, boundary torus leaf at r = 1.
FoliationSpec reeb_solid_torus(double flatness = 0.2, int orientation = 1);

struct TubeSpec {
  std::string chart;
  bool radial_mode = true;  // axis `radial_axis` is already a radius
  int radial_axis = 0;
  int core_axis = 2;
  // cartesian mode: radius around (center_a, center_b) in axes (axis_a, axis_b)
  int axis_a = 0, axis_b = 1;
  double center_a = 0.5, center_b = 0.5;
  double rho0 = 0.35;        // new tangency leaf radius
  double twist_width = 0.08; // sign-change band of the dz-profile
  double support_pad = 0.07; // extra collar where the form returns to the old one
};

/// Reeb turbulization inside a rotationally symmetric tube around a closed
/// transversal. orientation +1 makes the new boundary leaf attractive.
FoliationSpec turbulize(const AtlasManifold& atlas, const FoliationSpec& F, const TubeSpec& tube,
                        int orientation = 1, const SamplingOptions& opts = {});

/// Collar modification making a transverse boundary face into a leaf with
/// C-infinity flat holonomy.
FoliationSpec spin_to_boundary(const AtlasManifold& atlas, const FoliationSpec& F,
                               const std::string& chart, int axis, bool upper_end,
                               double collar_width = 0.3, const SamplingOptions& opts = {});

/// Merges per-chart pieces into one spec on the glued atlas and verifies the
/// overlap compatibility (positive multiple) and that every declared
/// tangency leaf is a leaf from all covering charts.
FoliationSpec glue_foliations(const AtlasManifold& atlas, const std::vector<FoliationSpec>& pieces,
                              const SamplingOptions& opts = {}, double tolerance = 1e-9);

}  // namespace tgfl

#endif  // TGFL_FOLIATION_HPP
