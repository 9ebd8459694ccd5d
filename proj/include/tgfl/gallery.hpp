#ifndef TGFL_GALLERY_HPP
#define TGFL_GALLERY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tgfl/geodesy.hpp"

namespace tgfl {

/// A tangency-leaf record inside a gallery entry: frame, adaptedness data
/// and the expected attractiveness.
struct LeafSetup {
  TangencyLeaf leaf;
  VectorField transverse_field;  // Z
  Box neighborhood;              // frame validity window
  ScalarField beta;
  ScalarField quotient;          // b/beta, evaluable on the locus
};

/// A named causal region with its expected leaf type, used both to verify
/// leaf_type and to restrict samples.
struct RegionDesign {
  std::string label;
  Region region;
  CausalType expected;
};

/// Closed-null-geodesic probe attached to an entry (possibly on a companion
/// atlas modelling a neighbourhood of the loop).
struct CompletenessCase {
  std::string label;
  AtlasManifold atlas;
  FoliationSpec foliation;
  FlowSpec flow;
  MetricField metric;
  TangencyLeaf leaf;
  HolonomyLoop loop;
  CompletenessProbe probe;
  bool expect_complete = true;
  double expected_lambda = 1.0;
};

struct GeodesicCase {
  std::string label;
  GeodesicState start;
  double t_end = 10.0;
  ScalarField leaf_function;  // first integral of the leaf along the run
};

struct GalleryEntry {
  std::string name;
  AtlasManifold atlas;
  FoliationSpec foliation;
  FlowSpec flow;
  std::optional<MetricField> metric;  // obstructed entries carry none
  std::vector<LeafSetup> leaves;
  std::vector<RegionDesign> regions;       // causal design (and leaf samples)
  std::vector<Region> sample_domains;      // signature / II sampling windows
  std::vector<std::vector<Region>> U_components;  // timelike region(s)
  std::optional<VectorField> invariant_direction;
  std::vector<CompletenessCase> completeness;
  std::vector<GeodesicCase> geodesics;
  bool expect_obstructed = false;  // check_globally_compatible must fail
};

GalleryEntry build_entry(const std::string& name);
std::vector<std::string> gallery_names();

/// One verification record: a label, a value, a bound, and pass/fail.
struct VerificationRecord {
  std::string label;
  std::string value;  // enum-like string or formatted number
  bool pass = false;
};

struct VerifyOptions {
  int samples = 10000;
  uint64_t seed = kDefaultSeed;
  double ii_bound = 1e-6;
  double geodesic_tol = 1e-10;
};

struct VerificationReport {
  std::string entry;
  std::vector<VerificationRecord> records;
  bool pass = true;

  void add(const std::string& label, const std::string& value, bool ok);
};

VerificationReport verify_entry(const GalleryEntry& entry, const VerifyOptions& opts = {});

}  // namespace tgfl

#endif  // TGFL_GALLERY_HPP
