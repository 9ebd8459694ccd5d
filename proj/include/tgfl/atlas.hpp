#ifndef TGFL_ATLAS_HPP
#define TGFL_ATLAS_HPP

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tgfl/expr.hpp"

namespace tgfl {

constexpr int kDim = 3;
constexpr uint64_t kDefaultSeed = 42;
constexpr int kDefaultGridPointsPerAxis = 12;

/// Axis-aligned coordinate box of a chart. Periodic axes carry the box
/// length as their period; points on them compare modulo the period and are
/// stored unnormalized.
struct Chart {
  std::string id;
  Point lower{0, 0, 0};
  Point upper{1, 1, 1};
  std::array<bool, 3> periodic{false, false, false};
  std::array<std::string, 3> coordinate_names{"x1", "x2", "x3"};

  double period(int axis) const { return upper[axis] - lower[axis]; }
  bool contains(const Point& x, double margin = 0.0) const;
  /// Reduces periodic coordinates into [lower, lower+period).
  Point reduce(const Point& x) const;
  /// Max over axes of the periodic-aware coordinate distance.
  double distance(const Point& a, const Point& b) const;
  void validate() const;
};

struct ScalarField {
  std::string chart;
  Expr expr;

  double operator()(const Point& x) const { return expr.eval(x); }
};

struct VectorField {
  std::string chart;
  std::array<Expr, 3> components;

  std::array<double, 3> operator()(const Point& x) const {
    return {components[0].eval(x), components[1].eval(x), components[2].eval(x)};
  }
};

/// Codimension-1 defining form: three covariant component fields.
struct OneForm {
  std::string chart;
  std::array<Expr, 3> components;

  std::array<double, 3> operator()(const Point& x) const {
    return {components[0].eval(x), components[1].eval(x), components[2].eval(x)};
  }
};

struct Box {
  Point lower{0, 0, 0};
  Point upper{0, 0, 0};
  bool contains(const Point& x, const Chart& chart, double margin = 0.0) const;
};

/// Differentiable map between chart domains, one expression per target
/// coordinate. Transition maps of an atlas are SmoothMaps whose overlap
/// boxes describe where they are defined.
struct SmoothMap {
  std::string source;
  std::string target;
  std::array<Expr, 3> components;
  Box overlap_source;
  Box overlap_target;

  Point operator()(const Point& x) const {
    return {components[0].eval(x), components[1].eval(x), components[2].eval(x)};
  }
};

struct AtlasManifold {
  std::string name;
  std::vector<Chart> charts;
  std::vector<SmoothMap> transitions;

  const Chart& chart(const std::string& id) const;
  int chart_index(const std::string& id) const;
};

/// Deterministic sample streams. Grid samples are cell-centred tensor grids
/// (they avoid box faces, where polar-type coordinates degenerate); random
/// samples come from a seeded generator.
class Sampler {
public:
  explicit Sampler(uint64_t seed = kDefaultSeed) : rng_(seed) {}

  std::vector<Point> grid(const Chart& chart, int per_axis = kDefaultGridPointsPerAxis) const;
  std::vector<Point> grid(const Box& box, int per_axis = kDefaultGridPointsPerAxis) const;
  std::vector<Point> random(const Chart& chart, int count);
  std::vector<Point> random(const Box& box, int count);
  double uniform(double lo, double hi);

private:
  std::mt19937_64 rng_;
};

struct AtlasReport {
  double max_inverse_residual = 0.0;
  double max_cocycle_residual = 0.0;
  int pairs_checked = 0;
  int triples_checked = 0;
  bool pass = false;
};

// --- operations ---

double eval_field(const Chart& chart, const ScalarField& f, const Point& x);
double eval_derivative(const Chart& chart, const ScalarField& f, const Point& x,
                       const std::array<double, 3>& direction);
double eval_derivative(const Chart& chart, const ScalarField& f, const Point& x, int axis);

using Matrix3 = std::array<std::array<double, 3>, 3>;

Matrix3 transition_jacobian(const SmoothMap& map, const Point& x);

AtlasReport check_atlas(const AtlasManifold& atlas, int samples_per_axis = kDefaultGridPointsPerAxis,
                        double tolerance = 1e-9);

enum class BuiltinAtlas { SolidTorus, T2Interval, S3Hopf, T3Hyperbolic, T3Flat };

/// The five model atlases. `torus_map` is the fiber identification of the
/// hyperbolic torus bundle and must be unimodular with |trace| > 2.
AtlasManifold builtin_atlas(BuiltinAtlas which,
                            const std::array<std::array<long, 2>, 2>& torus_map = {{{2, 1}, {1, 1}}});

// Linear algebra helpers shared by the tensor modules.
double det3(const Matrix3& m);
Matrix3 invert3(const Matrix3& m, ErrorKind on_singular = ErrorKind::DegenerateMetric);
Matrix3 matmul(const Matrix3& a, const Matrix3& b);

}  // namespace tgfl

#endif  // TGFL_ATLAS_HPP
