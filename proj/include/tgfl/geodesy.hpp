#ifndef TGFL_GEODESY_HPP
#define TGFL_GEODESY_HPP

#include <optional>
#include <string>
#include <vector>

#include "tgfl/metric.hpp"

namespace tgfl {

struct GeodesicState {
  std::string chart;
  Point position{};
  std::array<double, 3> velocity{};
  double affine_parameter = 0.0;
};

struct ChartSwitchEvent {
  double t = 0.0;
  std::string from;
  std::string to;
  int transition_index = -1;
};

struct Trajectory {
  std::vector<GeodesicState> samples;
  std::vector<ChartSwitchEvent> switches;
  std::vector<double> speed_norms;  // g(c', c') at each sample
  int rejected_steps = 0;
  int accepted_steps = 0;
};

/// Loop inside a leaf: ordered transition traversals returning to the start.
struct HolonomyLoop {
  std::string base_chart;
  Point base_point{};
  struct Traversal {
    int transition_index = -1;
    Point point{};
  };
  std::vector<Traversal> traversals;
  int normal_axis = 0;
};

struct Christoffel {
  // symbols[k][i][j] = Gamma^k_ij
  std::array<Matrix3, 3> symbols;
};

struct LeafFrame2 {
  std::array<double, 3> u1{};
  std::array<double, 3> u2{};
};

struct SecondFundamentalForm {
  std::array<std::array<double, 2>, 2> values{};
  LeafFrame2 frame;
  double max_abs() const;
};

struct IntegrationOptions {
  double tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  int max_steps = 2000000;
  int log_stride = 1;  // record every n-th accepted step
};

struct CompletenessVerdict {
  bool complete = false;
  double lambda = 1.0;
  double conserved_drift = 0.0;           // relative drift of g(c', d/dn)
  std::vector<double> loop_times;         // affine time per loop traversed
  std::optional<double> total_affine_length;  // T0 * lambda / (lambda - 1) when incomplete
};

struct CompletenessProbe {
  int loops = 3;           // loops to integrate for corroboration
  double tol = 1e-12;      // integrator tolerance
  double direction = 1.0;  // orientation of the null direction along the loop
  int loop_axis = 2;       // coordinate that advances along the loop
  double loop_advance = 1.0;  // coordinate advance per loop (period)
  bool count_transitions = false;  // loop detection by wrap-transition crossings
  int wrap_transition = -1;        // transition index that closes the loop
};

// --- operations ---

/// Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), forward mode.
Christoffel christoffel(const AtlasManifold& atlas, const MetricField& g, const std::string& chart,
                        const Point& x, double det_floor = 1e-10);

/// Leafwise second fundamental form via the defining form:
/// II_ab = w(nabla_{U_a} U_b) / |w| on a leaf frame built from w.
SecondFundamentalForm second_fundamental_form(const AtlasManifold& atlas, const MetricField& g,
                                              const FoliationSpec& F, const std::string& chart,
                                              const Point& x);

/// Adaptive embedded Runge-Kutta 5(4) with chart switching.
Trajectory integrate_geodesic(const AtlasManifold& atlas, const MetricField& g,
                              const GeodesicState& start, double t_end,
                              const IntegrationOptions& opts = {});

/// Product of the normal-axis partial derivatives of the chart transitions
/// along the loop; checks closure to 1e-9 first.
double linear_holonomy(const AtlasManifold& atlas, const FoliationSpec& F,
                       const HolonomyLoop& loop, double closure_tol = 1e-9);

/// The closed-null-geodesic completeness criterion: complete iff the loop
/// carries no linear holonomy; corroborated by integrating the null
/// geodesic and tracking the conserved quantity g(c', d_normal).
CompletenessVerdict null_completeness(const AtlasManifold& atlas, const MetricField& g,
                                      const FoliationSpec& F, const TangencyLeaf& leaf,
                                      const HolonomyLoop& loop, const CompletenessProbe& probe,
                                      const SamplingOptions& opts = {});

}  // namespace tgfl

#endif  // TGFL_GEODESY_HPP
