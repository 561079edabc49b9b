#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccc/chain.hpp"
#include "ccc/models.hpp"
#include "ccc/stability.hpp"

namespace ccc {

struct SafetyEnvelope {
  double v_bar = 15.0;  ///< bound on |v_k - v_0| [m/s]
  double a_min = 7.0;   ///< lead braking bound, a_1 >= -a_min [m/s^2]
  double a_bar = 3.0;   ///< symmetric bound on a_1, a_k for acceleration feedback [m/s^2]
  /// Class-K slope used in the upper bound; the maximizing (1 - xi kappa_sf) / (2 xi) when unset.
  std::optional<double> gamma;

  void validate() const;
};

struct SafeBounds {
  double A_lower = 0.0;
  double A_upper = 0.0;
  bool feasible = false;
  /// Evaluated as the lag-free limit (upper bound unbounded).
  bool lag_free_limit = false;

  bool contains(double A) const { return feasible && A >= A_lower && A <= A_upper; }
};

/// Safe-gain interval on A for the speed-feedback law.
/// Throws DomainError when a hypothesis (D_st > D_sf, kappa_sf >= kappa > 0,
/// gamma > 0, xi < 1 / kappa_sf) fails. Lags below 1e-6 give the lag-free limit.
SafeBounds theorem3_bounds(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env);

/// Same interval with acceleration feedback and symmetric acceleration bound a_bar.
SafeBounds theorem4_bounds(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env);

/// Largest lag for which safe gains exist.
double critical_lag(const CbfParams& c, const SafetyEnvelope& env, double kappa, double D_st);

/// Safe region as v_bar grows without bound: B1 pinned, B_k = 0, A on a segment.
struct VbarInfinitySegment {
  double B1;
  double B_connected;
  double A_lower;
  double A_upper;
  bool feasible;
};

VbarInfinitySegment vbar_infinity_region(double xi, const CbfParams& c, const SafetyEnvelope& env,
                                         double kappa, double D_st);

// ---------------------------------------------------------------------------
// Charts

struct ChartSpec {
  Plane plane = Plane::B1_BN;
  double fixed = 0.6;  ///< B_{n+1} on the A-B1 plane, A on the B1-BN plane
  double x_min = 0.0, x_max = 1.5;
  double y_min = 0.0, y_max = 1.0;
  std::size_t nx = 200, ny = 200;
  FrequencyGrid frequencies;
  unsigned threads = 0;  ///< 0 means hardware concurrency

  void validate() const;
  std::vector<double> xs() const;
  std::vector<double> ys() const;
};

struct ChartCell {
  double x, y;
  bool plant;
  bool string;
  bool safe;
  double sup_gain;
};

struct Polyline {
  std::string family;  ///< plant, string-w0, string-wK, safe
  std::optional<double> param;
  std::vector<BoundaryPoint> points;
};

struct ChartGrid {
  ChartSpec spec;
  std::vector<ChartCell> cells;  ///< row-major: y outer, x inner
  std::vector<Polyline> boundaries;
  bool lag_free_limit = false;

  const ChartCell& at(std::size_t ix, std::size_t iy) const { return cells[iy * spec.nx + ix]; }
  std::size_t safe_count() const;
};

/// Whether the cell gains are non-negative and inside the safe interval.
bool gains_safe(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env);

/// Classifies every cell of the plane. Cells are evaluated in parallel over rows.
/// Analytic boundaries are attached when the chain supports them.
ChartGrid classify_chart(const ChartSpec& spec, const Chain& chain, const CbfParams& c,
                         const SafetyEnvelope& env);

/// Clips a x + b y = c to the box; empty when the line misses it.
std::vector<BoundaryPoint> clip_line(const Line& line, double x_min, double x_max, double y_min,
                                     double y_max);

}  // namespace ccc
