#include "ccc/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "ccc/errors.hpp"

namespace ccc {

void SafetyEnvelope::validate() const {
  if (!(v_bar > 0.0) || !(a_min > 0.0) || !(a_bar > 0.0)) {
    throw ConfigError("safety envelope bounds v_bar, a_min and a_bar must be positive");
  }
  if (gamma && !(*gamma > 0.0)) throw ConfigError("envelope gamma must be positive");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double effective_xi(const CavParams& p) { return p.lag_free() ? 0.0 : p.xi; }

// Checks the shared hypotheses and returns kappa (D_st - D_sf).
double margin_denominator(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env) {
  env.validate();
  if (!(c.kappa_sf > 0.0)) throw DomainError("hypothesis kappa_sf > 0 violated");
  if (!(p.D_st > c.D_sf)) throw DomainError("hypothesis D_st > D_sf violated");
  if (!(p.kappa > 0.0)) throw DomainError("hypothesis kappa > 0 violated");
  if (c.kappa_sf < p.kappa) throw DomainError("hypothesis kappa_sf >= kappa violated");
  const double xi = effective_xi(p);
  if (!(xi * c.kappa_sf < 1.0)) throw DomainError("hypothesis xi < 1/kappa_sf violated");
  return p.kappa * (p.D_st - c.D_sf);
}

double upper_bound(double xi, const CbfParams& c, const SafetyEnvelope& env) {
  const double slack = 1.0 - xi * c.kappa_sf;
  if (env.gamma) return *env.gamma * slack - xi * *env.gamma * *env.gamma;
  if (xi == 0.0) return kInf;
  return slack * slack / (4.0 * xi);
}

// |kappa_sf - xi kappa_sf^2 - B1| + sum_k B_k
double speed_term(const CavParams& p, const CbfParams& c, double xi) {
  return std::abs(c.kappa_sf - xi * c.kappa_sf * c.kappa_sf - p.B_of(1)) + p.connected_B_sum();
}

SafeBounds finish(double lower, double upper, double xi) {
  SafeBounds b;
  b.A_lower = lower;
  b.A_upper = upper;
  b.feasible = lower <= upper;
  b.lag_free_limit = xi == 0.0;
  return b;
}

}  // namespace

SafeBounds theorem3_bounds(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env) {
  const double den = margin_denominator(p, c, env);
  const double xi = effective_xi(p);
  const double lower = (speed_term(p, c, xi) * env.v_bar + xi * c.kappa_sf * env.a_min) / den;
  return finish(lower, upper_bound(xi, c, env), xi);
}

SafeBounds theorem4_bounds(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env) {
  const double den = margin_denominator(p, c, env);
  const double xi = effective_xi(p);
  double N2 = std::abs(xi * c.kappa_sf - p.C_of(1));
  for (int k : p.phi) N2 += std::abs(p.C_of(k));
  const double lower = (speed_term(p, c, xi) * env.v_bar + N2 * env.a_bar) / den;
  return finish(lower, upper_bound(xi, c, env), xi);
}

double critical_lag(const CbfParams& c, const SafetyEnvelope& env, double kappa, double D_st) {
  env.validate();
  if (!(D_st > c.D_sf)) throw DomainError("critical lag needs D_st > D_sf");
  if (!(kappa > 0.0) || !(c.kappa_sf > 0.0)) throw DomainError("critical lag needs positive gradients");
  const double rho = std::sqrt(4.0 * c.kappa_sf * env.a_min / (kappa * (D_st - c.D_sf)));
  return 1.0 / (c.kappa_sf + rho);
}

VbarInfinitySegment vbar_infinity_region(double xi, const CbfParams& c, const SafetyEnvelope& env,
                                         double kappa, double D_st) {
  env.validate();
  if (!(D_st > c.D_sf)) throw DomainError("hypothesis D_st > D_sf violated");
  if (!(kappa > 0.0)) throw DomainError("hypothesis kappa > 0 violated");
  if (!(xi > 0.0) || !(xi * c.kappa_sf < 1.0)) {
    throw DomainError("segment needs 0 < xi < 1/kappa_sf");
  }
  VbarInfinitySegment seg{};
  seg.B1 = c.kappa_sf - xi * c.kappa_sf * c.kappa_sf;
  seg.B_connected = 0.0;
  seg.A_lower = xi * c.kappa_sf * env.a_min / (kappa * (D_st - c.D_sf));
  const double slack = 1.0 - xi * c.kappa_sf;
  seg.A_upper = slack * slack / (4.0 * xi);
  seg.feasible = seg.A_lower <= seg.A_upper;
  return seg;
}

// ---------------------------------------------------------------------------

void ChartSpec::validate() const {
  if (nx < 2 || ny < 2) throw ConfigError("chart resolution must be at least 2 per axis");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("chart ranges must be increasing");
  frequencies.validate();
}

std::vector<double> ChartSpec::xs() const { return linspace(x_min, x_max, nx); }
std::vector<double> ChartSpec::ys() const { return linspace(y_min, y_max, ny); }

std::size_t ChartGrid::safe_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const ChartCell& c) { return c.safe; }));
}

bool gains_safe(const CavParams& p, const CbfParams& c, const SafetyEnvelope& env) {
  if (p.A < 0.0) return false;
  for (const auto& [k, gain] : p.B) {
    if (gain < 0.0) return false;
  }
  const SafeBounds b = p.has_accel_feedback() ? theorem4_bounds(p, c, env) : theorem3_bounds(p, c, env);
  return b.contains(p.A);
}

std::vector<BoundaryPoint> clip_line(const Line& line, double x_min, double x_max, double y_min,
                                     double y_max) {
  std::vector<BoundaryPoint> hits;
  auto add = [&](double x, double y) {
    const double tol = 1e-12 * (1.0 + std::abs(x) + std::abs(y));
    if (x < x_min - tol || x > x_max + tol || y < y_min - tol || y > y_max + tol) return;
    for (const auto& h : hits) {
      if (std::abs(h.x - x) <= tol && std::abs(h.y - y) <= tol) return;
    }
    hits.push_back({x, y, std::nullopt, std::nullopt});
  };
  if (line.b != 0.0) {
    add(x_min, (line.c - line.a * x_min) / line.b);
    add(x_max, (line.c - line.a * x_max) / line.b);
  }
  if (line.a != 0.0) {
    add((line.c - line.b * y_min) / line.a, y_min);
    add((line.c - line.b * y_max) / line.a, y_max);
  }
  if (hits.size() > 2) hits.resize(2);
  if (hits.size() < 2) hits.clear();
  return hits;
}

namespace {

bool in_view(const BoundaryPoint& p, const ChartSpec& s) {
  const double wx = s.x_max - s.x_min;
  const double wy = s.y_max - s.y_min;
  return p.x >= s.x_min - wx && p.x <= s.x_max + wx && p.y >= s.y_min - wy && p.y <= s.y_max + wy;
}

void attach_stability_boundaries(ChartGrid& grid, const Chain& chain) {
  const ChartSpec& s = grid.spec;
  for (const Line& line : string_boundary_w0(s.plane, s.fixed, chain)) {
    auto pts = clip_line(line, s.x_min, s.x_max, s.y_min, s.y_max);
    if (!pts.empty()) grid.boundaries.push_back({"string-w0", std::nullopt, pts});
  }
  const std::vector<double> omegas = logspace(1e-3, 10.0, 400);
  for (int j = 0; j < 12; ++j) {
    const double K = 2.0 * std::numbers::pi * j / 12.0;
    Polyline curve{"string-wK", K, {}};
    for (const auto& p : string_boundary_wK(s.plane, s.fixed, chain, omegas, {K})) {
      if (in_view(p, s)) curve.points.push_back(p);
    }
    if (curve.points.size() >= 2) grid.boundaries.push_back(std::move(curve));
  }
  const PlantBoundary plant = plant_boundary(s.plane, s.fixed, chain, linspace(0.0, 3.0, 200));
  Polyline curve{"plant", std::nullopt, {}};
  for (const auto& p : plant.curve) {
    if (in_view(p, s)) curve.points.push_back(p);
  }
  if (curve.points.size() >= 2) grid.boundaries.push_back(std::move(curve));
  for (const Line& line : plant.lines) {
    auto pts = clip_line(line, s.x_min, s.x_max, s.y_min, s.y_max);
    if (!pts.empty()) grid.boundaries.push_back({"plant", std::nullopt, pts});
  }
}

// Edges of the safe interval written as plane curves.
void attach_safe_boundary(ChartGrid& grid, const Chain& chain, const CbfParams& c,
                          const SafetyEnvelope& env) {
  const ChartSpec& s = grid.spec;
  const CavParams probe =
      with_plane_gains(chain.cav, s.plane, s.x_min, s.y_min, s.fixed, chain.head_index());
  const double xi = effective_xi(probe);
  const double den = margin_denominator(probe, c, env);
  const double vertex = c.kappa_sf - xi * c.kappa_sf * c.kappa_sf;
  double accel_term = xi * c.kappa_sf * env.a_min;
  if (probe.has_accel_feedback()) {
    double N2 = std::abs(xi * c.kappa_sf - probe.C_of(1));
    for (int k : probe.phi) N2 += std::abs(probe.C_of(k));
    accel_term = N2 * env.a_bar;
  }
  double other_B = 0.0;  // connected gains not on the plane axes
  for (int k : probe.phi) {
    if (k != chain.head_index()) other_B += probe.B_of(k);
  }
  const double upper = upper_bound(xi, c, env);

  Polyline lower{"safe", std::nullopt, {}};
  if (s.plane == Plane::A_B1) {
    const double B = other_B + (chain.head_index() > 1 ? s.fixed : 0.0);
    auto a_of = [&](double B1) { return ((std::abs(vertex - B1) + B) * env.v_bar + accel_term) / den; };
    for (double y : {s.y_min, vertex, s.y_max}) {
      if (y >= s.y_min && y <= s.y_max) lower.points.push_back({a_of(y), y, std::nullopt, std::nullopt});
    }
    grid.boundaries.push_back(std::move(lower));
    if (std::isfinite(upper)) {
      auto pts = clip_line({1.0, 0.0, upper, "A=A_upper"}, s.x_min, s.x_max, s.y_min, s.y_max);
      if (!pts.empty()) grid.boundaries.push_back({"safe", std::nullopt, pts});
    }
    return;
  }
  if (s.fixed > upper) return;
  const double reach = (s.fixed * den - accel_term) / env.v_bar - other_B;
  for (double x : {s.x_min, vertex, s.x_max}) {
    if (x >= s.x_min && x <= s.x_max) {
      lower.points.push_back({x, reach - std::abs(vertex - x), std::nullopt, std::nullopt});
    }
  }
  grid.boundaries.push_back(std::move(lower));
}

}  // namespace

ChartGrid classify_chart(const ChartSpec& spec, const Chain& chain, const CbfParams& c,
                         const SafetyEnvelope& env) {
  spec.validate();
  chain.validate();
  c.validate();
  env.validate();

  ChartGrid grid;
  grid.spec = spec;
  grid.lag_free_limit = chain.cav.lag_free();
  const std::vector<double> xs = spec.xs();
  const std::vector<double> ys = spec.ys();
  const int head = chain.head_index();

  Chain base = chain;
  base.cav = with_plane_gains(chain.cav, spec.plane, xs.front(), ys.front(), spec.fixed, head);
  // Hypothesis violations are gain independent; surface them once.
  (void)(base.cav.has_accel_feedback() ? theorem4_bounds(base.cav, c, env)
                                       : theorem3_bounds(base.cav, c, env));
  const DriverResponse drivers(base, spec.frequencies);

  grid.cells.resize(spec.nx * spec.ny);
  auto work_rows = [&](std::size_t row_begin, std::size_t row_step) {
    Chain cell_chain = base;
    for (std::size_t iy = row_begin; iy < spec.ny; iy += row_step) {
      for (std::size_t ix = 0; ix < spec.nx; ++ix) {
        cell_chain.cav = with_plane_gains(base.cav, spec.plane, xs[ix], ys[iy], spec.fixed, head);
        const StabilityFlags flags = string_stable_numeric(cell_chain, drivers, spec.frequencies);
        grid.cells[iy * spec.nx + ix] = {xs[ix], ys[iy], flags.plant_stable, flags.string_stable,
                                         gains_safe(cell_chain.cav, c, env), flags.sup_gain};
      }
    }
  };

  unsigned threads = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.ny));
  if (threads <= 1) {
    work_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work_rows, t, threads);
  }

  try {
    attach_stability_boundaries(grid, base);
  } catch (const ConfigError&) {
    // Drivers or connections outside the closed-form family: cells only.
  }
  attach_safe_boundary(grid, chain, c, env);
  return grid;
}

}  // namespace ccc
