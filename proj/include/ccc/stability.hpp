#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccc/chain.hpp"
#include "ccc/models.hpp"

namespace ccc {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Gain planes

/// A-B1: x = A, y = B1 with B_{n+1} fixed.  B1-BN: x = B1, y = B_{n+1} with A fixed.
enum class Plane { A_B1, B1_BN };

const char* to_string(Plane p);
Plane plane_from_string(const std::string& name);

/// Copy of `base` with the plane coordinates and the fixed gain written in.
/// `head` is the index of the connected head vehicle (n + 1).
CavParams with_plane_gains(const CavParams& base, Plane plane, double x, double y, double fixed,
                           int head);

/// The fixed gain of `plane` as currently set in `p`.
double fixed_gain_of(const CavParams& p, Plane plane, int head);

// ---------------------------------------------------------------------------
// Transfer functions

struct FrequencySample {
  double omega;
  cplx value;
};

/// (C1 s^2 + B1 s + A kappa) / (xi s^3 + s^2 + Psi0 s + A kappa), Psi0 = A + B1 + sum B_k.
cplx link_T01(cplx s, const CavParams& p);
/// (C_k s^2 + B_k s) / (same denominator).
cplx link_T0k(cplx s, const CavParams& p, int k);
/// (B_h s + A_h kappa_h) / (e^{s tau} s^2 + Psi_h s + A_h kappa_h).
cplx link_Thv(cplx s, const HvParams& p);
/// Head-vehicle to CAV speed transfer function, summed over vehicle 1 and every connected k.
cplx head_to_tail_G(cplx s, const Chain& chain);

/// T_hv(j omega)^n for identical drivers.
cplx hv_gamma(double omega, const HvParams& p, int n);

/// Hurwitz test of xi s^3 + s^2 + Psi0 s + A kappa (quadratic when lag free).
bool plant_stable(const CavParams& p);

/// Coefficients of the CAV characteristic polynomial, highest power first.
std::vector<double> cav_characteristic(const CavParams& p);

// ---------------------------------------------------------------------------
// String stability

struct FrequencyGrid {
  double omega_min = 1e-3;
  double omega_max = 1e2;
  std::size_t points = 800;
  bool refine = true;

  std::vector<double> omegas() const;
  void validate() const;
};

inline constexpr double kStringTolerance = 1e-9;

struct StabilityFlags {
  bool plant_stable = false;
  bool string_stable = false;
  double sup_gain = 0.0;
  double omega_at_sup = 0.0;
  std::optional<std::string> diagnostic;
};

/// Products of driver links from vehicle k up to the head, sampled on a fixed
/// frequency grid. Depends only on the drivers and the connected set, so one
/// instance serves every cell of a gain chart.
class DriverResponse {
 public:
  DriverResponse(const Chain& chain, const FrequencyGrid& grid);

  const std::vector<double>& omegas() const { return omegas_; }
  /// prod_{i=k}^{n} T_i(j omega_m); k = n + 1 gives 1.
  cplx product(std::size_t m, int k) const;

 private:
  std::vector<double> omegas_;
  std::vector<int> keys_;
  std::vector<std::vector<cplx>> products_;  // [key index][omega index]
};

/// sup_omega |G(j omega)| on the grid plus one golden-section refinement around
/// the grid maximum. The string flag needs plant stability and sup < 1 - 1e-9.
StabilityFlags string_stable_numeric(const Chain& chain, const FrequencyGrid& grid = {});
StabilityFlags string_stable_numeric(const Chain& chain, const DriverResponse& drivers,
                                     const FrequencyGrid& grid);

/// (|den(j omega)|^2 - |num(j omega)|^2) / omega^2 for G = num / den; positive
/// exactly where |G(j omega)| < 1. Requires omega > 0.
double P_criterion(double omega, const Chain& chain);

// ---------------------------------------------------------------------------
// Analytic boundaries (identical drivers, connected set {n + 1} or empty,
// no acceleration feedback)

/// a x + b y = c in plane coordinates.
struct Line {
  double a, b, c;
  std::string label;
};

struct BoundaryPoint {
  double x, y;
  std::optional<double> param1;  ///< Omega or omega [rad/s]
  std::optional<double> param2;  ///< K [rad]
};

/// lim (1 - |Gamma|^2) / omega^2 = n (A_h + 2 B_h - 2 kappa_h) / (A_h kappa_h^2).
double curvature_L_h(const HvParams& p, int n);

/// Zero-frequency string boundary lines of the plane.
std::vector<Line> string_boundary_w0(Plane plane, double fixed, const Chain& chain);

/// Points where G(j omega) = e^{-jK}. Near-singular samples are skipped.
std::vector<BoundaryPoint> string_boundary_wK(Plane plane, double fixed, const Chain& chain,
                                              const std::vector<double>& omegas,
                                              const std::vector<double>& Ks,
                                              std::size_t* skipped = nullptr);

struct PlantBoundary {
  std::vector<BoundaryPoint> curve;  ///< imaginary-axis root s = j Omega
  std::vector<Line> lines;           ///< root at s = 0 (A = 0) or a straight family
};

PlantBoundary plant_boundary(Plane plane, double fixed, const Chain& chain,
                             const std::vector<double>& Omegas);

/// Evenly spaced values including both ends.
std::vector<double> linspace(double lo, double hi, std::size_t count);
std::vector<double> logspace(double lo, double hi, std::size_t count);

}  // namespace ccc
