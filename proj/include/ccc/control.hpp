#pragma once

#include <array>
#include <map>
#include <optional>

#include "ccc/models.hpp"

namespace ccc {

/// What the CAV controller sees at one instant: its own gap and speed, plus
/// speeds (and optionally accelerations) of vehicle 1 and every connected k.
struct ControlSnapshot {
  double D0 = 0.0;
  double v0 = 0.0;
  std::map<int, double> speeds;
  std::map<int, double> accels;
};

struct FilterOutcome {
  double u_applied = 0.0;
  double u_nominal = 0.0;
  double u_safe = 0.0;
  bool filter_active = false;  ///< true only when u_safe < u_nominal strictly
  double h = 0.0;
  double h_e = 0.0;
};

/// Optional saturation of the applied input to [-decel_max, accel_max].
struct InputLimits {
  double decel_max;
  double accel_max;
};

/// Lie derivatives of a barrier along the lagged CAV dynamics.
struct LieDerivatives {
  double Lf;
  double Lg;
};

/// Connected cruise control command (speed feedback only).
/// Throws ConfigError when a connected speed is missing from the snapshot.
double ccc_nominal(const ControlSnapshot& snap, const CavParams& p);

/// Connected cruise control with acceleration feedback C_1 a_1 + sum C_k a_k.
double ccc_nominal_accel(const ControlSnapshot& snap, const CavParams& p);

/// Time-headway barrier h = kappa_sf (D0 - D_sf) - v0.
double cbf_h(const CavState& x, const CbfParams& c);

/// Extended barrier h_e = kappa_sf (v1 - v0) - a0 + gamma h.
double cbf_h_extended(const CavState& x, const CbfParams& c);

/// Gradients over x = [D0 v0 a0 v1]. Both are state independent.
std::array<double, 4> cbf_h_gradient(const CbfParams& c);
std::array<double, 4> cbf_h_extended_gradient(const CbfParams& c);

/// L_f h_e and L_g h_e (= -1/xi) for the lagged model. Requires xi > 0.
LieDerivatives extended_lie_derivatives(const CavState& x, const CbfParams& c, double xi);

/// Largest input satisfying the extended-barrier condition. Requires xi >= 1e-6.
double safe_input_ks(const CavState& x, const CbfParams& c, double xi);

/// Min-form safety filter: u = min(u_nominal, k_s(x)), optionally saturated.
/// Throws DomainError for xi < 1e-6, where the extended barrier is undefined.
FilterOutcome safety_filter(double u_nominal, const CavState& x, const CbfParams& c, double xi,
                            std::optional<InputLimits> limits = std::nullopt);

/// General closed-form solution of the single-constraint CBF quadratic program,
///   u = u_nominal + max(0, eta) Lg / Lg^2,  eta = -Lf - Lg u_nominal - alpha_term,
/// and u_nominal when Lg == 0.
double qp_closed_form(double u_nominal, double Lf, double Lg, double alpha_term);

}  // namespace ccc
