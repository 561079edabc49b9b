#include "ccc/control.hpp"

#include <algorithm>
#include <string>

#include "ccc/errors.hpp"

namespace ccc {

namespace {

double lookup(const std::map<int, double>& values, int k, const char* what) {
  auto it = values.find(k);
  if (it == values.end()) {
    throw ConfigError(std::string("missing ") + what + " for vehicle " + std::to_string(k));
  }
  return it->second;
}

void require_lagged(double xi) {
  if (xi < kLagFreeThreshold) {
    throw DomainError(
        "safety filter requires a positive actuator lag (xi >= 1e-6); run unfiltered or use a "
        "small positive xi such as 1e-3");
  }
}

}  // namespace

double ccc_nominal(const ControlSnapshot& snap, const CavParams& p) {
  const double v0 = snap.v0;
  double u = p.A * (range_policy(snap.D0, p.kappa, p.D_st, p.v_max) - v0) +
             p.B_of(1) * (speed_policy(lookup(snap.speeds, 1, "speed"), p.v_max) - v0);
  for (int k : p.phi) {
    u += p.B_of(k) * (speed_policy(lookup(snap.speeds, k, "speed"), p.v_max) - v0);
  }
  return u;
}

double ccc_nominal_accel(const ControlSnapshot& snap, const CavParams& p) {
  double u = ccc_nominal(snap, p);
  if (p.C_of(1) != 0.0) u += p.C_of(1) * lookup(snap.accels, 1, "acceleration");
  for (int k : p.phi) {
    if (p.C_of(k) != 0.0) u += p.C_of(k) * lookup(snap.accels, k, "acceleration");
  }
  return u;
}

double cbf_h(const CavState& x, const CbfParams& c) {
  return c.kappa_sf * (x.D0 - c.D_sf) - x.v0;
}

double cbf_h_extended(const CavState& x, const CbfParams& c) {
  return c.kappa_sf * (x.v1 - x.v0) - x.a0 + c.gamma * cbf_h(x, c);
}

std::array<double, 4> cbf_h_gradient(const CbfParams& c) { return {c.kappa_sf, -1.0, 0.0, 0.0}; }

std::array<double, 4> cbf_h_extended_gradient(const CbfParams& c) {
  return {c.gamma * c.kappa_sf, -c.kappa_sf - c.gamma, -1.0, c.kappa_sf};
}

LieDerivatives extended_lie_derivatives(const CavState& x, const CbfParams& c, double xi) {
  require_lagged(xi);
  const double Lf = c.kappa_sf * (x.a1 - x.a0) + x.a0 / xi +
                    c.gamma * (c.kappa_sf * (x.v1 - x.v0) - x.a0);
  return {Lf, -1.0 / xi};
}

double safe_input_ks(const CavState& x, const CbfParams& c, double xi) {
  require_lagged(xi);
  const double dh = c.kappa_sf * (x.v1 - x.v0) - x.a0;  // L_f h
  return (1.0 - xi * c.kappa_sf) * x.a0 + xi * c.kappa_sf * x.a1 + xi * c.gamma * dh +
         xi * c.gamma_e * (dh + c.gamma * cbf_h(x, c));
}

FilterOutcome safety_filter(double u_nominal, const CavState& x, const CbfParams& c, double xi,
                            std::optional<InputLimits> limits) {
  FilterOutcome out;
  out.u_nominal = u_nominal;
  out.u_safe = safe_input_ks(x, c, xi);
  out.filter_active = out.u_safe < u_nominal;
  out.u_applied = std::min(u_nominal, out.u_safe);
  if (limits) out.u_applied = std::clamp(out.u_applied, -limits->decel_max, limits->accel_max);
  out.h = cbf_h(x, c);
  out.h_e = cbf_h_extended(x, c);
  return out;
}

double qp_closed_form(double u_nominal, double Lf, double Lg, double alpha_term) {
  if (Lg == 0.0) return u_nominal;
  const double eta = -Lf - Lg * u_nominal - alpha_term;
  return u_nominal + std::max(0.0, eta) * Lg / (Lg * Lg);
}

}  // namespace ccc
