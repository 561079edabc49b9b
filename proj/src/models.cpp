#include "ccc/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccc/errors.hpp"

namespace ccc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void HvParams::validate() const {
  require(finite_nonneg(A_h) && finite_nonneg(B_h) && finite_nonneg(kappa_h),
          "HV gains must be finite and non-negative");
  require(std::isfinite(tau) && tau > 0.0, "HV delay tau must be positive");
  require(std::isfinite(D_st) && D_st > 0.0, "HV standstill distance must be positive");
  require(std::isfinite(v_max) && v_max > 0.0, "HV speed limit must be positive");
}

double CavParams::B_of(int k) const {
  auto it = B.find(k);
  return it == B.end() ? 0.0 : it->second;
}

double CavParams::C_of(int k) const {
  auto it = C.find(k);
  return it == C.end() ? 0.0 : it->second;
}

double CavParams::connected_B_sum() const {
  double sum = 0.0;
  for (int k : phi) sum += B_of(k);
  return sum;
}

bool CavParams::has_accel_feedback() const {
  return std::any_of(C.begin(), C.end(), [](const auto& kv) { return kv.second != 0.0; });
}

void CavParams::validate() const {
  require(finite_nonneg(A), "CAV gain A must be finite and non-negative");
  require(B.count(1) == 1, "CAV gain B1 is missing");
  for (const auto& [k, gain] : B) {
    require(finite_nonneg(gain), "CAV gain B" + std::to_string(k) + " must be finite and non-negative");
    require(k == 1 || std::binary_search(phi.begin(), phi.end(), k),
            "CAV gain B" + std::to_string(k) + " refers to an unconnected vehicle");
  }
  for (const auto& [k, gain] : C) {
    require(std::isfinite(gain), "CAV gain C" + std::to_string(k) + " must be finite");
    require(k == 1 || std::binary_search(phi.begin(), phi.end(), k),
            "CAV gain C" + std::to_string(k) + " refers to an unconnected vehicle");
  }
  require(std::is_sorted(phi.begin(), phi.end()) &&
              std::adjacent_find(phi.begin(), phi.end()) == phi.end(),
          "connected set must be sorted without duplicates");
  require(phi.empty() || phi.front() > 1, "connected indices must be greater than 1");
  require(finite_nonneg(kappa), "CAV range-policy gradient must be non-negative");
  require(finite_nonneg(xi), "CAV lag xi must be non-negative");
  require(std::isfinite(D_st) && D_st > 0.0, "CAV standstill distance must be positive");
  require(std::isfinite(v_max) && v_max > 0.0, "CAV speed limit must be positive");
}

void CbfParams::validate() const {
  require(std::isfinite(kappa_sf) && kappa_sf > 0.0, "kappa_sf must be positive");
  require(finite_nonneg(D_sf), "D_sf must be non-negative");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
  require(std::isfinite(gamma_e) && gamma_e > 0.0, "gamma_e must be positive");
}

double range_policy(double D, double kappa, double D_st, double v_max) {
  return std::max(0.0, std::min(kappa * (D - D_st), v_max));
}

double speed_policy(double v, double v_max) { return std::min(v, v_max); }

double ovm_desired_accel(double D, double v, double v_lead, const HvParams& p) {
  return p.A_h * (range_policy(D, p.kappa_h, p.D_st, p.v_max) - v) + p.B_h * (v_lead - v);
}

HvRates hv_derivatives(const HvState& now, double v_lead_now, double delayed_input) {
  return {v_lead_now - now.v, delayed_input};
}

CavRates cav_derivatives(const CavState& state, double u0, double xi) {
  if (xi < kLagFreeThreshold) {
    // Lag-free reduction: realized acceleration equals the command.
    return {state.v1 - state.v0, u0, std::nullopt};
  }
  return {state.v1 - state.v0, state.a0, (u0 - state.a0) / xi};
}

}  // namespace ccc
