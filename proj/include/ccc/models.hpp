#pragma once

#include <map>
#include <optional>
#include <vector>

namespace ccc {

/// Lags below this are treated as the lag-free (two-state) CAV model.
inline constexpr double kLagFreeThreshold = 1e-6;

/// Human driver (optimal velocity model) with reaction delay. SI units throughout.
struct HvParams {
  double A_h = 0.1;      ///< headway gain [1/s]
  double B_h = 0.6;      ///< relative-speed gain [1/s]
  double kappa_h = 0.6;  ///< range-policy gradient [1/s]
  double tau = 0.9;      ///< reaction delay [s]
  double D_st = 5.0;     ///< standstill distance [m]
  double v_max = 30.0;   ///< speed limit [m/s]

  void validate() const;
};

/// Connected cruise controller of the automated vehicle plus its actuator lag.
///
/// Vehicle indices count forward from the CAV: 1 is the vehicle immediately
/// ahead, k > 1 are vehicles farther ahead. `phi` lists the connected indices
/// k > 1 whose speeds (and optionally accelerations) reach the CAV over V2X.
struct CavParams {
  double A = 0.6;             ///< headway gain [1/s]
  std::map<int, double> B;    ///< speed gains, keys 1 and every k in phi [1/s]
  std::map<int, double> C;    ///< acceleration gains (optional) [-]
  double kappa = 0.6;         ///< range-policy gradient [1/s]
  double xi = 0.2;            ///< first-order actuator lag [s]
  double D_st = 5.0;
  double v_max = 30.0;
  std::vector<int> phi;       ///< sorted, all > 1

  double B_of(int k) const;
  double C_of(int k) const;
  /// Sum of B_k over the connected set (excludes B_1).
  double connected_B_sum() const;
  bool lag_free() const { return xi < kLagFreeThreshold; }
  bool has_accel_feedback() const;

  void validate() const;
};

struct CbfParams {
  double kappa_sf = 0.6;  ///< inverse safe time headway [1/s]
  double D_sf = 1.0;      ///< safe standstill distance [m]
  double gamma = 1.0;     ///< class-K slope for h [1/s]
  double gamma_e = 1.0;   ///< class-K slope for h_e [1/s]

  void validate() const;
};

/// CAV state augmented with the leader's speed and acceleration.
struct CavState {
  double D0 = 0.0;
  double v0 = 0.0;
  double a0 = 0.0;
  double v1 = 0.0;
  double a1 = 0.0;
};

struct HvState {
  double D = 0.0;
  double v = 0.0;
};

struct HvRates {
  double dD;
  double dv;
};

struct CavRates {
  double dD0;
  double dv0;
  std::optional<double> da0;  ///< absent for the lag-free model
};

/// Gap-to-speed map: zero at D_st, slope kappa, saturating at v_max.
/// Clamped below at zero for gaps shorter than D_st.
double range_policy(double D, double kappa, double D_st, double v_max);

double speed_policy(double v, double v_max);

double ovm_desired_accel(double D, double v, double v_lead, const HvParams& p);

/// `delayed_input` is the driver command evaluated tau seconds in the past.
HvRates hv_derivatives(const HvState& now, double v_lead_now, double delayed_input);

CavRates cav_derivatives(const CavState& state, double u0, double xi);

}  // namespace ccc
