#pragma once

#include "ccc/models.hpp"

// Reference parameter set used throughout the examples, tests and default config.
namespace ccc::presets {

/// Headway/speed gains of the automated vehicle in the (A, B_1, B_{n+1}) layout.
struct GainTriple {
  double A;
  double B1;
  double B_head;
};

inline constexpr GainTriple kSafeGains{0.6, 0.53, 0.03};    // point P
inline constexpr GainTriple kUnsafeGains{0.6, 0.53, 0.5};   // point Q

inline constexpr double kAccelMin = 7.0;   // maximum braking [m/s^2]
inline constexpr double kAccelMax = 3.0;   // maximum acceleration [m/s^2]
inline constexpr double kSpeedPerturbation = 15.0;
inline constexpr double kSpeedDifferenceBound = 15.0;

inline HvParams human_driver() { return HvParams{}; }

inline CbfParams barrier() { return CbfParams{}; }

/// CAV following `n_hv` human drivers and connected to the head vehicle n_hv + 1.
/// With n_hv == 0 the head vehicle is the immediate leader and only B_1 is used.
inline CavParams cav(GainTriple gains, double xi, int n_hv) {
  CavParams p;
  p.A = gains.A;
  p.B[1] = gains.B1;
  p.xi = xi;
  if (n_hv >= 1) {
    p.phi = {n_hv + 1};
    p.B[n_hv + 1] = gains.B_head;
  }
  return p;
}

}  // namespace ccc::presets
