#pragma once

#include <cstddef>
#include <vector>

namespace ccc {

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
/// `f` has the signature void(double t, const std::vector<double>& y, std::vector<double>& dy).
template <typename Rhs>
std::vector<double> rk4_step(Rhs&& f, double t, const std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  f(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return next;
}

}  // namespace ccc
