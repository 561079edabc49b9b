#include "ccc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccc/errors.hpp"

namespace ccc {

namespace {

constexpr double kPoleThreshold = 1e-14;
constexpr double kSingularThreshold = 1e-10;

cplx checked_ratio(cplx num, cplx den, const char* what) {
  if (std::abs(den) < kPoleThreshold) {
    throw PoleError(std::string(what) + ": pole at the evaluation point");
  }
  return num / den;
}

double psi0(const CavParams& p) { return p.A + p.B_of(1) + p.connected_B_sum(); }

cplx cav_den(cplx s, const CavParams& p) {
  const double xi = p.lag_free() ? 0.0 : p.xi;
  return ((xi * s + 1.0) * s + psi0(p)) * s + p.A * p.kappa;
}

cplx cav_num1(cplx s, const CavParams& p) {
  return (p.C_of(1) * s + p.B_of(1)) * s + p.A * p.kappa;
}

cplx cav_numk(cplx s, const CavParams& p, int k) { return (p.C_of(k) * s + p.B_of(k)) * s; }

// Product of driver links i = k..n.
cplx driver_product(cplx s, const Chain& chain, int k) {
  cplx prod = 1.0;
  for (int i = k; i <= chain.n(); ++i) prod *= link_Thv(s, chain.hvs[i - 1]);
  return prod;
}

// Numerator over the CAV denominator, G = num / cav_den.
cplx head_to_tail_num(cplx s, const Chain& chain) {
  const CavParams& p = chain.cav;
  cplx num = cav_num1(s, p) * driver_product(s, chain, 1);
  for (int k : p.phi) num += cav_numk(s, p, k) * driver_product(s, chain, k);
  return num;
}

void require_boundary_chain(const Chain& chain) {
  chain.validate();
  if (chain.hvs.empty() ? false : !chain.identical_hvs()) {
    throw ConfigError("analytic boundaries need identical human drivers");
  }
  if (chain.cav.has_accel_feedback()) {
    throw ConfigError("analytic boundaries assume no acceleration feedback");
  }
  for (int k : chain.cav.phi) {
    if (k != chain.head_index()) {
      throw ConfigError("analytic boundaries support a connection to the head vehicle only");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Plane p) { return p == Plane::A_B1 ? "A-B1" : "B1-BN"; }

Plane plane_from_string(const std::string& name) {
  if (name == "A-B1") return Plane::A_B1;
  if (name == "B1-BN") return Plane::B1_BN;
  throw ConfigError("unknown plane '" + name + "' (expected A-B1 or B1-BN)");
}

CavParams with_plane_gains(const CavParams& base, Plane plane, double x, double y, double fixed,
                           int head) {
  CavParams p = base;
  const bool head_connected = head > 1;
  if (head_connected && !std::binary_search(p.phi.begin(), p.phi.end(), head)) {
    p.phi.push_back(head);
    std::sort(p.phi.begin(), p.phi.end());
  }
  if (plane == Plane::A_B1) {
    p.A = x;
    p.B[1] = y;
    if (head_connected) p.B[head] = fixed;
  } else {
    if (!head_connected) throw ConfigError("the B1-BN plane needs at least one human driver");
    p.A = fixed;
    p.B[1] = x;
    p.B[head] = y;
  }
  return p;
}

double fixed_gain_of(const CavParams& p, Plane plane, int head) {
  return plane == Plane::A_B1 ? (head > 1 ? p.B_of(head) : 0.0) : p.A;
}

// ---------------------------------------------------------------------------

cplx link_T01(cplx s, const CavParams& p) { return checked_ratio(cav_num1(s, p), cav_den(s, p), "T01"); }

cplx link_T0k(cplx s, const CavParams& p, int k) {
  return checked_ratio(cav_numk(s, p, k), cav_den(s, p), "T0k");
}

cplx link_Thv(cplx s, const HvParams& p) {
  const cplx num = p.B_h * s + p.A_h * p.kappa_h;
  const cplx den = std::exp(s * p.tau) * s * s + (p.A_h + p.B_h) * s + p.A_h * p.kappa_h;
  return checked_ratio(num, den, "T_hv");
}

cplx head_to_tail_G(cplx s, const Chain& chain) {
  return checked_ratio(head_to_tail_num(s, chain), cav_den(s, chain.cav), "G");
}

cplx hv_gamma(double omega, const HvParams& p, int n) {
  if (n < 0) throw ConfigError("driver count must be non-negative");
  const cplx t = link_Thv(cplx(0.0, omega), p);
  cplx out = 1.0;
  for (int i = 0; i < n; ++i) out *= t;
  return out;
}

std::vector<double> cav_characteristic(const CavParams& p) {
  if (p.lag_free()) return {1.0, psi0(p), p.A * p.kappa};
  return {p.xi, 1.0, psi0(p), p.A * p.kappa};
}

bool plant_stable(const CavParams& p) {
  const double psi = psi0(p);
  const double a0 = p.A * p.kappa;
  if (p.lag_free()) return psi > 0.0 && a0 > 0.0;
  return p.xi > 0.0 && psi > 0.0 && a0 > 0.0 && psi > p.xi * a0;
}

// ---------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
  for (double& v : out) v = std::exp(v);
  if (!out.empty()) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

void FrequencyGrid::validate() const {
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || points < 2) {
    throw ConfigError("frequency grid needs 0 < omega_min < omega_max and at least 2 points");
  }
}

std::vector<double> FrequencyGrid::omegas() const {
  validate();
  return logspace(omega_min, omega_max, points);
}

DriverResponse::DriverResponse(const Chain& chain, const FrequencyGrid& grid)
    : omegas_(grid.omegas()) {
  keys_.push_back(1);
  for (int k : chain.cav.phi) keys_.push_back(k);
  products_.assign(keys_.size(), std::vector<cplx>(omegas_.size()));
  for (std::size_t m = 0; m < omegas_.size(); ++m) {
    const cplx s(0.0, omegas_[m]);
    // Suffix products from the head down to vehicle 1.
    std::vector<cplx> suffix(static_cast<std::size_t>(chain.n()) + 2, 1.0);
    for (int i = chain.n(); i >= 1; --i) suffix[i] = suffix[i + 1] * link_Thv(s, chain.hvs[i - 1]);
    for (std::size_t q = 0; q < keys_.size(); ++q) products_[q][m] = suffix[keys_[q]];
  }
}

cplx DriverResponse::product(std::size_t m, int k) const {
  const auto it = std::find(keys_.begin(), keys_.end(), k);
  if (it == keys_.end()) throw ConfigError("vehicle " + std::to_string(k) + " is not connected");
  return products_[static_cast<std::size_t>(it - keys_.begin())][m];
}

namespace {

double gain_at(double omega, const Chain& chain) {
  return std::abs(head_to_tail_G(cplx(0.0, omega), chain));
}

// Golden-section maximization of |G| over [lo, hi] in log frequency.
std::pair<double, double> refine_peak(double lo, double hi, const Chain& chain) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = gain_at(std::exp(c), chain);
  double fd = gain_at(std::exp(d), chain);
  for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = gain_at(std::exp(c), chain);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = gain_at(std::exp(d), chain);
    }
  }
  return fc > fd ? std::pair{std::exp(c), fc} : std::pair{std::exp(d), fd};
}

}  // namespace

StabilityFlags string_stable_numeric(const Chain& chain, const FrequencyGrid& grid) {
  return string_stable_numeric(chain, DriverResponse(chain, grid), grid);
}

StabilityFlags string_stable_numeric(const Chain& chain, const DriverResponse& drivers,
                                     const FrequencyGrid& grid) {
  StabilityFlags flags;
  flags.plant_stable = plant_stable(chain.cav);
  const CavParams& p = chain.cav;
  const auto& omegas = drivers.omegas();

  std::size_t best = 0;
  double sup = -1.0;
  try {
    for (std::size_t m = 0; m < omegas.size(); ++m) {
      const cplx s(0.0, omegas[m]);
      cplx num = cav_num1(s, p) * drivers.product(m, 1);
      for (int k : p.phi) num += cav_numk(s, p, k) * drivers.product(m, k);
      const double g = std::abs(checked_ratio(num, cav_den(s, p), "G"));
      if (g > sup) {
        sup = g;
        best = m;
      }
    }
    flags.sup_gain = sup;
    flags.omega_at_sup = omegas[best];
    if (grid.refine) {
      const double lo = omegas[best == 0 ? 0 : best - 1];
      const double hi = omegas[std::min(best + 1, omegas.size() - 1)];
      const auto [w, g] = refine_peak(lo, hi, chain);
      if (g > flags.sup_gain) {
        flags.sup_gain = g;
        flags.omega_at_sup = w;
      }
    }
  } catch (const PoleError& e) {
    flags.sup_gain = std::numeric_limits<double>::infinity();
    flags.diagnostic = e.what();
  }
  flags.string_stable = flags.plant_stable && flags.sup_gain < 1.0 - kStringTolerance;
  return flags;
}

double P_criterion(double omega, const Chain& chain) {
  if (!(omega > 0.0)) throw DomainError("P(omega) needs omega > 0; use the zero-frequency boundary");
  const cplx s(0.0, omega);
  const double den = std::norm(cav_den(s, chain.cav));
  const double num = std::norm(head_to_tail_num(s, chain));
  return (den - num) / (omega * omega);
}

// ---------------------------------------------------------------------------

double curvature_L_h(const HvParams& p, int n) {
  if (!(p.A_h > 0.0) || !(p.kappa_h > 0.0)) {
    throw DomainError("curvature limit needs A_h > 0 and kappa_h > 0");
  }
  return n * (p.A_h + 2.0 * p.B_h - 2.0 * p.kappa_h) / (p.A_h * p.kappa_h * p.kappa_h);
}

std::vector<Line> string_boundary_w0(Plane plane, double fixed, const Chain& chain) {
  require_boundary_chain(chain);
  const int n = chain.n();
  const double kappa = chain.cav.kappa;
  const double L_h = n == 0 ? 0.0 : curvature_L_h(chain.hvs.front(), n);
  const double head_factor = n == 0 ? 1.0 : n * kappa / chain.hvs.front().kappa_h + 1.0;
  const double slope_A = (L_h * kappa * kappa + 1.0) / 2.0;
  // B1 + slope_A A + head_factor B_{n+1} = kappa
  if (plane == Plane::A_B1) {
    const double B = n == 0 ? 0.0 : fixed;
    return {{slope_A, 1.0, kappa - head_factor * B, "omega=0"}, {1.0, 0.0, 0.0, "A=0"}};
  }
  if (n == 0) throw ConfigError("the B1-BN plane needs at least one human driver");
  return {{1.0, head_factor, kappa - slope_A * fixed, "omega=0"}};
}

std::vector<BoundaryPoint> string_boundary_wK(Plane plane, double fixed, const Chain& chain,
                                              const std::vector<double>& omegas,
                                              const std::vector<double>& Ks, std::size_t* skipped) {
  require_boundary_chain(chain);
  if (Ks.empty()) throw ConfigError("wave-number grid is empty");
  if (omegas.empty()) throw ConfigError("frequency grid is empty");
  if (plane == Plane::B1_BN && chain.n() == 0) {
    throw ConfigError("the B1-BN plane needs at least one human driver");
  }
  const int n = chain.n();
  const double kappa = chain.cav.kappa;
  const double xi = chain.cav.lag_free() ? 0.0 : chain.cav.xi;
  std::size_t skip = 0;
  std::vector<BoundaryPoint> out;
  for (double K : Ks) {
    const double cK = std::cos(K);
    const double sK = std::sin(K);
    for (double w : omegas) {
      if (!(w > 0.0)) {
        ++skip;
        continue;
      }
      const cplx gamma = n == 0 ? cplx(1.0) : hv_gamma(w, chain.hvs.front(), n);
      const double c = gamma.real() * cK - gamma.imag() * sK;
      const double d = gamma.real() * sK + gamma.imag() * cK;
      const double p1 = kappa * (c - 1.0);
      const double q1 = -w * d;
      const double p2 = kappa * d - w;
      const double q2 = w * (c - 1.0);
      double x = 0.0;
      double y = 0.0;
      if (plane == Plane::A_B1) {
        const double B = n == 0 ? 0.0 : fixed;
        const double r1 = w * (B * sK - w);
        const double r2 = B * w * (1.0 - cK) - w * w * w * xi;
        const double det = p1 * q2 - p2 * q1;
        if (std::abs(det) < kSingularThreshold) {
          ++skip;
          continue;
        }
        x = (q2 * r1 - q1 * r2) / det;
        y = (p1 * r2 - p2 * r1) / det;
      } else {
        const double A = fixed;
        const double p3 = q1;
        const double q3 = -w * sK;
        const double r3 = -p1 * A - w * w;
        const double p4 = q2;
        const double q4 = w * (cK - 1.0);
        const double r4 = -p2 * A - w * w * w * xi;
        const double det = p3 * q4 - p4 * q3;
        if (std::abs(det) < kSingularThreshold) {
          ++skip;
          continue;
        }
        x = (q4 * r3 - q3 * r4) / det;
        y = (p3 * r4 - p4 * r3) / det;
      }
      if (!std::isfinite(x) || !std::isfinite(y)) {
        ++skip;
        continue;
      }
      out.push_back({x, y, w, K});
    }
  }
  if (skipped != nullptr) *skipped = skip;
  return out;
}

PlantBoundary plant_boundary(Plane plane, double fixed, const Chain& chain,
                             const std::vector<double>& Omegas) {
  require_boundary_chain(chain);
  const double kappa = chain.cav.kappa;
  if (!(kappa > 0.0)) throw DomainError("plant boundary needs kappa > 0");
  const double xi = chain.cav.lag_free() ? 0.0 : chain.cav.xi;
  PlantBoundary out;
  if (plane == Plane::A_B1) {
    const double B = chain.n() == 0 ? 0.0 : fixed;
    for (double W : Omegas) {
      out.curve.push_back({W * W / kappa, (xi - 1.0 / kappa) * W * W - B, W, std::nullopt});
    }
    out.lines.push_back({1.0, 0.0, 0.0, "A=0"});
    return out;
  }
  if (chain.n() == 0) throw ConfigError("the B1-BN plane needs at least one human driver");
  // B1 + B_{n+1} = A (kappa xi - 1)
  out.lines.push_back({1.0, 1.0, fixed * (kappa * xi - 1.0), "s=j*Omega"});
  return out;
}

}  // namespace ccc
