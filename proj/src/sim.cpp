#include "ccc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccc/errors.hpp"
#include "ccc/integrator.hpp"

namespace ccc {

const char* to_string(Controller c) {
  switch (c) {
    case Controller::Nominal: return "nominal";
    case Controller::NominalAccel: return "nominal-accel";
    case Controller::Filtered: return "filtered";
  }
  return "?";
}

Controller controller_from_string(const std::string& name) {
  if (name == "nominal") return Controller::Nominal;
  if (name == "nominal-accel") return Controller::NominalAccel;
  if (name == "filtered") return Controller::Filtered;
  throw ConfigError("unknown controller variant '" + name + "'");
}

std::size_t Scenario::step_count() const {
  return static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
}

void Scenario::validate(const Chain& chain) const {
  chain.validate();
  if (n_hv != chain.n()) {
    throw ConfigError("scenario has " + std::to_string(n_hv) + " human drivers but " +
                      std::to_string(chain.n()) + " parameter sets were given");
  }
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");

  double limit = std::numeric_limits<double>::infinity();
  for (const HvParams& hv : chain.hvs) limit = std::min(limit, hv.tau);
  if (!chain.cav.lag_free()) limit = std::min(limit, chain.cav.xi);
  if (dt > limit / 10.0 * (1.0 + 1e-12)) {
    throw ConfigError("dt = " + std::to_string(dt) + " s is too coarse: it must not exceed " +
                      std::to_string(limit / 10.0) + " s (a tenth of the shortest delay or lag)");
  }

  if (const auto* br = std::get_if<BrakeResume>(&head)) {
    if (!(br->a_brake > 0.0) || !(br->a_resume > 0.0)) {
      throw ConfigError("brake and resume accelerations must be positive");
    }
    if (br->v_pert < 0.0 || br->v_pert > br->v_eq) {
      throw ConfigError("speed perturbation must lie in [0, v_eq]");
    }
  } else {
    const auto& data = std::get<DataDriven>(head);
    auto check = [&](const SpeedProfile& p, const std::string& what) {
      if (p.duration() + 1e-9 < t_final) {
        throw ConfigError(what + " profile covers " + std::to_string(p.duration()) +
                          " s, shorter than t_final = " + std::to_string(t_final) + " s");
      }
    };
    check(data.head, "head");
    if (!data.hvs.empty() && static_cast<int>(data.hvs.size()) != n_hv) {
      throw ConfigError("speed data prescribes " + std::to_string(data.hvs.size()) +
                        " human drivers but the chain has " + std::to_string(n_hv));
    }
    for (std::size_t i = 0; i < data.hvs.size(); ++i) {
      check(data.hvs[i], "v_hv" + std::to_string(i + 1));
    }
  }

  if (const auto* ex = std::get_if<ExplicitStart>(&init)) {
    if (static_cast<int>(ex->hvs.size()) != n_hv) {
      throw ConfigError("explicit initial condition must list every human driver");
    }
  }
}

double equilibrium_gap(double v_star, double kappa, double D_st, double v_max) {
  if (!(v_star >= 0.0) || !(v_star < v_max)) {
    throw DomainError("equilibrium speed must satisfy 0 <= v* < v_max (got " +
                      std::to_string(v_star) + "); on the saturated branch the gap is not unique");
  }
  if (!(kappa > 0.0)) throw DomainError("range-policy gradient must be positive");
  return v_star / kappa + D_st;
}

namespace {

double max_delay(const Chain& chain) {
  double span = 0.0;
  for (const HvParams& hv : chain.hvs) span = std::max(span, hv.tau);
  return span;
}

}  // namespace

InitializedChain equilibrium_init(double v_star, const Chain& chain, double dt) {
  ChainState s;
  s.D0 = equilibrium_gap(v_star, chain.cav.kappa, chain.cav.D_st, chain.cav.v_max);
  s.v0 = v_star;
  for (const HvParams& hv : chain.hvs) {
    s.hvs.push_back({equilibrium_gap(v_star, hv.kappa_h, hv.D_st, hv.v_max), v_star});
  }
  HistoryBuffer history(chain.hvs.size(), dt, max_delay(chain));
  history.prefill(0, std::vector<double>(chain.hvs.size(), 0.0));
  return {s, std::move(history)};
}

// ---------------------------------------------------------------------------

double Trajectory::min_h() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.h);
  return m;
}

double Trajectory::min_D0() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.D0);
  return m;
}

double Trajectory::filter_active_duration() const {
  const auto n = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.filter_active; });
  return static_cast<double>(n) * dt;
}

std::optional<std::pair<double, double>> Trajectory::filter_active_span() const {
  std::optional<std::pair<double, double>> span;
  for (const auto& r : rows) {
    if (!r.filter_active) continue;
    if (!span) span = {r.t, r.t};
    span->second = r.t;
  }
  return span;
}

// ---------------------------------------------------------------------------
// State vector layout: [D0, v0, a0, D1, v1, ..., Dn, vn]

ChainSimulator::ChainSimulator(Scenario scenario, Chain chain, CbfParams cbf,
                               Controller controller, SimOptions options)
    : scenario_(std::move(scenario)),
      chain_(std::move(chain)),
      cbf_(cbf),
      controller_(controller),
      options_(options),
      history_(chain_.hvs.size(), scenario_.dt, max_delay(chain_)) {
  scenario_.validate(chain_);
  if (controller_ == Controller::Filtered) {
    cbf_.validate();
    if (chain_.cav.lag_free()) {
      throw DomainError(
          "the filtered controller needs a positive lag (xi >= 1e-6); use the nominal variant or a "
          "small lag such as xi = 1e-3");
    }
  }

  if (const auto* eq = std::get_if<Equilibrium>(&scenario_.init)) {
    auto init = equilibrium_init(eq->v_star, chain_, scenario_.dt);
    state_ = std::move(init.state);
    history_ = std::move(init.history);
  } else {
    const auto& ex = std::get<ExplicitStart>(scenario_.init);
    state_ = ChainState{0.0, ex.D0, ex.v0, ex.a0, ex.hvs};
    // Constant past equal to the commands at the initial state.
    history_.prefill(0, driver_commands(0.0, pack(state_)));
  }
  // Prescribed drivers start on their measured speed.
  for (int i = 1; i <= chain_.n(); ++i) {
    if (prescribed(i)) {
      state_.hvs[i - 1].v = std::get<DataDriven>(scenario_.head).hvs[i - 1].speed(0.0);
    }
  }
  register_breakpoints();
}

// Commands have derivative jumps where a leader's speed has a kink (head
// profile corners) and one delay after a jump in a leader's acceleration.
// Interpolating across them would cost convergence order.
void ChainSimulator::register_breakpoints() {
  std::vector<double> corners;
  if (const auto* br = std::get_if<BrakeResume>(&scenario_.head)) {
    corners = {br->t_start, br->brake_end(), br->resume_end()};
  }
  const int n = chain_.n();
  for (int i = 1; i <= n; ++i) {
    if (prescribed(i)) continue;
    const auto ch = static_cast<std::size_t>(i - 1);
    const double tau = chain_.hvs[ch].tau;
    history_.add_breakpoint(ch, tau);
    if (i == n) {
      for (double c : corners) {
        history_.add_breakpoint(ch, c);
        history_.add_breakpoint(ch, c + tau);
      }
    } else if (!prescribed(i + 1)) {
      const double lead_tau = chain_.hvs[ch + 1].tau;
      history_.add_breakpoint(ch, lead_tau);
      if (i + 1 == n) {
        for (double c : corners) history_.add_breakpoint(ch, c + lead_tau);
      }
    }
  }
}

bool ChainSimulator::prescribed(int hv_index) const {
  const auto* data = std::get_if<DataDriven>(&scenario_.head);
  return data != nullptr && !data->hvs.empty() && hv_index >= 1 &&
         hv_index <= static_cast<int>(data->hvs.size());
}

std::vector<double> ChainSimulator::pack(const ChainState& s) const {
  std::vector<double> y{s.D0, s.v0, s.a0};
  for (const HvState& hv : s.hvs) {
    y.push_back(hv.D);
    y.push_back(hv.v);
  }
  return y;
}

ChainState ChainSimulator::unpack(double t, const std::vector<double>& y) const {
  ChainState s{t, y[0], y[1], y[2], {}};
  for (int i = 0; i < chain_.n(); ++i) s.hvs.push_back({y[3 + 2 * i], y[4 + 2 * i]});
  return s;
}

double ChainSimulator::vehicle_speed(int k, double t, const std::vector<double>& y) const {
  if (k == 0) return y[1];
  if (k == chain_.head_index()) return head_profile_eval(scenario_.head, t).v;
  if (prescribed(k)) return std::get<DataDriven>(scenario_.head).hvs[k - 1].speed(t);
  return y[4 + 2 * (k - 1)];
}

double ChainSimulator::vehicle_accel(int k, double t) const {
  if (k == chain_.head_index()) return head_profile_eval(scenario_.head, t).a;
  if (prescribed(k)) return std::get<DataDriven>(scenario_.head).hvs[k - 1].accel(t);
  return history_.value(static_cast<std::size_t>(k - 1), t - chain_.hvs[k - 1].tau);
}

std::vector<double> ChainSimulator::driver_commands(double t, const std::vector<double>& y) const {
  std::vector<double> u(chain_.hvs.size());
  for (int i = 1; i <= chain_.n(); ++i) {
    u[i - 1] = ovm_desired_accel(y[3 + 2 * (i - 1)], y[4 + 2 * (i - 1)], vehicle_speed(i + 1, t, y),
                                 chain_.hvs[i - 1]);
  }
  return u;
}

ChainSimulator::ControlEval ChainSimulator::control(double t, const std::vector<double>& y) const {
  const CavParams& cav = chain_.cav;
  ControlSnapshot snap;
  snap.D0 = y[0];
  snap.v0 = y[1];
  snap.speeds[1] = vehicle_speed(1, t, y);
  snap.accels[1] = vehicle_accel(1, t);
  for (int k : cav.phi) {
    snap.speeds[k] = vehicle_speed(k, t, y);
    snap.accels[k] = vehicle_accel(k, t);
  }
  const CavState x{y[0], y[1], y[2], snap.speeds[1], snap.accels[1]};

  ControlEval out{};
  out.u_nom = controller_ == Controller::Nominal ? ccc_nominal(snap, cav) : ccc_nominal_accel(snap, cav);
  if (controller_ == Controller::Filtered) {
    const FilterOutcome f = safety_filter(out.u_nom, x, cbf_, cav.xi, options_.limits);
    return {f.u_nominal, f.u_safe, f.u_applied, f.filter_active, f.h, f.h_e};
  }
  out.u_app = out.u_nom;
  if (options_.limits) {
    out.u_app = std::clamp(out.u_app, -options_.limits->decel_max, options_.limits->accel_max);
  }
  out.u_safe = cav.lag_free() ? std::numeric_limits<double>::quiet_NaN() : safe_input_ks(x, cbf_, cav.xi);
  out.active = false;
  out.h = cbf_h(x, cbf_);
  CavState xe = x;
  if (cav.lag_free()) xe.a0 = out.u_app;
  out.h_e = cbf_h_extended(xe, cbf_);
  return out;
}

void ChainSimulator::rhs(double t, const std::vector<double>& y, std::vector<double>& dy) const {
  const ControlEval u = control(t, y);
  const CavState x{y[0], y[1], y[2], vehicle_speed(1, t, y), 0.0};
  const CavRates cav = cav_derivatives(x, u.u_app, chain_.cav.xi);
  dy[0] = cav.dD0;
  dy[1] = cav.dv0;
  dy[2] = cav.da0.value_or(0.0);
  for (int i = 1; i <= chain_.n(); ++i) {
    const HvState now{y[3 + 2 * (i - 1)], y[4 + 2 * (i - 1)]};
    const double v_self = vehicle_speed(i, t, y);
    const HvRates r = hv_derivatives({now.D, v_self}, vehicle_speed(i + 1, t, y), vehicle_accel(i, t));
    dy[3 + 2 * (i - 1)] = r.dD;
    dy[4 + 2 * (i - 1)] = r.dv;
  }
}

void ChainSimulator::step() {
  const double dt = scenario_.dt;
  const double t = static_cast<double>(steps_) * dt;
  const double t_next = static_cast<double>(steps_ + 1) * dt;
  auto f = [this](double tt, const std::vector<double>& y, std::vector<double>& dy) { rhs(tt, y, dy); };
  std::vector<double> y = rk4_step(f, t, pack(state_), dt);

  for (int i = 1; i <= chain_.n(); ++i) {
    if (prescribed(i)) y[4 + 2 * (i - 1)] = vehicle_speed(i, t_next, y);
  }
  // Vehicles stop rather than reverse.
  for (std::size_t idx = 1; idx < y.size(); idx += (idx == 1 ? 3 : 2)) {
    if (y[idx] < 0.0) {
      y[idx] = 0.0;
      ++floor_events_;
    }
  }
  for (std::size_t idx = 0; idx < y.size(); ++idx) {
    if (!std::isfinite(y[idx])) {
      throw IntegrationFault("non-finite state component " + std::to_string(idx) + " at t = " +
                             std::to_string(t_next) + " s");
    }
  }
  if (chain_.cav.lag_free()) y[2] = control(t_next, y).u_app;

  history_.push(driver_commands(t_next, y));
  state_ = unpack(t_next, y);
  ++steps_;
}

TrajectoryRow ChainSimulator::observe() const {
  const double t = static_cast<double>(steps_) * scenario_.dt;
  const std::vector<double> y = pack(state_);
  const ControlEval u = control(t, y);
  TrajectoryRow row;
  row.t = t;
  row.D0 = state_.D0;
  row.v0 = state_.v0;
  row.a0 = chain_.cav.lag_free() ? u.u_app : state_.a0;
  row.u_nom = u.u_nom;
  row.u_safe = u.u_safe;
  row.u_app = u.u_app;
  row.h = u.h;
  row.h_e = u.h_e;
  row.hvs = state_.hvs;
  row.v_head = head_profile_eval(scenario_.head, t).v;
  row.filter_active = u.active;
  return row;
}

Trajectory ChainSimulator::run() {
  Trajectory traj;
  traj.dt = scenario_.dt;
  const std::size_t steps = scenario_.step_count();
  traj.rows.reserve(steps + 1);
  traj.rows.push_back(observe());
  while (steps_ < steps) {
    step();
    traj.rows.push_back(observe());
  }
  traj.speed_floor_events = floor_events_;
  return traj;
}

Trajectory simulate(const Scenario& scenario, const Chain& chain, const CbfParams& cbf,
                    Controller controller, SimOptions options) {
  return ChainSimulator(scenario, chain, cbf, controller, options).run();
}

}  // namespace ccc
