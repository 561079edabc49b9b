#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccc/chain.hpp"
#include "ccc/control.hpp"
#include "ccc/history.hpp"
#include "ccc/models.hpp"

namespace ccc {

// ---------------------------------------------------------------------------
// Head-vehicle and measured speed profiles

/// Head vehicle cruises at v_eq, brakes at a_brake down to v_eq - v_pert,
/// then accelerates at a_resume back to v_eq.
struct BrakeResume {
  double v_eq = 20.0;
  double v_pert = 15.0;
  double a_brake = 7.0;
  double a_resume = 3.0;
  double t_start = 5.0;

  double brake_end() const { return t_start + v_pert / a_brake; }
  double resume_end() const { return brake_end() + v_pert / a_resume; }
};

/// Speed samples on a uniform grid starting at t = 0.
struct SpeedProfile {
  double dt = 0.0;
  std::vector<double> v;

  double duration() const;
  double speed(double t) const;
  /// Forward difference of the grid segment containing t.
  double accel(double t) const;
};

/// Measured profiles: the head vehicle, and optionally every human driver
/// (hvs[i - 1] prescribes vehicle i; empty means the drivers are simulated).
struct DataDriven {
  SpeedProfile head;
  std::vector<SpeedProfile> hvs;
};

using HeadProfile = std::variant<BrakeResume, DataDriven>;

struct ProfileSample {
  double v;
  double a;
};

ProfileSample head_profile_eval(const HeadProfile& profile, double t);

/// Reads `t,v_head[,v_hv1,...]` and resamples every column onto the dt grid.
/// Time is taken relative to the first row. Throws ParseError naming the row.
DataDriven load_speed_csv(const std::filesystem::path& path, double dt);

// ---------------------------------------------------------------------------
// Scenario and state

struct Equilibrium {
  double v_star = 20.0;
};

struct ExplicitStart {
  double D0 = 0.0;
  double v0 = 0.0;
  double a0 = 0.0;
  std::vector<HvState> hvs;
};

using InitialCondition = std::variant<Equilibrium, ExplicitStart>;

struct Scenario {
  int n_hv = 1;
  HeadProfile head = BrakeResume{};
  InitialCondition init = Equilibrium{};
  double t_final = 40.0;
  double dt = 0.01;

  std::size_t step_count() const;
  /// Throws ConfigError on an inconsistent scenario (step too coarse for the
  /// delay or lag, profile too short, vehicle count mismatch, ...).
  void validate(const Chain& chain) const;
};

enum class Controller { Nominal, NominalAccel, Filtered };

const char* to_string(Controller c);
Controller controller_from_string(const std::string& name);

struct ChainState {
  double t = 0.0;
  double D0 = 0.0;
  double v0 = 0.0;
  double a0 = 0.0;
  std::vector<HvState> hvs;
};

struct InitializedChain {
  ChainState state;
  HistoryBuffer history;
};

/// Uniform flow at v_star with every gap on its range-policy equilibrium and a
/// zero command history. Throws DomainError unless 0 <= v_star < v_max.
InitializedChain equilibrium_init(double v_star, const Chain& chain, double dt);

double equilibrium_gap(double v_star, double kappa, double D_st, double v_max);

// ---------------------------------------------------------------------------
// Trajectory

struct TrajectoryRow {
  double t;
  double D0, v0, a0;
  double u_nom, u_safe, u_app;
  double h, h_e;
  std::vector<HvState> hvs;
  double v_head;
  bool filter_active;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<TrajectoryRow> rows;
  std::size_t speed_floor_events = 0;

  double min_h() const;
  double min_D0() const;
  double filter_active_duration() const;
  /// Time of the first and last row with an active filter; nullopt when never active.
  std::optional<std::pair<double, double>> filter_active_span() const;
};

struct SimOptions {
  std::optional<InputLimits> limits;
};

/// Fixed-step RK4 integration of the full chain. Delayed driver commands are
/// read from a HistoryBuffer at every stage time.
class ChainSimulator {
 public:
  ChainSimulator(Scenario scenario, Chain chain, CbfParams cbf, Controller controller,
                 SimOptions options = {});

  const ChainState& state() const { return state_; }
  std::size_t steps_taken() const { return steps_; }
  std::size_t speed_floor_events() const { return floor_events_; }

  /// Advances one step. Throws IntegrationFault on non-finite state.
  void step();
  TrajectoryRow observe() const;
  Trajectory run();

 private:
  struct ControlEval {
    double u_nom, u_safe, u_app;
    bool active;
    double h, h_e;
  };

  std::vector<double> pack(const ChainState& s) const;
  ChainState unpack(double t, const std::vector<double>& y) const;
  void rhs(double t, const std::vector<double>& y, std::vector<double>& dy) const;
  ControlEval control(double t, const std::vector<double>& y) const;
  double vehicle_speed(int k, double t, const std::vector<double>& y) const;
  double vehicle_accel(int k, double t) const;
  std::vector<double> driver_commands(double t, const std::vector<double>& y) const;
  bool prescribed(int hv_index) const;
  void register_breakpoints();

  Scenario scenario_;
  Chain chain_;
  CbfParams cbf_;
  Controller controller_;
  SimOptions options_;
  ChainState state_;
  HistoryBuffer history_;
  std::size_t steps_ = 0;
  std::size_t floor_events_ = 0;
};

Trajectory simulate(const Scenario& scenario, const Chain& chain, const CbfParams& cbf,
                    Controller controller, SimOptions options = {});

}  // namespace ccc
