// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "ccc/control.hpp"
#include "ccc/integrator.hpp"
#include "ccc/presets.hpp"
#include "ccc/safety.hpp"
#include "ccc/sim.hpp"
#include "ccc/stability.hpp"

using namespace ccc;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Chain reference_chain(presets::GainTriple gains, double xi, int n = 1) {
  Chain chain;
  chain.cav = presets::cav(gains, xi, n);
  chain.hvs.assign(static_cast<std::size_t>(n), presets::human_driver());
  return chain;
}

Scenario brake_resume(double dt = 0.01) {
  Scenario s;
  s.head = BrakeResume{20.0, presets::kSpeedPerturbation, presets::kAccelMin, presets::kAccelMax, 5.0};
  s.init = Equilibrium{20.0};
  s.t_final = 40.0;
  s.dt = dt;
  return s;
}

// ---------------------------------------------------------------------------

void critical_lag_value() {
  double xi_cr = 0.0;
  const double t = seconds([&] {
    for (int i = 0; i < 1000; ++i) xi_cr = critical_lag(presets::barrier(), {}, 0.6, 5.0);
  }) / 1000.0;
  const bool ok = std::abs(xi_cr - 0.3081) <= 1e-4 && t < 1e-3;
  report("1 critical-lag", ok, "xi_cr = " + num(xi_cr, 10) + " s (target 0.3081 +- 1e-4), " +
                                   num(t * 1e6, 3) + " us per call");
}

void point_classification() {
  const SafeBounds p = theorem3_bounds(presets::cav(presets::kSafeGains, 0.2, 1), presets::barrier(), {});
  const SafeBounds q = theorem3_bounds(presets::cav(presets::kUnsafeGains, 0.2, 1), presets::barrier(), {});
  const bool ok = std::abs(p.A_lower - 0.55) <= 1e-3 && std::abs(p.A_upper - 0.968) <= 1e-3 &&
                  p.contains(0.6) && !q.feasible && std::abs(q.A_lower - 3.49) <= 5e-3;
  report("2 point-classification", ok,
         "P: [" + num(p.A_lower) + ", " + num(p.A_upper) + "] contains 0.6 = " + (p.contains(0.6) ? "yes" : "no") +
             "; Q: A_lower = " + num(q.A_lower) + " > A_upper = " + num(q.A_upper));
}

void simulation_flags() {
  Trajectory p, q, f;
  const double tp = seconds([&] {
    p = simulate(brake_resume(), reference_chain(presets::kSafeGains, 0.2), presets::barrier(), Controller::Nominal);
  });
  const double tq = seconds([&] {
    q = simulate(brake_resume(), reference_chain(presets::kUnsafeGains, 0.2), presets::barrier(), Controller::Nominal);
  });
  const double tf = seconds([&] {
    f = simulate(brake_resume(), reference_chain(presets::kUnsafeGains, 0.2), presets::barrier(), Controller::Filtered);
  });
  const double slowest = std::max({tp, tq, tf});
  report("3a nominal-P", p.min_h() >= 0.0 && tp < 1.0,
         "min h = " + num(p.min_h()) + ", " + num(tp, 3) + " s");
  report("3b nominal-Q", q.min_h() < 0.0 && tq < 1.0,
         "min h = " + num(q.min_h()) + ", " + num(tq, 3) + " s");

  // Activity must start after the head stops braking, and the filter may only
  // cap commands that ask the CAV to speed up.
  const BrakeResume br = std::get<BrakeResume>(brake_resume().head);
  const auto span = f.filter_active_span();
  bool only_accelerating = true;
  for (const auto& r : f.rows) {
    if (r.filter_active && !(r.u_nom > 0.0)) only_accelerating = false;
  }
  const bool after_braking = span && span->first >= br.brake_end();
  const bool ok = f.min_h() >= -1e-3 && after_braking && only_accelerating && slowest < 1.0;
  std::string detail = "min h = " + num(f.min_h());
  if (span) {
    detail += ", filter active in [" + num(span->first, 4) + ", " + num(span->second, 4) + "] s";
  } else {
    detail += ", filter never active";
  }
  detail += "; head accelerates in [" + num(br.brake_end(), 4) + ", " + num(br.resume_end(), 4) +
            "] s; active only on accelerating commands = " + (only_accelerating ? "yes" : "no") + ", " +
            num(tf, 3) + " s";
  report("3c filtered-Q", ok, detail);
}

void filter_constraint() {
  const CbfParams c = presets::barrier();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> speed(0, 30), gap(1, 100), acc(-7, 3), lag(0.05, 1.0), nominal(-10, 10);
  double worst_constraint = 1e300;
  double worst_qp = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const CavState x{gap(rng), speed(rng), acc(rng), speed(rng), acc(rng)};
    const double xi = lag(rng);
    const double u_nom = nominal(rng);
    const FilterOutcome out = safety_filter(u_nom, x, c, xi);
    // Time derivative of h_e along the lag model, written from the definitions.
    const double h = c.kappa_sf * (x.D0 - c.D_sf) - x.v0;
    const double he = c.kappa_sf * (x.v1 - x.v0) - x.a0 + c.gamma * h;
    const double a0_dot = (out.u_applied - x.a0) / xi;
    const double he_dot = c.kappa_sf * (x.a1 - x.a0) - a0_dot + c.gamma * (c.kappa_sf * (x.v1 - x.v0) - x.a0);
    worst_constraint = std::min(worst_constraint, he_dot + c.gamma_e * he);
    const double Lf = c.kappa_sf * (x.a1 - x.a0) + x.a0 / xi + c.gamma * (c.kappa_sf * (x.v1 - x.v0) - x.a0);
    worst_qp = std::max(worst_qp, std::abs(qp_closed_form(u_nom, Lf, -1.0 / xi, c.gamma_e * he) - out.u_applied));
  }
  report("4 filter-constraint", worst_constraint >= -1e-9 && worst_qp <= 1e-9,
         "min (dh_e/dt + gamma_e h_e) = " + num(worst_constraint) + ", max |min-form - QP| = " + num(worst_qp) +
             " over 10000 states");
}

void stability_oracles() {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> gain(-1.0, 2.0), lag(0.0, 1.0);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    CavParams p;
    p.A = gain(rng);
    p.B[1] = gain(rng);
    p.phi = {2};
    p.B[2] = gain(rng);
    p.xi = lag(rng);
    const double psi = p.A + p.B[1] + p.B[2];
    Eigen::Matrix3d M;
    M << 0, 1, 0, 0, 0, 1, -p.A * p.kappa / p.xi, -psi / p.xi, -1.0 / p.xi;
    const auto eig = Eigen::EigenSolver<Eigen::Matrix3d>(M).eigenvalues();
    const bool hurwitz = eig.real().maxCoeff() < 0.0;
    if (hurwitz == plant_stable(p)) ++agree;
  }
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_real_distribution<double> positive(0.05, 1.5), delay(0.2, 1.2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Chain chain;
    const int n = count(rng);
    for (int j = 0; j < n; ++j) {
      HvParams h;
      h.A_h = positive(rng);
      h.B_h = positive(rng);
      h.kappa_h = positive(rng);
      h.tau = delay(rng);
      chain.hvs.push_back(h);
    }
    chain.cav.A = positive(rng);
    chain.cav.B[1] = positive(rng);
    chain.cav.xi = lag(rng);
    if (n > 0) {
      chain.cav.phi = {n + 1};
      chain.cav.B[n + 1] = positive(rng);
    }
    worst = std::max(worst, std::abs(std::abs(head_to_tail_G({0.0, 1e-12}, chain)) - 1.0));
  }
  report("5 stability-oracles", agree == 1000 && worst <= 1e-9,
         "Hurwitz vs eigenvalues " + std::to_string(agree) + "/1000 agree; max ||G(j0+)| - 1| = " + num(worst));
}

struct CurveCheck {
  std::size_t points = 0;
  double worst_gain = 0.0;
  double worst_phase = 0.0;
  std::size_t side_total = 0;
  std::size_t side_correct = 0;
  double worst_curve_rate = 1.0;
};

CurveCheck check_wave_curves(Plane plane, double fixed, const Chain& chain) {
  CurveCheck out;
  const auto omegas = logspace(1e-2, 10.0, 400);
  const double head = chain.head_index();
  for (int j = 1; j < 12; ++j) {
    const double K = 2.0 * std::numbers::pi * j / 12.0;
    const auto pts = string_boundary_wK(plane, fixed, chain, omegas, {K});
    std::vector<BoundaryPoint> in_view;
    for (const auto& p : pts) {
      if (p.x >= -0.5 && p.x <= 2.0 && p.y >= -0.5 && p.y <= 2.0) in_view.push_back(p);
    }
    auto gain_at = [&](double x, double y, double w) {
      Chain c = chain;
      c.cav = with_plane_gains(chain.cav, plane, x, y, fixed, static_cast<int>(head));
      return head_to_tail_G({0.0, w}, c);
    };
    for (const auto& p : pts) {
      const cplx G = gain_at(p.x, p.y, *p.param1);
      out.worst_gain = std::max(out.worst_gain, std::abs(std::abs(G) - 1.0));
      out.worst_phase = std::max(out.worst_phase, std::abs(std::remainder(std::arg(G) + K, 2.0 * std::numbers::pi)));
      ++out.points;
    }
    if (in_view.size() < 3) continue;
    // Up to 50 evenly spaced interior points; step off the curve along its normal.
    const std::size_t samples = std::min<std::size_t>(50, in_view.size() - 2);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t i = 1 + s * (in_view.size() - 2) / samples;
      const auto& a = in_view[i - 1];
      const auto& b = in_view[i + 1];
      double tx = b.x - a.x, ty = b.y - a.y;
      const double len = std::hypot(tx, ty);
      if (len == 0.0) continue;
      tx /= len;
      ty /= len;
      const double delta = 1e-3;
      const auto& p = in_view[i];
      const double w = *p.param1;
      const double g_plus = std::abs(gain_at(p.x - ty * delta, p.y + tx * delta, w));
      const double g_minus = std::abs(gain_at(p.x + ty * delta, p.y - tx * delta, w));
      if ((g_plus - 1.0) * (g_minus - 1.0) < 0.0) ++correct;
    }
    out.side_total += samples;
    out.side_correct += correct;
    out.worst_curve_rate = std::min(out.worst_curve_rate, static_cast<double>(correct) / static_cast<double>(samples));
  }
  return out;
}

std::size_t containment_violations(const ChartGrid& g) {
  std::size_t bad = 0;
  for (const auto& c : g.cells) {
    if (c.safe && !(c.plant && c.string)) ++bad;
  }
  return bad;
}

void boundary_consistency() {
  const Chain chain = reference_chain(presets::kSafeGains, 0.2);
  const CurveCheck ab = check_wave_curves(Plane::A_B1, 0.03, chain);
  const CurveCheck bb = check_wave_curves(Plane::B1_BN, 0.6, chain);
  const double worst_gain = std::max(ab.worst_gain, bb.worst_gain);
  const double worst_phase = std::max(ab.worst_phase, bb.worst_phase);
  const double worst_rate = std::min(ab.worst_curve_rate, bb.worst_curve_rate);
  report("6a wave-boundary points", worst_gain <= 1e-6 && worst_phase <= 1e-6 && ab.points > 0 && bb.points > 0,
         std::to_string(ab.points + bb.points) + " points, max ||G| - 1| = " + num(worst_gain) +
             ", max |arg G + K| = " + num(worst_phase));
  report("6b side-sampling", worst_rate >= 0.95,
         std::to_string(ab.side_correct + bb.side_correct) + "/" + std::to_string(ab.side_total + bb.side_total) +
             " sides correct, worst curve " + num(100.0 * worst_rate, 4) + "%");

  for (Plane plane : {Plane::A_B1, Plane::B1_BN}) {
    ChartSpec spec;
    spec.plane = plane;
    spec.fixed = plane == Plane::A_B1 ? 0.03 : 0.6;
    spec.x_max = 1.5;
    spec.y_max = plane == Plane::A_B1 ? 1.5 : 1.0;
    spec.nx = spec.ny = 200;
    ChartGrid g;
    const double t = seconds([&] { g = classify_chart(spec, chain, presets::barrier(), {}); });
    const std::size_t bad = containment_violations(g);
    report(std::string("6c containment ") + to_string(plane), bad == 0 && g.safe_count() > 0 && t < 30.0,
           std::to_string(g.safe_count()) + " safe cells, " + std::to_string(bad) + " outside the stable region, " +
               num(t, 3) + " s with " + std::to_string(std::max(1u, std::thread::hardware_concurrency())) +
               " hardware threads");
  }
}

ChartSpec shrink_chart() {
  ChartSpec spec;
  spec.plane = Plane::A_B1;
  spec.fixed = 0.0;
  spec.x_max = 1.5;
  spec.y_max = 1.5;
  spec.nx = spec.ny = 200;
  spec.frequencies.points = 100;
  spec.frequencies.refine = false;
  return spec;
}

void region_shrinkage() {
  // Speed feedback from the vehicle ahead only.
  std::vector<std::size_t> by_lag;
  for (double xi : {0.0, 0.15, 0.2, 0.25}) {
    by_lag.push_back(classify_chart(shrink_chart(), reference_chain(presets::kSafeGains, xi, 0), presets::barrier(), {})
                         .safe_count());
  }
  bool strict = true;
  for (std::size_t i = 1; i < by_lag.size(); ++i) strict &= by_lag[i] < by_lag[i - 1];
  std::vector<std::size_t> by_speed;
  for (double v : {5.0, 10.0, 15.0, 25.0}) {
    SafetyEnvelope env;
    env.v_bar = v;
    by_speed.push_back(classify_chart(shrink_chart(), reference_chain(presets::kSafeGains, 0.2, 0), presets::barrier(), env)
                           .safe_count());
  }
  bool nonincreasing = true;
  for (std::size_t i = 1; i < by_speed.size(); ++i) nonincreasing &= by_speed[i] <= by_speed[i - 1];
  std::size_t above = 0;
  for (Plane plane : {Plane::A_B1, Plane::B1_BN}) {
    ChartSpec spec = shrink_chart();
    spec.plane = plane;
    spec.fixed = plane == Plane::A_B1 ? 0.03 : 0.6;
    above += classify_chart(spec, reference_chain(presets::kSafeGains, 0.31), presets::barrier(), {}).safe_count();
  }
  auto list = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t x : v) s += (s.empty() ? "" : ", ") + std::to_string(x);
    return s;
  };
  report("7 region-shrinkage", strict && nonincreasing && above == 0,
         "safe cells by lag {0, 0.15, 0.2, 0.25}: " + list(by_lag) + "; by v_bar {5, 10, 15, 25}: " + list(by_speed) +
             "; at lag 0.31: " + std::to_string(above));
}

void integrator_convergence() {
  auto run = [](double dt) {
    Scenario s = brake_resume(dt);
    s.t_final = 4.0;  // the head brakes at 5 s
    s.init = ExplicitStart{30.0, 17.0, 0.5, {{35.0, 21.0}}};
    return simulate(s, reference_chain(presets::kSafeGains, 0.2), presets::barrier(), Controller::Nominal);
  };
  const Trajectory a = run(0.02), b = run(0.01), c = run(0.005);
  auto diff = [](const Trajectory& coarse, const Trajectory& fine) {
    double e = 0.0;
    for (std::size_t i = 0; i < coarse.rows.size(); ++i) {
      const auto& r = coarse.rows[i];
      const auto& q = fine.rows[2 * i];
      e = std::max({e, std::abs(r.D0 - q.D0), std::abs(r.v0 - q.v0), std::abs(r.a0 - q.a0),
                    std::abs(r.hvs[0].D - q.hvs[0].D), std::abs(r.hvs[0].v - q.hvs[0].v)});
    }
    return e;
  };
  const double order = std::log2(diff(a, b) / diff(b, c));

  // Unit step into the lag model at dt = xi / 100, and at the default step for reference.
  const double xi = 0.2;
  auto lag_error = [xi](double dt) {
    std::vector<double> y{0.0};
    auto f = [xi](double, const std::vector<double>& s, std::vector<double>& ds) {
      ds[0] = *cav_derivatives({0.0, 0.0, s[0], 0.0, 0.0}, 1.0, xi).da0;
    };
    double err = 0.0;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int m = 1; m <= steps; ++m) {
      y = rk4_step(f, (m - 1) * dt, y, dt);
      err = std::max(err, std::abs(y[0] - (1.0 - std::exp(-m * dt / xi))));
    }
    return err;
  };
  const double lag_err = lag_error(xi / 100.0);
  report("8 integrator-convergence", order >= 3.5 && lag_err <= 1e-8,
         "self-convergence order = " + num(order, 4) + ", lag step response error = " + num(lag_err) +
             " at dt = xi/100 (" + num(lag_error(0.01)) + " at dt = 0.01)");
}

void lag_comparison() {
  const double dt = 1e-4;
  Trajectory slow, fast;
  slow = simulate(brake_resume(dt), reference_chain(presets::kUnsafeGains, 1.0), presets::barrier(), Controller::Filtered);
  fast = simulate(brake_resume(dt), reference_chain(presets::kUnsafeGains, 1e-3), presets::barrier(), Controller::Filtered);
  const bool ok = slow.min_D0() >= fast.min_D0() && slow.filter_active_duration() <= fast.filter_active_duration();
  report("9 lag-comparison", ok,
         "min D0 " + num(slow.min_D0()) + " m (lag 1 s) vs " + num(fast.min_D0()) + " m (lag 1e-3 s); active " +
             num(slow.filter_active_duration(), 4) + " s vs " + num(fast.filter_active_duration(), 4) + " s");
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows.size(), b.rows.size()); ++i) {
    const auto& r = a.rows[i];
    const auto& q = b.rows[i];
    e = std::max({e, std::abs(r.D0 - q.D0), std::abs(r.v0 - q.v0), std::abs(r.a0 - q.a0)});
    for (std::size_t k = 0; k < r.hvs.size(); ++k) {
      e = std::max({e, std::abs(r.hvs[k].D - q.hvs[k].D), std::abs(r.hvs[k].v - q.hvs[k].v)});
    }
  }
  return e;
}

// Max state difference between the analytic profile and its 10 Hz CSV replay.
double replay_distance(const BrakeResume& br, const presets::GainTriple& gains, Controller controller) {
  const auto path = std::filesystem::temp_directory_path() / "ccc_acceptance_head_10hz.csv";
  {
    std::ofstream out(path);
    out << "t,v_head\n";
    char line[64];
    for (int m = 0; m <= 400; ++m) {
      const double t = 0.1 * m;
      std::snprintf(line, sizeof line, "%.1f,%.17g\n", t, head_profile_eval(HeadProfile{br}, t).v);
      out << line;
    }
  }
  const Chain chain = reference_chain(gains, 0.2);
  Scenario s = brake_resume();
  s.head = br;
  const Trajectory analytic = simulate(s, chain, presets::barrier(), controller);
  s.head = load_speed_csv(path, s.dt);
  return trajectory_distance(analytic, simulate(s, chain, presets::barrier(), controller));
}

void data_driven_substitute() {
  // A 10 Hz replay only represents the profile exactly when its corners fall on
  // the sample grid. Braking at 7.5 m/s^2 puts them at 5, 7 and 12 s.
  const BrakeResume aligned{20.0, 15.0, 7.5, 3.0, 5.0};
  const BrakeResume table = std::get<BrakeResume>(brake_resume().head);
  double worst = 0.0;
  std::string detail;
  for (auto [gains, controller] : {std::pair{presets::kSafeGains, Controller::Nominal},
                                   std::pair{presets::kUnsafeGains, Controller::Filtered}}) {
    const double e = replay_distance(aligned, gains, controller);
    worst = std::max(worst, e);
    detail += std::string(detail.empty() ? "" : ", ") + to_string(controller) + " " + num(e);
  }
  const double off_grid = replay_distance(table, presets::kUnsafeGains, Controller::Filtered);
  report("data-driven substitute", worst <= 1e-3,
         "sup-norm state difference, grid-aligned brake-resume: " + detail +
             "; with braking at 7 m/s^2 the 10 Hz samples miss the corner at " + num(table.brake_end(), 5) +
             " s and the difference is " + num(off_grid) + " (not gated)");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{critical_lag_value, point_classification, simulation_flags,
                                                    filter_constraint,  stability_oracles,    boundary_consistency,
                                                    region_shrinkage,   integrator_convergence, lag_comparison,
                                                    data_driven_substitute};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report("criterion raised", false, e.what());
    }
  }
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
