// Command-line front end: simulate, chart, critical-lag, boundaries.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <tuple>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccc/config.hpp"
#include "ccc/errors.hpp"
#include "ccc/io.hpp"
#include "ccc/safety.hpp"
#include "ccc/sim.hpp"
#include "ccc/stability.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFault = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config;
  std::string out;
};

ccc::RunConfig load(const CommonArgs& args) {
  ccc::RunConfig cfg = args.config.empty() ? ccc::default_config() : ccc::load_config(args.config);
  if (const char* dir = std::getenv("CCC_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    cfg.output_dir = dir;
  }
  return cfg;
}

fs::path output_path(const ccc::RunConfig& cfg, const std::string& out, const std::string& fallback) {
  return out.empty() ? cfg.output_dir / fallback : fs::path(out);
}

std::pair<std::size_t, std::size_t> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  std::size_t nx = 0;
  std::size_t ny = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument("missing x");
    std::size_t used = 0;
    nx = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing");
    ny = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ccc::ConfigError("--resolution must look like NxM, got '" + text + "'");
  }
  return {nx, ny};
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  CommonArgs common;
  std::string variant;
  double dt = 0.0;
  double t_final = 0.0;
};

int cmd_simulate(const SimulateArgs& a) {
  ccc::RunConfig cfg = load(a.common);
  if (a.dt > 0.0) cfg.scenario.dt = a.dt;
  if (a.t_final > 0.0) cfg.scenario.t_final = a.t_final;
  if (a.dt > 0.0 && cfg.data_file) ccc::resolve_data(cfg);
  std::vector<ccc::Controller> variants = cfg.variants;
  if (!a.variant.empty()) variants = {ccc::controller_from_string(a.variant)};
  cfg.scenario.validate(cfg.chain);

  const fs::path dir = a.common.out.empty() ? cfg.output_dir : fs::path(a.common.out);
  for (ccc::Controller c : variants) {
    const ccc::Trajectory traj = ccc::simulate(cfg.scenario, cfg.chain, cfg.cbf, c, cfg.sim_options);
    std::ostringstream csv;
    ccc::write_trajectory_csv(csv, traj);
    const fs::path file = dir / ("trajectory_" + std::string(ccc::to_string(c)) + ".csv");
    ccc::write_file(file, csv.str());
    std::cout << "variant " << ccc::to_string(c) << ": min h = " << fmt4(traj.min_h())
              << ", min D0 = " << fmt4(traj.min_D0()) << " m"
              << ", filter active = " << fmt4(traj.filter_active_duration()) << " s";
    if (traj.speed_floor_events > 0) std::cout << ", speed floor hits = " << traj.speed_floor_events;
    std::cout << " -> " << file.string() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ChartArgs {
  CommonArgs common;
  std::string plane;
  std::string resolution;
  bool svg = false;
};

int cmd_chart(const ChartArgs& a) {
  ccc::RunConfig cfg = load(a.common);
  ccc::ChartSpec spec = cfg.chart;
  if (!a.plane.empty()) spec.plane = ccc::plane_from_string(a.plane);
  if (!a.resolution.empty()) std::tie(spec.nx, spec.ny) = parse_resolution(a.resolution);
  spec.validate();

  const auto start = std::chrono::steady_clock::now();
  const ccc::ChartGrid grid = ccc::classify_chart(spec, cfg.chain, cfg.cbf, cfg.envelope);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string stem = std::string("chart_") + ccc::to_string(spec.plane);
  const fs::path csv_path = output_path(cfg, a.common.out, stem + ".csv");
  std::ostringstream csv;
  ccc::write_chart_csv(csv, grid);
  ccc::write_file(csv_path, csv.str());

  fs::path base = csv_path;
  base.replace_extension();
  std::ostringstream bcsv;
  ccc::write_boundaries_csv(bcsv, spec.plane, grid.boundaries);
  ccc::write_file(base.string() + "_boundaries.csv", bcsv.str());

  nlohmann::ordered_json meta;
  meta["plane"] = ccc::to_string(spec.plane);
  meta["fixed_gain"] = spec.fixed;
  meta["nx"] = spec.nx;
  meta["ny"] = spec.ny;
  meta["xi"] = cfg.chain.cav.xi;
  meta["lag_free_limit"] = grid.lag_free_limit;
  meta["v_bar"] = cfg.envelope.v_bar;
  meta["safe_cells"] = grid.safe_count();
  ccc::write_file(base.string() + ".meta.json", meta.dump(2) + "\n");

  if (a.svg) ccc::write_file(base.string() + ".svg", ccc::render_chart_svg(grid));

  std::cout << "chart " << ccc::to_string(spec.plane) << ' ' << spec.nx << 'x' << spec.ny << ": "
            << grid.safe_count() << " safe cells";
  if (grid.lag_free_limit) std::cout << " (lag-free limit of the bounds)";
  std::cout << ", " << fmt4(secs) << " s -> " << csv_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CriticalLagArgs {
  CommonArgs common;
  bool sweep = false;
};

int cmd_critical_lag(const CriticalLagArgs& a) {
  const ccc::RunConfig cfg = load(a.common);
  const auto& cav = cfg.chain.cav;
  const double xi_cr = ccc::critical_lag(cfg.cbf, cfg.envelope, cav.kappa, cav.D_st);
  std::cout << "xi_cr = " << fmt4(xi_cr) << " s\n";
  std::cout << "xi_cr_s=" << ccc::format_number(xi_cr) << '\n';
  if (a.sweep) {
    std::cout << "D_st,kappa_margin,xi_cr\n";
    for (int i = 1; i <= 10; ++i) {
      const double D_st = cfg.cbf.D_sf + static_cast<double>(i);
      const double xi = ccc::critical_lag(cfg.cbf, cfg.envelope, cav.kappa, D_st);
      std::cout << ccc::format_number(D_st) << ',' << ccc::format_number(cav.kappa * (D_st - cfg.cbf.D_sf))
                << ',' << ccc::format_number(xi) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BoundariesArgs {
  CommonArgs common;
  std::string type = "string-wK";
  std::string plane;
};

int cmd_boundaries(const BoundariesArgs& a) {
  ccc::RunConfig cfg = load(a.common);
  ccc::BoundarySpec b = cfg.boundaries;
  if (!a.plane.empty()) b.plane = ccc::plane_from_string(a.plane);
  b.validate();

  std::vector<ccc::Polyline> curves;
  auto add_lines = [&](const std::vector<ccc::Line>& lines, const std::string& family) {
    for (const auto& line : lines) {
      auto pts = ccc::clip_line(line, b.x_min, b.x_max, b.y_min, b.y_max);
      if (!pts.empty()) curves.push_back({family, std::nullopt, pts});
    }
  };
  if (a.type == "plant") {
    const auto pb = ccc::plant_boundary(b.plane, b.fixed, cfg.chain,
                                        ccc::linspace(0.0, b.Omega_max, b.Omega_points));
    if (!pb.curve.empty()) curves.push_back({"plant", std::nullopt, pb.curve});
    add_lines(pb.lines, "plant");
  } else if (a.type == "string-w0") {
    add_lines(ccc::string_boundary_w0(b.plane, b.fixed, cfg.chain), "string-w0");
  } else if (a.type == "string-wK") {
    const auto omegas = ccc::logspace(b.omega_min, b.omega_max, b.omega_points);
    for (std::size_t j = 0; j < b.K_count; ++j) {
      const double K = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(b.K_count);
      curves.push_back({"string-wK", K, ccc::string_boundary_wK(b.plane, b.fixed, cfg.chain, omegas, {K})});
    }
  } else {
    throw ccc::ConfigError("--type must be plant, string-w0 or string-wK");
  }

  const fs::path path = output_path(cfg, a.common.out, "boundaries_" + a.type + ".csv");
  std::ostringstream csv;
  ccc::write_boundaries_csv(csv, b.plane, curves);
  ccc::write_file(path, csv.str());
  std::size_t points = 0;
  for (const auto& c : curves) points += c.points.size();
  std::cout << a.type << " boundaries (" << ccc::to_string(b.plane) << "): " << curves.size()
            << " curves, " << points << " points -> " << path.string() << '\n';
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "INI configuration file (defaults to the reference set)");
  cmd->add_option("--out", args.out, "Output file (directory for simulate)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connected cruise control simulation and gain-chart toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the closed-loop chain and write trajectories");
  add_common(simulate, sim.common);
  simulate->add_option("--variant", sim.variant, "nominal | nominal-accel | filtered")
      ->check(CLI::IsMember({"nominal", "nominal-accel", "filtered"}));
  simulate->add_option("--dt", sim.dt, "Override the integration step [s]");
  simulate->add_option("--t-final", sim.t_final, "Override the simulated horizon [s]");

  ChartArgs chart;
  auto* chart_cmd = app.add_subcommand("chart", "Classify a gain plane (stability and safety)");
  add_common(chart_cmd, chart.common);
  chart_cmd->add_option("--plane", chart.plane, "A-B1 | B1-BN")->check(CLI::IsMember({"A-B1", "B1-BN"}));
  chart_cmd->add_option("--resolution", chart.resolution, "Grid size NxM");
  chart_cmd->add_flag("--svg", chart.svg, "Also render an SVG chart");

  CriticalLagArgs lag;
  auto* lag_cmd = app.add_subcommand("critical-lag", "Largest lag admitting safe gains");
  add_common(lag_cmd, lag.common);
  lag_cmd->add_flag("--sweep", lag.sweep, "Print the critical lag over a standstill-distance sweep");

  BoundariesArgs bnd;
  auto* bnd_cmd = app.add_subcommand("boundaries", "Export analytic stability boundaries");
  add_common(bnd_cmd, bnd.common);
  bnd_cmd->add_option("--type", bnd.type, "plant | string-w0 | string-wK")
      ->check(CLI::IsMember({"plant", "string-w0", "string-wK"}));
  bnd_cmd->add_option("--plane", bnd.plane, "A-B1 | B1-BN")->check(CLI::IsMember({"A-B1", "B1-BN"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*chart_cmd) return cmd_chart(chart);
    if (*lag_cmd) return cmd_critical_lag(lag);
    if (*bnd_cmd) return cmd_boundaries(bnd);
  } catch (const ccc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ccc::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ccc::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ccc::DomainError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ccc::PoleError& e) {
    std::cerr << "computation fault: " << e.what() << '\n';
    return kExitFault;
  } catch (const ccc::IntegrationFault& e) {
    std::cerr << "computation fault: " << e.what() << '\n';
    return kExitFault;
  } catch (const std::exception& e) {
    std::cerr << "computation fault: " << e.what() << '\n';
    return kExitFault;
  }
  return kExitOk;
}
