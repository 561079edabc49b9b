#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <vector>

#include "ccc/chain.hpp"
#include "ccc/safety.hpp"
#include "ccc/sim.hpp"
#include "ccc/stability.hpp"

namespace ccc {

struct BoundarySpec {
  Plane plane = Plane::A_B1;
  double fixed = 0.03;
  /// Clip box for straight boundary lines; negative gains keep the plant lines in view.
  double x_min = -1.0, x_max = 1.5;
  double y_min = -1.0, y_max = 1.5;
  double omega_min = 1e-3;
  double omega_max = 10.0;
  std::size_t omega_points = 400;
  std::size_t K_count = 12;
  double Omega_max = 3.0;
  std::size_t Omega_points = 200;

  void validate() const;
};

/// Everything a CLI run needs, validated before any computation.
struct RunConfig {
  Chain chain;
  CbfParams cbf;
  SafetyEnvelope envelope;
  Scenario scenario;
  SimOptions sim_options;
  std::vector<Controller> variants{Controller::Nominal, Controller::Filtered};
  std::optional<std::filesystem::path> data_file;
  bool prescribe_hvs = false;
  /// Start from equilibrium at the head vehicle's initial measured speed.
  bool v_star_from_data = false;
  ChartSpec chart;
  BoundarySpec boundaries;
  std::filesystem::path output_dir = ".";
};

/// Reference parameters: CAV behind one driver, gains P, lag 0.2 s.
RunConfig default_config();

/// Parses `section.key = value` INI text over the defaults. Unknown sections or
/// keys raise ConfigError. Relative file paths resolve against `base_dir`.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Loads the speed data file, if any, into the scenario. Throws ParseError.
void resolve_data(RunConfig& cfg);

}  // namespace ccc
