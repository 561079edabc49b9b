#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ccc/safety.hpp"
#include "ccc/sim.hpp"

namespace ccc {

/// Shortest decimal that round-trips to the same double ("nan", "inf", "-inf" otherwise).
std::string format_number(double value);

std::string trajectory_header(std::size_t n_hv);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

void write_chart_csv(std::ostream& out, const ChartGrid& grid);

/// `plane,param1,param2,x,y`; parameter-free lines leave both parameters empty.
void write_boundaries_csv(std::ostream& out, Plane plane, const std::vector<Polyline>& curves);

/// Flat-colour cells (safe over string stable over plant stable) with boundary polylines.
std::string render_chart_svg(const ChartGrid& grid);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ccc
