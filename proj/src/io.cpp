#include "ccc/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccc/errors.hpp"

namespace ccc {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string trajectory_header(std::size_t n_hv) {
  std::string h = "t,D0,v0,a0,u_nom,u_safe,u_app,h,h_e";
  for (std::size_t i = 1; i <= n_hv; ++i) {
    h += ",D" + std::to_string(i) + ",v" + std::to_string(i);
  }
  return h + ",v_head";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.rows.empty() ? 0 : traj.rows.front().hvs.size();
  out << trajectory_header(n) << '\n';
  for (const auto& r : traj.rows) {
    out << format_number(r.t) << ',' << format_number(r.D0) << ',' << format_number(r.v0) << ','
        << format_number(r.a0) << ',' << format_number(r.u_nom) << ',' << format_number(r.u_safe)
        << ',' << format_number(r.u_app) << ',' << format_number(r.h) << ','
        << format_number(r.h_e);
    for (const auto& hv : r.hvs) out << ',' << format_number(hv.D) << ',' << format_number(hv.v);
    out << ',' << format_number(r.v_head) << '\n';
  }
}

void write_chart_csv(std::ostream& out, const ChartGrid& grid) {
  out << "x,y,plant,string,safe,sup_gain\n";
  for (const auto& c : grid.cells) {
    out << format_number(c.x) << ',' << format_number(c.y) << ',' << int(c.plant) << ','
        << int(c.string) << ',' << int(c.safe) << ',' << format_number(c.sup_gain) << '\n';
  }
}

void write_boundaries_csv(std::ostream& out, Plane plane, const std::vector<Polyline>& curves) {
  out << "plane,param1,param2,x,y\n";
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      out << to_string(plane) << ',' << (p.param1 ? format_number(*p.param1) : "") << ','
          << (p.param2 ? format_number(*p.param2) : "") << ',' << format_number(p.x) << ','
          << format_number(p.y) << '\n';
    }
  }
}

namespace {

const char* cell_colour(const ChartCell& c) {
  if (c.safe) return "#4caf50";
  if (c.string) return "#90caf9";
  if (c.plant) return "#ef9a9a";
  return "#ffffff";
}

const char* curve_colour(const std::string& family) {
  if (family == "plant") return "#c62828";
  if (family == "safe") return "#1b5e20";
  return "#1565c0";
}

}  // namespace

std::string render_chart_svg(const ChartGrid& grid) {
  const ChartSpec& s = grid.spec;
  const double W = 600.0;
  const double H = 600.0;
  const double margin = 50.0;
  auto px = [&](double x) { return margin + (x - s.x_min) / (s.x_max - s.x_min) * W; };
  auto py = [&](double y) { return margin + H - (y - s.y_min) / (s.y_max - s.y_min) * H; };
  const double cw = W / static_cast<double>(s.nx - 1);
  const double ch = H / static_cast<double>(s.ny - 1);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * margin << "\" height=\""
      << H + 2 * margin << "\">\n";
  svg << "<defs><clipPath id=\"plot\"><rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << W << "\" height=\"" << H << "\"/></clipPath></defs>\n";
  svg << "<g clip-path=\"url(#plot)\" shape-rendering=\"crispEdges\">\n";
  for (const auto& c : grid.cells) {
    svg << "<rect x=\"" << px(c.x) - cw / 2 << "\" y=\"" << py(c.y) - ch / 2 << "\" width=\"" << cw
        << "\" height=\"" << ch << "\" fill=\"" << cell_colour(c) << "\"/>\n";
  }
  svg << "</g>\n<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (const auto& curve : grid.boundaries) {
    if (curve.points.size() < 2) continue;
    svg << "<polyline stroke=\"" << curve_colour(curve.family) << "\" points=\"";
    for (const auto& p : curve.points) svg << px(p.x) << ',' << py(p.y) << ' ';
    svg << "\"/>\n";
  }
  const bool ab1 = s.plane == Plane::A_B1;
  svg << "</g>\n<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << W << "\" height=\""
      << H << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << margin + W / 2 << "\" y=\"" << H + 1.7 * margin
      << "\" text-anchor=\"middle\">" << (ab1 ? "A [1/s]" : "B1 [1/s]") << "</text>\n";
  svg << "<text x=\"" << margin / 3 << "\" y=\"" << margin + H / 2 << "\" transform=\"rotate(-90 "
      << margin / 3 << ' ' << margin + H / 2 << ")\" text-anchor=\"middle\">"
      << (ab1 ? "B1 [1/s]" : "BN [1/s]") << "</text>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << H + 1.35 * margin << "\">" << format_number(s.x_min)
      << "</text><text x=\"" << margin + W << "\" y=\"" << H + 1.35 * margin
      << "\" text-anchor=\"end\">" << format_number(s.x_max) << "</text>\n";
  svg << "<text x=\"" << margin - 5 << "\" y=\"" << margin + H << "\" text-anchor=\"end\">"
      << format_number(s.y_min) << "</text><text x=\"" << margin - 5 << "\" y=\"" << margin + 10
      << "\" text-anchor=\"end\">" << format_number(s.y_max) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace ccc
