#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "ccc/errors.hpp"
#include "ccc/sim.hpp"

namespace ccc {

double SpeedProfile::duration() const {
  return v.empty() ? 0.0 : dt * static_cast<double>(v.size() - 1);
}

namespace {

/// Grid segment index and fractional position for time t.
std::pair<std::size_t, double> locate(const SpeedProfile& p, double t) {
  if (p.v.size() < 2) throw ConfigError("speed profile needs at least two samples");
  if (t < -1e-12 || t > p.duration() * (1.0 + 1e-12) + 1e-12) {
    throw ConfigError("speed profile queried at t=" + std::to_string(t) + " beyond its duration " +
                      std::to_string(p.duration()));
  }
  const double pos = std::max(0.0, t / p.dt);
  auto j = static_cast<std::size_t>(std::floor(pos));
  j = std::min(j, p.v.size() - 2);
  return {j, pos - static_cast<double>(j)};
}

}  // namespace

double SpeedProfile::speed(double t) const {
  auto [j, w] = locate(*this, t);
  return (1.0 - w) * v[j] + w * v[j + 1];
}

double SpeedProfile::accel(double t) const {
  auto [j, w] = locate(*this, t);
  (void)w;
  return (v[j + 1] - v[j]) / dt;
}

ProfileSample head_profile_eval(const HeadProfile& profile, double t) {
  if (const auto* br = std::get_if<BrakeResume>(&profile)) {
    if (t < br->t_start) return {br->v_eq, 0.0};
    if (t < br->brake_end()) return {br->v_eq - br->a_brake * (t - br->t_start), -br->a_brake};
    if (t < br->resume_end()) {
      return {br->v_eq - br->v_pert + br->a_resume * (t - br->brake_end()), br->a_resume};
    }
    return {br->v_eq, 0.0};
  }
  const auto& data = std::get<DataDriven>(profile);
  return {data.head.speed(t), data.head.accel(t)};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ": column '" + column + "' is not a number: '" +
                         std::string(field) + "'",
                     row);
  }
  return value;
}

SpeedProfile resample(const std::vector<double>& t, const std::vector<double>& v, double dt) {
  SpeedProfile out;
  out.dt = dt;
  const double span = t.back() - t.front();
  const auto count = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;
  out.v.reserve(count);
  std::size_t j = 0;
  for (std::size_t m = 0; m < count; ++m) {
    const double tm = t.front() + static_cast<double>(m) * dt;
    while (j + 2 < t.size() && t[j + 1] <= tm) ++j;
    const double w = std::clamp((tm - t[j]) / (t[j + 1] - t[j]), 0.0, 1.0);
    out.v.push_back((1.0 - w) * v[j] + w * v[j + 1]);
  }
  return out;
}

}  // namespace

DataDriven load_speed_csv(const std::filesystem::path& path, double dt) {
  if (!(dt > 0.0)) throw ConfigError("resampling step must be positive");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open speed profile '" + path.string() + "'", 0);

  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    for (auto f : split(line)) header.emplace_back(f);
  }
  if (header.size() < 2 || header[0] != "t" || header[1] != "v_head") {
    throw ParseError("row " + std::to_string(row) + ": header must start with 't,v_head'", row);
  }
  for (std::size_t c = 2; c < header.size(); ++c) {
    const std::string expected = "v_hv" + std::to_string(c - 1);
    if (header[c] != expected) {
      throw ParseError("row " + std::to_string(row) + ": expected column '" + expected + "', got '" +
                           header[c] + "'",
                       row);
    }
  }

  std::vector<double> times;
  std::vector<std::vector<double>> speeds(header.size() - 1);
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " columns, got " +
                           std::to_string(fields.size()),
                       row);
    }
    const double t = parse_number(fields[0], row, header[0]);
    if (!times.empty() && !(t > times.back())) {
      throw ParseError("row " + std::to_string(row) + ": time is not strictly increasing", row);
    }
    times.push_back(t);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], row, header[c]);
      if (v < 0.0) {
        throw ParseError("row " + std::to_string(row) + ": negative speed in '" + header[c] + "'",
                         row);
      }
      speeds[c - 1].push_back(v);
    }
  }
  if (times.size() < 2) throw ParseError("speed profile needs at least two data rows", row);

  DataDriven out;
  out.head = resample(times, speeds[0], dt);
  for (std::size_t c = 1; c < speeds.size(); ++c) out.hvs.push_back(resample(times, speeds[c], dt));
  return out;
}

}  // namespace ccc
