#include "ccc/history.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "ccc/errors.hpp"

namespace ccc {

HistoryBuffer::HistoryBuffer(std::size_t channels, double dt, double span)
    : channels_(channels),
      dt_(dt),
      capacity_(static_cast<std::size_t>(std::ceil(span / dt)) + 6),
      breakpoints_(channels) {
  if (!(dt > 0.0) || !(span >= 0.0)) throw ConfigError("history needs dt > 0 and span >= 0");
}

void HistoryBuffer::prefill(long now_index, std::span<const double> values) {
  if (values.size() != channels_) throw ConfigError("history prefill has wrong channel count");
  samples_.assign(capacity_, std::vector<double>(values.begin(), values.end()));
  first_index_ = now_index - static_cast<long>(capacity_) + 1;
  for (auto& b : breakpoints_) b.assign(1, static_cast<double>(now_index));
}

void HistoryBuffer::add_breakpoint(std::size_t channel, double t) {
  if (channel >= channels_) throw ConfigError("history breakpoint on a missing channel");
  auto& b = breakpoints_[channel];
  b.insert(std::upper_bound(b.begin(), b.end(), t / dt_), t / dt_);
}

void HistoryBuffer::push(std::span<const double> values) {
  if (values.size() != channels_) throw ConfigError("history sample has wrong channel count");
  samples_.emplace_back(values.begin(), values.end());
  while (samples_.size() > capacity_) {
    samples_.pop_front();
    ++first_index_;
  }
}

double HistoryBuffer::earliest_time() const { return static_cast<double>(first_index_) * dt_; }

double HistoryBuffer::latest_time() const {
  return static_cast<double>(first_index_ + static_cast<long>(samples_.size()) - 1) * dt_;
}

double HistoryBuffer::value(std::size_t channel, double t) const {
  if (samples_.empty()) throw ConfigError("history queried before prefill");
  const double pos = t / dt_ - static_cast<double>(first_index_);
  const double last = static_cast<double>(samples_.size() - 1);
  if (pos < -1e-9 || pos > last + 1e-9) {
    throw ConfigError("history query at t=" + std::to_string(t) + " outside retained window [" +
                      std::to_string(earliest_time()) + ", " + std::to_string(latest_time()) + "]");
  }
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) {
    return samples_[static_cast<std::size_t>(nearest)][channel];
  }
  // Admissible sample range [lo, hi] on the query's side of every breakpoint.
  const auto below = static_cast<long>(std::floor(pos));
  long lo = 0;
  long hi = static_cast<long>(samples_.size()) - 1;
  const auto& bps = breakpoints_[channel];
  const double abs_pos = pos + static_cast<double>(first_index_);
  const auto next = std::upper_bound(bps.begin(), bps.end(), abs_pos);
  if (next != bps.end()) {
    hi = std::min(hi, static_cast<long>(std::floor(*next + 1e-9)) - first_index_);
  }
  if (next != bps.begin()) {
    lo = std::max(lo, static_cast<long>(std::ceil(*std::prev(next) - 1e-9)) - first_index_);
  }
  if (hi - lo < 3) {
    const auto j = static_cast<std::size_t>(std::clamp(below, lo, std::max(lo, hi - 1)));
    if (static_cast<long>(j) + 1 > hi) return samples_[j][channel];
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * samples_[j][channel] + w * samples_[j + 1][channel];
  }
  const long j0 = std::clamp(below - 1, lo, hi - 3);
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double weight = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      weight *= (pos - static_cast<double>(j0 + b)) / static_cast<double>(a - b);
    }
    result += weight * samples_[static_cast<std::size_t>(j0 + a)][channel];
  }
  return result;
}

}  // namespace ccc
