#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace ccc {

/// Uniformly sampled past of several scalar channels (one per human driver),
/// used to evaluate delayed commands u_i(t - tau).
///
/// Sample m sits at time m * dt. Queries between samples use a four-point
/// cubic Lagrange stencil; queries on a sample return it exactly. Stencils never
/// straddle a breakpoint, where a channel may have a derivative jump. The
/// prefill time is a breakpoint of every channel.
class HistoryBuffer {
 public:
  /// `span` is the longest delay that will be queried.
  HistoryBuffer(std::size_t channels, double dt, double span);

  /// Fills the buffer with a constant past ending at step index `now_index`.
  void prefill(long now_index, std::span<const double> values);

  /// Appends the sample for the step after the latest one and drops samples
  /// older than the retained span.
  void push(std::span<const double> values);

  /// Marks a time at which `channel` may have a derivative jump.
  void add_breakpoint(std::size_t channel, double t);

  double value(std::size_t channel, double t) const;

  double earliest_time() const;
  double latest_time() const;
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::size_t channels_;
  double dt_;
  std::size_t capacity_;
  long first_index_ = 0;
  std::vector<std::vector<double>> breakpoints_;  // per channel, in sample units
  std::deque<std::vector<double>> samples_;
};

}  // namespace ccc
