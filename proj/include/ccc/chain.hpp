#pragma once

#include <vector>

#include "ccc/models.hpp"

namespace ccc {

/// A CAV at the tail of `hvs.size()` human-driven vehicles, behind a head
/// vehicle with index n + 1. `hvs[i - 1]` drives vehicle i.
struct Chain {
  CavParams cav;
  std::vector<HvParams> hvs;

  int n() const { return static_cast<int>(hvs.size()); }
  int head_index() const { return n() + 1; }
  /// True when every HV shares the same parameters (enables closed-form boundaries).
  bool identical_hvs() const;
  void validate() const;
};

}  // namespace ccc
