#include "ccc/chain.hpp"

#include <algorithm>
#include <string>

#include "ccc/errors.hpp"

namespace ccc {

bool Chain::identical_hvs() const {
  return std::all_of(hvs.begin(), hvs.end(), [&](const HvParams& p) {
    const HvParams& q = hvs.front();
    return p.A_h == q.A_h && p.B_h == q.B_h && p.kappa_h == q.kappa_h && p.tau == q.tau &&
           p.D_st == q.D_st && p.v_max == q.v_max;
  });
}

void Chain::validate() const {
  cav.validate();
  for (const HvParams& hv : hvs) hv.validate();
  for (int k : cav.phi) {
    if (k > head_index()) {
      throw ConfigError("connected vehicle " + std::to_string(k) + " is beyond the head vehicle " +
                        std::to_string(head_index()));
    }
  }
}

}  // namespace ccc
