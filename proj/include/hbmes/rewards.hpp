#pragma once

#include <numeric>
#include <vector>

#include "hbmes/params.hpp"
#include "hbmes/state.hpp"

namespace hbmes {

// Per-agent rewards for one settled slot. Common costs are shared: the
// electricity and carbon terms split evenly between the battery and hydrogen
// agents, the heat-side terms split across the J thermal agents plus the
// hydrogen agent.
struct RewardVector {
  double bess = 0.0;
  std::vector<double> thermal;
  double hess = 0.0;

  double total() const {
    return bess + hess + std::accumulate(thermal.begin(), thermal.end(), 0.0);
  }
};

inline RewardVector rewards(const SlotSettlement& s, const SystemParams& p) {
  const double j = static_cast<double>(p.building_count());
  const double common_e = (s.c1 + s.c2) / 2.0;
  const double common_h = (s.c5 + s.c6) / (j + 1.0);
  RewardVector r;
  r.bess = -(common_e + s.c3);
  r.thermal.reserve(s.temp_dev.size());
  for (double dev : s.temp_dev) r.thermal.push_back(-(common_h + p.pi_th * dev));
  r.hess = -(common_e + s.c4 + common_h + s.xi);
  return r;
}

}  // namespace hbmes
