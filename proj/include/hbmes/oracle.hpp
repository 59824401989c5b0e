#pragma once

#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "hbmes/action_space.hpp"
#include "hbmes/repair.hpp"
#include "hbmes/settlement.hpp"

namespace hbmes {

struct OracleResult {
  double objective = 0.0;  // sum over slots of all costs + pi_th * deviations
  double cost = 0.0;       // sum of C1..C6 only
  std::vector<RawJointAction> actions;
};

namespace detail {

struct OracleSearch {
  const std::vector<ExogenousSlot>* horizon;
  const ActionGrids* grids;
  const SystemParams* params;
  std::size_t joint_count = 0;
  double best_objective = std::numeric_limits<double>::infinity();
  double best_cost = 0.0;
  std::vector<std::size_t> current;
  std::vector<std::size_t> best;

  RawJointAction decode(std::size_t code) const {
    RawJointAction raw;
    raw.hess = code % grids->hess_levels.size();
    code /= grids->hess_levels.size();
    for (const auto& levels : grids->thermal_levels) {
      raw.thermal.push_back(code % levels.size());
      code /= levels.size();
    }
    raw.bess = code;
    return raw;
  }

  // No branch pruning: per-slot costs can be negative (electricity sales),
  // so a worse prefix may still win.
  void dfs(std::size_t depth, const EnvState& state, double objective, double cost) {
    if (depth == horizon->size()) {
      if (objective >= best_objective) return;
      best_objective = objective;
      best_cost = cost;
      best = current;
      return;
    }
    for (std::size_t code = 0; code < joint_count; ++code) {
      const RawJointAction raw = decode(code);
      const RepairedAction action =
          repair_actions(raw, *grids, state, (*horizon)[depth], *params);
      auto [next, s] = settle_slot(state, action, (*horizon)[depth], *params);
      const double dev =
          std::accumulate(s.temp_dev.begin(), s.temp_dev.end(), 0.0);
      current[depth] = code;
      dfs(depth + 1, next, objective + s.cost_total() + params->pi_th * dev,
          cost + s.cost_total());
    }
  }
};

}  // namespace detail

// Enumerate every joint discrete action sequence over a short horizon,
// repair and settle each, and return the cheapest. Exact within the grid;
// refuses search spaces above `ceiling` sequences.
inline OracleResult exhaustive_oracle(const EnvState& initial,
                                      const std::vector<ExogenousSlot>& horizon,
                                      const ActionGrids& grids, const SystemParams& p,
                                      std::size_t ceiling = 2000000) {
  if (horizon.empty()) throw ConfigError("oracle horizon must have at least one slot");
  double joint = static_cast<double>(grids.bess_levels.size()) *
                 static_cast<double>(grids.hess_levels.size());
  for (const auto& levels : grids.thermal_levels) {
    joint *= static_cast<double>(levels.size());
  }
  double sequences = 1.0;
  for (std::size_t d = 0; d < horizon.size(); ++d) {
    sequences *= joint;
    if (sequences > static_cast<double>(ceiling)) {
      throw ConfigError("oracle search space exceeds ceiling of " +
                        std::to_string(ceiling) + " sequences");
    }
  }

  detail::OracleSearch search;
  search.horizon = &horizon;
  search.grids = &grids;
  search.params = &p;
  search.joint_count = static_cast<std::size_t>(joint);
  search.current.assign(horizon.size(), 0);
  search.dfs(0, initial, 0.0, 0.0);

  OracleResult out;
  out.objective = search.best_objective;
  out.cost = search.best_cost;
  for (std::size_t code : search.best) out.actions.push_back(search.decode(code));
  return out;
}

}  // namespace hbmes
