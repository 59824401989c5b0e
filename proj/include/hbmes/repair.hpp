#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hbmes/action_space.hpp"
#include "hbmes/devices.hpp"
#include "hbmes/errors.hpp"
#include "hbmes/params.hpp"
#include "hbmes/state.hpp"

namespace hbmes {

// Discrete grid indices picked by the agents, before repair.
struct RawJointAction {
  std::size_t bess = 0;
  std::vector<std::size_t> thermal;
  std::size_t hess = 0;
};

// Turn signed power requests into a feasible action. Applied rules, in
// order:
//  - a building's cooling request is zeroed when its indoor temperature is
//    already at/below the comfort floor, or when the outdoor temperature is
//    at/below the configured threshold (upper bound as printed, lower bound
//    under MinVariant);
//  - storage requests are clipped to device ratings and to the charge or
//    discharge headroom of the current level (so storage bounds can never be
//    violated);
//  - with a PV surplus, charging is capped at the surplus and the battery is
//    filled before the electrolyzer; with a deficit, discharging is capped at
//    the deficit and the battery empties before the fuel cell.
// The map is idempotent: repairing an already-repaired action is a no-op.
inline RepairedAction repair_request(double bess_request,
                                     const std::vector<double>& thermal_request,
                                     double hess_request, const EnvState& state,
                                     const ExogenousSlot& exo, const SystemParams& p) {
  const std::size_t n = p.building_count();
  if (thermal_request.size() != n) {
    throw ConfigError("thermal request count does not match building count");
  }
  RepairedAction a;
  a.p_sp.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = p.buildings[i];
    const double outdoor_cutoff =
        p.thermostat_rule == ThermostatRule::AsPrinted ? b.beta_max : b.beta_min;
    if (state.beta_in[i] <= b.beta_min || exo.temp_out <= outdoor_cutoff) {
      a.p_sp[i] = 0.0;
    } else {
      a.p_sp[i] = std::clamp(thermal_request[i], 0.0, b.p_sp_max);
    }
  }

  const double pv = pv_output(exo.irradiance, p);
  const double surplus = pv - exo.load;

  if (bess_request > 0.0) {
    a.p_bc = std::min({bess_request, p.p_bc_max,
                       (p.b_max - state.bess) / (p.eta_bc * p.delta_t)});
    if (surplus > 0.0) a.p_bc = std::min(a.p_bc, surplus);
    a.p_bc = std::max(a.p_bc, 0.0);
  } else if (bess_request < 0.0) {
    a.p_bd = std::max({bess_request, -p.p_bd_max,
                       (p.b_min - state.bess) * p.eta_bd / p.delta_t});
    if (surplus < 0.0) a.p_bd = std::max(a.p_bd, surplus);
    a.p_bd = std::min(a.p_bd, 0.0);
  }

  if (hess_request > 0.0) {
    a.p_el = std::min({hess_request, p.p_el_max,
                       (p.h_max - state.hess) / (p.omega_el * p.delta_t)});
    if (surplus > 0.0) a.p_el = std::min(a.p_el, std::max(0.0, surplus - a.p_bc));
    a.p_el = std::max(a.p_el, 0.0);
  } else if (hess_request < 0.0) {
    a.p_fc = std::max({hess_request, -p.p_fc_max,
                       -state.hess * p.omega_fc / p.delta_t});
    if (surplus < 0.0) a.p_fc = std::max(a.p_fc, std::min(0.0, surplus - a.p_bd));
    a.p_fc = std::min(a.p_fc, 0.0);
  }
  return a;
}

inline RepairedAction repair_actions(const RawJointAction& raw, const ActionGrids& grids,
                                     const EnvState& state, const ExogenousSlot& exo,
                                     const SystemParams& p) {
  if (raw.bess >= grids.bess_levels.size() || raw.hess >= grids.hess_levels.size() ||
      raw.thermal.size() != grids.thermal_levels.size()) {
    throw ConfigError("raw action index outside grid");
  }
  std::vector<double> thermal(raw.thermal.size());
  for (std::size_t i = 0; i < raw.thermal.size(); ++i) {
    if (raw.thermal[i] >= grids.thermal_levels[i].size()) {
      throw ConfigError("raw thermal index outside grid");
    }
    thermal[i] = grids.thermal_levels[i][raw.thermal[i]];
  }
  return repair_request(grids.bess_levels[raw.bess], thermal,
                        grids.hess_levels[raw.hess], state, exo, p);
}

}  // namespace hbmes
