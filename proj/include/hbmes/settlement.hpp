#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "hbmes/devices.hpp"
#include "hbmes/dispatch.hpp"
#include "hbmes/params.hpp"
#include "hbmes/state.hpp"

namespace hbmes {

// Advance the plant one slot under a feasible action and settle all six cost
// terms. PV is must-take at its maximum; the grid absorbs any surplus at the
// selling price.
inline std::pair<EnvState, SlotSettlement> settle_slot(const EnvState& state,
                                                       const RepairedAction& action,
                                                       const ExogenousSlot& exo,
                                                       const SystemParams& p) {
  const double dt = p.delta_t;
  const std::size_t n = p.building_count();

  SlotSettlement s;
  s.p_pv = pv_output(exo.irradiance, p);

  const HessStep hess =
      hess_step(state.hess, action.p_el + action.p_fc, state.el_on, state.fc_on, p);
  s.q_fc = hess.q_fc;
  s.flags = hess.flags;

  const HeatDispatch heat = dispatch_heat(hess.q_fc, action.p_sp, state.cwt, p);
  s.p_gb = heat.p_gb;
  s.p_tc = heat.p_tc;
  s.p_td = heat.p_td;
  s.p_thermal = heat.p_thermal;
  s.p_sp_actual = heat.p_sp_actual;

  const BessStep bess = bess_step(state.bess, action.p_bc + action.p_bd, p);

  EnvState next = state;
  next.bess = bess.level;
  next.hess = hess.level;
  next.cwt = cwt_step(state.cwt, heat.p_tc, heat.p_td, p);
  next.el_on = hess.flags.el_on;
  next.fc_on = hess.flags.fc_on;
  next.t = state.t + 1;

  s.temp_dev.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dist = i < exo.disturbance.size() ? exo.disturbance[i] : 0.0;
    next.beta_in[i] = building_thermal_step(state.beta_in[i], exo.temp_out,
                                            heat.p_sp_actual[i], dist, p.buildings[i]);
    s.temp_dev[i] = std::max(0.0, next.beta_in[i] - p.buildings[i].beta_max) +
                    std::max(0.0, p.buildings[i].beta_min - next.beta_in[i]);
  }

  // Electric balance: grid covers whatever the local devices do not.
  s.p_g = hess.p_el + exo.load + bess.p_bc - s.p_pv + hess.p_fc + bess.p_bd;

  s.c1 = (s.p_g >= 0.0 ? exo.price_buy : p.tau_sell) * s.p_g * dt;
  s.c2 = p.mu_c * exo.emission * s.p_g * dt;
  s.c3 = p.psi_bess * (std::abs(bess.p_bc) + std::abs(bess.p_bd));
  s.c4 = p.delta_el_on * hess.flags.el_on + p.delta_el_su * hess.flags.el_su +
         p.delta_el_sd * hess.flags.el_sd + p.delta_fc_on * hess.flags.fc_on +
         p.delta_fc_su * hess.flags.fc_su + p.delta_fc_sd * hess.flags.fc_sd;
  s.c5 = p.psi_cwt * (std::abs(heat.p_tc) + std::abs(heat.p_td));
  s.c6 = exo.gas_price * heat.p_gb * dt / p.eta_gb;

  const double served =
      std::accumulate(s.p_sp_actual.begin(), s.p_sp_actual.end(), 0.0);
  s.xi = p.pi_fc *
         (hess.q_fc * p.eta_h2c -
          (heat.p_tc + heat.p_td + served - heat.p_gb * p.eta_h2c) * dt);

  return {std::move(next), std::move(s)};
}

}  // namespace hbmes
