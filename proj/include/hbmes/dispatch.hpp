#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "hbmes/errors.hpp"
#include "hbmes/params.hpp"

namespace hbmes {

struct HeatDispatch {
  double p_gb = 0.0;       // boiler heat output (kW)
  double p_tc = 0.0;       // CWT injection (kW, >= 0)
  double p_td = 0.0;       // CWT release (kW, <= 0)
  double p_thermal = 0.0;  // cooling available to buildings (kW)
  std::vector<double> p_sp_actual;
};

// Derive boiler and cold-water-tank setpoints once the cooling requests and
// the fuel cell's heat output are known.
//
// All building-side quantities are cold power; heat sources (fuel cell,
// boiler) convert through the absorption chiller at eta_h2c. When the fuel
// cell covers more than the buildings request, the surplus charges the tank
// and the boiler stays off. Otherwise the tank releases as much of the
// shortfall as it can and the boiler covers the remainder, so gas use is
// minimal for the load actually served. If total supply still falls short,
// the requests are scaled down pro rata.
inline HeatDispatch dispatch_heat(double q_fc, const std::vector<double>& p_sp_requested,
                                  double q_th, const SystemParams& p) {
  if (q_fc < 0.0) throw ValidationError("q_fc must be non-negative");
  if (q_th < -1e-9 || q_th > p.q_th_max + 1e-9) {
    throw StateError("CWT level outside bounds in dispatch_heat");
  }
  const double dt = p.delta_t;
  const double sum_sp =
      std::accumulate(p_sp_requested.begin(), p_sp_requested.end(), 0.0);
  const double fc_cold = q_fc * p.eta_h2c;  // kWh of cooling from the fuel cell

  HeatDispatch d;
  if (fc_cold > sum_sp * dt) {
    // Charge mode: store the surplus, no gas.
    d.p_tc = std::min({fc_cold / dt - sum_sp, p.p_tc_max,
                       (p.q_th_max - q_th) / (p.eta_tc * dt)});
    d.p_tc = std::max(d.p_tc, 0.0);
  } else {
    // Discharge mode: tank first, boiler for the remainder.
    const double released =
        std::max(0.0, std::min({sum_sp * dt - fc_cold, p.p_td_max * dt, q_th * p.eta_td}));
    d.p_td = -released / dt;
    const double remaining = std::max(0.0, sum_sp - fc_cold / dt - released / dt);
    d.p_gb = std::min(remaining / p.eta_h2c, p.p_gb_max);
  }
  d.p_thermal = fc_cold / dt + d.p_gb * p.eta_h2c - d.p_td - d.p_tc;

  d.p_sp_actual = p_sp_requested;
  if (sum_sp > d.p_thermal) {
    const double scale = std::min(1.0, std::max(0.0, d.p_thermal) / sum_sp);
    for (double& v : d.p_sp_actual) v *= scale;
  }
  return d;
}

}  // namespace hbmes
