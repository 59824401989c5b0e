#pragma once

#include <cstddef>
#include <vector>

#include "hbmes/params.hpp"

namespace hbmes {

// Mutable plant state carried from slot to slot.
struct EnvState {
  double bess = 0.0;                 // battery energy level (kWh)
  double cwt = 0.0;                  // cold water tank level (kWh)
  double hess = 0.0;                 // hydrogen tank level (Nm^3)
  std::vector<double> beta_in;       // indoor temperature per building (deg)
  bool el_on = false;                // electrolyzer ran last slot
  bool fc_on = false;                // fuel cell ran last slot
  std::size_t t = 0;                 // slot index

  static EnvState initial(const SystemParams& p) {
    EnvState s;
    s.bess = p.b_init;
    s.cwt = p.q_th_init;
    s.hess = p.h_init;
    s.beta_in.reserve(p.building_count());
    for (const auto& b : p.buildings) s.beta_in.push_back(b.beta_init);
    return s;
  }
};

// One slot of exogenous inputs.
struct ExogenousSlot {
  double price_buy = 0.0;    // v (RMB/kWh)
  double irradiance = 0.0;   // kappa_l (kW/m^2)
  double load = 0.0;         // P_load (kW)
  double emission = 0.0;     // mu_e (kg/kWh)
  double temp_out = 0.0;     // beta_out (deg)
  double gas_price = 0.0;    // lambda_g (RMB/kWh)
  std::vector<double> disturbance;  // per-building thermal disturbance (deg)
};

// Feasible continuous realization of the agents' discrete choices.
// Sign convention: charge >= 0 >= discharge on every storage pair.
struct RepairedAction {
  double p_bc = 0.0;          // battery charge (kW, >= 0)
  double p_bd = 0.0;          // battery discharge (kW, <= 0)
  double p_el = 0.0;          // electrolyzer draw (kW, >= 0)
  double p_fc = 0.0;          // fuel cell output (kW, <= 0)
  std::vector<double> p_sp;   // requested cooling per building (kW, >= 0)
};

// Per-component startup/shutdown indicators for one slot.
struct HessFlags {
  bool el_on = false, el_su = false, el_sd = false;
  bool fc_on = false, fc_su = false, fc_sd = false;
};

// Everything derived while advancing one slot: realized dispatch plus the
// six-term cost breakdown.
struct SlotSettlement {
  double p_pv = 0.0;       // PV output (kW)
  double p_g = 0.0;        // grid exchange (kW, >0 buying)
  double p_gb = 0.0;       // gas boiler heat output (kW)
  double p_tc = 0.0;       // CWT injection (kW, >= 0)
  double p_td = 0.0;       // CWT release (kW, <= 0)
  double q_fc = 0.0;       // fuel cell recovered heat (kWh)
  double p_thermal = 0.0;  // total cooling supply available to buildings (kW)
  std::vector<double> p_sp_actual;  // realized cooling per building (kW)
  double c1 = 0.0;  // electricity trade
  double c2 = 0.0;  // carbon emission
  double c3 = 0.0;  // battery depreciation
  double c4 = 0.0;  // HESS on/startup/shutdown
  double c5 = 0.0;  // CWT depreciation
  double c6 = 0.0;  // gas purchase
  double xi = 0.0;  // wasted-heat penalty
  std::vector<double> temp_dev;  // comfort-band violation per building (deg)
  HessFlags flags;

  double cost_total() const { return c1 + c2 + c3 + c4 + c5 + c6; }
};

}  // namespace hbmes
