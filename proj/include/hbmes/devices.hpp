#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "hbmes/errors.hpp"
#include "hbmes/params.hpp"
#include "hbmes/state.hpp"

namespace hbmes {

// Maximum PV generation for a given irradiance.
inline double pv_output(double irradiance, const SystemParams& p) {
  if (irradiance < 0.0) throw ValidationError("irradiance must be non-negative");
  return p.eta_pv * p.h_pv * irradiance;
}

struct BessStep {
  double level = 0.0;  // kWh after the slot
  double p_bc = 0.0;
  double p_bd = 0.0;
};

// Advance the battery one slot from a signed power request. The request is
// clipped so the stored level always stays within [b_min, b_max]:
//   charge:    P_bc = min(a, P_bc_max, (B_max - B) / (eta_bc dt))
//   discharge: P_bd = max(a, -P_bd_max, (B_min - B) eta_bd / dt)
inline BessStep bess_step(double level, double request, const SystemParams& p) {
  if (level < p.b_min - 1e-9 || level > p.b_max + 1e-9) {
    throw StateError("battery level outside bounds: " + std::to_string(level));
  }
  BessStep out;
  if (request > 0.0) {
    out.p_bc = std::min({request, p.p_bc_max, (p.b_max - level) / (p.eta_bc * p.delta_t)});
    out.p_bc = std::max(out.p_bc, 0.0);
  } else if (request < 0.0) {
    out.p_bd = std::max({request, -p.p_bd_max, (p.b_min - level) * p.eta_bd / p.delta_t});
    out.p_bd = std::min(out.p_bd, 0.0);
  }
  out.level = level + (p.eta_bc * out.p_bc + out.p_bd / p.eta_bd) * p.delta_t;
  out.level = std::clamp(out.level, p.b_min, p.b_max);  // shave fp residue
  return out;
}

// Advance the cold water tank. Inputs must already be a feasible dispatch
// (produced by dispatch_heat); a result outside [0, q_th_max] is a dispatch
// bug, not an input error.
inline double cwt_step(double level, double p_tc, double p_td, const SystemParams& p) {
  const double next = level + (p_tc * p.eta_tc + p_td / p.eta_td) * p.delta_t;
  if (next < -1e-9 || next > p.q_th_max + 1e-9) {
    throw StateError("CWT level left bounds after dispatch: " + std::to_string(next));
  }
  return std::clamp(next, 0.0, p.q_th_max);
}

struct HessStep {
  double level = 0.0;  // Nm^3 after the slot
  double p_el = 0.0;
  double p_fc = 0.0;
  double q_fc = 0.0;   // recovered heat (kWh), non-negative
  HessFlags flags;
};

// Advance the hydrogen system one slot from a signed power request.
// Positive requests run the electrolyzer, negative the fuel cell; the clip
// windows keep the tank level within [0, h_max]. The fuel cell's recovered
// heat uses the magnitude of its electric output so heat supply is always
// non-negative.
inline HessStep hess_step(double level, double request, bool prev_el_on,
                          bool prev_fc_on, const SystemParams& p) {
  if (level < -1e-9 || level > p.h_max + 1e-9) {
    throw StateError("hydrogen level outside bounds: " + std::to_string(level));
  }
  HessStep out;
  if (request > 0.0) {
    out.p_el = std::min({request, p.p_el_max, (p.h_max - level) / (p.omega_el * p.delta_t)});
    out.p_el = std::max(out.p_el, 0.0);
  } else if (request < 0.0) {
    out.p_fc = std::max({request, -p.p_fc_max, -level * p.omega_fc / p.delta_t});
    out.p_fc = std::min(out.p_fc, 0.0);
  }
  out.level = level + out.p_el * p.omega_el * p.delta_t + out.p_fc * p.delta_t / p.omega_fc;
  out.level = std::clamp(out.level, 0.0, p.h_max);
  out.q_fc = p.eta_hr * p.eta_h2e * std::abs(out.p_fc) * p.delta_t;
  out.flags.el_on = out.p_el > 0.0;
  out.flags.fc_on = out.p_fc < 0.0;
  out.flags.el_su = out.flags.el_on && !prev_el_on;
  out.flags.el_sd = !out.flags.el_on && prev_el_on;
  out.flags.fc_su = out.flags.fc_on && !prev_fc_on;
  out.flags.fc_sd = !out.flags.fc_on && prev_fc_on;
  return out;
}

// First-order building thermal model (cooling mode).
inline double building_thermal_step(double beta_in, double beta_out,
                                    double p_sp_actual, double disturbance,
                                    const BuildingParams& b) {
  return b.eps_hvac * beta_in +
         (1.0 - b.eps_hvac) * (beta_out - p_sp_actual * b.eta_hvac / b.a_coeff) +
         disturbance;
}

}  // namespace hbmes
