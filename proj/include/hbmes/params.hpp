#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hbmes/errors.hpp"

namespace hbmes {

// Which condition zeroes a building's cooling request during action repair.
// `AsPrinted` is the published rule (outdoor temperature compared against the
// comfort band's upper bound); `MinVariant` compares against the lower bound.
enum class ThermostatRule { AsPrinted, MinVariant };

struct BuildingParams {
  double beta_min = 20.0;   // comfort band lower bound (deg)
  double beta_max = 25.0;   // comfort band upper bound (deg)
  double beta_init = 21.0;  // indoor temperature at episode start (deg)
  double eps_hvac = 0.8;    // thermal inertia coefficient
  double eta_hvac = 2.5;    // HVAC conversion factor
  double a_coeff = 0.5;     // thermal conductivity (kW per degree)
  double p_sp_max = 20.0;   // max cooling input power (kW)
};

// Every physical and economic constant of the plant. Defaults are the
// reference parameter set; per-building entries live in `buildings`.
struct SystemParams {
  // PV
  double eta_pv = 0.2;  // generation efficiency
  double h_pv = 100.0;  // panel area (m^2)

  // Gas boiler
  double p_gb_max = 20.0;    // max heat output (kW)
  double eta_gb = 0.95;      // gas-to-heat efficiency
  double gas_price = 0.287;  // default gas price (RMB/kWh)

  // Battery storage
  double b_min = 0.0;
  double b_max = 40.0;
  double b_init = 0.0;
  double p_bc_max = 20.0;
  double p_bd_max = 30.0;
  double eta_bc = 0.95;
  double eta_bd = 0.95;
  double psi_bess = 0.001;  // depreciation (RMB/kW)

  // Cold water tank
  double q_th_max = 50.0;
  double q_th_init = 0.0;
  double p_tc_max = 10.0;
  double p_td_max = 10.0;
  double eta_tc = 0.9;
  double eta_td = 0.9;
  double psi_cwt = 0.005;  // depreciation (RMB/kW)

  // Hydrogen storage (electrolyzer + tank + fuel cell)
  double h_max = 30.0;       // tank capacity (Nm^3)
  double h_init = 0.0;
  double p_el_max = 20.0;    // electrolyzer rated power (kW)
  double p_fc_max = 20.0;    // fuel cell rated power (kW)
  double omega_el = 0.2397;  // electrolyzer conversion (Nm^3/kWh)
  double omega_fc = 1.4985;  // fuel cell conversion (kWh/Nm^3)
  double eta_hr = 0.7;       // heat recovery efficiency
  double eta_h2e = 1.4;      // heat-to-electricity ratio
  double eta_h2c = 0.7;      // absorption chiller heat-to-cold efficiency
  double delta_el_on = 0.158;   // RMB per slot while running
  double delta_el_su = 0.97;    // startup cost (RMB)
  double delta_el_sd = 0.049;   // shutdown cost (RMB)
  double delta_fc_on = 0.079;
  double delta_fc_su = 0.0004;
  double delta_fc_sd = 0.0004;
  double pi_fc = 1.0;  // wasted-heat penalty weight

  // Buildings
  std::vector<BuildingParams> buildings =
      std::vector<BuildingParams>(4, BuildingParams{});
  double pi_th = 0.35;  // temperature-deviation penalty (RMB per degree)
  ThermostatRule thermostat_rule = ThermostatRule::AsPrinted;

  // Economy / time base
  double mu_c = 0.06;     // carbon price (RMB/kg)
  double tau_sell = 0.1;  // electricity selling price (RMB/kWh)
  double delta_t = 1.0;   // slot length (h)

  std::size_t building_count() const { return buildings.size(); }

  void validate() const;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}
}  // namespace detail

inline void SystemParams::validate() const {
  using detail::require;
  auto in01 = [](double e) { return e > 0.0 && e <= 1.0; };
  require(in01(eta_pv), "eta_pv must be in (0,1]");
  require(in01(eta_gb), "eta_gb must be in (0,1]");
  require(in01(eta_bc) && in01(eta_bd), "battery efficiencies must be in (0,1]");
  require(in01(eta_tc) && in01(eta_td), "CWT efficiencies must be in (0,1]");
  require(in01(eta_hr) && in01(eta_h2c), "eta_hr/eta_h2c must be in (0,1]");
  require(eta_h2e > 0.0, "eta_h2e must be positive");
  require(h_pv > 0.0, "h_pv must be positive");
  require(p_gb_max > 0.0 && p_bc_max > 0.0 && p_bd_max > 0.0 &&
              p_tc_max > 0.0 && p_td_max > 0.0 && p_el_max > 0.0 &&
              p_fc_max > 0.0,
          "device power limits must be positive");
  require(b_max > 0.0 && q_th_max > 0.0 && h_max > 0.0,
          "storage capacities must be positive");
  require(omega_el > 0.0 && omega_fc > 0.0, "conversion coefficients must be positive");
  require(b_min <= b_init && b_init <= b_max, "b_init outside [b_min, b_max]");
  require(0.0 <= q_th_init && q_th_init <= q_th_max, "q_th_init outside [0, q_th_max]");
  require(0.0 <= h_init && h_init <= h_max, "h_init outside [0, h_max]");
  require(delta_t > 0.0, "delta_t must be positive");
  require(tau_sell > 0.0, "tau_sell must be positive");
  require(!buildings.empty(), "at least one building required");
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const auto& b = buildings[i];
    const std::string tag = "building " + std::to_string(i + 1);
    require(b.beta_min < b.beta_max, tag + ": beta_min must be < beta_max");
    require(b.beta_min <= b.beta_init && b.beta_init <= b.beta_max,
            tag + ": beta_init outside comfort band");
    require(in01(b.eps_hvac), tag + ": eps_hvac must be in (0,1]");
    require(b.eta_hvac > 0.0 && b.a_coeff > 0.0, tag + ": eta_hvac/a_coeff must be positive");
    require(b.p_sp_max > 0.0, tag + ": p_sp_max must be positive");
  }
}

}  // namespace hbmes
