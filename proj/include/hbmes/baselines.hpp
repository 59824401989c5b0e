#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "hbmes/policy.hpp"
#include "hbmes/rewards.hpp"
#include "hbmes/settlement.hpp"
#include "hbmes/traces.hpp"
#include "hbmes/trainer.hpp"

namespace hbmes {

// B1: greedy storage. Charge battery then electrolyzer from any PV surplus;
// discharge battery then fuel cell toward any deficit. Bang-bang cooling.
class B1Policy : public Policy {
 public:
  void reset() override { thermostat_.reset(0); }

  RepairedAction act(const EnvState& state, const ExogenousSlot& exo,
                     const SystemParams& p) override {
    RepairedAction a;
    a.p_sp.resize(p.building_count());
    for (std::size_t i = 0; i < p.building_count(); ++i) {
      a.p_sp[i] = thermostat_.setpoint(i, state.beta_in[i], p.buildings[i]);
    }
    const double surplus = pv_output(exo.irradiance, p) - exo.load;
    if (surplus > 0.0) {
      a.p_bc = std::max(0.0, std::min({surplus, p.p_bc_max,
                                       (p.b_max - state.bess) / (p.eta_bc * p.delta_t)}));
      const double rest = std::max(0.0, surplus - a.p_bc);
      a.p_el = std::max(0.0, std::min({rest, p.p_el_max,
                                       (p.h_max - state.hess) / (p.omega_el * p.delta_t)}));
    } else if (surplus < 0.0) {
      a.p_bd = std::min(0.0, std::max({surplus, -p.p_bd_max,
                                       (p.b_min - state.bess) * p.eta_bd / p.delta_t}));
      const double rest = std::min(0.0, surplus - a.p_bd);
      a.p_fc = std::min(0.0, std::max({rest, -p.p_fc_max,
                                       -state.hess * p.omega_fc / p.delta_t}));
    }
    return a;
  }

  std::string name() const override { return "b1"; }

 private:
  OnOffThermostat thermostat_;
};

// Distinct (lowest and highest) levels of a time-of-use price ladder.
struct PriceLevels {
  double min_level = 0.0;
  double max_level = 0.0;
};

inline PriceLevels detect_price_levels(const std::vector<double>& prices) {
  if (prices.empty()) throw ValidationError("cannot detect price levels of an empty tariff");
  const auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
  return {*lo, *hi};
}

// B2: battery arbitrage on the tariff ladder. Full charge at the minimum
// level, demand-limited discharge at the maximum level, hydrogen idle,
// bang-bang cooling.
class B2Policy : public Policy {
 public:
  explicit B2Policy(PriceLevels levels) : levels_(levels) {}

  void reset() override { thermostat_.reset(0); }

  RepairedAction act(const EnvState& state, const ExogenousSlot& exo,
                     const SystemParams& p) override {
    RepairedAction a;
    a.p_sp.resize(p.building_count());
    for (std::size_t i = 0; i < p.building_count(); ++i) {
      a.p_sp[i] = thermostat_.setpoint(i, state.beta_in[i], p.buildings[i]);
    }
    if (std::abs(exo.price_buy - levels_.min_level) <= kPriceTol) {
      a.p_bc = std::max(0.0, std::min(p.p_bc_max,
                                      (p.b_max - state.bess) / (p.eta_bc * p.delta_t)));
    } else if (std::abs(exo.price_buy - levels_.max_level) <= kPriceTol) {
      const double deficit = std::max(0.0, exo.load - pv_output(exo.irradiance, p));
      a.p_bd = std::min(0.0, std::max({-deficit, -p.p_bd_max,
                                       (p.b_min - state.bess) * p.eta_bd / p.delta_t}));
    }
    return a;
  }

  std::string name() const override { return "b2"; }

 private:
  static constexpr double kPriceTol = 1e-9;
  PriceLevels levels_;
  OnOffThermostat thermostat_;
};

// One evaluated slot: end-of-slot plant state, the executed action, and that
// slot's settlement.
struct SlotRecord {
  std::size_t t = 0;
  double p_g = 0.0;
  double bess = 0.0;
  double hess = 0.0;
  double cwt = 0.0;
  std::vector<double> beta_in;
  RepairedAction action;
  double p_gb = 0.0;
  double p_tc = 0.0;
  double p_td = 0.0;
  std::vector<double> p_sp_actual;
  double c[6] = {0, 0, 0, 0, 0, 0};
  double xi = 0.0;
  double dev_sum = 0.0;
  RewardVector reward;
};

struct EvaluationReport {
  std::string policy;
  double total_cost = 0.0;
  double c[6] = {0, 0, 0, 0, 0, 0};
  double atd = 0.0;        // mean temperature deviation over slots and buildings
  double total_dev = 0.0;  // summed deviation (degrees)
  std::vector<SlotRecord> slots;

  // Cost plus weighted comfort violations; the quantity the oracle bounds.
  double objective(double pi_th) const { return total_cost + pi_th * total_dev; }
};

// Roll a policy over the first `t_test` slots of a trace. Disturbance draws
// (when the trace has no disturbance columns) depend only on (chi, seed), so
// every policy evaluated on the same window sees identical realizations.
inline EvaluationReport evaluate(Policy& policy, const TraceSet& test,
                                 const SystemParams& p, std::size_t t_test,
                                 std::size_t slots_per_day, double chi = 0.0,
                                 std::uint64_t seed = 0) {
  if (t_test > test.size()) {
    throw ConfigError("t_test = " + std::to_string(t_test) + " exceeds trace length " +
                      std::to_string(test.size()));
  }
  EvaluationReport rep;
  rep.policy = policy.name();
  policy.reset();
  EnvState state = EnvState::initial(p);
  Rng dist_rng(seed ^ 0xd15705eULL);
  const std::size_t j = p.building_count();
  for (std::size_t t = 0; t < t_test; ++t) {
    ExogenousSlot exo = test.slot(t);
    if (exo.disturbance.empty()) {
      exo.disturbance.assign(j, 0.0);
      if (chi > 0.0) {
        for (double& d : exo.disturbance) d = dist_rng.uniform(-chi, chi);
      }
    }
    exo.disturbance.resize(j, 0.0);
    state.t = slots_per_day > 0 ? t % slots_per_day : t;

    const RepairedAction action = policy.act(state, exo, p);
    auto [next, s] = settle_slot(state, action, exo, p);

    SlotRecord rec;
    rec.t = t;
    rec.p_g = s.p_g;
    rec.bess = next.bess;
    rec.hess = next.hess;
    rec.cwt = next.cwt;
    rec.beta_in = next.beta_in;
    rec.action = action;
    rec.p_gb = s.p_gb;
    rec.p_tc = s.p_tc;
    rec.p_td = s.p_td;
    rec.p_sp_actual = s.p_sp_actual;
    rec.c[0] = s.c1;
    rec.c[1] = s.c2;
    rec.c[2] = s.c3;
    rec.c[3] = s.c4;
    rec.c[4] = s.c5;
    rec.c[5] = s.c6;
    rec.xi = s.xi;
    rec.dev_sum = std::accumulate(s.temp_dev.begin(), s.temp_dev.end(), 0.0);
    rec.reward = rewards(s, p);
    for (int k = 0; k < 6; ++k) rep.c[k] += rec.c[k];
    rep.total_dev += rec.dev_sum;
    rep.slots.push_back(std::move(rec));
    state = next;
  }
  rep.total_cost = rep.c[0] + rep.c[1] + rep.c[2] + rep.c[3] + rep.c[4] + rep.c[5];
  rep.atd = t_test == 0 ? 0.0
                        : rep.total_dev / (static_cast<double>(t_test) * static_cast<double>(j));
  return rep;
}

// Greedy decentralized rollout of trained actors (no sampling noise, no
// learning); the execution counterpart of MadacrTrainer::train.
inline EvaluationReport execute(std::vector<DenseNet> actors, const ActionGrids& grids,
                                const ObservationStats& stats, const TraceSet& test,
                                const SystemParams& p, std::size_t t_test,
                                std::size_t slots_per_day, double chi = 0.0,
                                std::uint64_t seed = 0) {
  TrainedPolicy policy(std::move(actors), grids, stats);
  return evaluate(policy, test, p, t_test, slots_per_day, chi, seed);
}

}  // namespace hbmes
