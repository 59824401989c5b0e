#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hbmes/devices.hpp"
#include "hbmes/params.hpp"
#include "hbmes/state.hpp"
#include "hbmes/traces.hpp"

namespace hbmes {

// What a single observation entry measures; drives min-max normalization.
enum class Feature {
  Price,
  PvPower,
  Load,
  Emission,
  BessLevel,
  CwtLevel,
  HessLevel,
  BetaIn,   // uses the comfort band of `building`
  BetaOut,
  GasPrice,
  Indicator,
  Time,
};

struct FeatureRef {
  Feature kind;
  std::size_t building = 0;
};

using ObservationSchema = std::vector<FeatureRef>;

inline ObservationSchema bess_schema() {
  return {{Feature::Price}, {Feature::PvPower}, {Feature::Load},
          {Feature::Emission}, {Feature::BessLevel}, {Feature::Time}};
}

inline ObservationSchema thermal_schema(std::size_t building) {
  return {{Feature::CwtLevel}, {Feature::BetaIn, building}, {Feature::BetaOut},
          {Feature::GasPrice}, {Feature::Time}};
}

inline ObservationSchema hess_schema(std::size_t building_count) {
  ObservationSchema s = {{Feature::Indicator}, {Feature::Indicator}, {Feature::Price},
                         {Feature::BessLevel}, {Feature::HessLevel}, {Feature::PvPower},
                         {Feature::Load},      {Feature::Emission},  {Feature::CwtLevel},
                         {Feature::BetaOut},   {Feature::GasPrice}};
  for (std::size_t i = 0; i < building_count; ++i) s.push_back({Feature::BetaIn, i});
  s.push_back({Feature::Time});
  return s;
}

// Raw (unnormalized) local observations for all agents at one slot.
struct AgentObservations {
  std::vector<double> bess;
  std::vector<std::vector<double>> thermal;
  std::vector<double> hess;
};

inline AgentObservations observe(const EnvState& state, const ExogenousSlot& exo,
                                 const SystemParams& p) {
  const double pv = pv_output(exo.irradiance, p);
  const double t = static_cast<double>(state.t);
  AgentObservations obs;
  obs.bess = {exo.price_buy, pv, exo.load, exo.emission, state.bess, t};
  obs.thermal.reserve(p.building_count());
  for (std::size_t i = 0; i < p.building_count(); ++i) {
    obs.thermal.push_back({state.cwt, state.beta_in[i], exo.temp_out, exo.gas_price, t});
  }
  obs.hess = {state.el_on ? 1.0 : 0.0, state.fc_on ? 1.0 : 0.0, exo.price_buy,
              state.bess, state.hess, pv, exo.load, exo.emission, state.cwt,
              exo.temp_out, exo.gas_price};
  for (double b : state.beta_in) obs.hess.push_back(b);
  obs.hess.push_back(t);
  return obs;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

// Per-feature normalization ranges. Trace-driven features take the training
// trace's extrema; state features take their physical or comfort bounds.
struct ObservationStats {
  Range price, pv, load, emission, bess, cwt, hess, beta_out, gas;
  std::vector<Range> beta_in;
  std::size_t t_slots = 24;

  static ObservationStats from(const TraceStats& ts, const SystemParams& p,
                               std::size_t slots_per_episode) {
    ObservationStats st;
    st.price = {ts.price_buy.min, ts.price_buy.max};
    st.pv = {p.eta_pv * p.h_pv * ts.irradiance.min, p.eta_pv * p.h_pv * ts.irradiance.max};
    st.load = {ts.load.min, ts.load.max};
    st.emission = {ts.emission.min, ts.emission.max};
    st.bess = {p.b_min, p.b_max};
    st.cwt = {0.0, p.q_th_max};
    st.hess = {0.0, p.h_max};
    st.beta_out = {ts.temp_out.min, ts.temp_out.max};
    st.gas = {ts.gas_price.min, ts.gas_price.max};
    for (const auto& b : p.buildings) st.beta_in.push_back({b.beta_min, b.beta_max});
    st.t_slots = slots_per_episode;
    return st;
  }
};

// Min-max map to [0,1]; constant features collapse to 0 and the slot index
// maps to t/(T-1).
inline std::vector<double> normalize(const std::vector<double>& values,
                                     const ObservationSchema& schema,
                                     const ObservationStats& st) {
  if (values.size() != schema.size()) {
    throw ShapeError("observation length does not match schema");
  }
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& f = schema[k];
    Range r;
    switch (f.kind) {
      case Feature::Price: r = st.price; break;
      case Feature::PvPower: r = st.pv; break;
      case Feature::Load: r = st.load; break;
      case Feature::Emission: r = st.emission; break;
      case Feature::BessLevel: r = st.bess; break;
      case Feature::CwtLevel: r = st.cwt; break;
      case Feature::HessLevel: r = st.hess; break;
      case Feature::BetaIn: r = st.beta_in.at(f.building); break;
      case Feature::BetaOut: r = st.beta_out; break;
      case Feature::GasPrice: r = st.gas; break;
      case Feature::Indicator: r = {0.0, 1.0}; break;
      case Feature::Time:
        r = {0.0, st.t_slots > 1 ? static_cast<double>(st.t_slots - 1) : 1.0};
        break;
    }
    if (r.hi == r.lo) {
      out[k] = 0.0;
    } else {
      out[k] = std::clamp((values[k] - r.lo) / (r.hi - r.lo), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace hbmes
