#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hbmes/params.hpp"
#include "hbmes/state.hpp"

namespace hbmes {

// A dispatch policy: maps the current state and exogenous inputs to a
// feasible action. Policies may carry memory (thermostat modes); reset() is
// called at the start of every rollout.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset() {}
  virtual RepairedAction act(const EnvState& state, const ExogenousSlot& exo,
                             const SystemParams& p) = 0;
  virtual std::string name() const = 0;
};

// Bang-bang cooling with hysteresis: full power at/above the comfort
// ceiling, off at/below the floor, previous mode in between.
class OnOffThermostat {
 public:
  void reset(std::size_t buildings) { on_.assign(buildings, false); }

  double setpoint(std::size_t building, double beta_in, const BuildingParams& b) {
    if (on_.size() <= building) on_.resize(building + 1, false);
    if (beta_in <= b.beta_min) {
      on_[building] = false;
    } else if (beta_in >= b.beta_max) {
      on_[building] = true;
    }
    return on_[building] ? b.p_sp_max : 0.0;
  }

 private:
  std::vector<bool> on_;
};

}  // namespace hbmes
