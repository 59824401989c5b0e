#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "hbmes/net.hpp"
#include "hbmes/net_ops.hpp"
#include "hbmes/observation.hpp"
#include "hbmes/policy.hpp"
#include "hbmes/replay.hpp"
#include "hbmes/rewards.hpp"
#include "hbmes/settlement.hpp"
#include "hbmes/trainer.hpp"

namespace hbmes {

struct DdqnTransition {
  std::vector<double> obs;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
};

namespace detail {

// Physical clipping only: device ratings and storage headroom, no surplus
// priority rules (those belong to the rule-based repair of the proposed
// scheme).
inline RepairedAction clip_storage_only(double bess_req, double hess_req,
                                        std::vector<double> thermal,
                                        const EnvState& state, const SystemParams& p) {
  RepairedAction a;
  a.p_sp = std::move(thermal);
  if (bess_req > 0.0) {
    a.p_bc = std::max(0.0, std::min({bess_req, p.p_bc_max,
                                     (p.b_max - state.bess) / (p.eta_bc * p.delta_t)}));
  } else if (bess_req < 0.0) {
    a.p_bd = std::min(0.0, std::max({bess_req, -p.p_bd_max,
                                     (p.b_min - state.bess) * p.eta_bd / p.delta_t}));
  }
  if (hess_req > 0.0) {
    a.p_el = std::max(0.0, std::min({hess_req, p.p_el_max,
                                     (p.h_max - state.hess) / (p.omega_el * p.delta_t)}));
  } else if (hess_req < 0.0) {
    a.p_fc = std::min(0.0, std::max({hess_req, -p.p_fc_max,
                                     -state.hess * p.omega_fc / p.delta_t}));
  }
  return a;
}

}  // namespace detail

// Double-DQN over the joint battery x hydrogen discrete action space, with
// bang-bang cooling. Shares the replay and soft-target machinery of the main
// trainer; the action-value net scores every (battery, hydrogen) pair and
// the online net's argmax is evaluated by the target net.
class DdqnTrainer {
 public:
  DdqnTrainer(SystemParams params, ActionGrids grids, ObservationStats stats,
              TrainSettings settings)
      : params_(std::move(params)),
        grids_(std::move(grids)),
        stats_(std::move(stats)),
        settings_(settings),
        schema_(hess_schema(params_.building_count())),
        buffer_(settings.replay_capacity),
        init_rng_(settings.seed ^ 0xdd000001ULL),
        explore_rng_(settings.seed ^ 0xdd000002ULL),
        replay_rng_(settings.seed ^ 0xdd000003ULL),
        dist_rng_(settings.seed ^ 0xdd000004ULL) {
    const std::size_t actions = grids_.bess_levels.size() * grids_.hess_levels.size();
    qnet_ = make_net(detail::net_sizes(schema_.size(), settings_.hidden, actions),
                     init_rng_);
    target_ = qnet_;
    opt_ = AdamState::for_net(qnet_, settings_.lr_critic);
  }

  const DenseNet& qnet() const { return qnet_; }
  ReplayBuffer<DdqnTransition>& buffer() { return buffer_; }

  std::size_t action_count() const {
    return grids_.bess_levels.size() * grids_.hess_levels.size();
  }

  double update(const std::vector<const DdqnTransition*>& batch) {
    if (batch.empty()) throw ConfigError("ddqn update: empty batch");
    const double inv_k = 1.0 / static_cast<double>(batch.size());
    NetGradients grads = NetGradients::zeros_like(qnet_);
    double loss = 0.0;
    for (const DdqnTransition* tr : batch) {
      const std::size_t pick = argmax_index(forward(qnet_, tr->next_obs));
      const double y =
          tr->reward + settings_.gamma * forward(target_, tr->next_obs)[pick];
      ForwardCache cache;
      const auto q = forward_cached(qnet_, tr->obs, cache);
      const double err = q[tr->action] - y;
      loss += err * err * inv_k;
      std::vector<double> upstream(q.size(), 0.0);
      upstream[tr->action] = 2.0 * err * inv_k;
      backward_accumulate(qnet_, cache, upstream, grads);
    }
    if (!std::isfinite(loss)) throw DivergenceError("ddqn loss diverged");
    adam_step(opt_, qnet_, grads);
    return loss;
  }

  std::vector<EpisodeReward> train(const TraceSet& trace) {
    const std::size_t t_slots = settings_.slots_per_episode;
    if (trace.size() < t_slots) {
      throw ConfigError("training trace shorter than one episode");
    }
    const std::size_t days = trace.size() / t_slots;
    const std::size_t j = params_.building_count();
    const std::size_t decay = settings_.eps_decay_episodes > 0
                                  ? settings_.eps_decay_episodes
                                  : std::max<std::size_t>(1, settings_.episodes / 2);
    std::vector<EpisodeReward> log;
    log.reserve(settings_.episodes);

    for (std::size_t ep = 1; ep <= settings_.episodes; ++ep) {
      const double frac =
          std::min(1.0, static_cast<double>(ep - 1) / static_cast<double>(decay));
      const double eps =
          settings_.eps_start + (settings_.eps_end - settings_.eps_start) * frac;
      const std::size_t start = ((ep - 1) % days) * t_slots;
      EnvState state = EnvState::initial(params_);
      thermostat_.reset(j);
      ExogenousSlot exo = detail::resolve_exo(trace, start, 0, t_slots, j,
                                              settings_.chi, dist_rng_, true);
      EpisodeReward row;
      row.episode = ep;
      const bool training_episode = ep % settings_.t_fre == 0;

      for (std::size_t t = 0; t < t_slots; ++t) {
        const AgentObservations raw = observe(state, exo, params_);
        const std::vector<double> obs = normalize(raw.hess, schema_, stats_);

        std::size_t action;
        if (explore_rng_.uniform01() < eps) {
          action = static_cast<std::size_t>(explore_rng_.below(action_count()));
        } else {
          action = argmax_index(forward(qnet_, obs));
        }
        const std::size_t bess_idx = action / grids_.hess_levels.size();
        const std::size_t hess_idx = action % grids_.hess_levels.size();

        std::vector<double> thermal(j);
        for (std::size_t i = 0; i < j; ++i) {
          thermal[i] = thermostat_.setpoint(i, state.beta_in[i], params_.buildings[i]);
        }
        const RepairedAction a = detail::clip_storage_only(
            grids_.bess_levels[bess_idx], grids_.hess_levels[hess_idx],
            std::move(thermal), state, params_);

        auto [next_state, settlement] = settle_slot(state, a, exo, params_);
        const RewardVector r = rewards(settlement, params_);

        const std::size_t t_next = (t + 1) % t_slots;
        const ExogenousSlot next_exo =
            detail::resolve_exo(trace, start, t_next, t_slots, j, settings_.chi,
                                dist_rng_, t + 1 < t_slots);
        EnvState obs_state = next_state;
        obs_state.t = t_next;
        const std::vector<double> next_obs =
            normalize(observe(obs_state, next_exo, params_).hess, schema_, stats_);

        buffer_.push({obs, action, r.total(), next_obs});

        row.bess += r.bess;
        row.hess += r.hess;
        row.thermal_mean +=
            std::accumulate(r.thermal.begin(), r.thermal.end(), 0.0) /
            static_cast<double>(j);
        row.total += r.total();

        const std::size_t warmup = std::max<std::size_t>(
            settings_.batch_size,
            static_cast<std::size_t>(std::ceil(
                std::clamp(settings_.warmup_fraction, 0.0, 1.0) *
                static_cast<double>(settings_.replay_capacity))));
        if (training_episode && buffer_.size() >= warmup) {
          update(buffer_.sample(settings_.batch_size, replay_rng_));
          soft_update(target_, qnet_, settings_.rho);
        }

        state = next_state;
        exo = next_exo;
      }
      log.push_back(row);
    }
    return log;
  }

 private:
  SystemParams params_;
  ActionGrids grids_;
  ObservationStats stats_;
  TrainSettings settings_;
  ObservationSchema schema_;
  DenseNet qnet_, target_;
  AdamState opt_;
  ReplayBuffer<DdqnTransition> buffer_;
  OnOffThermostat thermostat_;
  Rng init_rng_, explore_rng_, replay_rng_, dist_rng_;
};

// Greedy controller around a trained action-value net.
class DdqnPolicy : public Policy {
 public:
  DdqnPolicy(DenseNet qnet, ActionGrids grids, ObservationStats stats)
      : qnet_(std::move(qnet)), grids_(std::move(grids)), stats_(std::move(stats)) {}

  void reset() override { thermostat_.reset(0); }

  RepairedAction act(const EnvState& state, const ExogenousSlot& exo,
                     const SystemParams& p) override {
    const auto raw = observe(state, exo, p);
    const auto obs = normalize(raw.hess, hess_schema(p.building_count()), stats_);
    const std::size_t action = argmax_index(forward(qnet_, obs));
    const std::size_t bess_idx = action / grids_.hess_levels.size();
    const std::size_t hess_idx = action % grids_.hess_levels.size();
    std::vector<double> thermal(p.building_count());
    for (std::size_t i = 0; i < p.building_count(); ++i) {
      thermal[i] = thermostat_.setpoint(i, state.beta_in[i], p.buildings[i]);
    }
    return detail::clip_storage_only(grids_.bess_levels[bess_idx],
                                     grids_.hess_levels[hess_idx], std::move(thermal),
                                     state, p);
  }

  std::string name() const override { return "b3"; }

 private:
  DenseNet qnet_;
  ActionGrids grids_;
  ObservationStats stats_;
  OnOffThermostat thermostat_;
};

}  // namespace hbmes
