#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "hbmes/action_space.hpp"
#include "hbmes/net.hpp"
#include "hbmes/net_ops.hpp"
#include "hbmes/observation.hpp"
#include "hbmes/policy.hpp"
#include "hbmes/repair.hpp"
#include "hbmes/replay.hpp"
#include "hbmes/rewards.hpp"
#include "hbmes/settlement.hpp"
#include "hbmes/traces.hpp"

namespace hbmes {

// Agent order everywhere: battery, thermal 1..J, hydrogen.
struct AgentLayout {
  std::vector<ObservationSchema> schemas;
  std::vector<std::size_t> action_counts;
  std::vector<std::size_t> obs_offset;
  std::vector<std::size_t> act_offset;
  std::size_t joint_obs_len = 0;
  std::size_t joint_act_len = 0;

  std::size_t agents() const { return schemas.size(); }
  std::size_t obs_len(std::size_t i) const { return schemas[i].size(); }

  static AgentLayout make(const SystemParams& p, const ActionGrids& g) {
    AgentLayout lay;
    lay.schemas.push_back(bess_schema());
    lay.action_counts.push_back(g.bess_levels.size());
    for (std::size_t i = 0; i < p.building_count(); ++i) {
      lay.schemas.push_back(thermal_schema(i));
      lay.action_counts.push_back(g.thermal_levels[i].size());
    }
    lay.schemas.push_back(hess_schema(p.building_count()));
    lay.action_counts.push_back(g.hess_levels.size());
    for (std::size_t i = 0; i < lay.schemas.size(); ++i) {
      lay.obs_offset.push_back(lay.joint_obs_len);
      lay.act_offset.push_back(lay.joint_act_len);
      lay.joint_obs_len += lay.schemas[i].size();
      lay.joint_act_len += lay.action_counts[i];
    }
    return lay;
  }
};

struct TrainSettings {
  double gamma = 0.95;
  std::size_t batch_size = 256;
  double rho = 0.001;
  std::size_t episodes = 30000;
  std::size_t t_fre = 5;
  std::size_t replay_capacity = 120000;
  double warmup_fraction = 1.0;  // fraction of capacity required before updates
  double lr_actor = 8e-5;
  double lr_critic = 8e-5;
  double gs_temperature = 1.0;
  std::vector<std::size_t> hidden = {128, 128, 128};
  std::size_t slots_per_episode = 24;
  double chi = 0.0;  // thermal disturbance half-width during rollouts
  std::uint64_t seed = 1;
  // DDQN-only knobs (exploration schedule).
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::size_t eps_decay_episodes = 0;  // 0 = half of the episodes
};

struct AgentBundle {
  DenseNet actor, critic, target_actor, target_critic;
  AdamState actor_opt, critic_opt;
};

struct EpisodeReward {
  std::size_t episode = 0;  // 1-based
  double total = 0.0;
  double bess = 0.0;
  double hess = 0.0;
  double thermal_mean = 0.0;
};

namespace detail {

inline std::vector<std::size_t> net_sizes(std::size_t in, const std::vector<std::size_t>& hidden,
                                          std::size_t out) {
  std::vector<std::size_t> s;
  s.push_back(in);
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

// Resolve one slot of exogenous inputs for an episode that starts at
// `start`: trace columns win, otherwise disturbances are drawn fresh.
inline ExogenousSlot resolve_exo(const TraceSet& trace, std::size_t start,
                                 std::size_t t_in_ep, std::size_t t_slots,
                                 std::size_t buildings, double chi, Rng& dist_rng,
                                 bool draw) {
  ExogenousSlot exo = trace.slot(start + (t_in_ep % t_slots));
  if (exo.disturbance.empty()) {
    exo.disturbance.assign(buildings, 0.0);
    if (draw && chi > 0.0) {
      for (double& d : exo.disturbance) d = dist_rng.uniform(-chi, chi);
    }
  }
  exo.disturbance.resize(buildings, 0.0);
  return exo;
}

}  // namespace detail

// Centralized-training / decentralized-execution trainer: one actor-critic
// pair per agent, discrete actions through a Gumbel-Softmax sampler, rule
// repair between the sampled actions and the plant.
class MadacrTrainer {
 public:
  MadacrTrainer(SystemParams params, ActionGrids grids, ObservationStats stats,
                TrainSettings settings)
      : params_(std::move(params)),
        grids_(std::move(grids)),
        stats_(std::move(stats)),
        settings_(settings),
        layout_(AgentLayout::make(params_, grids_)),
        buffer_(settings.replay_capacity),
        init_rng_(settings.seed ^ 0x5eed0001ULL),
        noise_rng_(settings.seed ^ 0x5eed0002ULL),
        replay_rng_(settings.seed ^ 0x5eed0003ULL),
        dist_rng_(settings.seed ^ 0x5eed0004ULL) {
    const std::size_t critic_in = layout_.joint_obs_len + layout_.joint_act_len;
    for (std::size_t i = 0; i < layout_.agents(); ++i) {
      AgentBundle ag;
      ag.actor = make_net(detail::net_sizes(layout_.obs_len(i), settings_.hidden,
                                            layout_.action_counts[i]),
                          init_rng_);
      ag.critic = make_net(detail::net_sizes(critic_in, settings_.hidden, 1), init_rng_);
      ag.target_actor = ag.actor;    // targets start as exact copies
      ag.target_critic = ag.critic;
      ag.actor_opt = AdamState::for_net(ag.actor, settings_.lr_actor);
      ag.critic_opt = AdamState::for_net(ag.critic, settings_.lr_critic);
      agents_.push_back(std::move(ag));
    }
  }

  const AgentLayout& layout() const { return layout_; }
  std::vector<AgentBundle>& agents() { return agents_; }
  ReplayBuffer<Transition>& buffer() { return buffer_; }

  std::vector<double> normalized_agent_obs(std::size_t i, const AgentObservations& raw) const {
    const std::vector<double>* src = nullptr;
    if (i == 0) {
      src = &raw.bess;
    } else if (i <= params_.building_count()) {
      src = &raw.thermal[i - 1];
    } else {
      src = &raw.hess;
    }
    return normalize(*src, layout_.schemas[i], stats_);
  }

  std::vector<double> normalized_joint_obs(const AgentObservations& raw) const {
    std::vector<double> joint;
    joint.reserve(layout_.joint_obs_len);
    for (std::size_t i = 0; i < layout_.agents(); ++i) {
      const auto v = normalized_agent_obs(i, raw);
      joint.insert(joint.end(), v.begin(), v.end());
    }
    return joint;
  }

  // Mean-squared temporal-difference regression for critic i; returns the
  // pre-step loss. Targets come from the frozen target networks only.
  double critic_update(std::size_t i, const std::vector<const Transition*>& batch) {
    if (batch.empty()) throw ConfigError("critic_update: empty batch");
    AgentBundle& ag = agents_[i];
    const double inv_k = 1.0 / static_cast<double>(batch.size());
    NetGradients grads = NetGradients::zeros_like(ag.critic);
    double loss = 0.0;
    std::vector<double> next_in(layout_.joint_obs_len + layout_.joint_act_len);
    std::vector<double> in(layout_.joint_obs_len + layout_.joint_act_len);
    for (const Transition* tr : batch) {
      // Greedy next joint action under the target actors.
      std::copy(tr->next_obs.begin(), tr->next_obs.end(), next_in.begin());
      for (std::size_t j = 0; j < layout_.agents(); ++j) {
        const std::vector<double> obs_j(
            tr->next_obs.begin() + layout_.obs_offset[j],
            tr->next_obs.begin() + layout_.obs_offset[j] + layout_.obs_len(j));
        const auto logits = forward(agents_[j].target_actor, obs_j);
        const std::size_t pick = argmax_index(logits);
        double* block = next_in.data() + layout_.joint_obs_len + layout_.act_offset[j];
        std::fill(block, block + layout_.action_counts[j], 0.0);
        block[pick] = 1.0;
      }
      const double y =
          tr->rewards[i] + settings_.gamma * forward(ag.target_critic, next_in)[0];

      std::copy(tr->obs.begin(), tr->obs.end(), in.begin());
      std::copy(tr->actions.begin(), tr->actions.end(), in.begin() + layout_.joint_obs_len);
      ForwardCache cache;
      const double q = forward_cached(ag.critic, in, cache)[0];
      const double err = q - y;
      loss += err * err * inv_k;
      backward_accumulate(ag.critic, cache, {2.0 * err * inv_k}, grads);
    }
    if (!std::isfinite(loss)) throw DivergenceError("critic loss diverged");
    adam_step(ag.critic_opt, ag.critic, grads);
    return loss;
  }

  // Policy-gradient ascent on critic i's value. Only agent i's action is
  // re-sampled (straight-through Gumbel-Softmax); the other agents act
  // greedily through their live actors, so no gradient reaches them.
  double actor_update(std::size_t i, const std::vector<const Transition*>& batch) {
    if (batch.empty()) throw ConfigError("actor_update: empty batch");
    AgentBundle& ag = agents_[i];
    const double inv_k = 1.0 / static_cast<double>(batch.size());
    NetGradients grads = NetGradients::zeros_like(ag.actor);
    double objective = 0.0;
    std::vector<double> in(layout_.joint_obs_len + layout_.joint_act_len);
    for (const Transition* tr : batch) {
      std::copy(tr->obs.begin(), tr->obs.end(), in.begin());
      for (std::size_t j = 0; j < layout_.agents(); ++j) {
        if (j == i) continue;
        const std::vector<double> obs_j(
            tr->obs.begin() + layout_.obs_offset[j],
            tr->obs.begin() + layout_.obs_offset[j] + layout_.obs_len(j));
        const auto logits = forward(agents_[j].actor, obs_j);
        const std::size_t pick = argmax_index(logits);
        double* block = in.data() + layout_.joint_obs_len + layout_.act_offset[j];
        std::fill(block, block + layout_.action_counts[j], 0.0);
        block[pick] = 1.0;
      }
      const std::vector<double> obs_i(
          tr->obs.begin() + layout_.obs_offset[i],
          tr->obs.begin() + layout_.obs_offset[i] + layout_.obs_len(i));
      ForwardCache actor_cache;
      const auto logits = forward_cached(ag.actor, obs_i, actor_cache);
      const auto noise = sample_gumbel_noise(logits.size(), noise_rng_);
      const auto soft = gumbel_softmax_with_noise(logits, noise, settings_.gs_temperature);
      const std::size_t pick = argmax_index(soft);
      double* block = in.data() + layout_.joint_obs_len + layout_.act_offset[i];
      std::fill(block, block + layout_.action_counts[i], 0.0);
      block[pick] = 1.0;  // forward pass sees the hard selection

      ForwardCache critic_cache;
      objective += forward_cached(ag.critic, in, critic_cache)[0] * inv_k;
      const auto d_in = backward_input(ag.critic, critic_cache, {inv_k});
      const double* d_act =
          d_in.data() + layout_.joint_obs_len + layout_.act_offset[i];
      // Backward pass flows through the soft sample (straight-through).
      double dot = 0.0;
      for (std::size_t m = 0; m < soft.size(); ++m) dot += d_act[m] * soft[m];
      std::vector<double> d_logits(soft.size());
      for (std::size_t m = 0; m < soft.size(); ++m) {
        d_logits[m] = soft[m] * (d_act[m] - dot) / settings_.gs_temperature;
      }
      backward_accumulate(ag.actor, actor_cache, d_logits, grads);
    }
    if (!std::isfinite(objective)) throw DivergenceError("actor objective diverged");
    grads.scale(-1.0);  // ascend
    adam_step(ag.actor_opt, ag.actor, grads);
    return objective;
  }

  void soft_update_targets() {
    for (AgentBundle& ag : agents_) {
      soft_update(ag.target_actor, ag.actor, settings_.rho);
      soft_update(ag.target_critic, ag.critic, settings_.rho);
    }
  }

  std::size_t warmup_threshold() const {
    const double frac = std::clamp(settings_.warmup_fraction, 0.0, 1.0);
    const auto wanted = static_cast<std::size_t>(
        std::ceil(frac * static_cast<double>(settings_.replay_capacity)));
    return std::max<std::size_t>(wanted, settings_.batch_size);
  }

  // Full training loop: rollouts with Gumbel-Softmax exploration, repair,
  // settlement, replay; one update round per slot whenever the buffer has
  // warmed up and the episode index is a training episode.
  std::vector<EpisodeReward> train(const TraceSet& trace) {
    const std::size_t t_slots = settings_.slots_per_episode;
    if (trace.size() < t_slots) {
      throw ConfigError("training trace has " + std::to_string(trace.size()) +
                        " slots, need at least " + std::to_string(t_slots));
    }
    const std::size_t days = trace.size() / t_slots;
    const std::size_t j = params_.building_count();
    std::vector<EpisodeReward> log;
    log.reserve(settings_.episodes);

    for (std::size_t ep = 1; ep <= settings_.episodes; ++ep) {
      const std::size_t start = ((ep - 1) % days) * t_slots;
      EnvState state = EnvState::initial(params_);
      ExogenousSlot exo = detail::resolve_exo(trace, start, 0, t_slots, j,
                                              settings_.chi, dist_rng_, true);
      EpisodeReward row;
      row.episode = ep;
      const bool training_episode = ep % settings_.t_fre == 0;

      for (std::size_t t = 0; t < t_slots; ++t) {
        const AgentObservations raw = observe(state, exo, params_);
        const std::vector<double> joint_obs = normalized_joint_obs(raw);

        RawJointAction raw_action;
        std::vector<double> joint_onehot(layout_.joint_act_len, 0.0);
        for (std::size_t i = 0; i < layout_.agents(); ++i) {
          const std::vector<double> obs_i(
              joint_obs.begin() + layout_.obs_offset[i],
              joint_obs.begin() + layout_.obs_offset[i] + layout_.obs_len(i));
          const auto logits = forward(agents_[i].actor, obs_i);
          const auto soft = gumbel_softmax(logits, settings_.gs_temperature, noise_rng_);
          const std::size_t pick = argmax_index(soft);
          joint_onehot[layout_.act_offset[i] + pick] = 1.0;
          if (i == 0) {
            raw_action.bess = pick;
          } else if (i <= j) {
            raw_action.thermal.push_back(pick);
          } else {
            raw_action.hess = pick;
          }
        }

        const RepairedAction action = repair_actions(raw_action, grids_, state, exo, params_);
        auto [next_state, settlement] = settle_slot(state, action, exo, params_);
        const RewardVector r = rewards(settlement, params_);

        const std::size_t t_next = (t + 1) % t_slots;
        const ExogenousSlot next_exo =
            detail::resolve_exo(trace, start, t_next, t_slots, j, settings_.chi,
                                dist_rng_, t + 1 < t_slots);
        EnvState obs_state = next_state;
        obs_state.t = t_next;  // within-episode position for the time feature
        const std::vector<double> next_joint_obs =
            normalized_joint_obs(observe(obs_state, next_exo, params_));

        Transition tr;
        tr.obs = joint_obs;
        tr.actions = std::move(joint_onehot);
        tr.rewards.reserve(layout_.agents());
        tr.rewards.push_back(r.bess);
        for (double v : r.thermal) tr.rewards.push_back(v);
        tr.rewards.push_back(r.hess);
        tr.next_obs = next_joint_obs;
        buffer_.push(std::move(tr));

        row.bess += r.bess;
        row.hess += r.hess;
        row.thermal_mean +=
            std::accumulate(r.thermal.begin(), r.thermal.end(), 0.0) /
            static_cast<double>(j);
        row.total += r.total();

        if (training_episode && buffer_.size() >= warmup_threshold()) {
          for (std::size_t i = 0; i < layout_.agents(); ++i) {
            const auto batch = buffer_.sample(settings_.batch_size, replay_rng_);
            critic_update(i, batch);
            actor_update(i, batch);
          }
          soft_update_targets();
        }

        state = next_state;
        exo = next_exo;
      }
      log.push_back(row);
    }
    return log;
  }

  const SystemParams& params() const { return params_; }
  const ActionGrids& grids() const { return grids_; }
  const ObservationStats& stats() const { return stats_; }
  const TrainSettings& settings() const { return settings_; }

 private:
  SystemParams params_;
  ActionGrids grids_;
  ObservationStats stats_;
  TrainSettings settings_;
  AgentLayout layout_;
  std::vector<AgentBundle> agents_;
  ReplayBuffer<Transition> buffer_;
  Rng init_rng_, noise_rng_, replay_rng_, dist_rng_;
};

// Greedy decentralized controller around trained actors: local observation,
// argmax action, rule repair. No exploration noise, no learning.
class TrainedPolicy : public Policy {
 public:
  TrainedPolicy(std::vector<DenseNet> actors, ActionGrids grids, ObservationStats stats,
                std::string name = "proposed")
      : actors_(std::move(actors)), grids_(std::move(grids)), stats_(std::move(stats)),
        name_(std::move(name)) {}

  RepairedAction act(const EnvState& state, const ExogenousSlot& exo,
                     const SystemParams& p) override {
    const std::size_t j = p.building_count();
    if (actors_.size() != j + 2) throw ShapeError("trained policy needs J+2 actors");
    const AgentObservations raw = observe(state, exo, p);
    RawJointAction raw_action;
    auto pick = [&](std::size_t i, const std::vector<double>& obs,
                    const ObservationSchema& schema) {
      return argmax_index(forward(actors_[i], normalize(obs, schema, stats_)));
    };
    raw_action.bess = pick(0, raw.bess, bess_schema());
    for (std::size_t i = 0; i < j; ++i) {
      raw_action.thermal.push_back(pick(1 + i, raw.thermal[i], thermal_schema(i)));
    }
    raw_action.hess = pick(j + 1, raw.hess, hess_schema(j));
    return repair_actions(raw_action, grids_, state, exo, p);
  }

  std::string name() const override { return name_; }

 private:
  std::vector<DenseNet> actors_;
  ActionGrids grids_;
  ObservationStats stats_;
  std::string name_;
};

}  // namespace hbmes
