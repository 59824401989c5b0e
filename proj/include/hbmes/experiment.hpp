#pragma once

#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hbmes/baselines.hpp"
#include "hbmes/config.hpp"
#include "hbmes/csvio.hpp"
#include "hbmes/ddqn.hpp"
#include "hbmes/oracle.hpp"
#include "hbmes/trainer.hpp"

namespace hbmes {

// ---- checkpoints ------------------------------------------------------------
//
//   hbmes-checkpoint v1
//   algorithm <madacr|ddqn>
//   agents <n>
//   net ...   (madacr: actor then critic per agent; ddqn: the action-value net)

struct Checkpoint {
  std::string algorithm;
  std::vector<DenseNet> actors;
  std::vector<DenseNet> critics;
  DenseNet qnet;
};

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  std::string out = "hbmes-checkpoint v1\n";
  out += "algorithm " + ck.algorithm + "\n";
  if (ck.algorithm == "madacr") {
    out += "agents " + std::to_string(ck.actors.size()) + "\n";
    for (std::size_t i = 0; i < ck.actors.size(); ++i) {
      write_net(out, ck.actors[i]);
      write_net(out, ck.critics[i]);
    }
  } else if (ck.algorithm == "ddqn") {
    out += "agents 1\n";
    write_net(out, ck.qnet);
  } else {
    throw ConfigError("cannot serialize checkpoint for algorithm '" + ck.algorithm + "'");
  }
  return out;
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  write_text_file(path, serialize_checkpoint(ck));
}

inline Checkpoint parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "hbmes-checkpoint" || version != "v1") {
    throw ValidationError("not a v1 checkpoint file");
  }
  Checkpoint ck;
  std::string tag;
  in >> tag >> ck.algorithm;
  if (tag != "algorithm") throw ValidationError("checkpoint: missing algorithm line");
  std::size_t agents = 0;
  in >> tag >> agents;
  if (tag != "agents" || agents == 0) throw ValidationError("checkpoint: missing agents line");
  if (ck.algorithm == "madacr") {
    for (std::size_t i = 0; i < agents; ++i) {
      ck.actors.push_back(read_net(in));
      ck.critics.push_back(read_net(in));
    }
  } else if (ck.algorithm == "ddqn") {
    ck.qnet = read_net(in);
  } else {
    throw ValidationError("checkpoint: unknown algorithm '" + ck.algorithm + "'");
  }
  return ck;
}

inline Checkpoint load_checkpoint(const std::string& path) {
  return parse_checkpoint(read_text_file(path));
}

// ---- experiment preparation -------------------------------------------------

struct ExperimentData {
  SystemParams params;
  ActionGrids grids;
  TraceSet train;
  TraceSet test;
  ObservationStats stats;  // from the training split only
};

inline ExperimentData prepare_experiment(const RunConfig& cfg) {
  cfg.validate();
  ExperimentData d;
  d.params = cfg.to_system_params();
  TraceSet full;
  if (cfg.trace_csv.empty()) {
    full = synthesize_traces(cfg.train_days + cfg.test_days, cfg.seed,
                             cfg.to_synth_profile());
    const double min_price =
        *std::min_element(full.price_buy.begin(), full.price_buy.end());
    if (cfg.tau_sell >= min_price) {
      throw ConfigError("tau_sell must stay strictly below the lowest synthetic price");
    }
  } else {
    full = load_traces(cfg.trace_csv, cfg.tau_sell);
  }
  const std::size_t need = (cfg.train_days + cfg.test_days) * cfg.t_slots;
  if (full.size() < need) {
    throw ValidationError("trace provides " + std::to_string(full.size()) +
                          " slots but train_days+test_days need " + std::to_string(need));
  }
  d.train = full.slice(0, cfg.train_days * cfg.t_slots, "train");
  d.test = full.slice(cfg.train_days * cfg.t_slots, cfg.test_days * cfg.t_slots, "test");
  d.stats = ObservationStats::from(trace_stats(d.train), d.params, cfg.t_slots);
  d.grids = build_action_grids(d.params, cfg.n_bess, cfg.n_hess, cfg.n_thermal);
  return d;
}

// ---- emitted files ----------------------------------------------------------

inline std::string reward_log_csv(const std::vector<EpisodeReward>& log) {
  std::string out = "episode,total_reward,reward_bess,reward_hess,reward_thermal_mean\n";
  for (const auto& row : log) {
    out += std::to_string(row.episode) + ',' + format_double(row.total) + ',' +
           format_double(row.bess) + ',' + format_double(row.hess) + ',' +
           format_double(row.thermal_mean) + '\n';
  }
  return out;
}

inline std::string report_summary_csv(const EvaluationReport& rep) {
  std::string out = "metric,value\n";
  out += "policy," + rep.policy + '\n';
  out += "total_cost," + format_double(rep.total_cost) + '\n';
  for (int k = 0; k < 6; ++k) {
    out += "cost_c" + std::to_string(k + 1) + ',' + format_double(rep.c[k]) + '\n';
  }
  out += "atd," + format_double(rep.atd) + '\n';
  out += "total_deviation," + format_double(rep.total_dev) + '\n';
  return out;
}

inline std::string report_slots_csv(const EvaluationReport& rep, std::size_t buildings) {
  std::string out = "t,P_g,B,H,Q_th";
  for (std::size_t i = 1; i <= buildings; ++i) out += ",beta_in_" + std::to_string(i);
  for (int k = 1; k <= 6; ++k) out += ",C" + std::to_string(k);
  out += '\n';
  for (const auto& rec : rep.slots) {
    out += std::to_string(rec.t) + ',' + format_double(rec.p_g) + ',' +
           format_double(rec.bess) + ',' + format_double(rec.hess) + ',' +
           format_double(rec.cwt);
    for (double b : rec.beta_in) out += ',' + format_double(b);
    for (int k = 0; k < 6; ++k) out += ',' + format_double(rec.c[k]);
    out += '\n';
  }
  return out;
}

inline std::string compare_csv(const std::vector<EvaluationReport>& rows) {
  std::string out = "policy,cost,atd,C1,C2,C3,C4,C5,C6\n";
  for (const auto& rep : rows) {
    out += rep.policy + ',' + format_double(rep.total_cost) + ',' + format_double(rep.atd);
    for (int k = 0; k < 6; ++k) out += ',' + format_double(rep.c[k]);
    out += '\n';
  }
  return out;
}

// ---- runs -------------------------------------------------------------------

struct TrainRun {
  ExperimentData data;
  std::vector<EpisodeReward> log;
  Checkpoint checkpoint;
  std::string reward_log_path, checkpoint_path, resolved_config_path;
};

inline TrainRun run_train(const RunConfig& cfg) {
  TrainRun run;
  run.data = prepare_experiment(cfg);
  if (cfg.algorithm == "madacr") {
    MadacrTrainer trainer(run.data.params, run.data.grids, run.data.stats,
                          cfg.to_train_settings());
    run.log = trainer.train(run.data.train);
    run.checkpoint.algorithm = "madacr";
    for (const AgentBundle& ag : trainer.agents()) {
      run.checkpoint.actors.push_back(ag.actor);
      run.checkpoint.critics.push_back(ag.critic);
    }
  } else {
    DdqnTrainer trainer(run.data.params, run.data.grids, run.data.stats,
                        cfg.to_train_settings());
    run.log = trainer.train(run.data.train);
    run.checkpoint.algorithm = "ddqn";
    run.checkpoint.qnet = trainer.qnet();
  }
  const std::filesystem::path out(cfg.out_dir);
  run.reward_log_path = (out / "reward_log.csv").string();
  run.checkpoint_path = (out / "checkpoint.txt").string();
  run.resolved_config_path = (out / "resolved.cfg").string();
  write_text_file(run.reward_log_path, reward_log_csv(run.log));
  save_checkpoint(run.checkpoint, run.checkpoint_path);
  write_text_file(run.resolved_config_path, echo_config(cfg));
  return run;
}

// Build the greedy execution policy a checkpoint describes, verifying its
// shapes against the configured grids and observation schemas.
inline std::unique_ptr<Policy> make_checkpoint_policy(const Checkpoint& ck,
                                                      const ExperimentData& d) {
  const std::size_t j = d.params.building_count();
  if (ck.algorithm == "madacr") {
    if (ck.actors.size() != j + 2) {
      throw ShapeError("checkpoint has " + std::to_string(ck.actors.size()) +
                       " actors but the config needs " + std::to_string(j + 2));
    }
    AgentLayout lay = AgentLayout::make(d.params, d.grids);
    for (std::size_t i = 0; i < ck.actors.size(); ++i) {
      if (ck.actors[i].input_size() != lay.obs_len(i) ||
          ck.actors[i].output_size() != lay.action_counts[i]) {
        throw ShapeError("checkpoint actor " + std::to_string(i) +
                         " is shaped for a different observation/grid layout");
      }
    }
    return std::make_unique<TrainedPolicy>(ck.actors, d.grids, d.stats);
  }
  if (ck.algorithm == "ddqn") {
    const std::size_t n_in = hess_schema(j).size();
    const std::size_t n_out = d.grids.bess_levels.size() * d.grids.hess_levels.size();
    if (ck.qnet.input_size() != n_in || ck.qnet.output_size() != n_out) {
      throw ShapeError("ddqn checkpoint is shaped for a different observation/grid layout");
    }
    return std::make_unique<DdqnPolicy>(ck.qnet, d.grids, d.stats);
  }
  throw ConfigError("checkpoint algorithm '" + ck.algorithm + "' is not executable");
}

struct EvaluateRun {
  EvaluationReport report;
  std::string report_path, slots_path;
};

inline EvaluateRun run_evaluate_policy(const RunConfig& cfg, const ExperimentData& d,
                                       Policy& policy) {
  EvaluateRun run;
  run.report = evaluate(policy, d.test, d.params, std::min(cfg.t_test, d.test.size()),
                        cfg.t_slots, cfg.chi, cfg.seed);
  const std::filesystem::path out(cfg.out_dir);
  run.report_path = (out / (run.report.policy + "_report.csv")).string();
  run.slots_path = (out / (run.report.policy + "_slots.csv")).string();
  write_text_file(run.report_path, report_summary_csv(run.report));
  write_text_file(run.slots_path, report_slots_csv(run.report, d.params.building_count()));
  return run;
}

inline EvaluateRun run_evaluate(const RunConfig& cfg, const std::string& checkpoint_path) {
  const ExperimentData d = prepare_experiment(cfg);
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  auto policy = make_checkpoint_policy(ck, d);
  return run_evaluate_policy(cfg, d, *policy);
}

// Evaluate the oracle's optimal sequence so it can sit in the comparison
// table with the same columns as the policies.
class ReplayPolicy : public Policy {
 public:
  ReplayPolicy(std::vector<RawJointAction> actions, ActionGrids grids)
      : actions_(std::move(actions)), grids_(std::move(grids)) {}

  void reset() override { next_ = 0; }

  RepairedAction act(const EnvState& state, const ExogenousSlot& exo,
                     const SystemParams& p) override {
    if (next_ >= actions_.size()) throw StateError("oracle replay ran past its horizon");
    return repair_actions(actions_[next_++], grids_, state, exo, p);
  }

  std::string name() const override { return "oracle"; }

 private:
  std::vector<RawJointAction> actions_;
  ActionGrids grids_;
  std::size_t next_ = 0;
};

inline OracleResult run_oracle_search(const RunConfig& cfg, const ExperimentData& d) {
  const std::size_t horizon = std::min<std::size_t>(cfg.oracle_horizon, d.test.size());
  std::vector<ExogenousSlot> slots;
  for (std::size_t t = 0; t < horizon; ++t) {
    ExogenousSlot exo = d.test.slot(t);
    exo.disturbance.resize(d.params.building_count(), 0.0);
    slots.push_back(std::move(exo));
  }
  return exhaustive_oracle(EnvState::initial(d.params), slots, d.grids, d.params,
                           cfg.oracle_ceiling);
}

struct CompareRun {
  std::vector<EvaluationReport> rows;
  std::string compare_path;
};

inline CompareRun run_compare(const RunConfig& cfg, const std::vector<std::string>& names,
                              const std::string& checkpoint_path,
                              const std::string& b3_checkpoint_path) {
  const ExperimentData d = prepare_experiment(cfg);
  CompareRun run;
  for (const std::string& name : names) {
    std::unique_ptr<Policy> policy;
    std::size_t window = std::min(cfg.t_test, d.test.size());
    if (name == "b1") {
      policy = std::make_unique<B1Policy>();
    } else if (name == "b2") {
      policy = std::make_unique<B2Policy>(detect_price_levels(d.train.price_buy));
    } else if (name == "b3") {
      if (b3_checkpoint_path.empty()) {
        throw ConfigError("policy 'b3' needs a ddqn checkpoint (--b3-checkpoint)");
      }
      policy = make_checkpoint_policy(load_checkpoint(b3_checkpoint_path), d);
    } else if (name == "proposed") {
      if (checkpoint_path.empty()) {
        throw ConfigError("policy 'proposed' needs a checkpoint (--checkpoint)");
      }
      policy = make_checkpoint_policy(load_checkpoint(checkpoint_path), d);
    } else if (name == "oracle") {
      const OracleResult result = run_oracle_search(cfg, d);
      policy = std::make_unique<ReplayPolicy>(result.actions, d.grids);
      window = std::min(window, cfg.oracle_horizon);
    } else {
      throw ConfigError("unknown policy '" + name +
                        "'; valid names: b1, b2, b3, proposed, oracle");
    }
    EvaluationReport rep = evaluate(*policy, d.test, d.params, window, cfg.t_slots,
                                    cfg.chi, cfg.seed);
    rep.policy = name;
    run.rows.push_back(std::move(rep));
  }
  run.compare_path = (std::filesystem::path(cfg.out_dir) / "compare.csv").string();
  write_text_file(run.compare_path, compare_csv(run.rows));
  return run;
}

struct OracleRun {
  OracleResult result;
  std::string summary_path, actions_path;
};

inline OracleRun run_oracle(const RunConfig& cfg) {
  const ExperimentData d = prepare_experiment(cfg);
  OracleRun run;
  run.result = run_oracle_search(cfg, d);
  std::string summary = "metric,value\n";
  summary += "objective," + format_double(run.result.objective) + '\n';
  summary += "cost," + format_double(run.result.cost) + '\n';
  summary += "horizon," + std::to_string(run.result.actions.size()) + '\n';
  std::string actions = "t,bess_kw,hess_kw";
  for (std::size_t i = 1; i <= d.params.building_count(); ++i) {
    actions += ",thermal_" + std::to_string(i) + "_kw";
  }
  actions += '\n';
  for (std::size_t t = 0; t < run.result.actions.size(); ++t) {
    const RawJointAction& raw = run.result.actions[t];
    actions += std::to_string(t) + ',' + format_double(d.grids.bess_levels[raw.bess]) +
               ',' + format_double(d.grids.hess_levels[raw.hess]);
    for (std::size_t i = 0; i < raw.thermal.size(); ++i) {
      actions += ',' + format_double(d.grids.thermal_levels[i][raw.thermal[i]]);
    }
    actions += '\n';
  }
  const std::filesystem::path out(cfg.out_dir);
  run.summary_path = (out / "oracle.csv").string();
  run.actions_path = (out / "oracle_actions.csv").string();
  write_text_file(run.summary_path, summary);
  write_text_file(run.actions_path, actions);
  return run;
}

struct SynthRun {
  std::string train_path, test_path;
};

inline SynthRun run_synth(const RunConfig& cfg) {
  cfg.validate();
  const TraceSet full = synthesize_traces(cfg.train_days + cfg.test_days, cfg.seed,
                                          cfg.to_synth_profile());
  SynthRun run;
  const std::filesystem::path out(cfg.out_dir);
  run.train_path = (out / "train.csv").string();
  run.test_path = (out / "test.csv").string();
  save_traces(full.slice(0, cfg.train_days * cfg.t_slots, "train"), run.train_path);
  save_traces(full.slice(cfg.train_days * cfg.t_slots, cfg.test_days * cfg.t_slots, "test"),
              run.test_path);
  return run;
}

}  // namespace hbmes
