// Command-line front end: batch experiments over the simulator, the trainers,
// the baselines, and the exhaustive oracle.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbmes/hbmes.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
};

hbmes::RunConfig resolve_config(const GlobalArgs& g) {
  hbmes::RunConfig cfg = hbmes::load_config(g.config_path);
  if (g.seed_set) {
    cfg.seed = g.seed;
    cfg.overridden.insert("seed");
  }
  if (g.out_set) {
    cfg.out_dir = g.out_dir;
    cfg.overridden.insert("out_dir");
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> names;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) names.push_back(cur);
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hydrogen-based building multi-energy system: simulation, "
               "multi-agent training, and baseline comparison"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "Run configuration file")->required();
  app.add_option("--seed", g.seed, "Override the config seed")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out", g.out_dir, "Override the config output directory")
      ->each([&](const std::string&) { g.out_set = true; });

  auto* synth = app.add_subcommand("synth-traces", "Generate synthetic exogenous traces");
  auto* train = app.add_subcommand("train", "Train the configured algorithm");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a trained checkpoint");
  auto* compare = app.add_subcommand("compare", "Tabulate several policies side by side");
  auto* oracle = app.add_subcommand("oracle", "Exhaustive short-horizon lower bound");

  std::string checkpoint_path;
  evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint to evaluate")->required();

  std::string compare_policies = "b1,b2";
  std::string compare_checkpoint, compare_b3_checkpoint;
  compare->add_option("--policies", compare_policies,
                      "Comma list from: b1, b2, b3, proposed, oracle");
  compare->add_option("--checkpoint", compare_checkpoint, "Checkpoint for 'proposed'");
  compare->add_option("--b3-checkpoint", compare_b3_checkpoint, "Checkpoint for 'b3'");

  std::size_t oracle_horizon = 0;
  oracle->add_option("--horizon", oracle_horizon, "Override oracle_horizon");

  CLI11_PARSE(app, argc, argv);

  try {
    hbmes::RunConfig cfg = resolve_config(g);

    if (synth->parsed()) {
      const auto run = hbmes::run_synth(cfg);
      std::cout << "wrote " << run.train_path << "\nwrote " << run.test_path << "\n";
    } else if (train->parsed()) {
      const auto run = hbmes::run_train(cfg);
      std::cout << "episodes: " << run.log.size() << "\nwrote " << run.reward_log_path
                << "\nwrote " << run.checkpoint_path << "\nwrote "
                << run.resolved_config_path << "\n";
    } else if (evaluate->parsed()) {
      const auto run = hbmes::run_evaluate(cfg, checkpoint_path);
      std::cout << "policy: " << run.report.policy
                << "\ntotal_cost: " << hbmes::format_double(run.report.total_cost)
                << "\natd: " << hbmes::format_double(run.report.atd) << "\nwrote "
                << run.report_path << "\nwrote " << run.slots_path << "\n";
    } else if (compare->parsed()) {
      const auto run = hbmes::run_compare(cfg, split_names(compare_policies),
                                          compare_checkpoint, compare_b3_checkpoint);
      for (const auto& row : run.rows) {
        std::cout << row.policy << ": cost=" << hbmes::format_double(row.total_cost)
                  << " atd=" << hbmes::format_double(row.atd) << "\n";
      }
      std::cout << "wrote " << run.compare_path << "\n";
    } else if (oracle->parsed()) {
      if (oracle_horizon > 0) {
        cfg.oracle_horizon = oracle_horizon;
        cfg.overridden.insert("oracle_horizon");
      }
      const auto run = hbmes::run_oracle(cfg);
      std::cout << "objective: " << hbmes::format_double(run.result.objective)
                << "\ncost: " << hbmes::format_double(run.result.cost) << "\nwrote "
                << run.summary_path << "\nwrote " << run.actions_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
