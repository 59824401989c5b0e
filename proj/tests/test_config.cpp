#include <catch2/catch_amalgamated.hpp>

#include "hbmes/config.hpp"

using namespace hbmes;
using Catch::Approx;

namespace {

std::string strip_override_marks(std::string text) {
  const std::string mark = "  # overridden";
  std::size_t pos;
  while ((pos = text.find(mark)) != std::string::npos) text.erase(pos, mark.size());
  return text;
}

}  // namespace

TEST_CASE("an empty config resolves to the reference defaults") {
  const RunConfig cfg = parse_config_text("");
  CHECK(cfg.episodes == 30000);
  CHECK(cfg.replay_capacity == 120000);
  CHECK(cfg.batch_size == 256);
  CHECK(cfg.n_thermal == 9);
  CHECK(cfg.h_pv == 100.0);
  CHECK(cfg.lr_actor == Approx(0.00008));
  CHECK(cfg.hidden == std::vector<std::size_t>{128, 128, 128});
  CHECK(cfg.overridden.empty());

  const SystemParams p = cfg.to_system_params();
  CHECK(p.building_count() == 4);
  CHECK(p.buildings[1].beta_init == 20.0);
  CHECK(p.buildings[3].beta_init == 21.5);
  CHECK(p.omega_el == Approx(0.2397));
  CHECK(p.omega_fc == Approx(1.4985));
}

TEST_CASE("overridden keys are parsed, applied and marked in the echo") {
  const RunConfig cfg = parse_config_text(
      "[pv]\n"
      "h_pv = 250\n"
      "# a comment line\n"
      "n_bess = 21\n"
      "hidden = 64,64\n"
      "beta_min = 19,20,20,21\n");
  CHECK(cfg.h_pv == 250.0);
  CHECK(cfg.n_bess == 21);
  CHECK(cfg.hidden == std::vector<std::size_t>{64, 64});
  const SystemParams p = cfg.to_system_params();
  CHECK(p.buildings[2].beta_min == 20.0);
  CHECK(p.buildings[3].beta_min == 21.0);

  const std::string echo = echo_config(cfg);
  CHECK(echo.find("h_pv = 250  # overridden") != std::string::npos);
  CHECK(echo.find("n_bess = 21  # overridden") != std::string::npos);
  CHECK(echo.find("episodes = 30000\n") != std::string::npos);  // default, unmarked
}

TEST_CASE("the resolved echo is itself a valid config with the same resolution") {
  const RunConfig cfg = parse_config_text(
      "h_pv = 250\nseed = 42\nepisodes = 12\nbeta_init = 21,20,22,21.5\n"
      "trace_csv = some/path.csv\nthermostat_rule = min_variant\n");
  const std::string echo1 = echo_config(cfg);
  const RunConfig back = parse_config_text(echo1);
  const std::string echo2 = echo_config(back);
  CHECK(strip_override_marks(echo1) == strip_override_marks(echo2));
  CHECK(back.seed == 42);
  CHECK(back.trace_csv == "some/path.csv");
  CHECK(back.thermostat_rule == "min_variant");
}

TEST_CASE("errors carry the offending key") {
  SECTION("unknown key") {
    try {
      parse_config_text("not_a_key = 1\n");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("not_a_key") != std::string::npos);
    }
  }
  SECTION("bad number") {
    try {
      parse_config_text("h_pv = banana\n");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("h_pv") != std::string::npos);
    }
  }
  SECTION("malformed line") {
    CHECK_THROWS_AS(parse_config_text("just some words\n"), ConfigError);
  }
  SECTION("wrong per-building list length") {
    const RunConfig cfg = parse_config_text("buildings = 2\nbeta_min = 19,20,21\n");
    try {
      cfg.to_system_params();
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("beta_min") != std::string::npos);
    }
  }
  SECTION("scalar per-building keys broadcast") {
    RunConfig cfg = parse_config_text("buildings = 2\nbeta_init = 22\n");
    const SystemParams p = cfg.to_system_params();
    CHECK(p.buildings[0].beta_init == 22.0);
    CHECK(p.buildings[1].beta_init == 22.0);
  }
}

TEST_CASE("semantic validation catches bad settings") {
  auto expect_reject = [](const std::string& text, const std::string& needle) {
    const RunConfig cfg = parse_config_text(text);
    try {
      cfg.validate();
      FAIL("expected rejection of: " << text);
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_reject("algorithm = sarsa\n", "algorithm");
  expect_reject("t_fre = 0\n", "t_fre");
  expect_reject("gamma = 1.5\n", "gamma");
  expect_reject("warmup_fraction = 0\n", "warmup_fraction");
  expect_reject("n_bess = 1\n", "grid sizes");
  expect_reject("thermostat_rule = whatever\n", "thermostat_rule");
  expect_reject("eta_bc = 1.2\n", "efficienc");
  expect_reject("beta_init = 50\n", "comfort band");
  expect_reject("replay_capacity = 10\nbatch_size = 100\n", "replay_capacity");
}

TEST_CASE("defaults pass validation for both algorithms") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.algorithm = "ddqn";
  CHECK_NOTHROW(cfg.validate());
}
