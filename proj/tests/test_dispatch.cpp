#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "hbmes/dispatch.hpp"
#include "hbmes/rng.hpp"

using namespace hbmes;
using Catch::Approx;

namespace {

double thermal_balance_slack(const HeatDispatch& d, double q_fc, const SystemParams& p) {
  const double served =
      std::accumulate(d.p_sp_actual.begin(), d.p_sp_actual.end(), 0.0);
  return q_fc * p.eta_h2c -
         (d.p_tc + d.p_td + served - d.p_gb * p.eta_h2c) * p.delta_t;
}

}  // namespace

TEST_CASE("dispatch: no heat anywhere") {
  SystemParams p;
  auto d = dispatch_heat(0.0, {0.0, 0.0, 0.0, 0.0}, 0.0, p);
  CHECK(d.p_gb == 0.0);
  CHECK(d.p_tc == 0.0);
  CHECK(d.p_td == 0.0);
  CHECK(d.p_thermal == 0.0);
  for (double v : d.p_sp_actual) CHECK(v == 0.0);
}

TEST_CASE("dispatch: fuel-cell surplus charges the tank, no gas") {
  SystemParams p;
  auto d = dispatch_heat(9.8, {1.0, 1.0, 0.0, 0.0}, 0.0, p);
  CHECK(d.p_tc == Approx(4.86).margin(1e-12));
  CHECK(d.p_td == 0.0);
  CHECK(d.p_gb == 0.0);
  CHECK(d.p_sp_actual[0] == Approx(1.0));
  CHECK(thermal_balance_slack(d, 9.8, p) >= -1e-9);
}

TEST_CASE("dispatch: shortfall releases the tank first, boiler caps at max") {
  SystemParams p;
  auto d = dispatch_heat(0.0, {10.0, 10.0, 0.0, 0.0}, 5.0, p);
  CHECK(d.p_td == Approx(-4.5).margin(1e-12));
  CHECK(d.p_tc == 0.0);
  CHECK(d.p_gb == Approx(20.0).margin(1e-12));  // demand exceeds what gas can cover
  // Supply is scaled into the requests when short.
  const double served = d.p_sp_actual[0] + d.p_sp_actual[1];
  CHECK(served == Approx(d.p_thermal).margin(1e-9));
  CHECK(d.p_sp_actual[0] == Approx(d.p_sp_actual[1]).margin(1e-12));
  CHECK(thermal_balance_slack(d, 0.0, p) >= -1e-9);
}

TEST_CASE("dispatch invariants over fuzzed inputs") {
  SystemParams p;
  Rng rng(11);
  for (int trial = 0; trial < 5000; ++trial) {
    const double q_fc = rng.uniform(0.0, 20.0);
    const double q_th = rng.uniform(0.0, p.q_th_max);
    std::vector<double> req(4);
    for (double& v : req) v = rng.uniform01() < 0.25 ? 0.0 : rng.uniform(0.0, 20.0);
    auto d = dispatch_heat(q_fc, req, q_th, p);

    CHECK(d.p_gb >= 0.0);
    CHECK(d.p_gb <= p.p_gb_max + 1e-12);
    CHECK(d.p_tc * d.p_td == 0.0);
    CHECK(d.p_tc <= p.p_tc_max + 1e-12);
    CHECK(-d.p_td <= p.p_td_max + 1e-12);
    for (std::size_t i = 0; i < req.size(); ++i) {
      CHECK(d.p_sp_actual[i] <= req[i] + 1e-12);
      CHECK(d.p_sp_actual[i] >= 0.0);
    }
    const double next_cwt = q_th + (d.p_tc * p.eta_tc + d.p_td / p.eta_td) * p.delta_t;
    CHECK(next_cwt >= -1e-9);
    CHECK(next_cwt <= p.q_th_max + 1e-9);
    CHECK(thermal_balance_slack(d, q_fc, p) >= -1e-9);
  }
}

TEST_CASE("dispatch is gas-minimal among brute-forced feasible dispatches") {
  SystemParams p;
  // Coarse version of the acceptance grid; the acceptance suite runs the
  // full one.
  for (double q_fc : {0.0, 6.0, 14.0}) {
    for (double sum_sp : {0.0, 10.0, 25.0, 40.0}) {
      for (double q_th : {0.0, 20.0, 50.0}) {
        std::vector<double> req = {sum_sp / 2.0, sum_sp / 2.0};
        auto d = dispatch_heat(q_fc, req, q_th, p);
        const double served =
            std::accumulate(d.p_sp_actual.begin(), d.p_sp_actual.end(), 0.0);

        const double step = 0.25;
        for (double gb = 0.0; gb <= p.p_gb_max + 1e-9; gb += step) {
          if (gb >= d.p_gb - 1e-6) continue;  // only cheaper candidates matter
          bool feasible = false;
          // Candidate CWT moves: pure injection or pure release.
          for (double tc = 0.0; tc <= p.p_tc_max + 1e-9 && !feasible; tc += step) {
            const double level = q_th + tc * p.eta_tc * p.delta_t;
            if (level > p.q_th_max + 1e-9) break;
            const double slack =
                q_fc * p.eta_h2c - (tc + served - gb * p.eta_h2c) * p.delta_t;
            if (slack >= -1e-9) feasible = true;
          }
          for (double td = 0.0; td <= p.p_td_max + 1e-9 && !feasible; td += step) {
            const double level = q_th - td / p.eta_td * p.delta_t;
            if (level < -1e-9) break;
            const double slack =
                q_fc * p.eta_h2c - (-td + served - gb * p.eta_h2c) * p.delta_t;
            if (slack >= -1e-9) feasible = true;
          }
          INFO("q_fc=" << q_fc << " sum_sp=" << sum_sp << " q_th=" << q_th
                       << " cheaper gb=" << gb);
          CHECK_FALSE(feasible);
        }
      }
    }
  }
}
