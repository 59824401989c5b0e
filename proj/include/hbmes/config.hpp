#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "hbmes/csvio.hpp"
#include "hbmes/errors.hpp"
#include "hbmes/params.hpp"
#include "hbmes/traces.hpp"
#include "hbmes/trainer.hpp"

namespace hbmes {

// Flat `key = value` run configuration. Defaults mirror the reference
// parameter set; `[section]` headers are cosmetic. Per-building keys accept
// either a single value (broadcast to every building) or a comma list with
// one entry per building.
struct RunConfig {
  // system
  std::size_t buildings = 4;
  double delta_t = 1.0;
  std::size_t t_slots = 24;  // slots per episode/day
  double tau_sell = 0.1;
  double mu_c = 0.06;
  // pv
  double eta_pv = 0.2;
  double h_pv = 100.0;
  // boiler
  double p_gb_max = 20.0;
  double eta_gb = 0.95;
  double gas_price = 0.287;
  // bess
  double b_min = 0.0, b_max = 40.0, b_init = 0.0;
  double p_bc_max = 20.0, p_bd_max = 30.0;
  double eta_bc = 0.95, eta_bd = 0.95;
  double psi_bess = 0.001;
  // cwt
  double q_th_max = 50.0, q_th_init = 0.0;
  double p_tc_max = 10.0, p_td_max = 10.0;
  double eta_tc = 0.9, eta_td = 0.9;
  double psi_cwt = 0.005;
  // hess
  double h_max = 30.0, h_init = 0.0;
  double p_el_max = 20.0, p_fc_max = 20.0;
  double omega_el = 0.2397, omega_fc = 1.4985;
  double eta_hr = 0.7, eta_h2e = 1.4, eta_h2c = 0.7;
  double delta_el_on = 0.158, delta_el_su = 0.97, delta_el_sd = 0.049;
  double delta_fc_on = 0.079, delta_fc_su = 0.0004, delta_fc_sd = 0.0004;
  double pi_fc = 1.0;
  // thermal
  std::vector<double> beta_min = {20.0};
  std::vector<double> beta_max = {25.0};
  std::vector<double> beta_init = {21.0, 20.0, 22.0, 21.5};
  std::vector<double> eps_hvac = {0.8};
  std::vector<double> eta_hvac = {2.5};
  std::vector<double> a_coeff = {0.5};
  std::vector<double> p_sp_max = {20.0};
  double pi_th = 0.35;
  std::string thermostat_rule = "as_printed";
  // grids
  std::size_t n_bess = 7, n_hess = 7, n_thermal = 9;
  // training
  std::string algorithm = "madacr";
  double gamma = 0.95;
  std::size_t batch_size = 256;
  double rho = 0.001;
  std::size_t episodes = 30000;
  std::size_t t_fre = 5;
  std::size_t replay_capacity = 120000;
  double warmup_fraction = 1.0;
  double lr_actor = 0.00008, lr_critic = 0.00008;
  double gs_temperature = 1.0;
  std::vector<std::size_t> hidden = {128, 128, 128};
  double eps_start = 1.0, eps_end = 0.05;
  std::size_t eps_decay_episodes = 0;
  // traces
  std::string trace_csv;  // empty = synthesize
  std::size_t train_days = 90;
  std::size_t test_days = 30;
  double synth_price_valley = 0.3, synth_price_flat = 0.7, synth_price_peak = 1.2;
  double synth_load_base = 12.0, synth_load_amp = 6.0, synth_load_noise = 0.5;
  double synth_temp_base = 27.0, synth_temp_amp = 6.0, synth_temp_noise = 0.5;
  double synth_irr_peak = 0.8;
  double synth_emission = 0.968;
  // evaluation
  std::size_t t_test = 720;
  double chi = 0.0;
  std::size_t oracle_horizon = 2;
  std::size_t oracle_ceiling = 2000000;
  // run
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // Keys that appeared in the parsed file (marked in the echo).
  std::set<std::string> overridden;

  SystemParams to_system_params() const;
  TrainSettings to_train_settings() const;
  SynthProfile to_synth_profile() const;
  void validate() const;
};

namespace detail {

struct FieldDef {
  const char* section;
  const char* name;
  void (*set)(RunConfig&, const std::string&, const std::string& key);
  std::string (*get)(const RunConfig&);
};

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_integer(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" +
                      value + "'");
  }
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

inline double parse_config_double(const std::string& value, const std::string& key) {
  try {
    return parse_double(value, "config key '" + key + "'");
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

template <double RunConfig::* M>
constexpr FieldDef field_double(const char* section, const char* name) {
  return {section, name,
          [](RunConfig& c, const std::string& v, const std::string& key) {
            c.*M = parse_config_double(v, key);
          },
          [](const RunConfig& c) { return format_double(c.*M); }};
}

template <std::size_t RunConfig::* M>
constexpr FieldDef field_size(const char* section, const char* name) {
  return {section, name,
          [](RunConfig& c, const std::string& v, const std::string& key) {
            c.*M = parse_integer<std::size_t>(v, key);
          },
          [](const RunConfig& c) { return std::to_string(c.*M); }};
}

template <std::uint64_t RunConfig::* M>
constexpr FieldDef field_u64(const char* section, const char* name) {
  return {section, name,
          [](RunConfig& c, const std::string& v, const std::string& key) {
            c.*M = parse_integer<std::uint64_t>(v, key);
          },
          [](const RunConfig& c) { return std::to_string(c.*M); }};
}

template <std::string RunConfig::* M>
constexpr FieldDef field_string(const char* section, const char* name) {
  return {section, name,
          [](RunConfig& c, const std::string& v, const std::string&) { c.*M = v; },
          [](const RunConfig& c) { return c.*M; }};
}

template <std::vector<double> RunConfig::* M>
constexpr FieldDef field_double_list(const char* section, const char* name) {
  return {section, name,
          [](RunConfig& c, const std::string& v, const std::string& key) {
            std::vector<double> out;
            for (const auto& part : split_list(v)) {
              out.push_back(parse_config_double(part, key));
            }
            c.*M = std::move(out);
          },
          [](const RunConfig& c) {
            std::string s;
            for (double v : c.*M) {
              if (!s.empty()) s += ',';
              s += format_double(v);
            }
            return s;
          }};
}

template <std::vector<std::size_t> RunConfig::* M>
constexpr FieldDef field_size_list(const char* section, const char* name) {
  return {section, name,
          [](RunConfig& c, const std::string& v, const std::string& key) {
            std::vector<std::size_t> out;
            for (const auto& part : split_list(v)) {
              out.push_back(parse_integer<std::size_t>(part, key));
            }
            c.*M = std::move(out);
          },
          [](const RunConfig& c) {
            std::string s;
            for (std::size_t v : c.*M) {
              if (!s.empty()) s += ',';
              s += std::to_string(v);
            }
            return s;
          }};
}

inline const std::vector<FieldDef>& config_fields() {
  static const std::vector<FieldDef> defs = {
      field_size<&RunConfig::buildings>("system", "buildings"),
      field_double<&RunConfig::delta_t>("system", "delta_t"),
      field_size<&RunConfig::t_slots>("system", "t_slots"),
      field_double<&RunConfig::tau_sell>("system", "tau_sell"),
      field_double<&RunConfig::mu_c>("system", "mu_c"),
      field_double<&RunConfig::eta_pv>("pv", "eta_pv"),
      field_double<&RunConfig::h_pv>("pv", "h_pv"),
      field_double<&RunConfig::p_gb_max>("boiler", "p_gb_max"),
      field_double<&RunConfig::eta_gb>("boiler", "eta_gb"),
      field_double<&RunConfig::gas_price>("boiler", "gas_price"),
      field_double<&RunConfig::b_min>("bess", "b_min"),
      field_double<&RunConfig::b_max>("bess", "b_max"),
      field_double<&RunConfig::b_init>("bess", "b_init"),
      field_double<&RunConfig::p_bc_max>("bess", "p_bc_max"),
      field_double<&RunConfig::p_bd_max>("bess", "p_bd_max"),
      field_double<&RunConfig::eta_bc>("bess", "eta_bc"),
      field_double<&RunConfig::eta_bd>("bess", "eta_bd"),
      field_double<&RunConfig::psi_bess>("bess", "psi_bess"),
      field_double<&RunConfig::q_th_max>("cwt", "q_th_max"),
      field_double<&RunConfig::q_th_init>("cwt", "q_th_init"),
      field_double<&RunConfig::p_tc_max>("cwt", "p_tc_max"),
      field_double<&RunConfig::p_td_max>("cwt", "p_td_max"),
      field_double<&RunConfig::eta_tc>("cwt", "eta_tc"),
      field_double<&RunConfig::eta_td>("cwt", "eta_td"),
      field_double<&RunConfig::psi_cwt>("cwt", "psi_cwt"),
      field_double<&RunConfig::h_max>("hess", "h_max"),
      field_double<&RunConfig::h_init>("hess", "h_init"),
      field_double<&RunConfig::p_el_max>("hess", "p_el_max"),
      field_double<&RunConfig::p_fc_max>("hess", "p_fc_max"),
      field_double<&RunConfig::omega_el>("hess", "omega_el"),
      field_double<&RunConfig::omega_fc>("hess", "omega_fc"),
      field_double<&RunConfig::eta_hr>("hess", "eta_hr"),
      field_double<&RunConfig::eta_h2e>("hess", "eta_h2e"),
      field_double<&RunConfig::eta_h2c>("hess", "eta_h2c"),
      field_double<&RunConfig::delta_el_on>("hess", "delta_el_on"),
      field_double<&RunConfig::delta_el_su>("hess", "delta_el_su"),
      field_double<&RunConfig::delta_el_sd>("hess", "delta_el_sd"),
      field_double<&RunConfig::delta_fc_on>("hess", "delta_fc_on"),
      field_double<&RunConfig::delta_fc_su>("hess", "delta_fc_su"),
      field_double<&RunConfig::delta_fc_sd>("hess", "delta_fc_sd"),
      field_double<&RunConfig::pi_fc>("hess", "pi_fc"),
      field_double_list<&RunConfig::beta_min>("thermal", "beta_min"),
      field_double_list<&RunConfig::beta_max>("thermal", "beta_max"),
      field_double_list<&RunConfig::beta_init>("thermal", "beta_init"),
      field_double_list<&RunConfig::eps_hvac>("thermal", "eps_hvac"),
      field_double_list<&RunConfig::eta_hvac>("thermal", "eta_hvac"),
      field_double_list<&RunConfig::a_coeff>("thermal", "a_coeff"),
      field_double_list<&RunConfig::p_sp_max>("thermal", "p_sp_max"),
      field_double<&RunConfig::pi_th>("thermal", "pi_th"),
      field_string<&RunConfig::thermostat_rule>("thermal", "thermostat_rule"),
      field_size<&RunConfig::n_bess>("grids", "n_bess"),
      field_size<&RunConfig::n_hess>("grids", "n_hess"),
      field_size<&RunConfig::n_thermal>("grids", "n_thermal"),
      field_string<&RunConfig::algorithm>("training", "algorithm"),
      field_double<&RunConfig::gamma>("training", "gamma"),
      field_size<&RunConfig::batch_size>("training", "batch_size"),
      field_double<&RunConfig::rho>("training", "rho"),
      field_size<&RunConfig::episodes>("training", "episodes"),
      field_size<&RunConfig::t_fre>("training", "t_fre"),
      field_size<&RunConfig::replay_capacity>("training", "replay_capacity"),
      field_double<&RunConfig::warmup_fraction>("training", "warmup_fraction"),
      field_double<&RunConfig::lr_actor>("training", "lr_actor"),
      field_double<&RunConfig::lr_critic>("training", "lr_critic"),
      field_double<&RunConfig::gs_temperature>("training", "gs_temperature"),
      field_size_list<&RunConfig::hidden>("training", "hidden"),
      field_double<&RunConfig::eps_start>("training", "eps_start"),
      field_double<&RunConfig::eps_end>("training", "eps_end"),
      field_size<&RunConfig::eps_decay_episodes>("training", "eps_decay_episodes"),
      field_string<&RunConfig::trace_csv>("traces", "trace_csv"),
      field_size<&RunConfig::train_days>("traces", "train_days"),
      field_size<&RunConfig::test_days>("traces", "test_days"),
      field_double<&RunConfig::synth_price_valley>("traces", "synth_price_valley"),
      field_double<&RunConfig::synth_price_flat>("traces", "synth_price_flat"),
      field_double<&RunConfig::synth_price_peak>("traces", "synth_price_peak"),
      field_double<&RunConfig::synth_load_base>("traces", "synth_load_base"),
      field_double<&RunConfig::synth_load_amp>("traces", "synth_load_amp"),
      field_double<&RunConfig::synth_load_noise>("traces", "synth_load_noise"),
      field_double<&RunConfig::synth_temp_base>("traces", "synth_temp_base"),
      field_double<&RunConfig::synth_temp_amp>("traces", "synth_temp_amp"),
      field_double<&RunConfig::synth_temp_noise>("traces", "synth_temp_noise"),
      field_double<&RunConfig::synth_irr_peak>("traces", "synth_irr_peak"),
      field_double<&RunConfig::synth_emission>("traces", "synth_emission"),
      field_size<&RunConfig::t_test>("evaluation", "t_test"),
      field_double<&RunConfig::chi>("evaluation", "chi"),
      field_size<&RunConfig::oracle_horizon>("evaluation", "oracle_horizon"),
      field_size<&RunConfig::oracle_ceiling>("evaluation", "oracle_ceiling"),
      field_u64<&RunConfig::seed>("run", "seed"),
      field_string<&RunConfig::out_dir>("run", "out_dir"),
  };
  return defs;
}

// Broadcast a per-building key: one entry applies to every building.
inline double building_value(const std::vector<double>& v, std::size_t i,
                             std::size_t j, const char* key) {
  if (v.size() == 1) return v[0];
  if (v.size() != j) {
    throw ConfigError(std::string("config key '") + key + "' needs 1 or " +
                      std::to_string(j) + " entries, got " + std::to_string(v.size()));
  }
  return v[i];
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  const auto& defs = detail::config_fields();
  std::size_t line_no = 0;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = detail::trim(line);
    if (!s.empty() && s.back() == '\r') s.pop_back();
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') continue;  // section header, cosmetic
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + s + "'");
    }
    const std::string key = detail::trim(s.substr(0, eq));
    std::string value = s.substr(eq + 1);
    const std::size_t hash = value.find('#');
    if (hash != std::string::npos) value = value.substr(0, hash);
    value = detail::trim(value);

    const detail::FieldDef* found = nullptr;
    for (const auto& def : defs) {
      if (key == def.name) {
        found = &def;
        break;
      }
    }
    if (!found) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    }
    found->set(cfg, value, key);
    cfg.overridden.insert(key);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

// Render every key with its resolved value; keys that came from the parsed
// file carry an `# overridden` marker. The output is itself valid input.
inline std::string echo_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& def : detail::config_fields()) {
    if (section != def.section) {
      if (!out.empty()) out += '\n';
      section = def.section;
      out += '[' + section + "]\n";
    }
    out += def.name;
    out += " = ";
    out += def.get(cfg);
    if (cfg.overridden.count(def.name)) out += "  # overridden";
    out += '\n';
  }
  return out;
}

inline SystemParams RunConfig::to_system_params() const {
  SystemParams p;
  p.eta_pv = eta_pv;
  p.h_pv = h_pv;
  p.p_gb_max = p_gb_max;
  p.eta_gb = eta_gb;
  p.gas_price = gas_price;
  p.b_min = b_min;
  p.b_max = b_max;
  p.b_init = b_init;
  p.p_bc_max = p_bc_max;
  p.p_bd_max = p_bd_max;
  p.eta_bc = eta_bc;
  p.eta_bd = eta_bd;
  p.psi_bess = psi_bess;
  p.q_th_max = q_th_max;
  p.q_th_init = q_th_init;
  p.p_tc_max = p_tc_max;
  p.p_td_max = p_td_max;
  p.eta_tc = eta_tc;
  p.eta_td = eta_td;
  p.psi_cwt = psi_cwt;
  p.h_max = h_max;
  p.h_init = h_init;
  p.p_el_max = p_el_max;
  p.p_fc_max = p_fc_max;
  p.omega_el = omega_el;
  p.omega_fc = omega_fc;
  p.eta_hr = eta_hr;
  p.eta_h2e = eta_h2e;
  p.eta_h2c = eta_h2c;
  p.delta_el_on = delta_el_on;
  p.delta_el_su = delta_el_su;
  p.delta_el_sd = delta_el_sd;
  p.delta_fc_on = delta_fc_on;
  p.delta_fc_su = delta_fc_su;
  p.delta_fc_sd = delta_fc_sd;
  p.pi_fc = pi_fc;
  p.pi_th = pi_th;
  p.mu_c = mu_c;
  p.tau_sell = tau_sell;
  p.delta_t = delta_t;
  if (thermostat_rule == "as_printed") {
    p.thermostat_rule = ThermostatRule::AsPrinted;
  } else if (thermostat_rule == "min_variant") {
    p.thermostat_rule = ThermostatRule::MinVariant;
  } else {
    throw ConfigError("config key 'thermostat_rule': expected 'as_printed' or "
                      "'min_variant', got '" + thermostat_rule + "'");
  }
  if (buildings == 0) throw ConfigError("config key 'buildings': must be >= 1");
  p.buildings.clear();
  for (std::size_t i = 0; i < buildings; ++i) {
    BuildingParams b;
    b.beta_min = detail::building_value(beta_min, i, buildings, "beta_min");
    b.beta_max = detail::building_value(beta_max, i, buildings, "beta_max");
    b.beta_init = detail::building_value(beta_init, i, buildings, "beta_init");
    b.eps_hvac = detail::building_value(eps_hvac, i, buildings, "eps_hvac");
    b.eta_hvac = detail::building_value(eta_hvac, i, buildings, "eta_hvac");
    b.a_coeff = detail::building_value(a_coeff, i, buildings, "a_coeff");
    b.p_sp_max = detail::building_value(p_sp_max, i, buildings, "p_sp_max");
    p.buildings.push_back(b);
  }
  p.validate();
  return p;
}

inline TrainSettings RunConfig::to_train_settings() const {
  TrainSettings s;
  s.gamma = gamma;
  s.batch_size = batch_size;
  s.rho = rho;
  s.episodes = episodes;
  s.t_fre = t_fre;
  s.replay_capacity = replay_capacity;
  s.warmup_fraction = warmup_fraction;
  s.lr_actor = lr_actor;
  s.lr_critic = lr_critic;
  s.gs_temperature = gs_temperature;
  s.hidden = hidden;
  s.slots_per_episode = t_slots;
  s.chi = chi;
  s.seed = seed;
  s.eps_start = eps_start;
  s.eps_end = eps_end;
  s.eps_decay_episodes = eps_decay_episodes;
  return s;
}

inline SynthProfile RunConfig::to_synth_profile() const {
  SynthProfile prof;
  prof.price_valley = synth_price_valley;
  prof.price_flat = synth_price_flat;
  prof.price_peak = synth_price_peak;
  prof.load_base = synth_load_base;
  prof.load_amp = synth_load_amp;
  prof.load_noise = synth_load_noise;
  prof.temp_base = synth_temp_base;
  prof.temp_amp = synth_temp_amp;
  prof.temp_noise = synth_temp_noise;
  prof.irr_peak = synth_irr_peak;
  prof.emission = synth_emission;
  prof.gas_price = gas_price;
  prof.slots_per_day = t_slots;
  return prof;
}

inline void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  to_system_params();  // throws with a field-level message on bad physics
  if (n_bess < 2 || n_hess < 2 || n_thermal < 2) fail("grid sizes must be >= 2");
  if (algorithm != "madacr" && algorithm != "ddqn") {
    fail("config key 'algorithm': expected 'madacr' or 'ddqn', got '" + algorithm + "'");
  }
  if (gamma < 0.0 || gamma > 1.0) fail("config key 'gamma': must be in [0,1]");
  if (rho <= 0.0 || rho > 1.0) fail("config key 'rho': must be in (0,1]");
  if (warmup_fraction <= 0.0 || warmup_fraction > 1.0) {
    fail("config key 'warmup_fraction': must be in (0,1]");
  }
  if (episodes == 0) fail("config key 'episodes': must be >= 1");
  if (t_fre == 0) fail("config key 't_fre': must be >= 1");
  if (batch_size == 0) fail("config key 'batch_size': must be >= 1");
  if (replay_capacity < batch_size) {
    fail("config key 'replay_capacity': must be >= batch_size");
  }
  if (lr_actor <= 0.0 || lr_critic <= 0.0) fail("learning rates must be positive");
  if (gs_temperature <= 0.0) fail("config key 'gs_temperature': must be positive");
  if (hidden.empty()) fail("config key 'hidden': at least one hidden layer");
  if (t_slots == 0) fail("config key 't_slots': must be >= 1");
  if (train_days == 0 || test_days == 0) fail("train_days/test_days must be >= 1");
  if (chi < 0.0) fail("config key 'chi': must be >= 0");
  if (oracle_horizon == 0) fail("config key 'oracle_horizon': must be >= 1");
}

}  // namespace hbmes
