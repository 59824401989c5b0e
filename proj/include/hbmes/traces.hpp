#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "hbmes/csvio.hpp"
#include "hbmes/errors.hpp"
#include "hbmes/rng.hpp"
#include "hbmes/state.hpp"

namespace hbmes {

// Aligned exogenous time series. Slots are abstract indices; there is no
// timezone or calendar handling.
struct TraceSet {
  std::vector<double> price_buy;
  std::vector<double> load;
  std::vector<double> irradiance;
  std::vector<double> temp_out;
  std::vector<double> emission;
  std::vector<double> gas_price;
  // Optional per-building disturbance columns (deterministic tests only).
  std::vector<std::vector<double>> disturbance;
  double slot_hours = 1.0;
  std::string role = "train";

  std::size_t size() const { return price_buy.size(); }

  ExogenousSlot slot(std::size_t t) const {
    ExogenousSlot e;
    e.price_buy = price_buy[t];
    e.load = load[t];
    e.irradiance = irradiance[t];
    e.temp_out = temp_out[t];
    e.emission = emission[t];
    e.gas_price = gas_price[t];
    e.disturbance.reserve(disturbance.size());
    for (const auto& col : disturbance) e.disturbance.push_back(col[t]);
    return e;
  }

  TraceSet slice(std::size_t start, std::size_t count, std::string new_role) const {
    if (start + count > size()) throw ConfigError("trace slice out of range");
    TraceSet out;
    auto cut = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin() + start, v.begin() + start + count);
    };
    out.price_buy = cut(price_buy);
    out.load = cut(load);
    out.irradiance = cut(irradiance);
    out.temp_out = cut(temp_out);
    out.emission = cut(emission);
    out.gas_price = cut(gas_price);
    for (const auto& col : disturbance) out.disturbance.push_back(cut(col));
    out.slot_hours = slot_hours;
    out.role = std::move(new_role);
    return out;
  }
};

// Bounded uniform thermal disturbance, chi = half-width in degrees.
struct DisturbanceModel {
  double chi = 0.0;
  std::uint64_t seed = 0;
};

inline double draw_disturbance(const DisturbanceModel& m, Rng& rng) {
  if (m.chi < 0.0) throw ValidationError("disturbance half-width must be >= 0");
  if (m.chi == 0.0) return 0.0;
  return rng.uniform(-m.chi, m.chi);
}

inline const char* kTraceHeader = "t,price_buy,load_kw,irradiance_kw_m2,temp_out,emission_kg_kwh,gas_price";

// Parse and validate a trace CSV. `tau_sell` is checked against every buying
// price: the selling price must stay strictly below all of them.
inline TraceSet load_traces(const std::string& path, double tau_sell,
                            std::string role = "train") {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError("trace file is empty: " + path);

  const auto header = split_csv_line(lines[0]);
  const std::vector<std::string> required = {
      "t", "price_buy", "load_kw", "irradiance_kw_m2",
      "temp_out", "emission_kg_kwh", "gas_price"};
  for (std::size_t i = 0; i < required.size(); ++i) {
    if (i >= header.size() || header[i] != required[i]) {
      throw ValidationError(path + ": missing or misplaced column '" + required[i] + "'");
    }
  }
  std::size_t dist_cols = 0;
  for (std::size_t i = required.size(); i < header.size(); ++i) {
    const std::string expect = "disturbance_" + std::to_string(dist_cols + 1);
    if (header[i] != expect) {
      throw ValidationError(path + ": unexpected column '" + header[i] + "'");
    }
    ++dist_cols;
  }

  TraceSet ts;
  ts.role = std::move(role);
  ts.disturbance.resize(dist_cols);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const auto fields = split_csv_line(lines[row]);
    if (fields.size() != header.size()) {
      throw ValidationError(path + ": line " + std::to_string(row + 1) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    const std::size_t file_line = row + 1;
    auto field = [&](std::size_t col) {
      const std::string where =
          path + " line " + std::to_string(file_line) + " column '" + header[col] + "'";
      const double v = parse_double(fields[col], where);
      if (!std::isfinite(v)) throw ValidationError("non-finite value at " + where);
      return v;
    };
    const double price = field(1);
    const double load = field(2);
    const double irr = field(3);
    const double gas = field(6);
    auto positive = [&](double v, std::size_t col, const char* what) {
      if (v <= 0.0) {
        throw ValidationError(path + ": line " + std::to_string(file_line) + " column '" +
                              header[col] + "': " + what + " must be positive");
      }
    };
    positive(price, 1, "price");
    positive(gas, 6, "gas price");
    if (load < 0.0) {
      throw ValidationError(path + ": line " + std::to_string(file_line) +
                            " column 'load_kw': load must be non-negative");
    }
    if (irr < 0.0) {
      throw ValidationError(path + ": line " + std::to_string(file_line) +
                            " column 'irradiance_kw_m2': irradiance must be non-negative");
    }
    ts.price_buy.push_back(price);
    ts.load.push_back(load);
    ts.irradiance.push_back(irr);
    ts.temp_out.push_back(field(4));
    ts.emission.push_back(field(5));
    ts.gas_price.push_back(gas);
    for (std::size_t d = 0; d < dist_cols; ++d) {
      ts.disturbance[d].push_back(field(required.size() + d));
    }
  }
  if (ts.size() == 0) throw ValidationError(path + ": no data rows");

  const double min_price = *std::min_element(ts.price_buy.begin(), ts.price_buy.end());
  if (tau_sell >= min_price) {
    throw ValidationError(path + ": selling price " + format_double(tau_sell) +
                          " must be strictly below the minimum buying price " +
                          format_double(min_price));
  }
  return ts;
}

inline std::string serialize_traces(const TraceSet& ts) {
  std::string out = kTraceHeader;
  for (std::size_t d = 0; d < ts.disturbance.size(); ++d) {
    out += ",disturbance_" + std::to_string(d + 1);
  }
  out += '\n';
  for (std::size_t t = 0; t < ts.size(); ++t) {
    out += std::to_string(t);
    for (double v : {ts.price_buy[t], ts.load[t], ts.irradiance[t], ts.temp_out[t],
                     ts.emission[t], ts.gas_price[t]}) {
      out += ',';
      out += format_double(v);
    }
    for (const auto& col : ts.disturbance) {
      out += ',';
      out += format_double(col[t]);
    }
    out += '\n';
  }
  return out;
}

inline void save_traces(const TraceSet& ts, const std::string& path) {
  write_text_file(path, serialize_traces(ts));
}

// Daily shapes for the synthetic generator: a three-level time-of-use price
// ladder, diurnal sinusoids for load and outdoor temperature, and a clipped
// sinusoid for irradiance that is zero at night.
struct SynthProfile {
  double price_valley = 0.3;
  double price_flat = 0.7;
  double price_peak = 1.2;
  double load_base = 12.0;
  double load_amp = 6.0;
  double load_noise = 0.5;
  double temp_base = 27.0;
  double temp_amp = 6.0;
  double temp_noise = 0.5;
  double irr_peak = 0.8;
  double emission = 0.968;
  double gas_price = 0.287;
  std::size_t slots_per_day = 24;
};

inline TraceSet synthesize_traces(std::size_t days, std::uint64_t seed,
                                  const SynthProfile& prof, std::string role = "train") {
  if (days < 1) throw ConfigError("synthesize_traces: days must be >= 1");
  const std::size_t spd = prof.slots_per_day;
  Rng rng(seed);
  TraceSet ts;
  ts.role = std::move(role);
  ts.slot_hours = 24.0 / static_cast<double>(spd);
  const double pi = 3.14159265358979323846;
  for (std::size_t day = 0; day < days; ++day) {
    for (std::size_t s = 0; s < spd; ++s) {
      const double h = 24.0 * static_cast<double>(s) / static_cast<double>(spd);
      double price = prof.price_valley;
      if ((h >= 8.0 && h < 11.0) || (h >= 15.0 && h < 18.0)) price = prof.price_flat;
      if ((h >= 11.0 && h < 15.0) || (h >= 18.0 && h < 22.0)) price = prof.price_peak;
      const double load =
          std::max(0.5, prof.load_base + prof.load_amp * std::sin(2.0 * pi * (h - 10.0) / 24.0) +
                            prof.load_noise * rng.uniform(-1.0, 1.0));
      const double temp = prof.temp_base + prof.temp_amp * std::sin(2.0 * pi * (h - 15.0) / 24.0) +
                          prof.temp_noise * rng.uniform(-1.0, 1.0);
      const double irr =
          (h > 6.0 && h < 18.0) ? prof.irr_peak * std::max(0.0, std::sin(pi * (h - 6.0) / 12.0))
                                : 0.0;
      ts.price_buy.push_back(price);
      ts.load.push_back(load);
      ts.irradiance.push_back(irr);
      ts.temp_out.push_back(temp);
      ts.emission.push_back(prof.emission);
      ts.gas_price.push_back(prof.gas_price);
    }
  }
  return ts;
}

struct SeriesStats {
  double min = 0.0;
  double max = 0.0;
};

// Exact per-series extrema of a trace set.
struct TraceStats {
  SeriesStats price_buy, load, irradiance, temp_out, emission, gas_price;
};

inline SeriesStats series_stats(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("stats of an empty series");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

inline TraceStats trace_stats(const TraceSet& ts) {
  if (ts.size() == 0) throw ValidationError("stats of an empty trace set");
  TraceStats st;
  st.price_buy = series_stats(ts.price_buy);
  st.load = series_stats(ts.load);
  st.irradiance = series_stats(ts.irradiance);
  st.temp_out = series_stats(ts.temp_out);
  st.emission = series_stats(ts.emission);
  st.gas_price = series_stats(ts.gas_price);
  return st;
}

}  // namespace hbmes
