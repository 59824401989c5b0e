#pragma once

#include <cstddef>
#include <vector>

#include "hbmes/errors.hpp"
#include "hbmes/params.hpp"

namespace hbmes {

// Uniform discretizations of the three action spaces. Storage grids span
// [-discharge_max, +charge_max]; thermal grids span [0, p_sp_max] per
// building. Endpoints are always exactly representable.
struct ActionGrids {
  std::vector<double> bess_levels;
  std::vector<double> hess_levels;
  std::vector<std::vector<double>> thermal_levels;
};

namespace detail {
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}
}  // namespace detail

inline ActionGrids build_action_grids(const SystemParams& p, std::size_t n_bess,
                                      std::size_t n_hess, std::size_t n_thermal) {
  if (n_bess < 2 || n_hess < 2 || n_thermal < 2) {
    throw ConfigError("action grids need at least 2 levels per agent");
  }
  ActionGrids g;
  g.bess_levels = detail::uniform_grid(-p.p_bd_max, p.p_bc_max, n_bess);
  g.hess_levels = detail::uniform_grid(-p.p_fc_max, p.p_el_max, n_hess);
  g.thermal_levels.reserve(p.building_count());
  for (const auto& b : p.buildings) {
    g.thermal_levels.push_back(detail::uniform_grid(0.0, b.p_sp_max, n_thermal));
  }
  return g;
}

}  // namespace hbmes
