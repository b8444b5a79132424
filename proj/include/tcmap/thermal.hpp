#pragma once

// Lumped-RC tile thermal model: one node per tile, a conductance to ambient and
// a conductance to each of the four mesh neighbors.
//
//   c dT/dt = P - g_amb (T - T_amb) - L T
//
// L is the weighted graph Laplacian of the mesh with edge weight g_adj.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tcmap/errors.hpp"
#include "tcmap/platform.hpp"

namespace tcmap {

struct ThermalParams {
  double t_ambient_c = 45.0;
  double c_tile = 0.03;
  double g_amb = 0.5;
  double g_adj = 0.125;
  double dt_s = 0.01;

  double max_stable_dt() const { return 0.5 * c_tile / (g_amb + 4.0 * g_adj); }
};

inline void validate(const ThermalParams& p) {
  if (!(p.c_tile > 0)) throw InputError("thermal.c_tile must be > 0");
  if (!(p.g_amb > 0)) throw InputError("thermal.g_amb must be > 0");
  if (!(p.g_adj >= 0)) throw InputError("thermal.g_adj must be >= 0");
  if (!(p.dt_s > 0)) throw InputError("thermal.dt_s must be > 0");
  if (!std::isfinite(p.t_ambient_c)) throw InputError("thermal.t_ambient_c must be finite");
  if (p.dt_s > p.max_stable_dt())
    throw InputError("thermal.dt_s=" + std::to_string(p.dt_s) + " exceeds the explicit stability bound " +
                     std::to_string(p.max_stable_dt()));
}

struct ThermalState {
  std::vector<double> temps_c;
  double time_s = 0.0;
};

inline ThermalState ambient_state(std::size_t n, const ThermalParams& p) {
  return ThermalState{std::vector<double>(n, p.t_ambient_c), 0.0};
}

struct TraceSample {
  double time_s;
  double temp_c;
  bool operator==(const TraceSample&) const = default;
};

struct TemperatureTrace {
  CoreId core_id = 0;
  std::vector<TraceSample> samples;
};

/// Neighbor lists of the 4-connected mesh.
inline std::vector<std::vector<CoreId>> mesh_neighbors(const GridDims& dims) {
  std::vector<std::vector<CoreId>> out(dims.size());
  for (CoreId id = 0; id < dims.size(); ++id) {
    const GridPos pos = position_of(id, dims);
    constexpr int dx[] = {-1, 1, 0, 0};
    constexpr int dy[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const GridPos nb{pos.x + dx[k], pos.y + dy[k]};
      if (nb.x < 0 || nb.y < 0 || nb.x >= dims.rows || nb.y >= dims.cols) continue;
      out[id].push_back(core_at(nb, dims));
    }
  }
  return out;
}

inline Eigen::MatrixXd laplacian(const GridDims& dims, double g_adj) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  const auto nbrs = mesh_neighbors(dims);
  for (CoreId i = 0; i < nbrs.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (CoreId j : nbrs[i]) {
      lap(row, static_cast<Eigen::Index>(j)) -= g_adj;
      lap(row, row) += g_adj;
    }
  }
  return lap;
}

inline void check_powers(std::span<const double> powers) {
  for (double p : powers)
    if (!(p >= 0.0) || !std::isfinite(p)) throw InputError("tile powers must be finite and non-negative");
}

/// Explicit Euler stepper; precomputes the neighbor structure once per chip.
class ThermalModel {
 public:
  ThermalModel(const GridDims& dims, const ThermalParams& params)
      : dims_(dims), params_(params), neighbors_(mesh_neighbors(dims)) {
    validate(params_);
  }

  const ThermalParams& params() const { return params_; }
  std::size_t size() const { return neighbors_.size(); }

  ThermalState step(const ThermalState& state, std::span<const double> powers) const {
    const std::size_t n = size();
    if (state.temps_c.size() != n || powers.size() != n)
      throw DimensionMismatch("thermal step: expected " + std::to_string(n) + " tiles");
    check_powers(powers);
    ThermalState next{std::vector<double>(n), state.time_s + params_.dt_s};
    const double scale = params_.dt_s / params_.c_tile;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = state.temps_c[i];
      double flow = powers[i] - params_.g_amb * (t - params_.t_ambient_c);
      for (CoreId j : neighbors_[i]) flow -= params_.g_adj * (t - state.temps_c[j]);
      next.temps_c[i] = t + scale * flow;
    }
    return next;
  }

  /// Solves (g_amb I + L) T_rise = P and returns T_amb + T_rise.
  std::vector<double> steady_state(std::span<const double> powers) const {
    const std::size_t n = size();
    if (powers.size() != n) throw DimensionMismatch("steady_state: expected " + std::to_string(n) + " tiles");
    check_powers(powers);
    Eigen::MatrixXd system = laplacian(dims_, params_.g_adj);
    system.diagonal().array() += params_.g_amb;
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(powers.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd rise = system.llt().solve(rhs);
    std::vector<double> temps(n);
    for (std::size_t i = 0; i < n; ++i) temps[i] = params_.t_ambient_c + rise(static_cast<Eigen::Index>(i));
    return temps;
  }

 private:
  GridDims dims_;
  ThermalParams params_;
  std::vector<std::vector<CoreId>> neighbors_;
};

inline ThermalState step(const ThermalState& state, std::span<const double> powers, const ThermalParams& params,
                         const ChipModel& chip) {
  return ThermalModel(chip.dims, params).step(state, powers);
}

inline std::vector<double> steady_state(std::span<const double> powers, const ThermalParams& params,
                                        const ChipModel& chip) {
  return ThermalModel(chip.dims, params).steady_state(powers);
}

}  // namespace tcmap
