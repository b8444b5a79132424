#pragma once

// Mesh chip model: process-variation grid, per-tile wire/grid parameters and
// maximum frequency, and mesh geometry.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "tcmap/errors.hpp"
#include "tcmap/rng.hpp"

namespace tcmap {

using CoreId = std::size_t;

/// rows x cols tile mesh.
struct GridDims {
  int rows = 4;
  int cols = 4;

  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool operator==(const GridDims&) const = default;
};

/// Tile coordinates; x is the row index, y the column index.
struct GridPos {
  int x = 0;
  int y = 0;
  bool operator==(const GridPos&) const = default;
};

inline int manhattan_distance(GridPos a, GridPos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline void validate(const GridDims& dims) {
  if (dims.rows < 1 || dims.cols < 1) throw InputError("grid dimensions must be positive");
}

inline GridPos position_of(CoreId id, const GridDims& dims) {
  return {static_cast<int>(id / static_cast<std::size_t>(dims.cols)),
          static_cast<int>(id % static_cast<std::size_t>(dims.cols))};
}

inline CoreId core_at(GridPos pos, const GridDims& dims) {
  return static_cast<CoreId>(pos.x) * static_cast<CoreId>(dims.cols) + static_cast<CoreId>(pos.y);
}

/// Dimensionless process-variation values p(x, y), stored row-major.
struct PvGrid {
  GridDims dims;
  std::vector<double> p;
  std::uint64_t seed = 0;

  double at(GridPos pos) const { return p[core_at(pos, dims)]; }
  bool operator==(const PvGrid&) const = default;
};

/// Technology constants: W = kappa1 p, H = kappa2 p, Res = gamma p, f = beta min p.
struct TechConstants {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double gamma = 1.0;
  double beta_hz = 3.0e9;
};

inline void validate(const TechConstants& t) {
  if (!(t.kappa1 > 0 && t.kappa2 > 0 && t.gamma > 0 && t.beta_hz > 0))
    throw InputError("technology constants must be strictly positive");
}

struct Tile {
  CoreId id = 0;
  GridPos pos;
  double f_max_hz = 0.0;
  double wire_width = 0.0;
  double wire_height = 0.0;
  double grid_resistance = 0.0;
};

struct ChipModel {
  GridDims dims;
  std::vector<Tile> tiles;
  TechConstants tech;
  /// Per tile, the grid cells whose minimum p bounds the tile frequency.
  std::vector<std::vector<GridPos>> critical_path_cells;

  std::size_t size() const { return tiles.size(); }
  const Tile& tile(CoreId id) const { return tiles.at(id); }
};

/// i.i.d. Normal(1, sigma) draws clamped to [0.5, 1.5], row-major, one Rng
/// normal() call per cell.
inline PvGrid generate_pv_grid(GridDims dims, double sigma, std::uint64_t seed) {
  validate(dims);
  if (!(sigma >= 0.0)) throw InputError("pv_sigma must be non-negative");
  PvGrid grid{dims, std::vector<double>(dims.size()), seed};
  Rng rng(seed);
  for (double& value : grid.p) value = std::clamp(rng.normal(1.0, sigma), 0.5, 1.5);
  return grid;
}

/// Cells within Manhattan distance `radius` of `center`, clipped to the grid.
inline std::vector<GridPos> critical_path_neighborhood(GridPos center, GridDims dims, int radius) {
  std::vector<GridPos> cells;
  for (int x = center.x - radius; x <= center.x + radius; ++x) {
    for (int y = center.y - radius; y <= center.y + radius; ++y) {
      const GridPos cell{x, y};
      if (x < 0 || y < 0 || x >= dims.rows || y >= dims.cols) continue;
      if (manhattan_distance(center, cell) <= radius) cells.push_back(cell);
    }
  }
  return cells;
}

inline std::vector<std::vector<GridPos>> default_critical_paths(GridDims dims, int radius = 0) {
  if (radius < 0) throw InputError("critical_path_radius must be non-negative");
  std::vector<std::vector<GridPos>> sets;
  sets.reserve(dims.size());
  for (CoreId id = 0; id < dims.size(); ++id)
    sets.push_back(critical_path_neighborhood(position_of(id, dims), dims, radius));
  return sets;
}

inline std::vector<Tile> derive_tile_parameters(const PvGrid& pv, const TechConstants& tech,
                                                const std::vector<std::vector<GridPos>>& critical_paths) {
  validate(tech);
  if (critical_paths.size() != pv.dims.size())
    throw DimensionMismatch("critical path sets do not match the grid size");
  std::vector<Tile> tiles;
  tiles.reserve(pv.dims.size());
  for (CoreId id = 0; id < pv.dims.size(); ++id) {
    const auto& cells = critical_paths[id];
    if (cells.empty()) throw InputError("empty critical path cell set");
    double p_min = std::numeric_limits<double>::infinity();
    for (GridPos cell : cells) {
      if (cell.x < 0 || cell.y < 0 || cell.x >= pv.dims.rows || cell.y >= pv.dims.cols)
        throw InputError("critical path cell outside the grid");
      p_min = std::min(p_min, pv.at(cell));
    }
    const double p = pv.p[id];
    tiles.push_back(Tile{id, position_of(id, pv.dims), tech.beta_hz * p_min, tech.kappa1 * p,
                         tech.kappa2 * p, tech.gamma * p});
  }
  return tiles;
}

inline std::vector<Tile> derive_tile_parameters(const PvGrid& pv, const TechConstants& tech) {
  return derive_tile_parameters(pv, tech, default_critical_paths(pv.dims));
}

struct ChipConfig {
  GridDims dims;
  double pv_sigma = 0.1;
  std::uint64_t pv_seed = 1;
  double beta_ghz = 3.0;
  int critical_path_radius = 0;
};

inline ChipModel build_chip(const ChipConfig& cfg) {
  validate(cfg.dims);
  TechConstants tech;
  tech.beta_hz = cfg.beta_ghz * 1e9;
  const PvGrid pv = generate_pv_grid(cfg.dims, cfg.pv_sigma, cfg.pv_seed);
  auto paths = default_critical_paths(cfg.dims, cfg.critical_path_radius);
  ChipModel chip{cfg.dims, derive_tile_parameters(pv, tech, paths), tech, std::move(paths)};
  return chip;
}

/// Center tile used for offline task profiling.
inline CoreId center_core(const GridDims& dims) { return core_at({(dims.rows - 1) / 2, (dims.cols - 1) / 2}, dims); }

}  // namespace tcmap
