#pragma once

// Task placement policies: the two-level bin/core mapper and the random and
// per-core temperature-matching baselines.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcmap/binning.hpp"
#include "tcmap/errors.hpp"
#include "tcmap/platform.hpp"
#include "tcmap/rng.hpp"
#include "tcmap/workload.hpp"

namespace tcmap {

enum class MapperKind { two_level, random, conventional_tc };

inline std::string to_string(MapperKind k) {
  switch (k) {
    case MapperKind::two_level:
      return "two_level";
    case MapperKind::random:
      return "random";
    case MapperKind::conventional_tc:
      return "conventional_tc";
  }
  return "?";
}

inline std::optional<MapperKind> parse_mapper(const std::string& s) {
  if (s == "two_level") return MapperKind::two_level;
  if (s == "random") return MapperKind::random;
  if (s == "conventional_tc") return MapperKind::conventional_tc;
  return std::nullopt;
}

/// Snapshot of the chip at decision time.
struct MappingContext {
  std::span<const Tile> tiles;
  GridDims dims;
  std::vector<std::optional<double>> busy_until;  // nullopt = free
  std::vector<double> core_temps_c;
  const BinSet* bins = nullptr;
  std::map<std::string, CoreId> prev_core_of_app;
  double now_s = 0.0;
  double tie_tol_c = 0.1;

  bool is_free(CoreId c) const { return !busy_until[c].has_value(); }

  bool eligible(CoreId c, const TaskProfile& task) const {
    return is_free(c) && (task.f_req_hz <= 0.0 || tiles[c].f_max_hz >= task.f_req_hz);
  }

  std::optional<GridPos> prev_pos(const TaskProfile& task) const {
    const auto it = prev_core_of_app.find(task.app_id);
    if (it == prev_core_of_app.end()) return std::nullopt;
    return tiles[it->second].pos;
  }
};

/// Context with every core free and no bins attached.
inline MappingContext make_context(const ChipModel& chip, std::vector<double> temps, double tie_tol_c = 0.1) {
  if (temps.size() != chip.size()) throw DimensionMismatch("make_context: temperature count does not match chip");
  MappingContext ctx;
  ctx.tiles = chip.tiles;
  ctx.dims = chip.dims;
  ctx.busy_until.assign(chip.size(), std::nullopt);
  ctx.core_temps_c = std::move(temps);
  ctx.tie_tol_c = tie_tol_c;
  return ctx;
}

struct MappingDecision {
  std::size_t task = 0;
  std::optional<CoreId> core;
  std::optional<std::size_t> bin;
  double decided_at_s = 0.0;

  bool deferred() const { return !core.has_value(); }
};

namespace detail {

inline double steady_temp(const TaskProfile& task) {
  if (!task.t_steady_c) throw InputError("task " + task.app_id + "/" + task.thread_id + " has not been profiled");
  return *task.t_steady_c;
}

inline bool has_eligible_core(const Bin& bin, const TaskProfile& task, const MappingContext& ctx) {
  for (CoreId c : bin.core_ids)
    if (ctx.eligible(c, task)) return true;
  return false;
}

}  // namespace detail

/// First level: the bin whose average temperature is closest to the task's
/// steady-state temperature. Bins within tie_tol of the best form the
/// candidate list; among several, the one whose center is nearest the
/// application's previous core wins (lowest id when there is none).
inline std::size_t assign_task_to_bin(const TaskProfile& task, const MappingContext& ctx) {
  if (ctx.bins == nullptr || ctx.bins->empty()) throw NoEligibleBin("no bins formed");
  const double target = detail::steady_temp(task);

  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& bin : ctx.bins->bins)
    if (detail::has_eligible_core(bin, task, ctx)) best_gap = std::min(best_gap, std::fabs(bin.avg_temp_c - target));
  if (!std::isfinite(best_gap)) throw NoEligibleBin("no bin has an eligible free core");

  std::vector<const Bin*> candidates;
  for (const auto& bin : ctx.bins->bins)
    if (detail::has_eligible_core(bin, task, ctx) && std::fabs(bin.avg_temp_c - target) <= best_gap + ctx.tie_tol_c)
      candidates.push_back(&bin);
  if (candidates.size() == 1) return candidates.front()->id;

  const auto prev = ctx.prev_pos(task);
  if (!prev) return candidates.front()->id;
  const Bin* chosen = candidates.front();
  int best_dist = std::numeric_limits<int>::max();
  for (const Bin* bin : candidates) {
    const int d = manhattan_distance(bin->center_pos, *prev);
    if (d < best_dist) {
      best_dist = d;
      chosen = bin;
    }
  }
  return chosen->id;
}

/// Second level: highest-frequency eligible core for high-performance tasks,
/// lowest for low-power ones; ties by distance to the previous core, then id.
inline CoreId select_core_in_bin(const TaskProfile& task, const Bin& bin, const MappingContext& ctx) {
  const bool want_fast = task.perf_class == PerfClass::high;
  const auto prev = ctx.prev_pos(task);
  std::optional<CoreId> best;
  for (CoreId c : bin.core_ids) {
    if (!ctx.eligible(c, task)) continue;
    if (!best) {
      best = c;
      continue;
    }
    const double f = ctx.tiles[c].f_max_hz;
    const double f_best = ctx.tiles[*best].f_max_hz;
    if (f != f_best) {
      if (want_fast == (f > f_best)) best = c;
      continue;
    }
    if (prev) {
      const int d = manhattan_distance(ctx.tiles[c].pos, *prev);
      const int d_best = manhattan_distance(ctx.tiles[*best].pos, *prev);
      if (d < d_best || (d == d_best && c < *best)) best = c;
    } else if (c < *best) {
      best = c;
    }
  }
  if (!best) throw NoEligibleCore("bin " + std::to_string(bin.id) + " has no eligible free core");
  return *best;
}

inline MappingDecision map_two_level(std::size_t task_index, const TaskProfile& task, const MappingContext& ctx) {
  MappingDecision decision{task_index, std::nullopt, std::nullopt, ctx.now_s};
  try {
    const std::size_t bin = assign_task_to_bin(task, ctx);
    decision.core = select_core_in_bin(task, ctx.bins->bins[bin], ctx);
    decision.bin = bin;
  } catch (const NoEligibleBin&) {
  } catch (const NoEligibleCore&) {
  }
  return decision;
}

/// Uniform choice among eligible free cores.
inline MappingDecision map_random(std::size_t task_index, const TaskProfile& task, const MappingContext& ctx,
                                  Rng& rng) {
  MappingDecision decision{task_index, std::nullopt, std::nullopt, ctx.now_s};
  std::vector<CoreId> eligible;
  for (CoreId c = 0; c < ctx.tiles.size(); ++c)
    if (ctx.eligible(c, task)) eligible.push_back(c);
  if (!eligible.empty()) decision.core = eligible[rng.index(eligible.size())];
  return decision;
}

/// Greedy per-core temperature matching with no bins and no adjacency.
inline MappingDecision map_conventional_tc(std::size_t task_index, const TaskProfile& task,
                                           const MappingContext& ctx) {
  MappingDecision decision{task_index, std::nullopt, std::nullopt, ctx.now_s};
  const double target = detail::steady_temp(task);
  double best_gap = std::numeric_limits<double>::infinity();
  for (CoreId c = 0; c < ctx.tiles.size(); ++c) {
    if (!ctx.eligible(c, task)) continue;
    const double gap = std::fabs(ctx.core_temps_c[c] - target);
    if (gap < best_gap) {
      best_gap = gap;
      decision.core = c;
    }
  }
  return decision;
}

}  // namespace tcmap
