#pragma once

// Temperature-based bin packing of cores: DBSCAN over the 1-D core
// temperatures, with deterministic seeding so results are reproducible.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tcmap/errors.hpp"
#include "tcmap/platform.hpp"

namespace tcmap {

enum class BinUpdatePolicy { per_application, per_task };
enum class BinEvent { task_mapped, application_completed };

inline std::string to_string(BinUpdatePolicy p) {
  return p == BinUpdatePolicy::per_task ? "per_task" : "per_application";
}

struct BinConfig {
  double epsilon_c = 0.7;
  int min_pts = 1;
  BinUpdatePolicy policy = BinUpdatePolicy::per_application;
};

inline void validate(const BinConfig& cfg) {
  if (!(cfg.epsilon_c > 0)) throw InputError("binning.epsilon_c must be > 0");
  if (cfg.min_pts < 1) throw InputError("binning.min_pts must be >= 1");
}

struct Bin {
  std::size_t id = 0;
  std::vector<CoreId> core_ids;  // ascending
  double avg_temp_c = 0.0;
  GridPos center_pos;
};

struct BinSet {
  std::vector<Bin> bins;  // ascending avg_temp_c; bins[i].id == i
  double formed_at_s = 0.0;
  BinUpdatePolicy policy = BinUpdatePolicy::per_application;

  bool empty() const { return bins.empty(); }
};

/// Member tile minimizing the summed Manhattan distance to all members; ties
/// go to the lowest core id.
inline GridPos bin_center(std::span<const CoreId> members, const GridDims& dims) {
  long best = std::numeric_limits<long>::max();
  GridPos center{};
  for (CoreId candidate : members) {
    const GridPos pos = position_of(candidate, dims);
    long total = 0;
    for (CoreId other : members) total += manhattan_distance(pos, position_of(other, dims));
    if (total < best) {
      best = total;
      center = pos;
    }
  }
  return center;
}

/// Cluster labels from DBSCAN with neighborhood |Ta - Tb| < eps (the point
/// itself counts toward min_pts). Clusters are numbered in discovery order,
/// seeding from the lowest unlabeled core id; noise cores get a singleton
/// cluster each.
inline std::vector<std::size_t> dbscan_labels(std::span<const double> temps, double eps, int min_pts) {
  constexpr std::size_t unlabeled = std::numeric_limits<std::size_t>::max();
  const std::size_t n = temps.size();
  std::vector<std::size_t> label(n, unlabeled);
  std::vector<bool> noise(n, false);

  auto region = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n; ++q)
      if (std::fabs(temps[q] - temps[p]) < eps) out.push_back(q);
    return out;
  };

  std::size_t next_cluster = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != unlabeled || noise[p]) continue;
    auto seeds = region(p);
    if (seeds.size() < static_cast<std::size_t>(min_pts)) {
      noise[p] = true;
      continue;
    }
    const std::size_t cluster = next_cluster++;
    label[p] = cluster;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::size_t q = seeds[k];
      if (noise[q]) {
        noise[q] = false;
        label[q] = cluster;  // border point
      }
      if (label[q] != unlabeled) continue;
      label[q] = cluster;
      auto reach = region(q);
      if (reach.size() >= static_cast<std::size_t>(min_pts))
        seeds.insert(seeds.end(), reach.begin(), reach.end());
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (label[p] == unlabeled) label[p] = next_cluster++;
  return label;
}

inline BinSet form_bins(std::span<const double> core_temps, const BinConfig& cfg, const GridDims& dims,
                        double now_s = 0.0) {
  validate(cfg);
  if (core_temps.empty()) throw InputError("form_bins: no cores");
  if (core_temps.size() != dims.size()) throw DimensionMismatch("form_bins: temperature count does not match grid");

  const auto labels = dbscan_labels(core_temps, cfg.epsilon_c, cfg.min_pts);
  const std::size_t clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Bin> bins(clusters);
  for (CoreId c = 0; c < labels.size(); ++c) bins[labels[c]].core_ids.push_back(c);
  for (auto& bin : bins) {
    double sum = 0.0;
    for (CoreId c : bin.core_ids) sum += core_temps[c];
    bin.avg_temp_c = sum / static_cast<double>(bin.core_ids.size());
    bin.center_pos = bin_center(bin.core_ids, dims);
  }
  std::stable_sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) {
    if (a.avg_temp_c != b.avg_temp_c) return a.avg_temp_c < b.avg_temp_c;
    return a.core_ids.front() < b.core_ids.front();
  });
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i].id = i;
  return BinSet{std::move(bins), now_s, cfg.policy};
}

/// Treats the temperatures as a 1 x n strip when no chip geometry is given.
inline BinSet form_bins(std::span<const double> core_temps, const BinConfig& cfg) {
  return form_bins(core_temps, cfg, GridDims{1, static_cast<int>(core_temps.size())});
}

inline bool should_update_bins(BinUpdatePolicy policy, BinEvent event) {
  switch (policy) {
    case BinUpdatePolicy::per_task:
      return event == BinEvent::task_mapped;
    case BinUpdatePolicy::per_application:
      return event == BinEvent::application_completed;
  }
  return false;
}

}  // namespace tcmap
