#pragma once

// Time-stepped simulation: arrivals, mapping, execution, thermal integration,
// trace sampling and end-of-run lifetime metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tcmap/binning.hpp"
#include "tcmap/errors.hpp"
#include "tcmap/mapping.hpp"
#include "tcmap/platform.hpp"
#include "tcmap/reliability.hpp"
#include "tcmap/rng.hpp"
#include "tcmap/thermal.hpp"
#include "tcmap/workload.hpp"

namespace tcmap {

struct MappingRecord {
  std::size_t task = 0;
  CoreId core = 0;
  std::optional<std::size_t> bin;
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const MappingRecord&) const = default;
};

struct SimConfig {
  ThermalParams thermal;
  double sample_period_s = 0.01;
  BinConfig binning;
  MapperKind mapper = MapperKind::two_level;
  double tie_tol_c = 0.1;
  std::uint64_t rng_seed = 1;
  TcParams tc;
  AgingParams aging;
  /// Simulated seconds with tasks queued, no core busy and no arrival or
  /// completion before the run is declared stalled.
  double stall_timeout_s = 3600.0;
  /// When set, tasks are placed on their recorded core at their recorded start
  /// time instead of asking the mapper.
  std::optional<std::vector<MappingRecord>> replay;
};

/// Number of thermal steps per trace sample; throws unless the period is a
/// positive integer multiple of dt.
inline std::int64_t steps_per_sample(const SimConfig& cfg) {
  const double ratio = cfg.sample_period_s / cfg.thermal.dt_s;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw InputError("thermal.sample_period_s must be a positive integer multiple of thermal.dt_s");
  return static_cast<std::int64_t>(rounded);
}

inline void validate(const SimConfig& cfg) {
  validate(cfg.thermal);
  validate(cfg.binning);
  validate(cfg.tc);
  validate(cfg.aging);
  steps_per_sample(cfg);
  if (!(cfg.tie_tol_c >= 0)) throw InputError("mapping.tie_tol_c must be >= 0");
  if (!(cfg.stall_timeout_s > 0)) throw InputError("sim.stall_timeout_s must be > 0");
}


struct CoreMetrics {
  double mttf_tc_s = std::numeric_limits<double>::infinity();
  double mean_temp_c = 0.0;
  double nbti = 1.0;
  double hci = 1.0;
  double em = 1.0;
};

struct MttfReport {
  std::vector<CycleSet> cycles;
  std::vector<CoreMetrics> cores;
  double mean_mttf_tc_s = std::numeric_limits<double>::infinity();
  double min_mttf_tc_s = std::numeric_limits<double>::infinity();
};

struct SimResult {
  std::vector<TemperatureTrace> traces;
  MttfReport metrics;
  std::vector<MappingRecord> mapping_log;  // in decision order
  std::size_t deferrals = 0;               // tasks deferred at least once
  std::size_t bin_updates = 0;
  double makespan_s = 0.0;
};

inline double time_mean(const TemperatureTrace& trace) {
  double sum = 0.0;
  for (const auto& s : trace.samples) sum += s.temp_c;
  return sum / static_cast<double>(trace.samples.size());
}

/// Per core: rainflow, Coffin-Manson/Miner MTTF and aging indices at the
/// time-averaged temperature. Aggregates are the arithmetic mean and the
/// minimum over cores.
inline MttfReport compute_metrics(const std::vector<TemperatureTrace>& traces, const TcParams& tc,
                                  const AgingParams& aging) {
  if (traces.empty()) throw InputError("compute_metrics: no traces");
  MttfReport report;
  double sum = 0.0;
  for (const auto& trace : traces) {
    if (trace.samples.empty()) throw InputError("compute_metrics: empty trace for core " + std::to_string(trace.core_id));
    CycleSet cs = rainflow_count(trace);
    CoreMetrics m;
    m.mttf_tc_s = mttf_tc(cs, tc);
    m.mean_temp_c = time_mean(trace);
    m.nbti = nbti_index(m.mean_temp_c, aging);
    m.hci = hci_index(m.mean_temp_c, aging);
    m.em = em_index(m.mean_temp_c, aging);
    sum += m.mttf_tc_s;
    report.min_mttf_tc_s = std::min(report.min_mttf_tc_s, m.mttf_tc_s);
    report.cycles.push_back(std::move(cs));
    report.cores.push_back(m);
  }
  report.mean_mttf_tc_s = sum / static_cast<double>(traces.size());
  return report;
}

namespace detail {

struct Running {
  std::size_t task;
  double end_s;
};

}  // namespace detail

inline SimResult run_simulation(const ChipModel& chip, const Workload& workload, const SimConfig& cfg) {
  validate(cfg);
  validate(workload);
  const std::size_t n = chip.size();
  const ThermalModel model(chip.dims, cfg.thermal);
  const double dt = cfg.thermal.dt_s;
  const std::int64_t sample_every = steps_per_sample(cfg);
  constexpr double kTimeEps = 1e-9;

  SimResult result;
  result.traces.resize(n);
  for (CoreId c = 0; c < n; ++c) result.traces[c].core_id = c;

  std::map<std::string, std::size_t> app_remaining;
  for (const auto& t : workload.tasks) ++app_remaining[t.app_id];

  ThermalState state = ambient_state(n, cfg.thermal);
  std::vector<std::optional<detail::Running>> running(n);
  std::deque<std::size_t> queue;
  std::size_t next_arrival = 0;
  std::size_t completed = 0;
  std::set<std::size_t> deferred_tasks;
  std::map<std::string, CoreId> prev_core_of_app;
  Rng rng(cfg.rng_seed);
  std::vector<double> powers(n, 0.0);

  BinSet bins = form_bins(state.temps_c, cfg.binning, chip.dims, 0.0);
  result.bin_updates = 1;
  double last_progress_s = 0.0;

  for (std::int64_t k = 0;; ++k) {
    const double now = static_cast<double>(k) * dt;
    bool changed = false;

    while (next_arrival < workload.arrivals.size() && workload.arrivals[next_arrival].time_s <= now + kTimeEps) {
      queue.push_back(workload.arrivals[next_arrival].task);
      ++next_arrival;
      changed = true;
    }

    bool rebin = false;
    for (CoreId c = 0; c < n; ++c) {
      if (!running[c] || running[c]->end_s > now + kTimeEps) continue;
      const auto& task = workload.tasks[running[c]->task];
      running[c].reset();
      ++completed;
      changed = true;
      if (--app_remaining[task.app_id] == 0 && should_update_bins(cfg.binning.policy, BinEvent::application_completed))
        rebin = true;
    }
    if (rebin) {
      bins = form_bins(state.temps_c, cfg.binning, chip.dims, now);
      ++result.bin_updates;
    }

    // replayed starts can fall on ticks with no arrival or completion
    if ((changed || cfg.replay) && !queue.empty()) {
      MappingContext ctx;
      ctx.tiles = chip.tiles;
      ctx.dims = chip.dims;
      ctx.busy_until.resize(n);
      for (CoreId c = 0; c < n; ++c)
        if (running[c]) ctx.busy_until[c] = running[c]->end_s;
      ctx.core_temps_c = state.temps_c;
      ctx.bins = &bins;
      ctx.now_s = now;
      ctx.tie_tol_c = cfg.tie_tol_c;

      for (auto it = queue.begin(); it != queue.end();) {
        const std::size_t index = *it;
        const TaskProfile& task = workload.tasks[index];
        ctx.prev_core_of_app = prev_core_of_app;
        MappingDecision decision{index, std::nullopt, std::nullopt, now};
        if (cfg.replay) {
          const auto rec = std::find_if(cfg.replay->begin(), cfg.replay->end(),
                                        [&](const MappingRecord& r) { return r.task == index; });
          if (rec == cfg.replay->end()) throw InputError("replay log has no entry for task " + std::to_string(index));
          if (rec->core >= n) throw InputError("replay log names unknown core " + std::to_string(rec->core));
          if (now + kTimeEps >= rec->start_s && ctx.is_free(rec->core)) {
            decision.core = rec->core;
            decision.bin = rec->bin;
          }
        } else {
          switch (cfg.mapper) {
            case MapperKind::two_level:
              decision = map_two_level(index, task, ctx);
              break;
            case MapperKind::random:
              decision = map_random(index, task, ctx, rng);
              break;
            case MapperKind::conventional_tc:
              decision = map_conventional_tc(index, task, ctx);
              break;
          }
        }
        if (decision.deferred()) {
          deferred_tasks.insert(index);
          ++it;
          continue;
        }
        const CoreId core = *decision.core;
        const double end = now + task.exec_time_s;
        running[core] = detail::Running{index, end};
        ctx.busy_until[core] = end;
        prev_core_of_app[task.app_id] = core;
        result.mapping_log.push_back({index, core, decision.bin, now, end});
        result.makespan_s = std::max(result.makespan_s, end);
        it = queue.erase(it);
        changed = true;
        if (should_update_bins(cfg.binning.policy, BinEvent::task_mapped)) {
          bins = form_bins(state.temps_c, cfg.binning, chip.dims, now);
          ++result.bin_updates;
        }
      }
    }
    if (changed) last_progress_s = now;

    const bool done = completed == workload.tasks.size() && next_arrival == workload.arrivals.size();
    if (k % sample_every == 0) {
      for (CoreId c = 0; c < n; ++c) result.traces[c].samples.push_back({now, state.temps_c[c]});
      if (done) break;
    }
    const bool idle = std::none_of(running.begin(), running.end(), [](const auto& r) { return r.has_value(); });
    if (!queue.empty() && idle && now - last_progress_s > cfg.stall_timeout_s)
      throw SimulationStalled("no progress for " + std::to_string(cfg.stall_timeout_s) + " s with " +
                              std::to_string(queue.size()) + " task(s) queued; check f_req against core frequencies");

    for (CoreId c = 0; c < n; ++c) powers[c] = running[c] ? workload.tasks[running[c]->task].power_watts : 0.0;
    state = model.step(state, powers);
  }

  result.deferrals = deferred_tasks.size();
  result.metrics = compute_metrics(result.traces, cfg.tc, cfg.aging);
  return result;
}

}  // namespace tcmap
