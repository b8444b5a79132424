#pragma once

// Tasks, workloads, trace-file I/O, the synthetic generator and offline
// steady-state profiling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tcmap/csv.hpp"
#include "tcmap/errors.hpp"
#include "tcmap/platform.hpp"
#include "tcmap/rng.hpp"
#include "tcmap/thermal.hpp"

namespace tcmap {

enum class PerfClass { high, low };

inline std::string to_string(PerfClass c) { return c == PerfClass::high ? "high" : "low"; }

inline std::optional<PerfClass> parse_perf_class(const std::string& s) {
  if (s == "high") return PerfClass::high;
  if (s == "low") return PerfClass::low;
  return std::nullopt;
}

struct TaskProfile {
  std::string app_id;
  std::string thread_id;
  double power_watts = 0.0;
  double exec_time_s = 1.0;
  PerfClass perf_class = PerfClass::high;
  double f_req_hz = 0.0;
  std::optional<double> t_steady_c;

  bool operator==(const TaskProfile&) const = default;
};

struct Arrival {
  std::size_t task = 0;
  double time_s = 0.0;
  bool operator==(const Arrival&) const = default;
};

struct Workload {
  std::vector<TaskProfile> tasks;
  std::vector<Arrival> arrivals;  // sorted by time, ties in task order
  std::uint64_t seed = 0;

  bool operator==(const Workload&) const = default;

  double arrival_of(std::size_t task) const {
    for (const auto& a : arrivals)
      if (a.task == task) return a.time_s;
    throw InputError("task " + std::to_string(task) + " has no arrival");
  }
};

inline void sort_arrivals(Workload& w) {
  std::stable_sort(w.arrivals.begin(), w.arrivals.end(),
                   [](const Arrival& a, const Arrival& b) { return a.time_s < b.time_s; });
}

inline void validate(const Workload& w) {
  for (std::size_t i = 1; i < w.arrivals.size(); ++i)
    if (w.arrivals[i].time_s < w.arrivals[i - 1].time_s) throw InputError("workload arrivals are not sorted");
  for (const auto& a : w.arrivals) {
    if (a.task >= w.tasks.size()) throw InputError("arrival references unknown task " + std::to_string(a.task));
    if (!(a.time_s >= 0)) throw InputError("negative arrival time");
  }
  for (const auto& t : w.tasks) {
    if (!(t.exec_time_s > 0)) throw InputError("task " + t.app_id + "/" + t.thread_id + ": exec_time_s must be > 0");
    if (!(t.power_watts >= 0)) throw InputError("task " + t.app_id + "/" + t.thread_id + ": power_watts must be >= 0");
    if (!(t.f_req_hz >= 0)) throw InputError("task " + t.app_id + "/" + t.thread_id + ": f_req must be >= 0");
  }
}

inline constexpr const char* kTraceHeader = "app_id,thread_id,power_watts,exec_time_s,perf_class,f_req_ghz,arrival_s";

/// Reads a trace CSV. Every data line is one task with one arrival.
inline Workload load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file " + path.string());
  const std::string name = path.string();

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  Workload w;
  std::set<std::tuple<std::string, std::string, double>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = csv::split(line);
    if (!have_header) {
      if (line != kTraceHeader) throw SchemaError(name, line_no, std::string("expected header '") + kTraceHeader + "'");
      have_header = true;
      continue;
    }
    if (fields.size() != 7)
      throw SchemaError(name, line_no, "expected 7 fields, found " + std::to_string(fields.size()));

    TaskProfile task;
    task.app_id = fields[0];
    task.thread_id = fields[1];
    if (task.app_id.empty() || task.thread_id.empty()) throw SchemaError(name, line_no, "empty app_id or thread_id");
    double f_req_ghz = 0.0;
    double arrival = 0.0;
    if (!csv::parse_double(fields[2], task.power_watts)) throw SchemaError(name, line_no, "bad power_watts");
    if (!csv::parse_double(fields[3], task.exec_time_s)) throw SchemaError(name, line_no, "bad exec_time_s");
    const auto perf = parse_perf_class(fields[4]);
    if (!perf) throw SchemaError(name, line_no, "perf_class must be 'high' or 'low'");
    task.perf_class = *perf;
    if (!csv::parse_double(fields[5], f_req_ghz)) throw SchemaError(name, line_no, "bad f_req_ghz");
    if (!csv::parse_double(fields[6], arrival)) throw SchemaError(name, line_no, "bad arrival_s");

    if (!(task.exec_time_s > 0) || !std::isfinite(task.exec_time_s))
      throw SchemaError(name, line_no, "exec_time_s must be > 0");
    if (!(task.power_watts >= 0) || !std::isfinite(task.power_watts))
      throw SchemaError(name, line_no, "power_watts must be >= 0");
    if (!(f_req_ghz >= 0) || !std::isfinite(f_req_ghz)) throw SchemaError(name, line_no, "f_req_ghz must be >= 0");
    if (!(arrival >= 0) || !std::isfinite(arrival)) throw SchemaError(name, line_no, "arrival_s must be >= 0");
    if (!seen.emplace(task.app_id, task.thread_id, arrival).second)
      throw SchemaError(name, line_no, "duplicate (app_id, thread_id, arrival_s)");

    task.f_req_hz = f_req_ghz * 1e9;
    w.arrivals.push_back({w.tasks.size(), arrival});
    w.tasks.push_back(std::move(task));
  }
  if (!have_header) throw SchemaError(name, line_no == 0 ? 1 : line_no, "missing header");
  sort_arrivals(w);
  validate(w);
  return w;
}

/// Writes tasks in task order; load_trace(save_trace(w)) reproduces w (up to
/// profiled temperatures, which live in the profile file).
inline void save_trace(const Workload& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write trace file " + path.string());
  out << kTraceHeader << '\n';
  for (std::size_t i = 0; i < w.tasks.size(); ++i) {
    const auto& t = w.tasks[i];
    out << t.app_id << ',' << t.thread_id << ',' << csv::format_double(t.power_watts) << ','
        << csv::format_double(t.exec_time_s) << ',' << to_string(t.perf_class) << ','
        << csv::format_double(t.f_req_hz / 1e9) << ',' << csv::format_double(w.arrival_of(i)) << '\n';
  }
}

inline std::filesystem::path profile_path_for(const std::filesystem::path& trace) {
  return trace.string() + ".profile.csv";
}

inline void write_profile(const Workload& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write profile file " + path.string());
  out << "app_id,thread_id,t_steady_c\n";
  for (const auto& t : w.tasks)
    out << t.app_id << ',' << t.thread_id << ',' << (t.t_steady_c ? csv::format_double(*t.t_steady_c) : "") << '\n';
}

/// per_task: every task gets its own exponential gap. per_app: one gap per
/// application and all of its threads arrive together.
enum class ArrivalMode { per_task, per_app };

inline std::string to_string(ArrivalMode m) { return m == ArrivalMode::per_app ? "per_app" : "per_task"; }

inline std::optional<ArrivalMode> parse_arrival_mode(const std::string& s) {
  if (s == "per_task") return ArrivalMode::per_task;
  if (s == "per_app") return ArrivalMode::per_app;
  return std::nullopt;
}

struct SyntheticSpec {
  int n_apps = 4;
  int threads_per_app = 4;
  double power_min_w = 2.0;
  double power_max_w = 10.0;
  double arrival_rate = 1.0;  // arrivals per second (tasks or applications)
  double exec_min_s = 2.0;
  double exec_max_s = 6.0;
  ArrivalMode arrivals = ArrivalMode::per_task;
  std::uint64_t seed = 1;
};

/// Tasks in (app, thread) order. Per task the stream draws, in order: power,
/// exec time, exponential inter-arrival gap. In per_app mode the gap is drawn
/// once per application, before its first thread. Even apps are
/// high-performance, odd apps low-power; f_req is 0.
inline Workload generate_synthetic_workload(const SyntheticSpec& spec) {
  if (spec.n_apps < 0 || spec.threads_per_app < 0) throw InputError("synthetic: counts must be non-negative");
  if (!(spec.power_min_w >= 0 && spec.power_max_w >= spec.power_min_w))
    throw InputError("synthetic: invalid power range");
  if (!(spec.exec_min_s > 0 && spec.exec_max_s >= spec.exec_min_s))
    throw InputError("synthetic: invalid exec-time range");
  if (!(spec.arrival_rate > 0)) throw InputError("synthetic: arrival_rate must be > 0");

  Rng rng(spec.seed);
  Workload w;
  w.seed = spec.seed;
  double clock = 0.0;
  const bool per_app = spec.arrivals == ArrivalMode::per_app;
  for (int app = 0; app < spec.n_apps; ++app) {
    if (per_app) clock += rng.exponential(spec.arrival_rate);
    for (int thread = 0; thread < spec.threads_per_app; ++thread) {
      TaskProfile t;
      t.app_id = "app" + std::to_string(app);
      t.thread_id = std::to_string(thread);
      t.power_watts = rng.uniform(spec.power_min_w, spec.power_max_w);
      t.exec_time_s = rng.uniform(spec.exec_min_s, spec.exec_max_s);
      t.perf_class = app % 2 == 0 ? PerfClass::high : PerfClass::low;
      if (!per_app) clock += rng.exponential(spec.arrival_rate);
      w.arrivals.push_back({w.tasks.size(), clock});
      w.tasks.push_back(std::move(t));
    }
  }
  return w;
}

inline Workload generate_synthetic_workload(int n_apps, int threads_per_app, double power_min_w, double power_max_w,
                                            double arrival_rate, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_apps = n_apps;
  spec.threads_per_app = threads_per_app;
  spec.power_min_w = power_min_w;
  spec.power_max_w = power_max_w;
  spec.arrival_rate = arrival_rate;
  spec.seed = seed;
  return generate_synthetic_workload(spec);
}

/// Steady-state temperature of the chip's center tile with only the task's
/// power applied there. The system is linear, so one unit-power solve serves
/// every task.
inline Workload profile_task_temperatures(Workload w, const ChipModel& chip, const ThermalParams& params) {
  const ThermalModel model(chip.dims, params);
  const CoreId center = center_core(chip.dims);
  std::vector<double> unit(chip.size(), 0.0);
  unit[center] = 1.0;
  const double rise_per_watt = model.steady_state(unit)[center] - params.t_ambient_c;
  for (auto& t : w.tasks) t.t_steady_c = params.t_ambient_c + t.power_watts * rise_per_watt;
  return w;
}

}  // namespace tcmap
