#pragma once

// Experiment harness behind the command-line tool: scenario resolution,
// result serialization, heatmap export and the run / sweep / compare /
// heatmap commands. Commands return process exit codes: 0 ok, 1 runtime
// failure, 2 usage or validation error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcmap/config.hpp"
#include "tcmap/csv.hpp"
#include "tcmap/errors.hpp"
#include "tcmap/platform.hpp"
#include "tcmap/simkernel.hpp"
#include "tcmap/workload.hpp"

namespace tcmap {

namespace fs = std::filesystem;

struct ExperimentSpec {
  std::optional<fs::path> config;
  std::optional<fs::path> trace;
  std::vector<std::string> overrides;
  fs::path out_dir = ".";
  std::vector<std::uint64_t> seeds;  // empty: use the config's seeds as-is
};

/// Defaults, then the config file, then --trace, then --set overrides.
inline Json resolve_config(const ExperimentSpec& spec) {
  Json cfg = default_config();
  if (spec.config) merge_config(cfg, load_config_file(*spec.config));
  // command-line paths are relative to the working directory, not the config
  if (spec.trace) cfg["workload"]["trace"] = fs::absolute(*spec.trace).string();
  for (const auto& o : spec.overrides) apply_override(cfg, o);
  return cfg;
}

inline fs::path config_base_dir(const ExperimentSpec& spec) {
  return spec.config ? spec.config->parent_path() : fs::path{};
}

/// The seed drives both the random mapper and the synthetic workload.
inline Json with_seed(Json cfg, std::uint64_t seed) {
  cfg["mapping"]["rng_seed"] = seed;
  cfg["workload"]["synthetic"]["seed"] = seed;
  return cfg;
}

struct RunOutput {
  Scenario scenario;
  ChipModel chip;
  Workload workload;
  SimResult result;
};

inline Workload prepare_workload(const Scenario& s, const ChipModel& chip) {
  Workload w = s.trace ? load_trace(*s.trace) : generate_synthetic_workload(s.synthetic);
  return profile_task_temperatures(std::move(w), chip, s.sim.thermal);
}

inline RunOutput run_scenario(const Json& cfg, const fs::path& base_dir = {}) {
  RunOutput out{scenario_from_json(cfg, base_dir), {}, {}, {}};
  out.chip = build_chip(out.scenario.chip);
  out.workload = prepare_workload(out.scenario, out.chip);
  out.result = run_simulation(out.chip, out.workload, out.scenario.sim);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double json_to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InputError("expected a number in result file");
}

inline Json result_to_json(const RunOutput& run) {
  const SimResult& r = run.result;
  Json j;
  j["config"] = run.scenario.resolved;
  j["derived"] = {{"a_tc", json_number(run.scenario.sim.tc.a_tc)},
                  {"cores", run.chip.size()},
                  {"f_max_ghz", Json::array()}};
  for (const auto& t : run.chip.tiles) j["derived"]["f_max_ghz"].push_back(t.f_max_hz / 1e9);

  double nbti = 0, hci = 0, em = 0, temp = 0;
  for (const auto& c : r.metrics.cores) {
    nbti += c.nbti;
    hci += c.hci;
    em += c.em;
    temp += c.mean_temp_c;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, r.metrics.cores.size()));
  j["aggregates"] = {{"mean_mttf_tc_s", json_number(r.metrics.mean_mttf_tc_s)},
                     {"min_mttf_tc_s", json_number(r.metrics.min_mttf_tc_s)},
                     {"mean_mttf_tc_years", json_number(r.metrics.mean_mttf_tc_s / kSecondsPerYear)},
                     {"min_mttf_tc_years", json_number(r.metrics.min_mttf_tc_s / kSecondsPerYear)},
                     {"mean_temp_c", json_number(temp / n)},
                     {"mean_nbti_index", json_number(nbti / n)},
                     {"mean_hci_index", json_number(hci / n)},
                     {"mean_em_index", json_number(em / n)}};
  j["makespan_s"] = r.makespan_s;
  j["deferrals"] = r.deferrals;
  j["bin_updates"] = r.bin_updates;
  j["tasks"] = run.workload.tasks.size();
  Json log = Json::array();
  for (const auto& m : r.mapping_log) {
    const auto& t = run.workload.tasks[m.task];
    log.push_back({{"task", m.task},
                   {"app_id", t.app_id},
                   {"thread_id", t.thread_id},
                   {"core", m.core},
                   {"bin", m.bin ? Json(*m.bin) : Json(nullptr)},
                   {"start_s", m.start_s},
                   {"end_s", m.end_s}});
  }
  j["mapping_log"] = std::move(log);
  return j;
}

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

inline void write_traces_csv(const std::vector<TemperatureTrace>& traces, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "time_s,core_id,temp_c\n";
  if (traces.empty()) return;
  const std::size_t samples = traces.front().samples.size();
  for (std::size_t i = 0; i < samples; ++i)
    for (const auto& tr : traces)
      out << csv::format_double(tr.samples[i].time_s) << ',' << tr.core_id << ','
          << csv::format_double(tr.samples[i].temp_c) << '\n';
}

inline std::vector<TemperatureTrace> read_traces_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::map<CoreId, TemperatureTrace> by_core;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    double t = 0, core = 0, temp = 0;
    if (f.size() != 3 || !csv::parse_double(f[0], t) || !csv::parse_double(f[1], core) ||
        !csv::parse_double(f[2], temp) || core < 0)
      throw SchemaError(path.string(), line_no, "expected time_s,core_id,temp_c");
    auto& tr = by_core[static_cast<CoreId>(core)];
    tr.core_id = static_cast<CoreId>(core);
    tr.samples.push_back({t, temp});
  }
  std::vector<TemperatureTrace> out;
  for (auto& [id, tr] : by_core) out.push_back(std::move(tr));
  return out;
}

inline void write_mttf_csv(const MttfReport& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "core_id,mttf_tc_s,nbti,hci,em\n";
  for (std::size_t c = 0; c < m.cores.size(); ++c)
    out << c << ',' << csv::format_double(m.cores[c].mttf_tc_s) << ',' << csv::format_double(m.cores[c].nbti) << ','
        << csv::format_double(m.cores[c].hci) << ',' << csv::format_double(m.cores[c].em) << '\n';
}

inline std::vector<double> read_mttf_column(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto f = csv::split(line);
    double v = 0;
    if (f.size() != 5) throw SchemaError(path.string(), line_no, "expected core_id,mttf_tc_s,nbti,hci,em");
    if (f[1] == "inf")
      v = std::numeric_limits<double>::infinity();
    else if (!csv::parse_double(f[1], v))
      throw SchemaError(path.string(), line_no, "bad mttf_tc_s");
    values.push_back(v);
  }
  return values;
}

// ---------------------------------------------------------------------------
// Heatmaps

enum class HeatmapKind { mean_temp, mttf_tc };

inline std::string to_string(HeatmapKind k) { return k == HeatmapKind::mean_temp ? "mean_temp" : "mttf_tc"; }

inline std::optional<HeatmapKind> parse_heatmap_kind(const std::string& s) {
  if (s == "mean_temp") return HeatmapKind::mean_temp;
  if (s == "mttf_tc") return HeatmapKind::mttf_tc;
  return std::nullopt;
}

struct HeatmapFiles {
  fs::path csv;
  fs::path pgm;
  fs::path scale;
};

/// Writes heatmap_<kind>.csv (row,col,value), a plain 16-bit PGM scaled
/// linearly over the finite data range, and the scale bounds beside it.
/// Non-finite values map to full white.
inline HeatmapFiles export_heatmap(const std::vector<double>& values, const GridDims& dims, HeatmapKind kind,
                                   const fs::path& dir) {
  if (values.size() != dims.size()) throw DimensionMismatch("heatmap: value count does not match grid");
  const std::string stem = "heatmap_" + to_string(kind);
  HeatmapFiles files{dir / (stem + ".csv"), dir / (stem + ".pgm"), dir / (stem + ".scale.txt")};

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) lo = hi = 0.0;

  std::string table = "row,col,value\n";
  std::string pgm = "P2\n" + std::to_string(dims.cols) + " " + std::to_string(dims.rows) + "\n65535\n";
  for (int r = 0; r < dims.rows; ++r) {
    for (int c = 0; c < dims.cols; ++c) {
      const double v = values[core_at({r, c}, dims)];
      table += std::to_string(r) + "," + std::to_string(c) + "," + csv::format_double(v) + "\n";
      long level = 65535;
      if (std::isfinite(v)) level = hi > lo ? std::lround((v - lo) / (hi - lo) * 65535.0) : 0;
      pgm += std::to_string(level) + (c + 1 == dims.cols ? "\n" : " ");
    }
  }
  write_text(files.csv, table);
  write_text(files.pgm, pgm);
  write_text(files.scale, "kind=" + to_string(kind) + "\nmin=" + csv::format_double(lo) +
                              "\nmax=" + csv::format_double(hi) + "\nlevels=65535\n");
  return files;
}

inline std::vector<double> mean_temperatures(const std::vector<TemperatureTrace>& traces) {
  std::vector<double> out;
  for (const auto& t : traces) out.push_back(time_mean(t));
  return out;
}

inline void write_run_outputs(const RunOutput& run, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "result.json", result_to_json(run).dump(2) + "\n");
  write_traces_csv(run.result.traces, dir / "traces.csv");
  write_mttf_csv(run.result.metrics, dir / "mttf.csv");
  export_heatmap(mean_temperatures(run.result.traces), run.chip.dims, HeatmapKind::mean_temp, dir);
  std::vector<double> mttf;
  for (const auto& c : run.result.metrics.cores) mttf.push_back(c.mttf_tc_s);
  export_heatmap(mttf, run.chip.dims, HeatmapKind::mttf_tc, dir);
  if (run.scenario.trace) {
    write_profile(run.workload, dir / profile_path_for(run.scenario.trace->filename()));
  }
}

// ---------------------------------------------------------------------------
// Commands

/// Runs `body`, mapping input errors to exit 2 and other failures to exit 1.
inline int guarded(const std::function<void()>& body, std::ostream& err = std::cerr) {
  try {
    body();
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 1;
  }
}

inline std::vector<Json> seeded_configs(const ExperimentSpec& spec, const Json& cfg) {
  if (spec.seeds.empty()) return {cfg};
  std::vector<Json> out;
  for (auto s : spec.seeds) {
    if (std::count(spec.seeds.begin(), spec.seeds.end(), s) > 1) throw InputError("seeds must be distinct");
    out.push_back(with_seed(cfg, s));
  }
  return out;
}

inline int cmd_run(const ExperimentSpec& spec, std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        const Json cfg = resolve_config(spec);
        const auto configs = seeded_configs(spec, cfg);
        for (std::size_t i = 0; i < configs.size(); ++i) {
          const RunOutput run = run_scenario(configs[i], config_base_dir(spec));
          const fs::path dir =
              configs.size() == 1 ? spec.out_dir : spec.out_dir / ("seed_" + std::to_string(spec.seeds[i]));
          write_run_outputs(run, dir);
        }
      },
      err);
}

inline int cmd_sweep_epsilon(const ExperimentSpec& spec, const std::vector<double>& epsilons,
                             std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        if (epsilons.empty()) throw InputError("sweep-epsilon: --epsilons must list at least one value");
        for (double e : epsilons)
          if (!(e > 0)) throw InputError("sweep-epsilon: epsilons must be positive");
        const Json cfg = resolve_config(spec);
        std::string table = "epsilon,mean_mttf_tc_s,min_mttf_tc_s\n";
        for (double eps : epsilons) {
          Json swept = cfg;
          swept["binning"]["epsilon_c"] = eps;
          double mean_sum = 0, min_sum = 0;
          const auto configs = seeded_configs(spec, swept);
          for (const auto& c : configs) {
            const RunOutput run = run_scenario(c, config_base_dir(spec));
            mean_sum += run.result.metrics.mean_mttf_tc_s;
            min_sum += run.result.metrics.min_mttf_tc_s;
          }
          const double reps = static_cast<double>(configs.size());
          table += csv::format_double(eps) + "," + csv::format_double(mean_sum / reps) + "," +
                   csv::format_double(min_sum / reps) + "\n";
        }
        fs::create_directories(spec.out_dir);
        write_text(spec.out_dir / "epsilon_sweep.csv", table);
      },
      err);
}

struct CompareRow {
  std::string mapper;
  std::string seed;
  double mean_mttf = 0, min_mttf = 0, makespan = 0, deferrals = 0;
};

inline double improvement_pct(double ours, double baseline) { return (ours - baseline) / baseline * 100.0; }

inline int cmd_compare(const ExperimentSpec& spec, const std::vector<std::string>& mappers,
                       std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        if (mappers.size() < 2) throw InputError("compare: --mappers needs at least two mappers");
        for (const auto& m : mappers)
          if (!parse_mapper(m)) throw InputError("compare: unknown mapper '" + m + "'");
        const Json cfg = resolve_config(spec);
        const auto configs = seeded_configs(spec, cfg);

        std::vector<CompareRow> rows;
        for (const auto& m : mappers) {
          for (const auto& c : configs) {
            Json mapped = c;
            mapped["mapping"]["mapper"] = m;
            const RunOutput run = run_scenario(mapped, config_base_dir(spec));
            rows.push_back({m, std::to_string(c["mapping"]["rng_seed"].get<std::uint64_t>()),
                            run.result.metrics.mean_mttf_tc_s, run.result.metrics.min_mttf_tc_s,
                            run.result.makespan_s, static_cast<double>(run.result.deferrals)});
          }
        }

        // Rows are mapper-major; a mapper listed twice is summarized once.
        const std::size_t per_mapper = configs.size();
        std::vector<std::string> unique;
        std::map<std::string, CompareRow> means;
        for (std::size_t i = 0; i < mappers.size(); ++i) {
          const std::string& m = mappers[i];
          if (means.count(m)) continue;
          unique.push_back(m);
          CompareRow avg{m, "mean"};
          for (std::size_t k = 0; k < per_mapper; ++k) {
            const CompareRow& r = rows[i * per_mapper + k];
            avg.mean_mttf += r.mean_mttf;
            avg.min_mttf += r.min_mttf;
            avg.makespan += r.makespan;
            avg.deferrals += r.deferrals;
          }
          const double reps = static_cast<double>(per_mapper);
          avg.mean_mttf /= reps;
          avg.min_mttf /= reps;
          avg.makespan /= reps;
          avg.deferrals /= reps;
          means[m] = avg;
        }

        std::string table = "mapper,seed,mean_mttf_tc_s,min_mttf_tc_s,makespan_s,deferrals\n";
        auto emit = [&](const CompareRow& r) {
          table += r.mapper + "," + r.seed + "," + csv::format_double(r.mean_mttf) + "," +
                   csv::format_double(r.min_mttf) + "," + csv::format_double(r.makespan) + "," +
                   csv::format_double(r.deferrals) + "\n";
        };
        for (const auto& r : rows) emit(r);
        for (const auto& m : unique) emit(means[m]);
        if (means.count("two_level")) {
          const auto& ours = means["two_level"];
          for (const auto& m : unique) {
            if (m == "two_level") continue;
            const auto& base = means[m];
            table += "two_level_vs_" + m + ",improvement_pct," +
                     csv::format_double(improvement_pct(ours.mean_mttf, base.mean_mttf)) + "," +
                     csv::format_double(improvement_pct(ours.min_mttf, base.min_mttf)) + ",,\n";
          }
        }
        fs::create_directories(spec.out_dir);
        write_text(spec.out_dir / "compare.csv", table);
      },
      err);
}

/// Re-exports a heatmap from the outputs of a previous `run` in spec.out_dir.
inline int cmd_heatmap(const ExperimentSpec& spec, HeatmapKind kind, std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        const fs::path result_path = spec.out_dir / "result.json";
        std::ifstream in(result_path);
        if (!in) throw InputError("heatmap: cannot open " + result_path.string());
        Json result;
        try {
          result = Json::parse(in);
        } catch (const Json::parse_error& e) {
          throw InputError(result_path.string() + ": " + e.what());
        }
        const GridDims dims{result["config"]["chip"]["rows"].get<int>(), result["config"]["chip"]["cols"].get<int>()};
        std::vector<double> values = kind == HeatmapKind::mean_temp
                                         ? mean_temperatures(read_traces_csv(spec.out_dir / "traces.csv"))
                                         : read_mttf_column(spec.out_dir / "mttf.csv");
        export_heatmap(values, dims, kind, spec.out_dir);
      },
      err);
}

}  // namespace tcmap
