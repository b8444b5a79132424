#pragma once

// Scenario configuration: a JSON document with chip, thermal, binning,
// mapping, reliability, sim and workload sections. Files may set any subset
// of the keys below; `section.key=value` overrides are applied afterwards.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcmap/errors.hpp"
#include "tcmap/platform.hpp"
#include "tcmap/simkernel.hpp"
#include "tcmap/workload.hpp"

namespace tcmap {

using Json = nlohmann::json;

inline Json default_config() {
  return Json::parse(R"({
    "chip": {"rows": 4, "cols": 4, "pv_sigma": 0.1, "pv_seed": 1, "beta_ghz": 3.0, "critical_path_radius": 0},
    "thermal": {"t_ambient_c": 45.0, "c_tile": 0.03, "g_amb": 0.5, "g_adj": 0.125, "dt_s": 0.01,
                "sample_period_s": 0.01},
    "binning": {"epsilon_c": 0.7, "min_pts": 1, "bin_update_policy": "per_application"},
    "mapping": {"mapper": "two_level", "tie_tol_c": 0.1, "rng_seed": 1},
    "reliability": {
      "e_a_ev": 0.42, "b": 2.35, "t_th_c": 1.0, "a_tc": "calibrate",
      "calibration": {"target_years": 10.0, "delta_t_c": 20.0, "t_max_c": 70.0, "m": 10.0, "cycle_hours": 1.0},
      "t_ref_c": 45.0,
      "nbti": {"a": 0.005, "b_ev": 0.35, "c": 1e-10, "d_ev": 0.1, "beta": 0.3},
      "hci": {"i_sub_a": 0.001, "width_m": 1e-6, "n": 3.0, "q_ev": 0.1},
      "em": {"i_a": 0.001, "n": 2.0, "q_ev": 0.9}
    },
    "sim": {"stall_timeout_s": 3600.0},
    "workload": {
      "trace": null,
      "synthetic": {"n_apps": 4, "threads_per_app": 4, "power_min_w": 2.0, "power_max_w": 10.0,
                    "arrival_rate": 1.0, "exec_min_s": 2.0, "exec_max_s": 6.0, "arrivals": "per_task",
                    "seed": 1}
    }
  })");
}

/// Overlays `user` onto `base`, rejecting keys the defaults do not define.
inline void merge_config(Json& base, const Json& user, const std::string& prefix = "") {
  if (!user.is_object()) throw InputError("config" + (prefix.empty() ? "" : " section '" + prefix + "'") + " must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string dotted = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw InputError("unknown config key '" + dotted + "'");
    if (base[key].is_object())
      merge_config(base[key], value, dotted);
    else
      base[key] = value;
  }
}

/// Applies `a.b.c=value`. The value is read as JSON when it parses, otherwise
/// as a bare string.
inline void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &config;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!node->is_object() || !node->contains(path[i])) throw InputError("unknown config key '" + key + "'");
    node = &(*node)[path[i]];
  }
  if (node->is_object()) throw InputError("override '" + key + "' names a section, not a value");
  *node = std::move(value);
}

inline Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

struct Scenario {
  Json resolved;
  ChipConfig chip;
  SimConfig sim;
  std::optional<std::filesystem::path> trace;
  SyntheticSpec synthetic;
};

namespace detail {

inline const Json& at(const Json& j, const std::string& dotted) {
  const Json* node = &j;
  std::stringstream parts(dotted);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw InputError("missing config key '" + dotted + "'");
    node = &(*node)[part];
  }
  return *node;
}

inline double number(const Json& j, const std::string& key) {
  const Json& v = at(j, key);
  if (!v.is_number()) throw InputError("config key '" + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const Json& j, const std::string& key) {
  const Json& v = at(j, key);
  if (!v.is_number_integer()) throw InputError("config key '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t seed(const Json& j, const std::string& key) {
  const std::int64_t v = integer(j, key);
  if (v < 0) throw InputError("config key '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

inline std::string text(const Json& j, const std::string& key) {
  const Json& v = at(j, key);
  if (!v.is_string()) throw InputError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline BinUpdatePolicy parse_policy(const std::string& s) {
  if (s == "per_application") return BinUpdatePolicy::per_application;
  if (s == "per_task") return BinUpdatePolicy::per_task;
  throw InputError("binning.bin_update_policy must be per_application or per_task, got '" + s + "'");
}

/// Typed view of a resolved config; every section is validated.
inline Scenario scenario_from_json(const Json& cfg, const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  Scenario s;
  s.resolved = cfg;

  s.chip.dims = {static_cast<int>(integer(cfg, "chip.rows")), static_cast<int>(integer(cfg, "chip.cols"))};
  s.chip.pv_sigma = number(cfg, "chip.pv_sigma");
  s.chip.pv_seed = seed(cfg, "chip.pv_seed");
  s.chip.beta_ghz = number(cfg, "chip.beta_ghz");
  s.chip.critical_path_radius = static_cast<int>(integer(cfg, "chip.critical_path_radius"));
  validate(s.chip.dims);
  if (s.chip.dims.size() > 256) throw InputError("chip: at most 256 cores are supported");
  if (!(s.chip.pv_sigma >= 0)) throw InputError("chip.pv_sigma must be >= 0");
  if (!(s.chip.beta_ghz > 0)) throw InputError("chip.beta_ghz must be > 0");
  if (s.chip.critical_path_radius < 0) throw InputError("chip.critical_path_radius must be >= 0");

  SimConfig& sim = s.sim;
  sim.thermal.t_ambient_c = number(cfg, "thermal.t_ambient_c");
  sim.thermal.c_tile = number(cfg, "thermal.c_tile");
  sim.thermal.g_amb = number(cfg, "thermal.g_amb");
  sim.thermal.g_adj = number(cfg, "thermal.g_adj");
  sim.thermal.dt_s = number(cfg, "thermal.dt_s");
  sim.sample_period_s = number(cfg, "thermal.sample_period_s");

  sim.binning.epsilon_c = number(cfg, "binning.epsilon_c");
  sim.binning.min_pts = static_cast<int>(integer(cfg, "binning.min_pts"));
  sim.binning.policy = parse_policy(text(cfg, "binning.bin_update_policy"));

  const auto mapper = parse_mapper(text(cfg, "mapping.mapper"));
  if (!mapper) throw InputError("mapping.mapper must be two_level, random or conventional_tc");
  sim.mapper = *mapper;
  sim.tie_tol_c = number(cfg, "mapping.tie_tol_c");
  sim.rng_seed = seed(cfg, "mapping.rng_seed");

  sim.tc.e_a_ev = number(cfg, "reliability.e_a_ev");
  sim.tc.b = number(cfg, "reliability.b");
  sim.tc.t_th_c = number(cfg, "reliability.t_th_c");
  const Json& a_tc = at(cfg, "reliability.a_tc");
  if (a_tc.is_string() && a_tc.get<std::string>() == "calibrate") {
    CalibrationBlock cal;
    cal.target_years = number(cfg, "reliability.calibration.target_years");
    cal.delta_t_c = number(cfg, "reliability.calibration.delta_t_c");
    cal.t_max_c = number(cfg, "reliability.calibration.t_max_c");
    cal.m = number(cfg, "reliability.calibration.m");
    cal.cycle_hours = number(cfg, "reliability.calibration.cycle_hours");
    try {
      sim.tc = calibrated(sim.tc, cal);
    } catch (const DomainError& e) {
      throw InputError(std::string("reliability.calibration: ") + e.what());
    }
  } else if (a_tc.is_number()) {
    sim.tc.a_tc = a_tc.get<double>();
  } else {
    throw InputError("reliability.a_tc must be a number or \"calibrate\"");
  }

  AgingParams& ag = sim.aging;
  ag.t_ref_c = number(cfg, "reliability.t_ref_c");
  ag.nbti = {number(cfg, "reliability.nbti.a"), number(cfg, "reliability.nbti.b_ev"), number(cfg, "reliability.nbti.c"),
             number(cfg, "reliability.nbti.d_ev"), number(cfg, "reliability.nbti.beta")};
  ag.hci = {number(cfg, "reliability.hci.i_sub_a"), number(cfg, "reliability.hci.width_m"),
            number(cfg, "reliability.hci.n"), number(cfg, "reliability.hci.q_ev")};
  ag.em = {number(cfg, "reliability.em.i_a"), number(cfg, "reliability.em.n"), number(cfg, "reliability.em.q_ev")};

  sim.stall_timeout_s = number(cfg, "sim.stall_timeout_s");
  validate(sim);
  try {
    nbti_index(ag.t_ref_c, ag);
  } catch (const DomainError& e) {
    throw InputError(std::string("reliability.nbti: ") + e.what());
  }

  const Json& trace = at(cfg, "workload.trace");
  if (trace.is_string()) {
    std::filesystem::path p = trace.get<std::string>();
    s.trace = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else if (!trace.is_null()) {
    throw InputError("workload.trace must be a path string or null");
  }
  SyntheticSpec& syn = s.synthetic;
  syn.n_apps = static_cast<int>(integer(cfg, "workload.synthetic.n_apps"));
  syn.threads_per_app = static_cast<int>(integer(cfg, "workload.synthetic.threads_per_app"));
  syn.power_min_w = number(cfg, "workload.synthetic.power_min_w");
  syn.power_max_w = number(cfg, "workload.synthetic.power_max_w");
  syn.arrival_rate = number(cfg, "workload.synthetic.arrival_rate");
  syn.exec_min_s = number(cfg, "workload.synthetic.exec_min_s");
  syn.exec_max_s = number(cfg, "workload.synthetic.exec_max_s");
  const auto mode = parse_arrival_mode(text(cfg, "workload.synthetic.arrivals"));
  if (!mode) throw InputError("workload.synthetic.arrivals must be per_task or per_app");
  syn.arrivals = *mode;
  syn.seed = seed(cfg, "workload.synthetic.seed");
  return s;
}

}  // namespace tcmap
