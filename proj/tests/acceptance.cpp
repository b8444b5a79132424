// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tcmap/experiment.hpp"

using namespace tcmap;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = TCMAP_SCENARIO_DIR;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tcmap_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Check calibration_round_trip() {
  Check c;
  TcParams p;
  p.e_a_ev = 0.42;
  p.b = 2.35;
  p.t_th_c = 1.0;
  const CalibrationBlock cal{10.0, 20.0, 70.0, 10.0, 1.0};
  p = calibrated(p, cal);
  CycleSet cs;
  for (int i = 0; i < 10; ++i) cs.cycles.push_back({20.0, 70.0, 3600.0, 1.0});
  cs.total_time_s = 10 * 3600.0;
  const double years = mttf_tc(cs, p) / kSecondsPerYear;
  c.require(std::fabs(years - 10.0) / 10.0 <= 1e-9, fmt("round trip gave %.12g years", years));
  c.detail = c.ok ? fmt("A_TC=%.4f, MTTF=%.12g years", p.a_tc, years) : c.detail;
  return c;
}

Check rainflow_equivalence() {
  Check c;
  Rng rng(20240601);
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(63));
    std::vector<oracle::Point> raw;
    std::vector<TraceSample> samples;
    for (int i = 0; i < n; ++i) {
      const double v = rng.uniform(40.0, 90.0);
      raw.push_back({0.01 * i, v});
      samples.push_back({0.01 * i, v});
    }
    std::vector<oracle::Cycle> got;
    for (const auto& cy : rainflow_count(samples).cycles)
      got.emplace_back(cy.delta_t_c, cy.t_max_c, cy.duration_s, cy.weight);
    std::sort(got.begin(), got.end());
    c.require(got == oracle::rainflow(raw), "cycle multiset differs on trace " + std::to_string(trial));
  }
  if (c.ok) c.detail = "1000 traces identical";
  return c;
}

Check gap_split_equivalence() {
  Check c;
  Rng rng(99);
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    const std::size_t n = 1 + rng.index(256);
    const double eps = rng.uniform(0.05, 2.0);
    std::vector<double> t(n);
    for (double& v : t) v = rng.uniform(45.0, 95.0);
    BinConfig cfg;
    cfg.epsilon_c = eps;
    std::vector<std::vector<std::size_t>> got;
    for (const auto& b : form_bins(t, cfg).bins) got.emplace_back(b.core_ids.begin(), b.core_ids.end());
    std::sort(got.begin(), got.end());
    c.require(got == oracle::gap_split(t, eps), "partition differs on vector " + std::to_string(trial));
  }
  if (c.ok) c.detail = "1000 vectors identical";
  return c;
}

Check thermal_consistency() {
  Check c;
  const GridDims dims{8, 8};
  const ThermalParams params;
  const ThermalModel model(dims, params);
  Rng rng(4);
  std::vector<double> p(64, 0.0);
  for (double& v : p) v = rng.uniform() < 0.25 ? rng.uniform(1.0, 8.0) : 0.0;
  const auto ss = model.steady_state(p);
  ThermalState s = ambient_state(64, params);
  const int steps = static_cast<int>(std::ceil(20.0 * params.c_tile / params.g_amb / params.dt_s));
  for (int k = 0; k < steps; ++k) s = model.step(s, p);
  double worst = 0;
  for (std::size_t i = 0; i < 64; ++i) worst = std::max(worst, std::fabs(s.temps_c[i] - ss[i]));
  c.require(worst <= 0.1, fmt("transient differs from steady state by %.4g C", worst));

  double total_p = 0, total_rise = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    total_p += p[i];
    total_rise += ss[i] - params.t_ambient_c;
  }
  const double balance = std::fabs(params.g_amb * total_rise - total_p) / total_p;
  c.require(balance <= 1e-9, fmt("energy balance off by %.3g relative", balance));

  std::vector<double> single(64, 0.0);
  const CoreId src = core_at({3, 3}, dims);
  single[src] = 5.0;
  const auto t = model.steady_state(single);
  const GridPos origin = position_of(src, dims);
  const auto nbrs = mesh_neighbors(dims);
  for (CoreId k = 0; k < 64; ++k)
    for (CoreId n : nbrs[k])
      if (manhattan_distance(position_of(n, dims), origin) > manhattan_distance(position_of(k, dims), origin))
        c.require(t[n] < t[k], "rise does not fall from core " + std::to_string(k) + " to " + std::to_string(n));
  const double rise0 = t[src] - params.t_ambient_c;
  const double rise1 = t[core_at({3, 4}, dims)] - params.t_ambient_c;
  const double rise2 = t[core_at({3, 5}, dims)] - params.t_ambient_c;
  if (c.ok)
    c.detail = fmt("max transient gap %.2e C; rise at d=0,1,2: ", worst) +
               fmt("%.2f, %.2f, %.2f C", rise0, rise1, rise2);
  return c;
}

Check cycling_effect() {
  Check c;
  const fs::path cfg_path = kScenarios / "thermal_cycling" / "cycling.json";
  Json cfg = default_config();
  merge_config(cfg, load_config_file(cfg_path));
  const RunOutput osc = run_scenario(cfg, cfg_path.parent_path());
  cfg["workload"]["trace"] = "flat.csv";
  const RunOutput flat = run_scenario(cfg, cfg_path.parent_path());
  const double a = osc.result.metrics.cores[0].mttf_tc_s, b = flat.result.metrics.cores[0].mttf_tc_s;
  c.require(a < b, fmt("oscillating %.4g s is not below flat %.4g s", a, b));
  if (c.ok) c.detail = fmt("oscillating %.4g y vs flat %.4g y (%.1f%% lower)", a / kSecondsPerYear, b / kSecondsPerYear,
                           std::isfinite(b) ? (1.0 - a / b) * 100.0 : 100.0);
  return c;
}

Check comparative_study() {
  Check c;
  const fs::path cfg_path = kScenarios / "sixteen_core.json";
  Json base = default_config();
  merge_config(base, load_config_file(cfg_path));
  int beat_random = 0, beat_conv = 0;
  double sum_two = 0, sum_rand = 0, sum_conv = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto mean_for = [&](const char* mapper) {
      Json cfg = with_seed(base, seed);
      cfg["mapping"]["mapper"] = mapper;
      return run_scenario(cfg, cfg_path.parent_path()).result.metrics.mean_mttf_tc_s;
    };
    const double two = mean_for("two_level"), rnd = mean_for("random"), conv = mean_for("conventional_tc");
    beat_random += two >= rnd;
    beat_conv += two >= conv;
    sum_two += two;
    sum_rand += rnd;
    sum_conv += conv;
  }
  c.require(beat_random >= 9, "two_level >= random in only " + std::to_string(beat_random) + "/10 seeds");
  c.require(beat_conv >= 7, "two_level >= conventional_tc in only " + std::to_string(beat_conv) + "/10 seeds");
  const std::string summary = std::to_string(beat_random) + "/10 vs random, " + std::to_string(beat_conv) +
                              "/10 vs conventional_tc; mean MTTF improvement " +
                              fmt("%+.1f%% over random (reference 31%%), %+.1f%% over conventional_tc (reference 18%%)",
                                  improvement_pct(sum_two, sum_rand), improvement_pct(sum_two, sum_conv));
  c.detail = c.ok ? summary : c.detail + "; " + summary;
  return c;
}

Check determinism() {
  Check c;
  ExperimentSpec spec;
  spec.config = kScenarios / "sixteen_core.json";
  spec.seeds = {3};
  const fs::path dir = scratch("determinism");
  std::ostringstream err;
  spec.out_dir = dir / "a";
  c.require(cmd_run(spec, err) == 0, "first run failed: " + err.str());
  spec.out_dir = dir / "b";
  c.require(cmd_run(spec, err) == 0, "second run failed: " + err.str());
  const std::string a = slurp(dir / "a" / "result.json"), b = slurp(dir / "b" / "result.json");
  c.require(!a.empty() && a == b, "result.json differs between runs");
  if (c.ok) c.detail = std::to_string(a.size()) + " identical bytes";
  fs::remove_all(dir);
  return c;
}

Check epsilon_sweep() {
  Check c;
  ExperimentSpec spec;
  spec.config = kScenarios / "sixteen_core.json";
  spec.out_dir = scratch("sweep");
  std::ostringstream err;
  c.require(cmd_sweep_epsilon(spec, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}, err) == 0, "sweep failed: " + err.str());
  std::stringstream table(slurp(spec.out_dir / "epsilon_sweep.csv"));
  std::string line;
  std::getline(table, line);
  int rows = 0;
  std::string best;
  double best_v = -1;
  while (std::getline(table, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto f = csv::split(line);
    double v = 0;
    if (csv::parse_double(f[1], v) && v > best_v) {
      best_v = v;
      best = f[0];
    }
  }
  c.require(rows == 7, "expected 7 rows, found " + std::to_string(rows));
  if (c.ok) c.detail = "7 rows; highest mean MTTF at epsilon " + best;
  fs::remove_all(spec.out_dir);
  return c;
}

Check monotonicity() {
  Check c;
  const TcParams tc = calibrated(TcParams{}, CalibrationBlock{});
  for (double d = 2.0; d < 60.0; d += 0.5)
    c.require(cycles_to_failure(d + 0.5, 70.0, tc) < cycles_to_failure(d, 70.0, tc), fmt("N_TC not decreasing at dT=%g", d));
  for (double t = 30.0; t < 120.0; t += 0.5)
    c.require(cycles_to_failure(20.0, t + 0.5, tc) < cycles_to_failure(20.0, t, tc), fmt("N_TC not decreasing at Tmax=%g", t));
  const AgingParams ag;
  c.require(nbti_index(ag.t_ref_c, ag) == 1.0 && hci_index(ag.t_ref_c, ag) == 1.0 && em_index(ag.t_ref_c, ag) == 1.0,
            "indices differ from 1 at the reference temperature");
  for (double t = 45.0; t < 95.0; t += 0.25) {
    c.require(nbti_index(t + 0.25, ag) < nbti_index(t, ag), fmt("nbti not decreasing at %g C", t));
    c.require(hci_index(t + 0.25, ag) < hci_index(t, ag), fmt("hci not decreasing at %g C", t));
    c.require(em_index(t + 0.25, ag) < em_index(t, ag), fmt("em not decreasing at %g C", t));
  }
  if (c.ok) c.detail = fmt("at 95 C: nbti %.3f, hci %.3f, em %.3f", nbti_index(95, ag), hci_index(95, ag), em_index(95, ag));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"calibration round trip", calibration_round_trip},
      {"rainflow oracle equivalence", rainflow_equivalence},
      {"DBSCAN gap-split equivalence", gap_split_equivalence},
      {"thermal solver consistency", thermal_consistency},
      {"thermal-cycling effect", cycling_effect},
      {"comparative study", comparative_study},
      {"determinism", determinism},
      {"epsilon sweep harness", epsilon_sweep},
      {"monotonicity suite", monotonicity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criteria[i].second();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s (%.2fs)\n", result.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                result.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !result.ok;
  }
  return failures == 0 ? 0 : 1;
}
