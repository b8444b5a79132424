// Command-line front end: run, sweep-epsilon, compare, heatmap.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcmap/experiment.hpp"

namespace {

template <typename T>
bool parse_list(const std::string& text, std::vector<T>& out) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) return false;
    std::istringstream is(item);
    T value{};
    if (!(is >> value) || !is.eof()) return false;
    out.push_back(value);
  }
  return true;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-cycling-aware manycore task mapping simulator"};
  app.require_subcommand(1);

  std::string config, trace, out = ".", seeds, mappers, epsilons, kind = "mean_temp";
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Scenario config (JSON)");
    cmd->add_option("--trace", trace, "Task trace CSV");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--seed", seeds, "Seed or comma-separated seed list");
    cmd->add_option("--set", overrides, "Override a config value, e.g. thermal.g_adj=0.2");
  };

  auto* run = app.add_subcommand("run", "Run one scenario and write result.json, traces.csv, mttf.csv, heatmaps");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep-epsilon", "Run the scenario once per binning epsilon");
  add_common(sweep);
  sweep->add_option("--epsilons", epsilons, "Comma-separated epsilon values (C)")->required();
  auto* compare = app.add_subcommand("compare", "Run several mappers on identical workloads and seeds");
  add_common(compare);
  compare->add_option("--mappers", mappers, "Comma-separated mappers")->default_val("two_level,random,conventional_tc");
  auto* heatmap = app.add_subcommand("heatmap", "Re-export a heatmap from a previous run in --out");
  heatmap->add_option("--out", out, "Directory holding result.json, traces.csv, mttf.csv");
  heatmap->add_option("--kind", kind, "mean_temp or mttf_tc")->check(CLI::IsMember({"mean_temp", "mttf_tc"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  tcmap::ExperimentSpec spec;
  if (!config.empty()) spec.config = config;
  if (!trace.empty()) spec.trace = trace;
  spec.overrides = overrides;
  spec.out_dir = out;
  if (!seeds.empty() && !parse_list(seeds, spec.seeds)) {
    std::cerr << "error: --seed expects N[,N...]\n";
    return 2;
  }

  if (run->parsed()) return tcmap::cmd_run(spec);
  if (sweep->parsed()) {
    std::vector<double> values;
    if (!parse_list(epsilons, values)) {
      std::cerr << "error: --epsilons expects e1[,e2...]\n";
      return 2;
    }
    return tcmap::cmd_sweep_epsilon(spec, values);
  }
  if (compare->parsed()) return tcmap::cmd_compare(spec, split_names(mappers));
  return tcmap::cmd_heatmap(spec, *tcmap::parse_heatmap_kind(kind));
}
