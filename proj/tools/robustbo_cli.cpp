// Command-line front end: campaigns, bound tables, the carrier stand-in and the self test.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "robustbo/campaign.hpp"
#include "robustbo/bench.hpp"
#include "robustbo/config.hpp"
#include "robustbo/errors.hpp"
#include "selfcheck.hpp"

namespace {

using namespace robustbo;

CampaignConfig load(const std::string& path) {
  CampaignConfig cfg = parse_config(path);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

int cmd_run(const std::string& path, const std::string& output_override) {
  CampaignConfig cfg = load(path);
  if (!output_override.empty()) cfg.output = output_override;
  const CampaignResult result = run_campaign(cfg);
  emit_csv(result, cfg.output);
  for (const auto& sr : result.strategies) {
    std::cout << to_string(sr.strategy) << ": final mean regret " << sr.mean_regret.back() << " (+- " << sr.se2.back()
              << ")\n";
  }
  std::cout << "wrote " << cfg.output << '\n';
  return 0;
}

int cmd_bounds(const std::string& path, const std::string& output_override) {
  CampaignConfig cfg = load(path);
  if (!output_override.empty()) cfg.output = output_override;
  const Problem problem = Problem::from_config(cfg);
  const BoundTable table = compute_bounds(cfg, problem);
  emit_bounds_csv(table, cfg.output);
  std::cout << "wrote " << cfg.output << "/bounds.csv" << (table.guaranteed ? "" : " (no guarantee for this measure)")
            << '\n';
  return 0;
}

int cmd_selftest(const std::vector<int>& only) {
  int failures = 0;
  for (const auto& check : selfcheck::acceptance_checks()) {
    if (!only.empty() && std::find(only.begin(), only.end(), check.id) == only.end()) continue;
    const auto result = check.run();
    std::cout << selfcheck::format_result(result) << std::endl;
    if (!result.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Bayesian optimization on finite grids"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "Run a campaign and write CSV results");
  run->add_option("config", config_path, "Campaign config file")->required();
  run->add_option("-o,--output", output, "Override the output directory");

  auto* bounds = app.add_subcommand("bounds", "Write only the theoretical bound table");
  bounds->add_option("config", config_path, "Campaign config file")->required();
  bounds->add_option("-o,--output", output, "Override the output directory");

  std::string standin_path;
  std::uint64_t standin_seed = 0;
  auto* standin = app.add_subcommand("gen-carrier-standin", "Write a synthetic x1,x2,lt surface on the carrier lattice");
  standin->add_option("out", standin_path, "Output CSV path")->required();
  standin->add_option("--seed", standin_seed, "Surface seed");

  std::vector<int> only;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant and acceptance checks");
  selftest->add_option("--only", only, "Run only these check ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, output);
    if (*bounds) return cmd_bounds(config_path, output);
    if (*standin) {
      write_carrier_standin(standin_path, standin_seed);
      std::cout << "wrote " << standin_path << '\n';
      return 0;
    }
    if (*selftest) return cmd_selftest(only);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
