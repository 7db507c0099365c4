#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustbo/policy.hpp"

namespace robustbo {

enum class ProblemKind { Syn2D, Syn4D, Syn6D, Carrier, Custom };
enum class MeasureChoice { Exp, Ptr, ExpMae };

std::string_view to_string(ProblemKind p);
std::string_view to_string(MeasureChoice m);

struct CampaignConfig {
  ProblemKind problem = ProblemKind::Syn2D;
  std::string problem_path;  // carrier CSV or custom table
  std::string pmf_path;      // custom problems only; uniform when empty

  MeasureChoice measure = MeasureChoice::Exp;
  std::optional<double> h;      // overrides the problem preset
  std::optional<double> alpha;  // overrides the problem preset

  Setting setting = Setting::Simulator;
  std::vector<Strategy> strategies;
  int iterations = 300;
  int repetitions = 100;
  std::uint64_t seed = 0;
  std::string output = "results";
  bool bound_check = false;
  HatTMode hat_t = HatTMode::Off;
  int hat_t_samples = 256;
  int workers = 1;
  std::optional<double> bpt_c;  // 1 for synthetic problems, 2 for carrier by default

  // custom problems
  std::string kernel_form = "se";
  double kernel_lengthscale = 1.0;
  double kernel_variance = 1.0;
  double noise_var = 1e-6;

  std::vector<std::string> warnings;
};

/// Parses `key = value` lines; `#` starts a comment. Every violation is
/// collected before a ConfigError is thrown.
CampaignConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");
CampaignConfig parse_config(const std::string& path);

}  // namespace robustbo
