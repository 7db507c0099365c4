#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "robustbo/bench.hpp"
#include "robustbo/config.hpp"
#include "robustbo/kernel.hpp"
#include "robustbo/measures.hpp"
#include "robustbo/policy.hpp"

namespace robustbo {

/// Everything about a problem that does not change between repetitions.
class Problem {
 public:
  static Problem from_config(const CampaignConfig& config);

  const ProblemGrid& grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  double gp_noise() const noexcept { return gp_noise_; }
  const MeasureSpec& measure() const noexcept { return measure_; }
  double threshold() const noexcept { return threshold_; }
  double bpt_c() const noexcept { return bpt_c_; }

  /// True function for one repetition. Random problems draw a fresh function per seed.
  TabulatedOracle oracle(std::uint64_t function_seed) const;

 private:
  ProblemKind kind_ = ProblemKind::Syn2D;
  ProblemGrid grid_;
  KernelSpec kernel_;
  double gp_noise_ = kSyntheticNoise;
  MeasureSpec measure_;
  double threshold_ = 0.0;
  double bpt_c_ = 1.0;
  std::shared_ptr<const TabulatedOracle> fixed_;
  std::shared_ptr<const GpFunctionSampler> sampler_;
  std::shared_ptr<const Synthetic6dSampler> sampler6d_;
};

struct StrategyResult {
  Strategy strategy = Strategy::Proposed;
  std::vector<RunTrace> traces;     // one per repetition
  std::vector<double> mean_regret;  // per t = 1..T
  std::vector<double> se2;          // twice the standard error, per t
};

/// Theory columns; `guaranteed` is false when the measure has no width function.
struct BoundTable {
  std::vector<double> gamma_hat;
  std::vector<double> gamma_certified;
  std::vector<double> bound_cumulative;  // bound on E[R_t]
  std::vector<double> bound_simple;      // bound on E[r] at the optimal index
  std::vector<double> markov;            // R_t bound holding with probability 0.95
  bool guaranteed = false;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<StrategyResult> strategies;
  std::vector<Index> x_star;  // per repetition
  std::optional<BoundTable> bounds;
};

/// Runs every strategy for every repetition. Each repetition has its own
/// function draw and initial point, shared by all strategies.
CampaignResult run_campaign(const CampaignConfig& config);

BoundTable compute_bounds(const CampaignConfig& config, const Problem& problem);

/// Mean and twice the standard error per column of a rows-are-repetitions table.
void aggregate(const std::vector<std::vector<double>>& per_rep, std::vector<double>& mean, std::vector<double>& se2);

void emit_csv(const CampaignResult& result, const std::string& dir);
void emit_bounds_csv(const BoundTable& bounds, const std::string& dir);

}  // namespace robustbo
