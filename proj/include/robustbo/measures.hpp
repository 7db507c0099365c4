#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustbo/grid.hpp"

namespace robustbo {

enum class MeasureKind {
  Expectation,
  WorstCase,
  BestCase,
  ValueAtRisk,
  CVaR,
  MeanAbsDev,
  StdDev,
  Variance,
  DistRobust,
  MonotoneLipschitz,
  WeightedSum,
  ProbThreshold,
};

/// A robustness measure rho mapping w -> g(w) to a scalar.
class MeasureSpec {
 public:
  using ScalarMap = std::function<double(double)>;

  static MeasureSpec expectation();
  static MeasureSpec worst_case();
  static MeasureSpec best_case();
  static MeasureSpec value_at_risk(double alpha);
  static MeasureSpec cvar(double alpha);
  static MeasureSpec mean_abs_dev();
  static MeasureSpec std_dev();
  static MeasureSpec variance();
  /// inf over candidate pmfs of `inner` evaluated under each candidate.
  static MeasureSpec dist_robust(std::vector<EnvDist> candidates, MeasureSpec inner);
  /// map(rho_inner); `lipschitz` is trusted for q(a), `increasing` is informational.
  static MeasureSpec monotone_lipschitz(ScalarMap map, double lipschitz, bool increasing, MeasureSpec inner);
  static MeasureSpec weighted_sum(double a1, MeasureSpec m1, double a2, MeasureSpec m2);
  static MeasureSpec prob_threshold(double threshold);

  /// Expectation minus `alpha` times mean absolute deviation, composed as
  /// WeightedSum(1, Expectation, alpha, MonotoneLipschitz(a -> -a, K = 1, MAD)).
  static MeasureSpec exp_minus_mad(double alpha);

  MeasureKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return param_; }
  double threshold() const noexcept { return param_; }
  double lipschitz() const noexcept { return param_; }
  bool increasing() const noexcept { return increasing_; }
  double weight1() const noexcept { return param_; }
  double weight2() const noexcept { return param2_; }
  const std::vector<MeasureSpec>& children() const noexcept { return children_; }
  const std::vector<EnvDist>& candidates() const noexcept { return candidates_; }
  const ScalarMap& map() const noexcept { return map_; }

  std::string describe() const;

 private:
  MeasureKind kind_ = MeasureKind::Expectation;
  double param_ = 0.0;
  double param2_ = 0.0;
  bool increasing_ = true;
  std::vector<MeasureSpec> children_;
  std::vector<EnvDist> candidates_;
  ScalarMap map_;
};

struct BoundPair {
  double lcb = 0.0;
  double ucb = 0.0;
};

/// rho(g) under `dist`. Throws invalid-argument on NaN or size mismatch.
double measure_eval(const MeasureSpec& spec, std::span<const double> g, const EnvDist& dist);

/// Lower alpha-quantile inf{b : alpha <= P(g <= b)}. CDF mass exactly alpha
/// selects that atom.
double weighted_quantile(std::span<const double> values, const EnvDist& dist, double alpha);

/// (1/alpha) * integral_0^alpha quantile(a') da', integrated exactly over the
/// step quantile function.
double lower_tail_mean(std::span<const double> values, const EnvDist& dist, double alpha);

/// Guaranteed bounds on rho(g) over every g with l <= g <= u pointwise.
BoundPair bounds_exact(const MeasureSpec& spec, std::span<const double> lower, std::span<const double> upper,
                       const EnvDist& dist);

/// min / max of rho over sample paths at design row x. Not a guaranteed interval.
BoundPair bounds_sampled(const MeasureSpec& spec, std::span<const Eigen::MatrixXd> paths, Index x,
                         const EnvDist& dist);

/// Width function q(a); nullopt for measures without a known form
/// (StdDev, Variance, ProbThreshold and compositions containing them).
std::optional<double> q_value(const MeasureSpec& spec, double a);

bool has_q(const MeasureSpec& spec);

/// Standard normal density and distribution function.
double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace robustbo
