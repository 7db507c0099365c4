#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "robustbo/gp.hpp"
#include "robustbo/rng.hpp"

namespace robustbo {

/// Joint posterior draws over a block of design rows (all of Omega per row).
///
/// Factorizes the posterior covariance of the selected points once; each
/// draw then costs one triangular matrix-vector product.
class PathSampler {
 public:
  /// `rows` empty means every design row.
  PathSampler(const GPosterior& state, std::span<const Index> rows = {});

  /// One draw as a rows.size() x |Omega| matrix (row r <-> rows[r]).
  Eigen::MatrixXd draw(Rng& rng) const;

  const std::vector<Index>& rows() const noexcept { return rows_; }
  double jitter() const noexcept { return jitter_; }

 private:
  std::vector<Index> rows_;
  Index n_env_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

/// S joint posterior sample paths, each |X| x |Omega| (or rows.size() x |Omega|).
std::vector<Eigen::MatrixXd> sample_paths(const GPosterior& state, int count, Rng& rng,
                                          std::span<const Index> rows = {});

/// Greedy estimate of the maximum information gain gamma_1..gamma_T.
struct InfoGainCurve {
  std::vector<double> greedy;     // gamma-hat_t, non-decreasing
  std::vector<double> certified;  // gamma-hat_t / (1 - 1/e), an upper bound on gamma_t
  std::vector<Index> picks;       // joint indices chosen by the greedy pass
};

/// Greedy sequential maximization of posterior variance. Points may repeat.
InfoGainCurve greedy_max_info_gain(const KernelSpec& kernel, double noise_var, const ProblemGrid& grid, int horizon);

/// Inflation factor 1 / (1 - 1/e) of the greedy log-det guarantee.
double greedy_certification_factor();

}  // namespace robustbo
