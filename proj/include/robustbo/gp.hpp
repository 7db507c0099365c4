#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "robustbo/grid.hpp"
#include "robustbo/kernel.hpp"

namespace robustbo {

struct Observation {
  JointPoint point;
  Index joint = 0;
  double y = 0.0;
};

/// Exact zero-mean GP posterior over the points of a fixed ProblemGrid.
///
/// Besides the Cholesky factor L of (K_t + noise I) the state caches the
/// whitened cross-covariance V = L^{-1} K(obs, grid) one row per observation,
/// so an update costs O(t N) and the mean/variance fields stay current:
///   mean = V^T (L^{-1} y),  var = k(theta, theta) - colwise |V|^2.
/// Updates border L with one row; a full refactorization with a jitter ladder
/// (1e-12 .. 1e-6) only runs when the bordered pivot loses conditioning.
class GPosterior {
 public:
  GPosterior(KernelSpec kernel, double noise_var, const ProblemGrid& grid);

  /// Append the observation y at `p`. Throws invalid-argument for non-finite y.
  void update(JointPoint p, double y);

  const KernelSpec& kernel() const noexcept { return kernel_; }
  double noise_var() const noexcept { return noise_var_; }
  /// Extra diagonal added by the last refactorization (0 when none was needed).
  double jitter() const noexcept { return jitter_; }

  Index design_count() const noexcept { return n_design_; }
  Index env_count() const noexcept { return n_env_; }
  Index size() const noexcept { return n_design_ * n_env_; }
  Index joint_index(JointPoint p) const;

  std::size_t observation_count() const noexcept { return obs_.size(); }
  const std::vector<Observation>& observations() const noexcept { return obs_; }

  double mean(Index joint) const { return mean_[joint]; }
  double variance(Index joint) const { return var_[joint]; }
  double mean(JointPoint p) const { return mean_[joint_index(p)]; }
  double variance(JointPoint p) const { return var_[joint_index(p)]; }
  double prior_variance(Index joint) const { return prior_var_[joint]; }

  /// Length-N fields in joint enumeration order.
  const Eigen::VectorXd& mean_vector() const noexcept { return mean_; }
  const Eigen::VectorXd& variance_vector() const noexcept { return var_; }

  /// Row x of the mean / variance field as a span over Omega.
  std::span<const double> mean_row(Index x) const;
  std::span<const double> variance_row(Index x) const;

  std::span<const double> coords(Index joint) const;
  double prior_covariance(Index a, Index b) const;
  /// Posterior covariance k_t(a, b).
  double covariance(Index a, Index b) const;
  Eigen::MatrixXd covariance(std::span<const Index> joints) const;

  /// Lower Cholesky factor of K_t + (noise + jitter) I.
  const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }
  /// (K_t + noise I)^{-1} y_t.
  Eigen::VectorXd alpha() const;
  const Eigen::VectorXd& whitened_targets() const noexcept { return white_y_; }
  /// Row r of L^{-1} K(obs, grid).
  const Eigen::VectorXd& whitened_cross(std::size_t r) const { return cross_[r]; }

  /// 1/2 log det(I + noise^{-2} K_t) at the observed points.
  double realized_info_gain() const;

 private:
  void refactor();

  KernelSpec kernel_;
  double noise_var_;
  double jitter_ = 0.0;
  Index n_design_ = 0;
  Index n_env_ = 0;
  Index dim_ = 0;
  std::vector<double> coords_;
  Eigen::VectorXd prior_var_;
  std::vector<Observation> obs_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd white_y_;
  std::vector<Eigen::VectorXd> cross_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;
};

/// Mean and sd fields as |X| x |Omega| matrices.
struct PosteriorField {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd sd;
};

PosteriorField posterior_field(const GPosterior& state);

/// Lower Cholesky factor of `cov`, adding jitter 1e-12, 1e-11, ..., 1e-6
/// (scaled by max(1, max diag)) until the factorization succeeds.
/// Throws numerical-failure when every rung fails.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double* used_jitter = nullptr);

}  // namespace robustbo
