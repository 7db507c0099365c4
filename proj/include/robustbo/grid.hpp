#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

namespace robustbo {

using Index = Eigen::Index;

/// Probability mass function over the environment set.
class EnvDist {
 public:
  EnvDist() = default;

  /// Validates non-negativity and normalization (|sum - 1| <= 1e-12).
  explicit EnvDist(std::vector<double> pmf);

  static EnvDist uniform(std::size_t n);

  /// Normalizes non-negative weights (summed in extended precision).
  static EnvDist from_weights(std::span<const double> weights);

  std::size_t size() const noexcept { return pmf_.size(); }
  double operator[](std::size_t j) const { return pmf_[j]; }
  std::span<const double> pmf() const noexcept { return pmf_; }

  /// Smallest strictly positive mass.
  double p_min() const noexcept { return p_min_; }
  bool all_positive() const noexcept { return all_positive_; }

  double expectation(std::span<const double> values) const;

 private:
  std::vector<double> pmf_;
  double p_min_ = 0.0;
  bool all_positive_ = false;
};

/// A (design, environment) pair of indices into a ProblemGrid.
struct JointPoint {
  Index x = 0;
  Index w = 0;
  friend bool operator==(const JointPoint&, const JointPoint&) = default;
};

/// Finite design set X, environment set Omega and the pmf over Omega.
///
/// Joint points are enumerated row-major: joint = x * |Omega| + w. The joint
/// coordinate vector is the design coordinates followed by the environment
/// coordinates.
class ProblemGrid {
 public:
  ProblemGrid() = default;
  ProblemGrid(Eigen::MatrixXd design, Eigen::MatrixXd env, EnvDist dist);

  Index design_count() const noexcept { return design_.rows(); }
  Index env_count() const noexcept { return env_.rows(); }
  Index size() const noexcept { return design_.rows() * env_.rows(); }
  Index design_dim() const noexcept { return design_.cols(); }
  Index env_dim() const noexcept { return env_.cols(); }
  Index joint_dim() const noexcept { return design_.cols() + env_.cols(); }

  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const Eigen::MatrixXd& env() const noexcept { return env_; }
  const EnvDist& dist() const noexcept { return dist_; }

  Index joint_index(JointPoint p) const;
  JointPoint point(Index joint) const;

  /// Row-major N x joint_dim coordinate table.
  std::vector<double> joint_coords() const;
  Eigen::VectorXd coords(JointPoint p) const;

 private:
  Eigen::MatrixXd design_;
  Eigen::MatrixXd env_;
  EnvDist dist_;
};

}  // namespace robustbo
