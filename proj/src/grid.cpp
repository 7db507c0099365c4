#include "robustbo/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "robustbo/errors.hpp"

namespace robustbo {

EnvDist::EnvDist(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw_invalid("EnvDist: empty pmf");
  long double total = 0.0L;
  p_min_ = std::numeric_limits<double>::infinity();
  all_positive_ = true;
  for (double p : pmf_) {
    if (!std::isfinite(p) || p < 0.0) throw_invalid("EnvDist: pmf entries must be finite and non-negative");
    total += p;
    if (p > 0.0) {
      p_min_ = std::min(p_min_, p);
    } else {
      all_positive_ = false;
    }
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw_invalid("EnvDist: pmf sums to " + std::to_string(static_cast<double>(total)) + ", expected 1");
  }
}

EnvDist EnvDist::uniform(std::size_t n) {
  if (n == 0) throw_invalid("EnvDist::uniform: n must be positive");
  return EnvDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

EnvDist EnvDist::from_weights(std::span<const double> weights) {
  long double total = 0.0L;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw_invalid("EnvDist::from_weights: weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0.0L) throw_invalid("EnvDist::from_weights: weights sum to zero");
  std::vector<double> pmf(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    pmf[j] = static_cast<double>(static_cast<long double>(weights[j]) / total);
  }
  return EnvDist(std::move(pmf));
}

double EnvDist::expectation(std::span<const double> values) const {
  if (values.size() != pmf_.size()) throw_invalid("EnvDist::expectation: size mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < pmf_.size(); ++j) acc += pmf_[j] * values[j];
  return acc;
}

ProblemGrid::ProblemGrid(Eigen::MatrixXd design, Eigen::MatrixXd env, EnvDist dist)
    : design_(std::move(design)), env_(std::move(env)), dist_(std::move(dist)) {
  if (design_.rows() < 1 || env_.rows() < 1) throw_invalid("ProblemGrid: X and Omega must be non-empty");
  if (static_cast<Index>(dist_.size()) != env_.rows()) {
    throw_invalid("ProblemGrid: pmf size does not match |Omega|");
  }
  if (!design_.allFinite() || !env_.allFinite()) throw_invalid("ProblemGrid: non-finite coordinates");
}

Index ProblemGrid::joint_index(JointPoint p) const {
  if (p.x < 0 || p.x >= design_count() || p.w < 0 || p.w >= env_count()) {
    throw_invalid("ProblemGrid: point (" + std::to_string(p.x) + "," + std::to_string(p.w) + ") outside grid");
  }
  return p.x * env_count() + p.w;
}

JointPoint ProblemGrid::point(Index joint) const {
  if (joint < 0 || joint >= size()) throw_invalid("ProblemGrid: joint index outside grid");
  return {joint / env_count(), joint % env_count()};
}

std::vector<double> ProblemGrid::joint_coords() const {
  const Index d = joint_dim();
  std::vector<double> out(static_cast<std::size_t>(size() * d));
  std::size_t k = 0;
  for (Index x = 0; x < design_count(); ++x) {
    for (Index w = 0; w < env_count(); ++w) {
      for (Index c = 0; c < design_dim(); ++c) out[k++] = design_(x, c);
      for (Index c = 0; c < env_dim(); ++c) out[k++] = env_(w, c);
    }
  }
  return out;
}

Eigen::VectorXd ProblemGrid::coords(JointPoint p) const {
  joint_index(p);
  Eigen::VectorXd out(joint_dim());
  out << design_.row(p.x).transpose(), env_.row(p.w).transpose();
  return out;
}

}  // namespace robustbo
