#include "robustbo/sampling.hpp"

#include <cmath>
#include <numeric>

#include "robustbo/argmax.hpp"
#include "robustbo/errors.hpp"

namespace robustbo {

PathSampler::PathSampler(const GPosterior& state, std::span<const Index> rows) : n_env_(state.env_count()) {
  if (rows.empty()) {
    rows_.resize(static_cast<std::size_t>(state.design_count()));
    std::iota(rows_.begin(), rows_.end(), Index{0});
  } else {
    rows_.assign(rows.begin(), rows.end());
  }
  std::vector<Index> joints;
  joints.reserve(rows_.size() * static_cast<std::size_t>(n_env_));
  for (Index x : rows_) {
    if (x < 0 || x >= state.design_count()) throw_invalid("PathSampler: design row outside grid");
    for (Index w = 0; w < n_env_; ++w) joints.push_back(x * n_env_ + w);
  }
  mean_.resize(static_cast<Index>(joints.size()));
  for (std::size_t i = 0; i < joints.size(); ++i) mean_[static_cast<Index>(i)] = state.mean(joints[i]);
  factor_ = jittered_cholesky(state.covariance(joints), &jitter_);
}

Eigen::MatrixXd PathSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const Eigen::VectorXd path = mean_ + factor_.triangularView<Eigen::Lower>() * z;
  Eigen::MatrixXd out(static_cast<Index>(rows_.size()), n_env_);
  for (Index r = 0; r < out.rows(); ++r) out.row(r) = path.segment(r * n_env_, n_env_).transpose();
  return out;
}

std::vector<Eigen::MatrixXd> sample_paths(const GPosterior& state, int count, Rng& rng, std::span<const Index> rows) {
  if (count < 1) throw_invalid("sample_paths: S must be >= 1");
  PathSampler sampler(state, rows);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) out.push_back(sampler.draw(rng));
  return out;
}

double greedy_certification_factor() { return 1.0 / (1.0 - std::exp(-1.0)); }

InfoGainCurve greedy_max_info_gain(const KernelSpec& kernel, double noise_var, const ProblemGrid& grid, int horizon) {
  if (horizon < 0) throw_invalid("greedy_max_info_gain: negative horizon");
  GPosterior state(kernel, noise_var, grid);
  InfoGainCurve curve;
  double gain = 0.0;
  const double factor = greedy_certification_factor();
  for (int t = 0; t < horizon; ++t) {
    const auto& var = state.variance_vector();
    const Index best = argmax_first({var.data(), static_cast<std::size_t>(var.size())});
    gain += 0.5 * std::log1p(state.variance(best) / noise_var);
    state.update(grid.point(best), 0.0);
    curve.greedy.push_back(gain);
    curve.certified.push_back(gain * factor);
    curve.picks.push_back(best);
  }
  return curve;
}

}  // namespace robustbo
