#include <algorithm>
#include <cmath>
#include <numbers>

#include "robustbo/argmax.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/policy.hpp"

namespace robustbo {

JointPoint select_random(Index design_count, const EnvDist& dist, Rng& rng) {
  if (design_count < 1) throw_invalid("select_random: empty design set");
  const auto x = static_cast<Index>(rng.index(static_cast<std::uint64_t>(design_count)));
  const auto w = static_cast<Index>(rng.categorical(dist.pmf()));
  return {x, w};
}

JointPoint select_us(const GPosterior& state) {
  const auto& var = state.variance_vector();
  const Index j = argmax_first({var.data(), static_cast<std::size_t>(var.size())});
  return {j / state.env_count(), j % state.env_count()};
}

Eigen::VectorXd bq_prior_variance(const GPosterior& state, const EnvDist& dist) {
  const Index nx = state.design_count();
  const Index nw = state.env_count();
  if (static_cast<Index>(dist.size()) != nw) throw_invalid("bq_prior_variance: pmf size does not match |Omega|");
  Eigen::VectorXd out(nx);
  for (Index x = 0; x < nx; ++x) {
    double acc = 0.0;
    for (Index a = 0; a < nw; ++a) {
      if (dist[a] == 0.0) continue;
      acc += dist[a] * dist[a] * state.prior_variance(x * nw + a);
      for (Index b = 0; b < a; ++b) {
        acc += 2.0 * dist[a] * dist[b] * state.prior_covariance(x * nw + a, x * nw + b);
      }
    }
    out[x] = acc;
  }
  return out;
}

BqPosterior bq_posterior(const GPosterior& state, const EnvDist& dist) {
  return bq_posterior(state, dist, bq_prior_variance(state, dist));
}

BqPosterior bq_posterior(const GPosterior& state, const EnvDist& dist, const Eigen::VectorXd& prior_variance) {
  const Index nx = state.design_count();
  const Index nw = state.env_count();
  if (static_cast<Index>(dist.size()) != nw) throw_invalid("bq_posterior: pmf size does not match |Omega|");
  BqPosterior out;
  out.mean.resize(nx);
  out.variance = prior_variance;
  for (Index x = 0; x < nx; ++x) out.mean[x] = dist.expectation(state.mean_row(x));
  // sum_w p(w) k_t(x, w) whitened by L^{-1}: one scalar per observation and design
  for (std::size_t r = 0; r < state.observation_count(); ++r) {
    const auto& row = state.whitened_cross(r);
    for (Index x = 0; x < nx; ++x) {
      double a = 0.0;
      for (Index w = 0; w < nw; ++w) a += dist[w] * row[x * nw + w];
      out.variance[x] -= a * a;
    }
  }
  out.variance = out.variance.cwiseMax(0.0);
  return out;
}

double expected_improvement(double mean, double sd, double best) {
  if (!(sd > 0.0)) return std::max(mean - best, 0.0);
  const double z = (mean - best) / sd;
  return sd * (z * normal_cdf(z) + normal_pdf(z));
}

Index select_bq(const BqPosterior& posterior) {
  const double best = posterior.mean.maxCoeff();
  Index chosen = 0;
  double chosen_ei = -1.0;
  for (Index x = 0; x < posterior.mean.size(); ++x) {
    const double ei = expected_improvement(posterior.mean[x], std::sqrt(posterior.variance[x]), best);
    if (ei > chosen_ei || (ei == chosen_ei && posterior.mean[x] > posterior.mean[chosen])) {
      chosen = x;
      chosen_ei = ei;
    }
  }
  return chosen;
}

Index select_bq(const GPosterior& state, const EnvDist& dist) { return select_bq(bq_posterior(state, dist)); }

double bptucb_eta(double c, std::size_t grid_size) {
  if (!(c > 0.0)) throw_invalid("bptucb_eta: c must be positive");
  return 0.5 * std::min(1e-8 * c / 2.0, 1e-16 * 0.05 * c / (8.0 * static_cast<double>(grid_size)));
}

double bptucb_beta(std::size_t grid_size, int t) {
  if (t < 1) throw_invalid("bptucb_beta: t must be >= 1");
  const double tt = static_cast<double>(t);
  return static_cast<double>(grid_size) * std::numbers::pi * std::numbers::pi * tt * tt / (3.0 * 0.05);
}

BptUcbScores bptucb_scores(const GPosterior& state, const EnvDist& dist, double threshold, int t, double c,
                           BetaVariant variant) {
  const Index nx = state.design_count();
  const Index nw = state.env_count();
  const auto grid_size = static_cast<std::size_t>(state.size());
  const double eta = bptucb_eta(c, grid_size);
  const double beta_root10 = variant == BetaVariant::Theory ? std::pow(bptucb_beta(grid_size, t), 0.1) : 0.0;
  BptUcbScores s;
  s.p_hat = Eigen::VectorXd::Zero(nx);
  s.gamma_sq = Eigen::VectorXd::Zero(nx);
  s.score.resize(nx);
  s.spread.resize(nx, nw);
  for (Index x = 0; x < nx; ++x) {
    for (Index w = 0; w < nw; ++w) {
      const Index j = x * nw + w;
      const double mu = state.mean(j);
      const double sd = std::sqrt(state.variance(j));
      const double level = std::fabs(mu - threshold) < eta ? threshold + 2.0 * eta : threshold;
      const double diff = mu - level;
      double prob;
      if (sd > 0.0) {
        prob = normal_cdf(diff / sd);
      } else {
        prob = diff > 0.0 ? 1.0 : (diff < 0.0 ? 0.0 : 0.5);
      }
      s.spread(x, w) = prob * (1.0 - prob);
      s.p_hat[x] += dist[w] * prob;
      s.gamma_sq[x] += dist[w] * s.spread(x, w);
    }
    s.score[x] = variant == BetaVariant::Theory ? s.p_hat[x] + beta_root10 * std::pow(s.gamma_sq[x], 0.1)
                                                : s.p_hat[x] + 3.0 * std::sqrt(s.gamma_sq[x]);
  }
  return s;
}

JointPoint select_bptucb(const GPosterior& state, const EnvDist& dist, double threshold, int t, double c,
                         BetaVariant variant) {
  const auto s = bptucb_scores(state, dist, threshold, t, c, variant);
  const Index x = argmax_first({s.score.data(), static_cast<std::size_t>(s.score.size())});
  std::vector<double> row(static_cast<std::size_t>(s.spread.cols()));
  for (Index w = 0; w < s.spread.cols(); ++w) row[static_cast<std::size_t>(w)] = s.spread(x, w);
  return {x, argmax_first(row)};
}

double bbbmobo_beta(std::size_t grid_size, int t) {
  if (t < 1) throw_invalid("bbbmobo_beta: t must be >= 1");
  const double tt = static_cast<double>(t);
  return 2.0 * std::log(static_cast<double>(grid_size) * std::numbers::pi * std::numbers::pi * tt * tt / (6.0 * 0.05));
}

Index select_bbbmobo(const CredibleField& field) { return optimistic_max(field); }

}  // namespace robustbo
