#include "robustbo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "robustbo/argmax.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/sampling.hpp"

namespace robustbo {

BetaSample beta_from_xi(std::size_t grid_size, double xi) {
  if (grid_size < 1) throw_invalid("beta: grid size must be >= 1");
  return {xi, 2.0 * std::log(static_cast<double>(grid_size)) + xi};
}

BetaSample sample_beta(std::size_t grid_size, Rng& rng) {
  return beta_from_xi(grid_size, -2.0 * std::log(rng.uniform_open_zero()));
}

CredibleField credible_field(const GPosterior& state, double beta, const MeasureSpec& spec, const EnvDist& dist) {
  if (!(beta >= 0.0)) throw_invalid("credible_field: beta must be >= 0");
  const Index nx = state.design_count();
  const Index nw = state.env_count();
  const double root = std::sqrt(beta);
  CredibleField field;
  field.beta = beta;
  field.lower.resize(nx, nw);
  field.upper.resize(nx, nw);
  field.bounds.resize(static_cast<std::size_t>(nx));
  std::vector<double> lo(static_cast<std::size_t>(nw)), hi(static_cast<std::size_t>(nw));
  for (Index x = 0; x < nx; ++x) {
    for (Index w = 0; w < nw; ++w) {
      const Index j = x * nw + w;
      const double half = root * std::sqrt(state.variance(j));
      lo[static_cast<std::size_t>(w)] = state.mean(j) - half;
      hi[static_cast<std::size_t>(w)] = state.mean(j) + half;
      field.lower(x, w) = lo[static_cast<std::size_t>(w)];
      field.upper(x, w) = hi[static_cast<std::size_t>(w)];
    }
    field.bounds[static_cast<std::size_t>(x)] = bounds_exact(spec, lo, hi, dist);
  }
  return field;
}

std::vector<double> plug_in_measure(const GPosterior& state, const MeasureSpec& spec, const EnvDist& dist) {
  std::vector<double> out(static_cast<std::size_t>(state.design_count()));
  for (Index x = 0; x < state.design_count(); ++x) out[static_cast<std::size_t>(x)] = measure_eval(spec, state.mean_row(x), dist);
  return out;
}

Index estimate_solution(const GPosterior& state, const MeasureSpec& spec, const EnvDist& dist) {
  return argmax_first(plug_in_measure(state, spec, dist));
}

Index optimistic_max(const CredibleField& field) {
  std::vector<double> ucb(field.bounds.size());
  double best_lcb = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < field.bounds.size(); ++x) {
    ucb[x] = field.bounds[x].ucb;
    best_lcb = std::max(best_lcb, field.bounds[x].lcb);
  }
  std::vector<double> clamped(ucb.size());
  double top = 0.0;
  for (std::size_t x = 0; x < ucb.size(); ++x) {
    clamped[x] = std::max(ucb[x] - best_lcb, 0.0);
    top = std::max(top, clamped[x]);
  }
  return top > 0.0 ? argmax_first(clamped) : argmax_first(ucb);
}

Index select_x_proposed(const CredibleField& field, Index x_hat) {
  if (x_hat < 0 || static_cast<std::size_t>(x_hat) >= field.bounds.size()) {
    throw_invalid("select_x_proposed: x_hat outside design set");
  }
  const Index x_opt = optimistic_max(field);
  if (x_opt == x_hat) return x_opt;
  const double w_opt = field.width(x_opt);
  const double w_hat = field.width(x_hat);
  if (w_opt > w_hat) return x_opt;
  if (w_hat > w_opt) return x_hat;
  return std::min(x_opt, x_hat);
}

Index select_w_simulator(const GPosterior& state, Index x) {
  if (x < 0 || x >= state.design_count()) throw_invalid("select_w_simulator: design index outside grid");
  return argmax_first(state.variance_row(x));
}

Index select_w_uncontrollable(const EnvDist& dist, Rng& rng) {
  return static_cast<Index>(rng.categorical(dist.pmf()));
}

std::size_t estimate_hat_t(const GPosterior& state, const MeasureSpec& spec, const EnvDist& dist,
                           std::span<const Index> history, HatTMode mode, int samples, Rng& rng) {
  if (history.empty()) throw_invalid("estimate_hat_t: empty history");
  std::map<Index, double> score;  // distinct design -> estimate of E[F(x)]
  for (Index x : history) score.emplace(x, 0.0);

  if (mode == HatTMode::Exact) {
    if (spec.kind() != MeasureKind::Expectation) {
      throw_invalid("estimate_hat_t: exact mode requires the expectation measure");
    }
    for (auto& [x, value] : score) value = measure_eval(spec, state.mean_row(x), dist);
  } else if (mode == HatTMode::MonteCarlo) {
    if (samples < 1) throw_invalid("estimate_hat_t: M must be >= 1");
    std::vector<Index> rows;
    for (const auto& entry : score) rows.push_back(entry.first);
    PathSampler sampler(state, rows);
    std::vector<double> sums(rows.size(), 0.0);
    std::vector<double> row(static_cast<std::size_t>(state.env_count()));
    for (int m = 0; m < samples; ++m) {
      const Eigen::MatrixXd path = sampler.draw(rng);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Index w = 0; w < path.cols(); ++w) row[static_cast<std::size_t>(w)] = path(static_cast<Index>(r), w);
        sums[r] += measure_eval(spec, row, dist);
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) score[rows[r]] = sums[r] / samples;
  } else {
    throw_invalid("estimate_hat_t: mode is off");
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (score[history[i]] >= score[history[best]]) best = i;
  }
  return best;
}

}  // namespace robustbo
