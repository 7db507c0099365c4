#include "robustbo/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "robustbo/errors.hpp"

namespace robustbo {

namespace {

void check_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid(std::string(what) + ": alpha must lie in (0, 1)");
}

void check_row(std::span<const double> g, const EnvDist& dist, const char* what) {
  if (g.size() != dist.size()) {
    throw_invalid(std::string(what) + ": row has " + std::to_string(g.size()) + " entries, pmf has " +
                  std::to_string(dist.size()));
  }
  for (double v : g) {
    if (std::isnan(v)) throw_invalid(std::string(what) + ": NaN in function row");
  }
}

// Atom order for the quantile function: ascending value.
std::vector<std::size_t> ascending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

// Absorbs summation round-off when a CDF step lands exactly on alpha.
constexpr double kCdfSlack = 1e-12;

double centered_moment_bound(std::span<const double> lower, std::span<const double> upper, const EnvDist& dist,
                             bool squared, bool want_upper) {
  const double mean_l = dist.expectation(lower);
  const double mean_u = dist.expectation(upper);
  double acc = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    const double lo = lower[j] - mean_u;  // lower end of g - E[g]
    const double hi = upper[j] - mean_l;  // upper end of g - E[g]
    const double a = squared ? lo * lo : std::fabs(lo);
    const double b = squared ? hi * hi : std::fabs(hi);
    double term;
    if (want_upper) {
      term = std::max(a, b);
    } else {
      const double straddle = std::max(std::min(-lo, hi), 0.0);
      term = std::min(a, b) - (squared ? straddle * straddle : straddle);
    }
    acc += dist[j] * term;
  }
  return acc;
}

}  // namespace

MeasureSpec MeasureSpec::expectation() { return MeasureSpec{}; }

MeasureSpec MeasureSpec::worst_case() {
  MeasureSpec m;
  m.kind_ = MeasureKind::WorstCase;
  return m;
}

MeasureSpec MeasureSpec::best_case() {
  MeasureSpec m;
  m.kind_ = MeasureKind::BestCase;
  return m;
}

MeasureSpec MeasureSpec::value_at_risk(double alpha) {
  check_alpha(alpha, "value_at_risk");
  MeasureSpec m;
  m.kind_ = MeasureKind::ValueAtRisk;
  m.param_ = alpha;
  return m;
}

MeasureSpec MeasureSpec::cvar(double alpha) {
  check_alpha(alpha, "cvar");
  MeasureSpec m;
  m.kind_ = MeasureKind::CVaR;
  m.param_ = alpha;
  return m;
}

MeasureSpec MeasureSpec::mean_abs_dev() {
  MeasureSpec m;
  m.kind_ = MeasureKind::MeanAbsDev;
  return m;
}

MeasureSpec MeasureSpec::std_dev() {
  MeasureSpec m;
  m.kind_ = MeasureKind::StdDev;
  return m;
}

MeasureSpec MeasureSpec::variance() {
  MeasureSpec m;
  m.kind_ = MeasureKind::Variance;
  return m;
}

MeasureSpec MeasureSpec::dist_robust(std::vector<EnvDist> candidates, MeasureSpec inner) {
  if (candidates.empty()) throw_invalid("dist_robust: candidate set is empty");
  for (const auto& c : candidates) {
    if (c.size() != candidates.front().size()) throw_invalid("dist_robust: candidate pmfs differ in size");
  }
  MeasureSpec m;
  m.kind_ = MeasureKind::DistRobust;
  m.candidates_ = std::move(candidates);
  m.children_.push_back(std::move(inner));
  return m;
}

MeasureSpec MeasureSpec::monotone_lipschitz(ScalarMap map, double lipschitz, bool increasing, MeasureSpec inner) {
  if (!map) throw_invalid("monotone_lipschitz: map is empty");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) throw_invalid("monotone_lipschitz: K must be >= 0");
  MeasureSpec m;
  m.kind_ = MeasureKind::MonotoneLipschitz;
  m.param_ = lipschitz;
  m.increasing_ = increasing;
  m.map_ = std::move(map);
  m.children_.push_back(std::move(inner));
  return m;
}

MeasureSpec MeasureSpec::weighted_sum(double a1, MeasureSpec m1, double a2, MeasureSpec m2) {
  if (!(a1 >= 0.0) || !(a2 >= 0.0) || !std::isfinite(a1) || !std::isfinite(a2)) {
    throw_invalid("weighted_sum: weights must be finite and non-negative");
  }
  MeasureSpec m;
  m.kind_ = MeasureKind::WeightedSum;
  m.param_ = a1;
  m.param2_ = a2;
  m.children_.push_back(std::move(m1));
  m.children_.push_back(std::move(m2));
  return m;
}

MeasureSpec MeasureSpec::prob_threshold(double threshold) {
  if (!std::isfinite(threshold)) throw_invalid("prob_threshold: threshold must be finite");
  MeasureSpec m;
  m.kind_ = MeasureKind::ProbThreshold;
  m.param_ = threshold;
  return m;
}

MeasureSpec MeasureSpec::exp_minus_mad(double alpha) {
  return weighted_sum(1.0, expectation(), alpha,
                      monotone_lipschitz([](double a) { return -a; }, 1.0, false, mean_abs_dev()));
}

std::string MeasureSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case MeasureKind::Expectation: os << "Expectation"; break;
    case MeasureKind::WorstCase: os << "WorstCase"; break;
    case MeasureKind::BestCase: os << "BestCase"; break;
    case MeasureKind::ValueAtRisk: os << "VaR(" << param_ << ")"; break;
    case MeasureKind::CVaR: os << "CVaR(" << param_ << ")"; break;
    case MeasureKind::MeanAbsDev: os << "MeanAbsDev"; break;
    case MeasureKind::StdDev: os << "StdDev"; break;
    case MeasureKind::Variance: os << "Variance"; break;
    case MeasureKind::DistRobust:
      os << "DistRobust(" << candidates_.size() << " pmfs, " << children_[0].describe() << ")";
      break;
    case MeasureKind::MonotoneLipschitz:
      os << "MonotoneLipschitz(K=" << param_ << ", " << children_[0].describe() << ")";
      break;
    case MeasureKind::WeightedSum:
      os << param_ << "*" << children_[0].describe() << " + " << param2_ << "*" << children_[1].describe();
      break;
    case MeasureKind::ProbThreshold: os << "ProbThreshold(" << param_ << ")"; break;
  }
  return os.str();
}

double weighted_quantile(std::span<const double> values, const EnvDist& dist, double alpha) {
  check_alpha(alpha, "weighted_quantile");
  check_row(values, dist, "weighted_quantile");
  const auto order = ascending_order(values);
  double cumulative = 0.0;
  double last = values[order.back()];
  for (std::size_t idx : order) {
    if (dist[idx] <= 0.0) continue;
    cumulative += dist[idx];
    last = values[idx];
    if (cumulative >= alpha - kCdfSlack) return values[idx];
  }
  return last;
}

double lower_tail_mean(std::span<const double> values, const EnvDist& dist, double alpha) {
  check_alpha(alpha, "lower_tail_mean");
  check_row(values, dist, "lower_tail_mean");
  const auto order = ascending_order(values);
  double remaining = alpha;
  double acc = 0.0;
  for (std::size_t idx : order) {
    if (remaining <= 0.0) break;
    const double take = std::min(dist[idx], remaining);
    acc += take * values[idx];
    remaining -= take;
  }
  return acc / alpha;
}

double measure_eval(const MeasureSpec& spec, std::span<const double> g, const EnvDist& dist) {
  if (spec.kind() != MeasureKind::DistRobust) check_row(g, dist, "measure_eval");
  switch (spec.kind()) {
    case MeasureKind::Expectation:
      return dist.expectation(g);
    case MeasureKind::WorstCase:
      return *std::min_element(g.begin(), g.end());
    case MeasureKind::BestCase:
      return *std::max_element(g.begin(), g.end());
    case MeasureKind::ValueAtRisk:
      return weighted_quantile(g, dist, spec.alpha());
    case MeasureKind::CVaR:
      return lower_tail_mean(g, dist, spec.alpha());
    case MeasureKind::MeanAbsDev:
    case MeasureKind::StdDev:
    case MeasureKind::Variance: {
      const double mean = dist.expectation(g);
      double acc = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double d = g[j] - mean;
        acc += dist[j] * (spec.kind() == MeasureKind::MeanAbsDev ? std::fabs(d) : d * d);
      }
      return spec.kind() == MeasureKind::StdDev ? std::sqrt(acc) : acc;
    }
    case MeasureKind::DistRobust: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& candidate : spec.candidates()) {
        best = std::min(best, measure_eval(spec.children()[0], g, candidate));
      }
      return best;
    }
    case MeasureKind::MonotoneLipschitz:
      return spec.map()(measure_eval(spec.children()[0], g, dist));
    case MeasureKind::WeightedSum:
      return spec.weight1() * measure_eval(spec.children()[0], g, dist) +
             spec.weight2() * measure_eval(spec.children()[1], g, dist);
    case MeasureKind::ProbThreshold: {
      double mass = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] >= spec.threshold()) mass += dist[j];
      }
      return mass;
    }
  }
  return 0.0;
}

BoundPair bounds_exact(const MeasureSpec& spec, std::span<const double> lower, std::span<const double> upper,
                       const EnvDist& dist) {
  if (lower.size() != upper.size()) throw_invalid("bounds_exact: lower/upper size mismatch");
  if (spec.kind() != MeasureKind::DistRobust) {
    check_row(lower, dist, "bounds_exact");
    check_row(upper, dist, "bounds_exact");
  }
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (lower[j] > upper[j]) throw_invalid("bounds_exact: lower bound exceeds upper bound at w=" + std::to_string(j));
  }
  switch (spec.kind()) {
    case MeasureKind::Expectation:
    case MeasureKind::WorstCase:
    case MeasureKind::BestCase:
    case MeasureKind::ValueAtRisk:
    case MeasureKind::CVaR:
    case MeasureKind::ProbThreshold:
      // monotone non-decreasing in g
      return {measure_eval(spec, lower, dist), measure_eval(spec, upper, dist)};
    case MeasureKind::MeanAbsDev:
      return {centered_moment_bound(lower, upper, dist, false, false),
              centered_moment_bound(lower, upper, dist, false, true)};
    case MeasureKind::Variance:
      return {centered_moment_bound(lower, upper, dist, true, false),
              centered_moment_bound(lower, upper, dist, true, true)};
    case MeasureKind::StdDev:
      return {std::sqrt(std::max(0.0, centered_moment_bound(lower, upper, dist, true, false))),
              std::sqrt(centered_moment_bound(lower, upper, dist, true, true))};
    case MeasureKind::DistRobust: {
      BoundPair out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      for (const auto& candidate : spec.candidates()) {
        const auto b = bounds_exact(spec.children()[0], lower, upper, candidate);
        out.lcb = std::min(out.lcb, b.lcb);
        out.ucb = std::min(out.ucb, b.ucb);
      }
      return out;
    }
    case MeasureKind::MonotoneLipschitz: {
      const auto inner = bounds_exact(spec.children()[0], lower, upper, dist);
      const double a = spec.map()(inner.lcb);
      const double b = spec.map()(inner.ucb);
      return {std::min(a, b), std::max(a, b)};
    }
    case MeasureKind::WeightedSum: {
      const auto b1 = bounds_exact(spec.children()[0], lower, upper, dist);
      const auto b2 = bounds_exact(spec.children()[1], lower, upper, dist);
      return {spec.weight1() * b1.lcb + spec.weight2() * b2.lcb, spec.weight1() * b1.ucb + spec.weight2() * b2.ucb};
    }
  }
  return {};
}

BoundPair bounds_sampled(const MeasureSpec& spec, std::span<const Eigen::MatrixXd> paths, Index x,
                         const EnvDist& dist) {
  if (paths.empty()) throw_invalid("bounds_sampled: need at least one sample path");
  BoundPair out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::vector<double> row;
  for (const auto& path : paths) {
    if (x < 0 || x >= path.rows()) throw_invalid("bounds_sampled: design row outside sample path");
    row.resize(static_cast<std::size_t>(path.cols()));
    for (Index w = 0; w < path.cols(); ++w) row[static_cast<std::size_t>(w)] = path(x, w);
    const double value = measure_eval(spec, row, dist);
    out.lcb = std::min(out.lcb, value);
    out.ucb = std::max(out.ucb, value);
  }
  return out;
}

std::optional<double> q_value(const MeasureSpec& spec, double a) {
  if (!(a >= 0.0)) throw_invalid("q_value: a must be >= 0");
  switch (spec.kind()) {
    case MeasureKind::Expectation:
    case MeasureKind::WorstCase:
    case MeasureKind::BestCase:
    case MeasureKind::ValueAtRisk:
    case MeasureKind::CVaR:
      return a;
    case MeasureKind::MeanAbsDev:
      return 2.0 * a;
    case MeasureKind::StdDev:
    case MeasureKind::Variance:
    case MeasureKind::ProbThreshold:
      return std::nullopt;
    case MeasureKind::DistRobust:
      return q_value(spec.children()[0], a);
    case MeasureKind::MonotoneLipschitz: {
      const auto inner = q_value(spec.children()[0], a);
      if (!inner) return std::nullopt;
      return spec.lipschitz() * *inner;
    }
    case MeasureKind::WeightedSum: {
      const auto q1 = q_value(spec.children()[0], a);
      const auto q2 = q_value(spec.children()[1], a);
      if (!q1 || !q2) return std::nullopt;
      return spec.weight1() * *q1 + spec.weight2() * *q2;
    }
  }
  return std::nullopt;
}

bool has_q(const MeasureSpec& spec) { return q_value(spec, 0.0).has_value(); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace robustbo
