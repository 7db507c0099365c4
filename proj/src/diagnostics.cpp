#include "robustbo/diagnostics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "robustbo/errors.hpp"

namespace robustbo {

RegretSeries regret_series(const RunTrace& trace, std::span<const double> truth, Index x_star) {
  if (x_star < 0 || static_cast<std::size_t>(x_star) >= truth.size()) throw_invalid("regret_series: x_star outside truth");
  RegretSeries out;
  double total = 0.0;
  for (const auto& rec : trace.records) {
    if (rec.x_hat < 0 || static_cast<std::size_t>(rec.x_hat) >= truth.size()) {
      throw_invalid("regret_series: x_hat outside truth");
    }
    const double r = truth[static_cast<std::size_t>(x_star)] - truth[static_cast<std::size_t>(rec.x_hat)];
    total += r;
    out.instantaneous.push_back(r);
    out.cumulative.push_back(total);
  }
  return out;
}

double bound_constant(MeasureClass c) { return c == MeasureClass::MeanAbsDev ? 8.0 : 4.0; }

MeasureClass bound_class(const MeasureSpec& spec) {
  switch (spec.kind()) {
    case MeasureKind::MeanAbsDev: return MeasureClass::MeanAbsDev;
    case MeasureKind::Expectation:
    case MeasureKind::WorstCase:
    case MeasureKind::BestCase:
    case MeasureKind::ValueAtRisk:
    case MeasureKind::CVaR: return MeasureClass::Other;
    default: break;
  }
  throw Error(ErrorCode::MeasureHasNoQ, "no closed-form regret bound for " + spec.describe());
}

double c1(double noise_var) {
  if (!(noise_var > 0.0)) throw_invalid("c1: noise variance must be positive");
  return 2.0 / std::log1p(1.0 / noise_var);
}

double c0(std::size_t grid_size, double noise_var) {
  if (grid_size < 1) throw_invalid("c0: grid size must be >= 1");
  return (2.0 * std::log(static_cast<double>(grid_size)) + 2.0) * c1(noise_var);
}

namespace {
void check_gamma(std::span<const double> gamma) {
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] >= 0.0)) throw_invalid("bound: gamma must be non-negative");
    if (i > 0 && gamma[i] < gamma[i - 1]) throw_invalid("bound: gamma must be non-decreasing");
  }
}
}  // namespace

std::vector<double> bound_simple(MeasureClass c, std::size_t grid_size, double noise_var, std::span<const double> gamma) {
  check_gamma(gamma);
  const double base = c0(grid_size, noise_var);
  std::vector<double> out(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    out[i] = bound_constant(c) * std::sqrt(static_cast<double>(i + 1) * base * gamma[i]);
  }
  return out;
}

double bound_simple_regret(MeasureClass c, std::size_t grid_size, double noise_var, double gamma_t, int t) {
  if (t < 1) throw_invalid("bound_simple_regret: t must be >= 1");
  if (!(gamma_t >= 0.0)) throw_invalid("bound_simple_regret: gamma must be non-negative");
  return bound_constant(c) * std::sqrt(c0(grid_size, noise_var) * gamma_t / t);
}

double markov_bound(double expected_bound, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("markov_bound: delta must lie in (0, 1)");
  return expected_bound / delta;
}

std::vector<double> bound_uncontrollable(MeasureClass c, std::size_t grid_size, double noise_var,
                                         std::span<const double> gamma, double p_min) {
  if (!(p_min > 0.0 && p_min <= 1.0)) throw_invalid("bound_uncontrollable: p_min must lie in (0, 1]");
  auto out = bound_simple(c, grid_size, noise_var, gamma);
  const double scale = std::sqrt(1.0 / p_min);
  for (double& v : out) v *= scale;
  return out;
}

QCoefficients QCoefficients::linear(double slope) {
  if (!(slope >= 0.0)) throw_invalid("QCoefficients::linear: slope must be non-negative");
  QCoefficients q;
  q.groups.push_back({1.0, {}, {{slope, 1.0}}});
  return q;
}

double QCoefficients::operator()(double a) const {
  double total = 0.0;
  for (const auto& g : groups) {
    double inner = 0.0;
    for (const auto& term : g.terms) inner += term.lambda * std::pow(a, term.nu);
    total += g.zeta * (g.h ? g.h(inner) : inner);
  }
  return total;
}

QCoefficients q_coefficients(const MeasureSpec& spec) {
  const auto slope = q_value(spec, 1.0);
  if (!slope) throw Error(ErrorCode::MeasureHasNoQ, "no width function for " + spec.describe());
  return QCoefficients::linear(*slope);
}

double c2(std::size_t grid_size, double nu) {
  if (grid_size < 1) throw_invalid("c2: grid size must be >= 1");
  if (!(nu > 0.0)) throw_invalid("c2: nu must be positive");
  const double offset = 2.0 * std::log(static_cast<double>(grid_size));
  if (nu == 1.0) return offset + 2.0;

  static std::mutex mutex;
  static std::map<std::pair<std::size_t, double>, double> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(grid_size, nu);
  if (const auto it = cache.find(key); it != cache.end()) return it->second;

  const double power = nu / (2.0 - std::min(nu, 1.0));
  constexpr int kDraws = 100000;
  Rng rng(0x5eedc2ULL);
  long double acc = 0.0L;
  for (int i = 0; i < kDraws; ++i) acc += std::pow(offset - 2.0 * std::log(rng.uniform_open_zero()), power);
  const double value = static_cast<double>(acc / kDraws);
  cache.emplace(key, value);
  return value;
}

double bound_general(const QCoefficients& q, std::size_t grid_size, double noise_var, double gamma_t, int t,
                     double p_min) {
  if (t < 1) throw_invalid("bound_general: t must be >= 1");
  if (!(gamma_t >= 0.0)) throw_invalid("bound_general: gamma must be non-negative");
  if (!(p_min > 0.0 && p_min <= 1.0)) throw_invalid("bound_general: p_min must lie in (0, 1]");
  const double c1v = c1(noise_var) / p_min;
  const double tt = static_cast<double>(t);
  double total = 0.0;
  for (const auto& g : q.groups) {
    double inner = 0.0;
    for (const auto& term : g.terms) {
      if (!(term.nu > 0.0) || !(term.lambda >= 0.0)) throw_invalid("bound_general: invalid q coefficients");
      const double nu_p = std::min(term.nu, 1.0);
      inner += std::pow(2.0, term.nu) * term.lambda * std::pow(tt * c2(grid_size, term.nu), 1.0 - nu_p / 2.0) *
               std::pow(c1v * gamma_t, nu_p / 2.0);
    }
    inner /= tt;
    total += g.zeta * (g.h ? g.h(inner) : inner);
  }
  return 2.0 * tt * total;
}

}  // namespace robustbo
