#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "robustbo/measures.hpp"
#include "robustbo/policy.hpp"

namespace robustbo {

struct RegretSeries {
  std::vector<double> instantaneous;  // r_t = F(x*) - F(x_hat_t)
  std::vector<double> cumulative;     // R_t
};

RegretSeries regret_series(const RunTrace& trace, std::span<const double> truth, Index x_star);

/// Which leading constant the closed-form cumulative bound uses.
enum class MeasureClass { MeanAbsDev, Other };

/// 8 for mean absolute deviation, 4 for expectation, worst, best, VaR, CVaR.
double bound_constant(MeasureClass c);

/// Classifies a base measure; throws measure-has-no-q for anything else.
MeasureClass bound_class(const MeasureSpec& spec);

/// 2 / log(1 + 1/noise_var).
double c1(double noise_var);
/// 2 (2 log N + 2) / log(1 + 1/noise_var).
double c0(std::size_t grid_size, double noise_var);

/// C sqrt(t C0 gamma_t) for t = 1..gamma.size().
std::vector<double> bound_simple(MeasureClass c, std::size_t grid_size, double noise_var, std::span<const double> gamma);

/// C sqrt(C0 gamma_t / t).
double bound_simple_regret(MeasureClass c, std::size_t grid_size, double noise_var, double gamma_t, int t);

/// bound / delta, delta in (0, 1).
double markov_bound(double expected_bound, double delta);

/// The closed-form bound with C1 replaced by C1 / p_min.
std::vector<double> bound_uncontrollable(MeasureClass c, std::size_t grid_size, double noise_var,
                                         std::span<const double> gamma, double p_min);

/// q(a) = sum_i zeta_i h_i(sum_j lambda_ij a^nu_ij).
struct QTerm {
  double lambda = 1.0;
  double nu = 1.0;
};
struct QGroup {
  double zeta = 1.0;
  std::function<double(double)> h;  // empty means identity
  std::vector<QTerm> terms;
};
struct QCoefficients {
  std::vector<QGroup> groups;

  static QCoefficients linear(double slope);
  double operator()(double a) const;
};

/// q(a) = slope * a for every measure whose width function is available
/// (all such widths in the catalog are linear). Throws measure-has-no-q.
QCoefficients q_coefficients(const MeasureSpec& spec);

/// E[beta^(nu / (2 - min(nu, 1)))]: exact for nu = 1, otherwise a cached
/// Monte Carlo average over 1e5 draws with a fixed seed.
double c2(std::size_t grid_size, double nu);

/// General cumulative bound at step t. p_min < 1 gives the uncontrollable form.
double bound_general(const QCoefficients& q, std::size_t grid_size, double noise_var, double gamma_t, int t,
                     double p_min = 1.0);

}  // namespace robustbo
