#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace robustbo::oracle {

double var_cdf_scan(std::span<const double> g, std::span<const double> pmf, double alpha) {
  double best = INFINITY;
  for (double b : g) {
    long double cdf = 0.0L;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j] <= b) cdf += pmf[j];
    }
    if (cdf >= static_cast<long double>(alpha) - 1e-12L && b < best) best = b;
  }
  return best;
}

double cvar_support_max(std::span<const double> g, std::span<const double> pmf, double alpha) {
  double best = -INFINITY;
  for (double b : g) {
    long double shortfall = 0.0L;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j] < b) shortfall += static_cast<long double>(pmf[j]) * (b - g[j]);
    }
    best = std::max(best, static_cast<double>(b - shortfall / alpha));
  }
  return best;
}

std::pair<double, double> abs_range_on_interval(double lo, double hi) {
  constexpr int kLattice = 1000;
  double mn = std::min(std::fabs(lo), std::fabs(hi));
  double mx = std::max(std::fabs(lo), std::fabs(hi));
  int arg = 0;
  double arg_val = std::fabs(lo);
  for (int i = 0; i <= kLattice; ++i) {
    const double v = lo + (hi - lo) * i / kLattice;
    const double a = std::fabs(v);
    mx = std::max(mx, a);
    if (a < arg_val) {
      arg_val = a;
      arg = i;
    }
  }
  mn = std::min(mn, arg_val);
  // |v| is convex: refine the minimum inside the neighbouring lattice cells
  double a = lo + (hi - lo) * std::max(arg - 1, 0) / kLattice;
  double b = lo + (hi - lo) * std::min(arg + 1, kLattice) / kLattice;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (std::fabs(m1) < std::fabs(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  mn = std::min(mn, std::fabs(0.5 * (a + b)));
  return {mn, mx};
}

std::pair<double, double> mad_box_bounds(std::span<const double> lower, std::span<const double> upper,
                                         std::span<const double> pmf) {
  long double el = 0.0L, eu = 0.0L;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    el += static_cast<long double>(pmf[j]) * lower[j];
    eu += static_cast<long double>(pmf[j]) * upper[j];
  }
  long double lo_sum = 0.0L, hi_sum = 0.0L;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    const auto [mn, mx] = abs_range_on_interval(static_cast<double>(lower[j] - eu), static_cast<double>(upper[j] - el));
    lo_sum += static_cast<long double>(pmf[j]) * mn;
    hi_sum += static_cast<long double>(pmf[j]) * mx;
  }
  return {static_cast<double>(lo_sum), static_cast<double>(hi_sum)};
}

double ks_distance_exp2(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = 1.0 - std::exp(-sample[i] / 2.0);
    d = std::max({d, std::fabs(cdf - i / n), std::fabs((i + 1) / n - cdf)});
  }
  return d;
}

}  // namespace robustbo::oracle
