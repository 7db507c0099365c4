#pragma once

// Second implementations used only to cross-check the library. They favour
// obviousness over speed and share no code with the measure module.

#include <span>
#include <utility>
#include <vector>

namespace robustbo::oracle {

/// inf{b : P(g <= b) >= alpha}, by scanning every candidate b and summing masses.
double var_cdf_scan(std::span<const double> g, std::span<const double> pmf, double alpha);

/// Lower-tail CVaR as max_b { b - E[(b - g)_+] / alpha } over the support.
double cvar_support_max(std::span<const double> g, std::span<const double> pmf, double alpha);

/// min and max of |v| over [lo, hi]: dense lattice with endpoints, then ternary refinement of the minimum.
std::pair<double, double> abs_range_on_interval(double lo, double hi);

/// Bounds on the mean absolute deviation built from per-atom boxes for g - E[g].
std::pair<double, double> mad_box_bounds(std::span<const double> lower, std::span<const double> upper,
                                         std::span<const double> pmf);

/// Kolmogorov-Smirnov distance of a sample against Exp(mean 2).
double ks_distance_exp2(std::vector<double> sample);

}  // namespace robustbo::oracle
