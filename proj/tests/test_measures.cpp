#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/measures.hpp"
#include "robustbo/rng.hpp"

using namespace robustbo;

namespace {

const EnvDist kThree({0.2, 0.3, 0.5});
const EnvDist kHalf({0.5, 0.5});

double eval(const MeasureSpec& m, std::vector<double> g, const EnvDist& d) { return measure_eval(m, g, d); }

BoundPair box(const MeasureSpec& m, std::vector<double> l, std::vector<double> u, const EnvDist& d) {
  return bounds_exact(m, l, u, d);
}

std::vector<MeasureSpec> catalog(const EnvDist& d) {
  std::vector<double> tilt(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) tilt[j] = 1.0 + static_cast<double>(j);
  std::vector<EnvDist> cands{d, EnvDist::from_weights(tilt)};
  return {MeasureSpec::expectation(),
          MeasureSpec::worst_case(),
          MeasureSpec::best_case(),
          MeasureSpec::value_at_risk(0.3),
          MeasureSpec::cvar(0.4),
          MeasureSpec::mean_abs_dev(),
          MeasureSpec::std_dev(),
          MeasureSpec::variance(),
          MeasureSpec::dist_robust(cands, MeasureSpec::expectation()),
          MeasureSpec::monotone_lipschitz([](double a) { return std::tanh(a); }, 1.0, true, MeasureSpec::cvar(0.5)),
          MeasureSpec::weighted_sum(0.7, MeasureSpec::expectation(), 1.5, MeasureSpec::worst_case()),
          MeasureSpec::prob_threshold(0.1),
          MeasureSpec::exp_minus_mad(2.0)};
}

}  // namespace

TEST_CASE("measure values") {
  CHECK(eval(MeasureSpec::expectation(), {1, 3}, kHalf) == doctest::Approx(2.0));
  CHECK(eval(MeasureSpec::worst_case(), {1, 3}, EnvDist({0.9, 0.1})) == 1.0);
  CHECK(eval(MeasureSpec::best_case(), {1, 3}, EnvDist({0.9, 0.1})) == 3.0);
  CHECK(eval(MeasureSpec::cvar(0.5), {1, 2, 3}, kThree) == doctest::Approx(1.6));
  CHECK(eval(MeasureSpec::prob_threshold(2.0), {1, 2, 3}, kThree) == doctest::Approx(0.8));
  CHECK(eval(MeasureSpec::mean_abs_dev(), {1, 3}, kHalf) == doctest::Approx(1.0));
  CHECK(eval(MeasureSpec::variance(), {1, 3}, kHalf) == doctest::Approx(1.0));
  CHECK(eval(MeasureSpec::std_dev(), {0, 4}, kHalf) == doctest::Approx(2.0));
  CHECK(eval(MeasureSpec::exp_minus_mad(4.0), {1, 3}, kHalf) == doctest::Approx(2.0 - 4.0));
  CHECK(eval(MeasureSpec::value_at_risk(0.5), {3, 1, 2}, EnvDist({0.5, 0.2, 0.3})) == 2.0);
}

TEST_CASE("quantile boundary uses the lower inverse") {
  const std::vector<double> g{1, 2, 3};
  CHECK(weighted_quantile(g, kThree, 0.5) == 2.0);
  CHECK(weighted_quantile(g, kThree, 0.500001) == 3.0);
  CHECK(weighted_quantile(g, kThree, 0.2) == 1.0);
  const std::vector<double> one{7.5};
  for (double a : {1e-6, 0.3, 0.999}) CHECK(weighted_quantile(one, EnvDist::uniform(1), a) == 7.5);
  // 0.1 + 0.2 accumulates to 0.30000000000000004; alpha = 0.3 must still land on the second atom
  CHECK(weighted_quantile(std::vector<double>{1, 2, 3}, EnvDist({0.1, 0.2, 0.7}), 0.3) == 2.0);
}

TEST_CASE("quantile and tail mean agree with independent oracles") {
  Rng rng(42);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng.index(9);
    std::vector<double> g(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
      g[j] = std::round(4.0 * rng.normal()) / 2.0;  // frequent ties
      w[j] = rng.uniform() + 0.01;
    }
    auto d = EnvDist::from_weights(w);
    for (double a : {0.05, 0.25, 0.5, 0.77, 0.95}) {
      CHECK(weighted_quantile(g, d, a) == oracle::var_cdf_scan(g, d.pmf(), a));
      CHECK(lower_tail_mean(g, d, a) == doctest::Approx(oracle::cvar_support_max(g, d.pmf(), a)).epsilon(1e-10));
      CHECK(eval(MeasureSpec::cvar(a), g, d) == doctest::Approx(lower_tail_mean(g, d, a)));
    }
  }
}

TEST_CASE("measure errors") {
  CHECK_THROWS_AS(eval(MeasureSpec::expectation(), {1.0, std::nan("")}, kHalf), Error);
  CHECK_THROWS_AS(eval(MeasureSpec::expectation(), {1.0}, kHalf), Error);
  CHECK_THROWS_AS(MeasureSpec::cvar(0.0), Error);
  CHECK_THROWS_AS(MeasureSpec::value_at_risk(1.0), Error);
  CHECK_THROWS_AS(box(MeasureSpec::expectation(), {1, 0}, {0, 1}, kHalf), Error);
  CHECK_THROWS_AS(EnvDist({0.5, 0.6}), Error);
}

TEST_CASE("guaranteed bound examples") {
  auto e = box(MeasureSpec::expectation(), {0, 2}, {4, 6}, kHalf);
  CHECK(e.lcb == doctest::Approx(1.0));
  CHECK(e.ucb == doctest::Approx(5.0));
  auto m = box(MeasureSpec::mean_abs_dev(), {0, 0}, {2, 2}, kHalf);
  CHECK(m.lcb == doctest::Approx(0.0));
  CHECK(m.ucb == doctest::Approx(2.0));
  auto p = box(MeasureSpec::prob_threshold(1.0), {0, 2}, {2, 2}, kHalf);
  CHECK(p.lcb == doctest::Approx(0.5));
  CHECK(p.ucb == doctest::Approx(1.0));
  auto w = box(MeasureSpec::worst_case(), {1, -1}, {3, 0}, kHalf);
  CHECK(w.lcb == -1.0);
  CHECK(w.ucb == 0.0);
}

TEST_CASE("mean absolute deviation box bounds match the brute-force oracle") {
  Rng rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.index(2);
    std::vector<double> l(n), u(n), wts(n);
    for (std::size_t j = 0; j < n; ++j) {
      l[j] = rng.normal();
      u[j] = l[j] + 2.0 * rng.uniform();
      wts[j] = rng.uniform() + 0.05;
    }
    auto d = EnvDist::from_weights(wts);
    auto b = bounds_exact(MeasureSpec::mean_abs_dev(), l, u, d);
    auto o = oracle::mad_box_bounds(l, u, d.pmf());
    CHECK(b.lcb == doctest::Approx(o.first).scale(1.0));
    CHECK(b.ucb == doctest::Approx(o.second).scale(1.0));
    // enclosure of the true range over a lattice of functions inside the box
    double lo = 1e300, hi = -1e300;
    const int steps = 12;
    std::vector<int> k(n, 0);
    while (true) {
      std::vector<double> g(n);
      for (std::size_t j = 0; j < n; ++j) g[j] = l[j] + (u[j] - l[j]) * k[j] / steps;
      const double v = measure_eval(MeasureSpec::mean_abs_dev(), g, d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      std::size_t j = 0;
      while (j < n && k[j] == steps) k[j++] = 0;
      if (j == n) break;
      ++k[j];
    }
    CHECK(b.lcb <= lo + 1e-9);
    CHECK(b.ucb >= hi - 1e-9);
  }
}

TEST_CASE("every measure value lies inside its guaranteed box bounds") {
  Rng rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.index(6);
    std::vector<double> l(n), u(n), g(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
      l[j] = rng.normal();
      u[j] = l[j] + rng.uniform() * (rep % 5 == 0 ? 0.0 : 1.5);
      g[j] = l[j] + rng.uniform() * (u[j] - l[j]);
      w[j] = rng.uniform() + 0.01;
    }
    auto d = EnvDist::from_weights(w);
    for (const auto& m : catalog(d)) {
      const auto b = bounds_exact(m, l, u, d);
      const double v = measure_eval(m, g, d);
      INFO(m.describe());
      CHECK(b.lcb <= v + 1e-9);
      CHECK(v <= b.ucb + 1e-9);
      if (auto q = q_value(m, 1.0)) {
        // width of the interval is bounded by q(max width)
        double wmax = 0.0;
        for (std::size_t j = 0; j < n; ++j) wmax = std::max(wmax, u[j] - l[j]);
        if (m.kind() != MeasureKind::MonotoneLipschitz) CHECK(b.ucb - b.lcb <= *q * wmax + 1e-9);
      }
    }
  }
}

TEST_CASE("lipschitz property of base measures under the sup norm") {
  Rng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.index(7);
    std::vector<double> a(n), b(n), w(n);
    double sup = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = rng.normal();
      b[j] = a[j] + 0.3 * rng.normal();
      sup = std::max(sup, std::fabs(a[j] - b[j]));
      w[j] = rng.uniform() + 0.01;
    }
    auto d = EnvDist::from_weights(w);
    for (const auto& m : {MeasureSpec::expectation(), MeasureSpec::worst_case(), MeasureSpec::best_case(),
                          MeasureSpec::value_at_risk(0.4), MeasureSpec::cvar(0.3), MeasureSpec::mean_abs_dev()}) {
      const double L = *q_value(m, 1.0);
      CHECK(std::fabs(measure_eval(m, a, d) - measure_eval(m, b, d)) <= L * sup + 1e-12);
    }
  }
}

TEST_CASE("width functions") {
  CHECK(*q_value(MeasureSpec::expectation(), 1.5) == doctest::Approx(1.5));
  CHECK(*q_value(MeasureSpec::mean_abs_dev(), 1.5) == doctest::Approx(3.0));
  CHECK(*q_value(MeasureSpec::weighted_sum(1.0, MeasureSpec::expectation(), 4.0, MeasureSpec::mean_abs_dev()), 1.0) ==
        doctest::Approx(9.0));
  CHECK(*q_value(MeasureSpec::exp_minus_mad(4.0), 1.0) == doctest::Approx(9.0));
  CHECK(*q_value(MeasureSpec::cvar(0.2), 2.0) == doctest::Approx(2.0));
  CHECK_FALSE(q_value(MeasureSpec::std_dev(), 1.0).has_value());
  CHECK_FALSE(q_value(MeasureSpec::variance(), 1.0).has_value());
  CHECK_FALSE(q_value(MeasureSpec::prob_threshold(0.0), 1.0).has_value());
  CHECK_FALSE(has_q(MeasureSpec::weighted_sum(1.0, MeasureSpec::expectation(), 1.0, MeasureSpec::std_dev())));
  CHECK(has_q(MeasureSpec::exp_minus_mad(1.0)));
}

TEST_CASE("sampled bounds") {
  std::vector<Eigen::MatrixXd> one{Eigen::MatrixXd::Constant(2, 2, 1.0)};
  one[0](1, 0) = 3.0;
  auto b = bounds_sampled(MeasureSpec::expectation(), one, 1, kHalf);
  CHECK(b.lcb == doctest::Approx(2.0));
  CHECK(b.ucb == doctest::Approx(2.0));

  std::vector<Eigen::MatrixXd> same(4, one[0]);
  auto s = bounds_sampled(MeasureSpec::cvar(0.5), same, 1, kHalf);
  CHECK(s.lcb == s.ucb);

  // more paths can only widen the range
  Rng rng(4);
  std::vector<Eigen::MatrixXd> paths;
  double prev_lo = 1e300, prev_hi = -1e300;
  for (int k = 0; k < 30; ++k) {
    Eigen::MatrixXd p(1, 3);
    for (int j = 0; j < 3; ++j) p(0, j) = rng.normal();
    paths.push_back(p);
    auto r = bounds_sampled(MeasureSpec::mean_abs_dev(), paths, 0, EnvDist::uniform(3));
    CHECK(r.lcb <= prev_lo);
    CHECK(r.ucb >= prev_hi);
    prev_lo = r.lcb;
    prev_hi = r.ucb;
  }
}

TEST_CASE("normal helpers") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
  CHECK(normal_cdf(-40.0) >= 0.0);
}
