#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "doctest.h"
#include "robustbo/errors.hpp"
#include "robustbo/gp.hpp"
#include "robustbo/kernel.hpp"
#include "robustbo/rng.hpp"
#include "robustbo/sampling.hpp"
#include "support/dense_gp.hpp"

using namespace robustbo;
using testsupport::dense_posterior;
using testsupport::line_grid;

namespace {

double k_eval(const KernelSpec& k, std::vector<double> a, std::vector<double> b) { return k(a, b); }

// Exhaustive max over all multisets of size T of 1/2 log det(I + K_A / noise).
double exhaustive_gamma(const KernelSpec& k, double noise, const ProblemGrid& grid, int T) {
  const Index n = grid.size();
  std::vector<Index> pick(static_cast<std::size_t>(T), 0);
  double best = 0.0;
  while (true) {
    Eigen::MatrixXd m(T, T);
    for (int i = 0; i < T; ++i)
      for (int j = 0; j < T; ++j) {
        Eigen::VectorXd a = grid.coords(grid.point(pick[i])), b = grid.coords(grid.point(pick[j]));
        m(i, j) = k({a.data(), (std::size_t)a.size()}, {b.data(), (std::size_t)b.size()}) / noise;
      }
    m += Eigen::MatrixXd::Identity(T, T);
    best = std::max(best, 0.5 * std::log(m.determinant()));
    int d = T - 1;
    while (d >= 0 && pick[d] == n - 1) --d;
    if (d < 0) break;
    ++pick[d];
    for (int e = d + 1; e < T; ++e) pick[e] = pick[d];
  }
  return best;
}

}  // namespace

TEST_CASE("kernel point values") {
  CHECK(k_eval(KernelSpec::squared_exponential(1.0), {0.3, -1.0}, {0.3, -1.0}) == doctest::Approx(1.0));
  CHECK(k_eval(KernelSpec::matern32(25.0, 4.0), {5.0, 7.0}, {5.0, 7.0}) == doctest::Approx(4.0));
  // |a-b| = sqrt(2) with unit length scale gives exp(-1)
  CHECK(k_eval(KernelSpec::squared_exponential(1.0), {0.0, 0.0}, {1.0, 1.0}) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK_THROWS_AS(k_eval(KernelSpec::squared_exponential(1.0), {0.0}, {1.0, 1.0}), Error);
}

TEST_CASE("matern32 decays with distance and is symmetric") {
  auto k = KernelSpec::matern32(2.0, 1.5);
  double prev = k_eval(k, {0.0}, {0.0});
  for (double d = 0.25; d < 10.0; d += 0.25) {
    const double v = k_eval(k, {0.0}, {d});
    CHECK(v < prev);
    CHECK(v == doctest::Approx(k_eval(k, {d}, {0.0})));
    prev = v;
  }
}

TEST_CASE("prior posterior") {
  auto grid = line_grid(3, 4);
  CHECK_THROWS_AS(GPosterior(KernelSpec::squared_exponential(1.0), 0.0, grid), Error);
  CHECK_THROWS_AS(GPosterior(KernelSpec::squared_exponential(1.0), -1.0, grid), Error);
  GPosterior se(KernelSpec::squared_exponential(1.0), 1e-6, grid);
  GPosterior m(KernelSpec::matern32(25.0, 4.0), 1e-6, grid);
  for (Index j = 0; j < grid.size(); ++j) {
    CHECK(se.mean(j) == 0.0);
    CHECK(se.variance(j) == doctest::Approx(1.0));
    CHECK(m.variance(j) == doctest::Approx(4.0));
  }
  CHECK(se.realized_info_gain() == 0.0);
  auto f = posterior_field(se);
  CHECK(f.mean.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single observation") {
  auto grid = line_grid(2, 2, 100.0);  // far apart, effectively uncorrelated
  GPosterior gp(KernelSpec::squared_exponential(1.0), 1e-6, grid);
  gp.update({0, 0}, 1.0);
  CHECK(gp.mean(JointPoint{0, 0}) == doctest::Approx(1.0 / (1.0 + 1e-6)).epsilon(1e-13));
  CHECK(gp.variance(JointPoint{0, 0}) == doctest::Approx(1.0 - 1.0 / (1.0 + 1e-6)).epsilon(1e-6));
  CHECK(gp.mean(JointPoint{1, 1}) == doctest::Approx(0.0));
  CHECK(gp.variance(JointPoint{1, 1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gp.update({0, 1}, std::nan("")), Error);
  CHECK_THROWS_AS(gp.update({2, 0}, 0.0), Error);
}

TEST_CASE("info gain for one unit observation") {
  auto grid = line_grid(2, 2);
  GPosterior gp(KernelSpec::squared_exponential(1.0), 1.0, grid);
  gp.update({1, 0}, 0.3);
  CHECK(gp.realized_info_gain() == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("incremental posterior matches a full solve") {
  auto grid = line_grid(5, 4, 0.7);
  const auto k = KernelSpec::sum({KernelComponent::projected(KernelSpec::squared_exponential(0.8), {0, 1}, 2),
                                  KernelComponent::projected(KernelSpec::matern32(1.3, 0.5), {1}, 2)});
  Rng rng(11);
  for (double noise : {1e-6, 1e-2, 0.5}) {
    GPosterior gp(k, noise, grid);
    std::vector<JointPoint> pts;
    std::vector<double> ys;
    double gain_steps = 0.0;
    for (int t = 0; t < 25; ++t) {
      JointPoint p{static_cast<Index>(rng.index(5)), static_cast<Index>(rng.index(4))};
      const double var_before = gp.variance(p);
      const double y = rng.normal();
      gp.update(p, y);
      pts.push_back(p);
      ys.push_back(y);
      gain_steps += 0.5 * std::log1p(var_before / noise);
      auto dense = dense_posterior(k, noise, grid, pts, ys);
      const double tol = noise < 1e-4 ? 1e-5 : 1e-9;
      for (Index j = 0; j < grid.size(); ++j) {
        CHECK(gp.mean(j) == doctest::Approx(dense.mean[j]).epsilon(tol).scale(1.0));
        CHECK(gp.variance(j) == doctest::Approx(std::max(0.0, dense.var[j])).epsilon(tol).scale(1.0));
        CHECK(gp.variance(j) >= 0.0);
      }
      if (gp.jitter() == 0.0) CHECK(gp.realized_info_gain() == doctest::Approx(gain_steps).epsilon(1e-8));
    }
  }
}

TEST_CASE("posterior covariance block matches the dense oracle") {
  auto grid = line_grid(3, 3, 0.6);
  const auto k = KernelSpec::squared_exponential(1.1, 2.0);
  GPosterior gp(k, 0.05, grid);
  std::vector<JointPoint> pts{{0, 1}, {2, 2}, {1, 0}};
  std::vector<double> ys{0.5, -1.0, 0.2};
  for (std::size_t i = 0; i < pts.size(); ++i) gp.update(pts[i], ys[i]);
  auto dense = dense_posterior(k, 0.05, grid, pts, ys);
  std::vector<Index> all(static_cast<std::size_t>(grid.size()));
  for (Index j = 0; j < grid.size(); ++j) all[j] = j;
  const auto cov = gp.covariance(all);
  CHECK((cov - dense.cov).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(gp.covariance(1, 5) == doctest::Approx(dense.cov(1, 5)).scale(1.0));
}

TEST_CASE("variance never increases with more data") {
  auto grid = line_grid(6, 5, 0.4);
  GPosterior gp(KernelSpec::matern32(1.0), 1e-4, grid);
  Rng rng(3);
  Eigen::VectorXd prev = gp.variance_vector();
  for (int t = 0; t < 40; ++t) {
    gp.update(grid.point(static_cast<Index>(rng.index(30))), rng.normal());
    CHECK((gp.variance_vector().array() <= prev.array() + 1e-12).all());
    prev = gp.variance_vector();
  }
}

TEST_CASE("repeated points and tiny noise stay finite") {
  auto grid = line_grid(2, 2, 0.01);
  GPosterior gp(KernelSpec::squared_exponential(5.0), 1e-12, grid);
  for (int t = 0; t < 30; ++t) gp.update(grid.point(t % 4), 1.0 + 1e-3 * (t % 4));
  for (Index j = 0; j < grid.size(); ++j) {
    CHECK(std::isfinite(gp.mean(j)));
    CHECK(gp.variance(j) >= 0.0);
  }
}

TEST_CASE("field agrees with pointwise queries and interpolates in the noiseless limit") {
  auto grid = line_grid(4, 3, 1.0);
  GPosterior gp(KernelSpec::squared_exponential(0.7), 1e-12, grid);
  Rng rng(5);
  std::vector<double> ys;
  for (Index j = 0; j < grid.size(); ++j) {
    ys.push_back(rng.normal());
    gp.update(grid.point(j), ys.back());
  }
  auto f = posterior_field(gp);
  for (Index j = 0; j < grid.size(); ++j) {
    const auto p = grid.point(j);
    CHECK(f.mean(p.x, p.w) == gp.mean(j));
    CHECK(f.sd(p.x, p.w) == doctest::Approx(std::sqrt(gp.variance(j))));
    CHECK(std::abs(f.mean(p.x, p.w) - ys[j]) < 1e-4);
    CHECK(f.sd(p.x, p.w) < 1e-4);
  }
}

TEST_CASE("sample paths") {
  auto grid = line_grid(2, 3, 0.5);
  GPosterior gp(KernelSpec::squared_exponential(1.0, 2.0), 1e-6, grid);
  Rng rng(17);
  CHECK_THROWS_AS(sample_paths(gp, 0, rng), Error);

  const int S = 20000;
  auto paths = sample_paths(gp, S, rng);
  REQUIRE(paths.size() == static_cast<std::size_t>(S));
  for (Index x = 0; x < 2; ++x)
    for (Index w = 0; w < 3; ++w) {
      double s = 0.0, ss = 0.0;
      for (const auto& p : paths) {
        s += p(x, w);
        ss += p(x, w) * p(x, w);
      }
      const double mean = s / S;
      const double var = ss / S - mean * mean;
      CHECK(std::abs(mean) < 3.0 * std::sqrt(2.0 / S));
      CHECK(var == doctest::Approx(2.0).epsilon(0.05));
    }

  // sub-block rows
  std::vector<Index> rows{1};
  auto one = sample_paths(gp, 1, rng, rows);
  CHECK(one[0].rows() == 1);
  CHECK(one[0].cols() == 3);
}

TEST_CASE("zero posterior variance gives the mean path") {
  auto grid = line_grid(2, 2, 3.0);
  GPosterior gp(KernelSpec::squared_exponential(0.3), 1e-12, grid);
  for (Index j = 0; j < 4; ++j) gp.update(grid.point(j), static_cast<double>(j));
  Rng rng(1);
  auto p = sample_paths(gp, 1, rng)[0];
  for (Index j = 0; j < 4; ++j) {
    const auto q = grid.point(j);
    CHECK(p(q.x, q.w) == doctest::Approx(gp.mean(j)).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("greedy information gain") {
  const auto k = KernelSpec::squared_exponential(0.9, 1.5);
  SUBCASE("single step is the largest prior variance term") {
    auto grid = line_grid(3, 3);
    auto c = greedy_max_info_gain(k, 0.01, grid, 1);
    CHECK(c.greedy[0] == doctest::Approx(0.5 * std::log1p(1.5 / 0.01)));
    CHECK(c.picks[0] == 0);
  }
  SUBCASE("equals brute force on a 4-point grid at T=2") {
    Eigen::MatrixXd x(2, 1), w(2, 1);
    x << 0.0, 1.0;
    w << 0.0, 0.3;
    ProblemGrid grid(x, w, EnvDist::uniform(2));
    auto c = greedy_max_info_gain(k, 0.1, grid, 2);
    CHECK(c.greedy[1] == doctest::Approx(exhaustive_gamma(k, 0.1, grid, 2)).epsilon(1e-10));
  }
  SUBCASE("sandwiched by the exhaustive value on small grids") {
    Rng rng(9);
    for (int rep = 0; rep < 4; ++rep) {
      Eigen::MatrixXd x(2, 1), w(3, 1);
      for (int i = 0; i < 2; ++i) x(i, 0) = 2.0 * rng.uniform();
      for (int i = 0; i < 3; ++i) w(i, 0) = 2.0 * rng.uniform();
      ProblemGrid grid(x, w, EnvDist::uniform(3));
      const double noise = 0.05 + rng.uniform();
      auto c = greedy_max_info_gain(k, noise, grid, 3);
      for (int T = 1; T <= 3; ++T) {
        const double ex = exhaustive_gamma(k, noise, grid, T);
        CHECK(c.greedy[T - 1] <= ex + 1e-10);
        CHECK(ex <= c.certified[T - 1] + 1e-10);
      }
    }
  }
  SUBCASE("monotone and bounds the sum of posterior variances") {
    auto grid = line_grid(5, 5, 0.3);
    const double noise = 0.2;
    auto c = greedy_max_info_gain(k, noise, grid, 30);
    for (std::size_t t = 1; t < c.greedy.size(); ++t) CHECK(c.greedy[t] >= c.greedy[t - 1]);
    CHECK(c.certified[5] == doctest::Approx(c.greedy[5] * greedy_certification_factor()));

    // any query sequence: sum of normalized variances <= 2 gamma_T / log(1 + v / noise)
    GPosterior gp(k, noise, grid);
    Rng rng(2);
    double sum = 0.0;
    for (int t = 0; t < 30; ++t) {
      const auto p = grid.point(static_cast<Index>(rng.index(25)));
      sum += gp.variance(p) / 1.5;
      gp.update(p, 0.0);
    }
    CHECK(sum <= 2.0 / std::log1p(1.5 / noise) * c.certified.back() + 1e-9);
  }
  CHECK_THROWS_AS(greedy_max_info_gain(k, 0.1, line_grid(2, 2), -1), Error);
}
