#include <cmath>
#include <vector>

#include "doctest.h"
#include "robustbo/bench.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/policy.hpp"
#include "support/dense_gp.hpp"

using namespace robustbo;
using testsupport::dense_posterior;
using testsupport::line_grid;

namespace {

GPosterior observed(const ProblemGrid& grid, const KernelSpec& k, double noise, int count, std::uint64_t seed) {
  GPosterior gp(k, noise, grid);
  Rng rng(seed);
  for (int t = 0; t < count; ++t) gp.update(grid.point(static_cast<Index>(rng.index(grid.size()))), rng.normal());
  return gp;
}

CredibleField field_from(std::vector<BoundPair> b) {
  CredibleField f;
  f.bounds = std::move(b);
  return f;
}

}  // namespace

TEST_CASE("beta draws") {
  CHECK(beta_from_xi(1000, 0.0).beta == doctest::Approx(2.0 * std::log(1000.0)));
  CHECK(beta_from_xi(1, 0.7).beta == doctest::Approx(0.7));
  Rng rng(1);
  double sum = 0.0;
  int negative = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const auto b = sample_beta(1000, rng);
    negative += b.xi < 0.0;
    sum += b.beta;
  }
  CHECK(negative == 0);
  CHECK(std::fabs(sum / n - (2.0 * std::log(1000.0) + 2.0)) < 0.01);
  Rng a(5), b(5);
  CHECK(sample_beta(50, a).beta == sample_beta(50, b).beta);
}

TEST_CASE("credible field") {
  auto grid = line_grid(3, 4);
  GPosterior prior(KernelSpec::squared_exponential(1.0), 1e-6, grid);
  const double beta = beta_from_xi(static_cast<std::size_t>(grid.size()), 0.0).beta;
  auto f = credible_field(prior, beta, MeasureSpec::expectation(), grid.dist());
  CHECK(f.lower.rows() == 3);
  CHECK(f.lower.cols() == 4);
  CHECK(((f.upper - f.lower).array() - 2.0 * std::sqrt(2.0 * std::log(12.0))).abs().maxCoeff() < 1e-12);

  auto gp = observed(grid, KernelSpec::squared_exponential(1.0), 1e-3, 6, 2);
  auto g = credible_field(gp, 3.0, MeasureSpec::expectation(), grid.dist());
  for (Index x = 0; x < 3; ++x) {
    double lcb = 0.0;
    for (Index w = 0; w < 4; ++w) {
      lcb += 0.25 * g.lower(x, w);
      const Index j = x * 4 + w;
      CHECK(g.lower(x, w) == doctest::Approx(gp.mean(j) - std::sqrt(3.0 * gp.variance(j))));
    }
    CHECK(g.bounds[x].lcb == doctest::Approx(lcb));
  }

  // zero posterior sd collapses the interval onto the mean
  GPosterior exact(KernelSpec::squared_exponential(0.2), 1e-12, grid);
  for (Index j = 0; j < grid.size(); ++j) exact.update(grid.point(j), 0.1 * j);
  auto h = credible_field(exact, 10.0, MeasureSpec::worst_case(), grid.dist());
  CHECK((h.upper - h.lower).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("estimate of the solution") {
  auto grid = line_grid(4, 2);
  GPosterior prior(KernelSpec::squared_exponential(1.0), 1e-6, grid);
  CHECK(estimate_solution(prior, MeasureSpec::mean_abs_dev(), grid.dist()) == 0);

  GPosterior gp(KernelSpec::squared_exponential(1e-3), 1e-9, grid);  // rows independent
  gp.update({1, 0}, 1.0);
  gp.update({1, 1}, 3.0);
  gp.update({2, 0}, 2.5);
  gp.update({2, 1}, 3.5);
  CHECK(estimate_solution(gp, MeasureSpec::expectation(), grid.dist()) == 2);
  CHECK(estimate_solution(gp, MeasureSpec::best_case(), grid.dist()) == 2);
  const auto plug = plug_in_measure(gp, MeasureSpec::expectation(), grid.dist());
  CHECK(plug[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("x selection") {
  // optimistic max is index 0 with width 3, x_hat index 1 with width 5
  auto f = field_from({{2.0, 5.0}, {-1.0, 4.0}});
  CHECK(optimistic_max(f) == 0);
  CHECK(select_x_proposed(f, 1) == 1);
  CHECK(select_bbbmobo(f) == 0);
  auto g = field_from({{2.0, 7.0}, {-1.0, 4.0}});
  CHECK(select_x_proposed(g, 1) == 0);
  CHECK(select_x_proposed(g, 0) == 0);
  // equal widths break toward the lower index
  auto h = field_from({{0.0, 2.0}, {1.0, 3.0}, {0.5, 2.5}});
  CHECK(optimistic_max(h) == 1);
  CHECK(select_x_proposed(h, 2) == 1);
  CHECK(select_x_proposed(h, 0) == 0);
  CHECK_THROWS_AS(select_x_proposed(h, 3), Error);
}

TEST_CASE("w selection") {
  auto grid = line_grid(2, 2, 0.5);
  GPosterior gp(KernelSpec::squared_exponential(1.0), 1e-8, grid);
  CHECK(select_w_simulator(gp, 1) == 0);
  gp.update({1, 0}, 0.0);
  CHECK(select_w_simulator(gp, 1) == 1);
  CHECK_THROWS_AS(select_w_simulator(gp, 2), Error);

  Rng rng(3);
  EnvDist point({0.0, 0.0, 1.0, 0.0});
  for (int i = 0; i < 100; ++i) CHECK(select_w_uncontrollable(point, rng) == 2);

  auto uni = EnvDist::uniform(99);
  std::vector<int> count(99, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++count[static_cast<std::size_t>(select_w_uncontrollable(uni, rng))];
  for (int c : count) CHECK(std::fabs(c / double(n) - 1.0 / 99.0) < 0.005);
}

TEST_CASE("estimate of the best historical index") {
  auto grid = line_grid(3, 2);
  GPosterior gp(KernelSpec::squared_exponential(0.5), 1e-6, grid);
  Rng rng(1);
  std::vector<Index> one{2};
  CHECK(estimate_hat_t(gp, MeasureSpec::expectation(), grid.dist(), one, HatTMode::MonteCarlo, 8, rng) == 0);
  std::vector<Index> empty;
  CHECK_THROWS_AS(estimate_hat_t(gp, MeasureSpec::expectation(), grid.dist(), empty, HatTMode::Exact, 8, rng), Error);

  // exact mode with each x_hat the current plug-in argmax returns the latest entry
  std::vector<Index> hist;
  Rng data(4);
  for (int t = 0; t < 10; ++t) {
    gp.update(grid.point(static_cast<Index>(data.index(6))), data.normal());
    hist.push_back(estimate_solution(gp, MeasureSpec::expectation(), grid.dist()));
    CHECK(estimate_hat_t(gp, MeasureSpec::expectation(), grid.dist(), hist, HatTMode::Exact, 0, rng) ==
          hist.size() - 1);
  }

  // deterministic posterior: Monte Carlo picks the true best among the history
  GPosterior sure(KernelSpec::squared_exponential(0.1), 1e-12, grid);
  const std::vector<double> vals{0.0, 1.0, 5.0, 4.0, 2.0, 2.5};
  for (Index j = 0; j < 6; ++j) sure.update(grid.point(j), vals[j]);
  std::vector<Index> h2{0, 2, 1, 0};
  CHECK(estimate_hat_t(sure, MeasureSpec::worst_case(), grid.dist(), h2, HatTMode::MonteCarlo, 16, rng) == 2);
}

TEST_CASE("random and uncertainty sampling") {
  auto grid = line_grid(1, 1);
  Rng rng(2);
  CHECK(select_random(1, grid.dist(), rng) == JointPoint{0, 0});

  auto g = line_grid(3, 3, 0.4);
  GPosterior gp(KernelSpec::squared_exponential(1.0), 1e-6, g);
  CHECK(select_us(gp) == JointPoint{0, 0});
  gp.update({0, 0}, 1.0);
  gp.update({2, 1}, 1.0);
  const auto& v = gp.variance_vector();
  Index best = 0;
  for (Index j = 1; j < v.size(); ++j)
    if (v[j] > v[best]) best = j;
  CHECK(select_us(gp) == g.point(best));
}

TEST_CASE("integrated posterior matches the dense oracle") {
  auto grid = line_grid(3, 4, 0.5);
  const EnvDist dist({0.1, 0.2, 0.3, 0.4});
  ProblemGrid g(grid.design(), grid.env(), dist);
  const auto k = KernelSpec::matern32(0.9, 1.7);
  GPosterior prior(k, 0.01, g);
  auto p0 = bq_posterior(prior, dist);
  std::vector<JointPoint> pts{{0, 1}, {1, 3}, {2, 0}, {1, 1}};
  std::vector<double> ys{0.3, -0.5, 1.1, 0.0};
  GPosterior gp(k, 0.01, g);
  for (std::size_t i = 0; i < pts.size(); ++i) gp.update(pts[i], ys[i]);
  auto bq = bq_posterior(gp, dist);
  auto d0 = dense_posterior(k, 0.01, g, {}, {});
  auto d = dense_posterior(k, 0.01, g, pts, ys);
  for (Index x = 0; x < 3; ++x) {
    double m = 0.0, v = 0.0, v0 = 0.0;
    for (Index a = 0; a < 4; ++a) {
      m += dist[a] * d.mean[x * 4 + a];
      for (Index b = 0; b < 4; ++b) {
        v += dist[a] * dist[b] * d.cov(x * 4 + a, x * 4 + b);
        v0 += dist[a] * dist[b] * d0.cov(x * 4 + a, x * 4 + b);
      }
    }
    CHECK(p0.mean[x] == 0.0);
    CHECK(p0.variance[x] == doctest::Approx(v0));
    CHECK(bq.mean[x] == doctest::Approx(m).scale(1.0));
    CHECK(bq.variance[x] == doctest::Approx(v).scale(1.0));
  }
}

TEST_CASE("expected improvement") {
  CHECK(expected_improvement(1.0, 1.0, 1.0) == doctest::Approx(0.3989422804));
  CHECK(expected_improvement(2.0, 0.0, 1.0) == 1.0);
  CHECK(expected_improvement(0.0, 0.0, 1.0) == 0.0);
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) CHECK(expected_improvement(rng.normal(), std::fabs(rng.normal()), rng.normal()) >= 0.0);
  BqPosterior flat{Eigen::Vector3d(0.2, 0.9, 0.5), Eigen::Vector3d::Zero()};
  CHECK(select_bq(flat) == 1);
}

TEST_CASE("threshold-probability baseline") {
  CHECK(bptucb_eta(1.0, 1000) == doctest::Approx(3.125e-22));
  CHECK(bptucb_beta(1000, 2) == doctest::Approx(1000 * M_PI * M_PI * 4 / 0.15));
  auto grid = line_grid(3, 4);
  GPosterior prior(KernelSpec::squared_exponential(1.0), 1e-6, grid);
  for (auto variant : {BetaVariant::Theory, BetaVariant::Fixed}) {
    auto s = bptucb_scores(prior, grid.dist(), 0.0, 1, 1.0, variant);
    for (Index x = 0; x < 3; ++x) {
      CHECK(s.p_hat[x] == doctest::Approx(0.5));
      CHECK(s.gamma_sq[x] <= 0.25 + 1e-12);
    }
    CHECK((s.spread.array() <= 0.25 + 1e-12).all());
  }
  const auto p = select_bptucb(prior, grid.dist(), 0.0, 1, 1.0, BetaVariant::Fixed);
  CHECK(p.x < 3);
  CHECK(p.w < 4);
}

TEST_CASE("optimistic-only baseline") {
  for (std::size_t n : {3u, 10u, 1000u, 250000u}) CHECK(bbbmobo_beta(n, 1) > kFixedBeta);
}

namespace {

std::vector<TraceRecord> run_loop(Strategy s, const TabulatedOracle& oracle, const ProblemGrid& grid,
                                  const MeasureSpec& m, Setting setting, int T, std::uint64_t seed) {
  RunState run{GPosterior(KernelSpec::squared_exponential(0.8), 1e-6, grid), RunStreams::from_seed(seed), {}, {}};
  Rng init(seed + 1);
  const auto p0 = initial_point(grid.design_count(), grid.dist(), setting, init);
  run.posterior.update(p0, oracle.value(p0));
  const auto opt = true_optimum(oracle, m, grid.dist());
  IterationContext ctx;
  ctx.measure = &m;
  ctx.dist = &grid.dist();
  ctx.setting = setting;
  ctx.strategy = s;
  ctx.truth = &opt.values;
  ctx.x_star = opt.x_star;
  auto eval = make_evaluator(oracle);
  std::vector<TraceRecord> out;
  for (int t = 1; t <= T; ++t) out.push_back(run_iteration(run, ctx, t, eval));
  return out;
}

}  // namespace

TEST_CASE("loop iterations") {
  auto grid = line_grid(6, 5, 0.4);
  auto oracle = synthetic_2d(grid, KernelSpec::squared_exponential(0.8), 77);
  const auto m = MeasureSpec::expectation();

  SUBCASE("seeded runs are reproducible for every strategy") {
    for (Strategy s : all_strategies()) {
      for (Setting setting : {Setting::Simulator, Setting::Uncontrollable}) {
        auto a = run_loop(s, oracle, grid, m, setting, 8, 99);
        auto b = run_loop(s, oracle, grid, m, setting, 8, 99);
        for (std::size_t i = 0; i < a.size(); ++i) {
          CHECK(a[i].query == b[i].query);
          CHECK(a[i].y == b[i].y);
          CHECK(a[i].x_hat == b[i].x_hat);
          CHECK(a[i].t == static_cast<int>(i) + 1);
          CHECK(a[i].regret >= -1e-12);
          CHECK(a[i].info_gain >= 0.0);
        }
      }
    }
  }
  SUBCASE("trade-off parameter recorded only where used") {
    CHECK(std::isnan(run_loop(Strategy::Random, oracle, grid, m, Setting::Simulator, 1, 1)[0].beta));
    CHECK(run_loop(Strategy::ProposedFixed, oracle, grid, m, Setting::Simulator, 1, 1)[0].beta == kFixedBeta);
    CHECK(run_loop(Strategy::Proposed, oracle, grid, m, Setting::Simulator, 1, 1)[0].beta >=
          2.0 * std::log(30.0));
  }
  SUBCASE("with the expectation measure the optimistic baseline picks the same designs") {
    auto a = run_loop(Strategy::BbbmoboFixed, oracle, grid, m, Setting::Simulator, 15, 5);
    auto b = run_loop(Strategy::ProposedFixed, oracle, grid, m, Setting::Simulator, 15, 5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].query == b[i].query);
  }
  SUBCASE("strategy names round-trip") {
    for (Strategy s : all_strategies()) CHECK(parse_strategy(to_string(s)) == s);
    CHECK_FALSE(parse_strategy("nope").has_value());
    CHECK(all_strategies().size() == 9);
  }
}
