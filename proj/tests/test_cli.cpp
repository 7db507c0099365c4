#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "robustbo/campaign.hpp"
#include "robustbo/config.hpp"
#include "robustbo/csv.hpp"
#include "robustbo/errors.hpp"
#include "support/tempdir.hpp"

using namespace robustbo;
using testsupport::TempDir;

TEST_CASE("config parsing") {
  SUBCASE("minimal file takes the defaults") {
    auto c = parse_config_text("problem = syn2d\n");
    CHECK(c.problem == ProblemKind::Syn2D);
    CHECK(c.iterations == 300);
    CHECK(c.repetitions == 100);
    CHECK(c.strategies.size() == 9);
    CHECK(c.seed == 0);
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0] == "no seed given, using 0");
  }
  SUBCASE("full file") {
    auto c = parse_config_text(
        "# comment\nproblem = syn4d\nmeasure = exp-mae\nmeasure.alpha = 2.5\nsetting = uncontrollable\n"
        "strategies = proposed, random\niterations = 20\nrepetitions = 3\nseed = 17\nhat_t = mc\n"
        "hat_t.samples = 32\nworkers = 2\nbound_check = yes\noutput = out  # trailing\n");
    CHECK(c.problem == ProblemKind::Syn4D);
    CHECK(c.measure == MeasureChoice::ExpMae);
    CHECK(*c.alpha == 2.5);
    CHECK(c.setting == Setting::Uncontrollable);
    CHECK(c.strategies == std::vector<Strategy>{Strategy::Proposed, Strategy::Random});
    CHECK(c.seed == 17);
    CHECK(c.hat_t == HatTMode::MonteCarlo);
    CHECK(c.bound_check);
    CHECK(c.output == "out");
    CHECK(c.warnings.empty());
  }
  SUBCASE("every violation is reported") {
    try {
      parse_config_text("problem = syn2d\nstrategies = proposed, magic\niterations = 0\ncolour = red\nseed = 1\n",
                        "cfg.txt");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      REQUIRE(e.violations().size() == 3);
      const std::string all = std::string(e.what());
      CHECK(all.find("magic") != std::string::npos);
      CHECK(all.find("colour") != std::string::npos);
      CHECK(all.find("cfg.txt:2") != std::string::npos);
    }
  }
  SUBCASE("problem is required and exact hat_t needs the expectation") {
    CHECK_THROWS_AS(parse_config_text("seed = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("problem = syn2d\nmeasure = ptr\nhat_t = exact\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("problem = carrier\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("/nonexistent/robustbo.cfg"), ConfigError);
  }
}

TEST_CASE("csv helpers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(*parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_FALSE(parse_double("1.5x").has_value());
  auto f = split_fields(" a , b,c\r");
  REQUIRE(f.size() == 3);
  CHECK(f[0] == "a");
  CHECK(f[2] == "c");
}

TEST_CASE("aggregation") {
  std::vector<double> mean, se2;
  aggregate({{1.0, 2.0}, {3.0, 6.0}}, mean, se2);
  CHECK(mean == std::vector<double>{2.0, 4.0});
  CHECK(se2[0] == doctest::Approx(2.0 * std::sqrt(2.0 / 2.0)));
  aggregate({{1.0, 2.0}}, mean, se2);
  CHECK(se2 == std::vector<double>{0.0, 0.0});
}

namespace {

CampaignConfig small_config(const std::string& out, int reps, int iters) {
  auto c = parse_config_text("problem = syn2d\nstrategies = proposed, random, bq\nseed = 3\n");
  c.repetitions = reps;
  c.iterations = iters;
  c.output = out;
  return c;
}

}  // namespace

TEST_CASE("campaign output") {
  TempDir dir("campaign");
  SUBCASE("single step") {
    auto cfg = small_config(dir.path().string(), 1, 1);
    auto r = run_campaign(cfg);
    REQUIRE(r.strategies.size() == 3);
    CHECK(r.strategies[0].traces.size() == 1);
    CHECK(r.strategies[0].traces[0].records.size() == 1);
    CHECK(r.strategies[0].mean_regret.size() == 1);
  }
  SUBCASE("means over repetitions and file layout") {
    auto cfg = small_config(dir.path().string(), 2, 4);
    cfg.bound_check = true;
    auto r = run_campaign(cfg);
    for (const auto& s : r.strategies) {
      for (int t = 0; t < 4; ++t) {
        const double a = s.traces[0].records[t].regret, b = s.traces[1].records[t].regret;
        CHECK(s.mean_regret[t] == doctest::Approx((a + b) / 2.0));
      }
    }
    emit_csv(r, dir.path().string());
    auto reg = read_csv(dir.file("regret_proposed.csv"));
    CHECK(reg.header == std::vector<std::string>{"t", "mean_regret", "se2"});
    CHECK(reg.rows.size() == 4);
    auto tr = read_csv(dir.file("trace_random_1.csv"));
    CHECK(tr.header ==
          std::vector<std::string>{"t", "beta", "x_index", "w_index", "y", "xhat_index", "regret", "info_gain"});
    CHECK(tr.rows.size() == 4);
    CHECK(tr.rows[0][1] == "nan");
    auto bounds = read_csv(dir.file("bounds.csv"));
    CHECK(bounds.header == std::vector<std::string>{"t", "gamma_hat", "gamma_certified", "bound_ER", "bound_er",
                                                    "markov_R_0.05"});
    CHECK(bounds.rows.size() == 4);
  }
  SUBCASE("threshold measure has no guarantee column values") {
    auto cfg = small_config(dir.path().string(), 1, 2);
    cfg.measure = MeasureChoice::Ptr;
    cfg.strategies = {Strategy::BptUcb};
    cfg.bound_check = true;
    auto r = run_campaign(cfg);
    REQUIRE(r.bounds.has_value());
    CHECK_FALSE(r.bounds->guaranteed);
    emit_csv(r, dir.path().string());
    auto bounds = read_csv(dir.file("bounds.csv"));
    CHECK(bounds.rows[0][3] == "no_guarantee");
  }
}

TEST_CASE("custom problem tables") {
  TempDir dir("custom");
  std::string table = "x,w,f\n";
  for (int x = 0; x < 4; ++x)
    for (int w = 0; w < 3; ++w)
      table += std::to_string(x) + "," + std::to_string(w) + "," + std::to_string(-(x - 2) * (x - 2) + 0.1 * w) + "\n";
  const auto path = dir.write("f.csv", table);
  auto cfg = parse_config_text("problem = custom\nproblem.path = " + path +
                               "\nstrategies = proposed\niterations = 5\nrepetitions = 1\nseed = 1\n");
  auto p = Problem::from_config(cfg);
  CHECK(p.grid().design_count() == 4);
  CHECK(p.grid().env_count() == 3);
  auto r = run_campaign(cfg);
  CHECK(r.x_star[0] == 2);
  cfg.problem_path = dir.write("short.csv", "x,w,f\n0,0,1\n0,1,2\n1,0,3\n");
  try {
    run_campaign(cfg);
    FAIL("expected a data error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DataError);
  }
}
