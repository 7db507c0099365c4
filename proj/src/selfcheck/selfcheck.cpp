#include "selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "robustbo/campaign.hpp"
#include "robustbo/diagnostics.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/gp.hpp"
#include "robustbo/measures.hpp"
#include "robustbo/policy.hpp"
#include "robustbo/sampling.hpp"

namespace robustbo::selfcheck {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

EnvDist random_pmf(std::size_t n, Rng& rng, bool allow_zero) {
  std::vector<double> w(n);
  bool any = false;
  for (auto& v : w) {
    v = (allow_zero && rng.uniform() < 0.2) ? 0.0 : rng.uniform() + 0.01;
    any = any || v > 0.0;
  }
  if (!any) w[rng.index(n)] = 1.0;
  return EnvDist::from_weights(w);
}

// Coarse values so ties and repeated atoms show up.
double random_level(Rng& rng) { return std::round(rng.normal() * 8.0) / 4.0; }

MeasureSpec random_base_measure(Rng& rng) {
  switch (rng.index(8)) {
    case 0: return MeasureSpec::expectation();
    case 1: return MeasureSpec::worst_case();
    case 2: return MeasureSpec::best_case();
    case 3: return MeasureSpec::value_at_risk(0.05 + 0.9 * rng.uniform());
    case 4: return MeasureSpec::cvar(0.05 + 0.9 * rng.uniform());
    case 5: return MeasureSpec::mean_abs_dev();
    case 6: return MeasureSpec::std_dev();
    default: return MeasureSpec::variance();
  }
}

MeasureSpec random_measure(Rng& rng, std::size_t n_env, int depth = 0) {
  const auto pick = depth >= 2 ? rng.index(3) : rng.index(7);
  switch (pick) {
    case 0:
    case 1: return random_base_measure(rng);
    case 2: return MeasureSpec::prob_threshold(random_level(rng));
    case 3: {
      std::vector<EnvDist> candidates;
      const auto k = 1 + rng.index(3);
      for (std::uint64_t i = 0; i < k; ++i) candidates.push_back(random_pmf(n_env, rng, true));
      return MeasureSpec::dist_robust(std::move(candidates), random_base_measure(rng));
    }
    case 4:
      if (rng.uniform() < 0.5) {
        return MeasureSpec::monotone_lipschitz([](double a) { return 2.0 * a + 1.0; }, 2.0, true,
                                               random_measure(rng, n_env, depth + 1));
      }
      return MeasureSpec::monotone_lipschitz([](double a) { return -3.0 * a; }, 3.0, false,
                                             random_measure(rng, n_env, depth + 1));
    case 5:
      return MeasureSpec::weighted_sum(3.0 * rng.uniform(), random_measure(rng, n_env, depth + 1), 3.0 * rng.uniform(),
                                       random_measure(rng, n_env, depth + 1));
    default: return MeasureSpec::exp_minus_mad(4.0 * rng.uniform());
  }
}

template <class F>
CheckResult timed(int id, const std::string& title, F&& body, double budget_seconds = 0.0) {
  CheckResult r;
  r.id = id;
  r.title = title;
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0.0 && r.seconds > budget_seconds) {
    r.pass = false;
    r.detail += ", over the " + fmt(budget_seconds) + " s budget";
  }
  return r;
}

// ---------------------------------------------------------------------------

CheckResult bound_containment() {
  return timed(1, "bound containment over random boxes", [](CheckResult& r) {
    Rng rng(101);
    std::size_t violations = 0;
    double worst = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
      const std::size_t n = 1 + rng.index(12);
      const EnvDist dist = random_pmf(n, rng, true);
      const MeasureSpec spec = random_measure(rng, n);
      std::vector<double> lo(n), hi(n), g(n);
      for (std::size_t j = 0; j < n; ++j) {
        lo[j] = random_level(rng);
        hi[j] = lo[j] + (rng.uniform() < 0.2 ? 0.0 : std::fabs(random_level(rng)));
      }
      const BoundPair b = bounds_exact(spec, lo, hi, dist);
      for (int k = 0; k < 200; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
          const double u = rng.uniform();
          g[j] = u < 0.2 ? lo[j] : (u < 0.4 ? hi[j] : lo[j] + (hi[j] - lo[j]) * rng.uniform());
        }
        const double v = measure_eval(spec, g, dist);
        const double excess = std::max(b.lcb - v, v - b.ucb);
        if (excess > 1e-9) {
          ++violations;
          worst = std::max(worst, excess);
        }
      }
    }
    r.pass = violations == 0;
    r.detail = "200000 samples, violations=" + std::to_string(violations) + ", worst excess=" + fmt(worst);
  }, 30.0);
}

CheckResult width_inequality() {
  return timed(2, "width bounded by q(2 sqrt(beta) max sd)", [](CheckResult& r) {
    Rng rng(202);
    std::size_t violations = 0, checked = 0;
    double worst = -INFINITY;
    for (int inst = 0; inst < 500; ++inst) {
      const std::size_t n = 1 + rng.index(15);
      const EnvDist dist = random_pmf(n, rng, rng.uniform() < 0.5);
      const double beta = sample_beta(1 + rng.index(5000), rng).beta;
      const std::vector<MeasureSpec> specs = {
          MeasureSpec::expectation(), MeasureSpec::worst_case(), MeasureSpec::best_case(),
          MeasureSpec::value_at_risk(0.05 + 0.9 * rng.uniform()), MeasureSpec::cvar(0.05 + 0.9 * rng.uniform()),
          MeasureSpec::mean_abs_dev()};
      for (int x = 0; x < 5; ++x) {
        std::vector<double> lo(n), hi(n);
        double max_sd = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double mu = 2.0 * rng.normal();
          const double sd = rng.uniform() < 0.1 ? 0.0 : std::fabs(rng.normal());
          lo[j] = mu - std::sqrt(beta) * sd;
          hi[j] = mu + std::sqrt(beta) * sd;
          max_sd = std::max(max_sd, sd);
        }
        for (const auto& spec : specs) {
          const BoundPair b = bounds_exact(spec, lo, hi, dist);
          const double slack = b.ucb - b.lcb - *q_value(spec, 2.0 * std::sqrt(beta) * max_sd);
          worst = std::max(worst, slack);
          ++checked;
          if (slack > 1e-9) ++violations;
        }
      }
    }
    r.pass = violations == 0;
    r.detail = std::to_string(checked) + " rows, violations=" + std::to_string(violations) +
               ", max(width - q)=" + fmt(worst);
  }, 30.0);
}

CheckResult lemma_equivalence() {
  return timed(3, "single-environment choice attains max ucb", [](CheckResult& r) {
    Rng rng(303);
    double worst = 0.0;
    for (int inst = 0; inst < 500; ++inst) {
      const auto nx = static_cast<Index>(2 + rng.index(29));
      Eigen::MatrixXd design(nx, 1);
      for (Index i = 0; i < nx; ++i) design(i, 0) = 10.0 * rng.uniform() - 5.0;
      Eigen::MatrixXd env = Eigen::MatrixXd::Zero(1, 1);
      const ProblemGrid grid(design, env, EnvDist::uniform(1));
      GPosterior gp(KernelSpec::squared_exponential(0.3 + 2.0 * rng.uniform(), 0.5 + rng.uniform()),
                    rng.uniform() < 0.5 ? 1e-6 : 0.1, grid);
      const auto n_obs = rng.index(9);
      for (std::uint64_t k = 0; k < n_obs; ++k) gp.update({static_cast<Index>(rng.index(nx)), 0}, rng.normal());
      const MeasureSpec spec = MeasureSpec::expectation();
      const CredibleField field = credible_field(gp, sample_beta(static_cast<std::size_t>(nx), rng).beta, spec, grid.dist());
      const Index x = select_x_proposed(field, estimate_solution(gp, spec, grid.dist()));
      double max_ucb = -INFINITY;
      for (const auto& b : field.bounds) max_ucb = std::max(max_ucb, b.ucb);
      worst = std::max(worst, std::fabs(field.bounds[static_cast<std::size_t>(x)].ucb - max_ucb));
    }
    r.pass = worst <= 1e-10;
    r.detail = "500 states, max |ucb(x_t) - max ucb|=" + fmt(worst);
  });
}

CheckResult beta_statistics() {
  return timed(4, "randomized beta mean and KS distance", [](CheckResult& r) {
    Rng rng(404);
    constexpr int kDraws = 1000000;
    std::vector<double> xi(kDraws);
    long double sum = 0.0L;
    for (int i = 0; i < kDraws; ++i) {
      const BetaSample s = sample_beta(1000, rng);
      xi[static_cast<std::size_t>(i)] = s.xi;
      sum += s.beta;
    }
    const double mean = static_cast<double>(sum / kDraws);
    const double ks = oracle::ks_distance_exp2(std::move(xi));
    r.pass = std::fabs(mean - 15.8155) <= 0.05 && ks < 0.005;
    r.detail = "mean beta=" + fmt(mean) + " (target 15.8155 +- 0.05), KS=" + fmt(ks) + " (< 0.005)";
  });
}

CampaignConfig syn2d_config(std::vector<Strategy> strategies, int T, int R, std::uint64_t seed) {
  CampaignConfig cfg;
  cfg.problem = ProblemKind::Syn2D;
  cfg.measure = MeasureChoice::Exp;
  cfg.strategies = std::move(strategies);
  cfg.iterations = T;
  cfg.repetitions = R;
  cfg.seed = seed;
  return cfg;
}

CheckResult optimal_index_identity() {
  return timed(5, "exact optimal index equals the latest step", [](CheckResult& r) {
    auto cfg = syn2d_config({Strategy::Proposed}, 100, 20, 505);
    cfg.hat_t = HatTMode::Exact;
    const auto result = run_campaign(cfg);
    std::size_t mismatches = 0, steps = 0;
    for (const auto& trace : result.strategies[0].traces) {
      for (const auto& rec : trace.records) {
        ++steps;
        if (rec.hat_t != rec.t) ++mismatches;
      }
    }
    r.pass = mismatches == 0 && steps == 2000;
    r.detail = std::to_string(steps) + " steps, mismatches=" + std::to_string(mismatches);
  });
}

CheckResult oracle_equivalence() {
  return timed(6, "VaR / CVaR / MAD bounds match brute-force oracles", [](CheckResult& r) {
    Rng rng(606);
    double worst = 0.0;
    for (int inst = 0; inst < 500; ++inst) {
      const std::size_t n = 1 + rng.index(15);
      const EnvDist dist = random_pmf(n, rng, true);
      std::vector<double> lo(n), hi(n);
      for (std::size_t j = 0; j < n; ++j) {
        lo[j] = rng.uniform() < 0.5 ? random_level(rng) : 3.0 * rng.normal();
        hi[j] = lo[j] + (rng.uniform() < 0.2 ? 0.0 : 2.0 * rng.uniform());
      }
      const double alpha = 0.01 + 0.98 * rng.uniform();
      const auto pmf = dist.pmf();
      const BoundPair var = bounds_exact(MeasureSpec::value_at_risk(alpha), lo, hi, dist);
      const BoundPair cvar = bounds_exact(MeasureSpec::cvar(alpha), lo, hi, dist);
      const BoundPair mad = bounds_exact(MeasureSpec::mean_abs_dev(), lo, hi, dist);
      const auto [mad_lo, mad_hi] = oracle::mad_box_bounds(lo, hi, pmf);
      worst = std::max({worst, std::fabs(var.lcb - oracle::var_cdf_scan(lo, pmf, alpha)),
                        std::fabs(var.ucb - oracle::var_cdf_scan(hi, pmf, alpha)),
                        std::fabs(cvar.lcb - oracle::cvar_support_max(lo, pmf, alpha)),
                        std::fabs(cvar.ucb - oracle::cvar_support_max(hi, pmf, alpha)),
                        std::fabs(mad.lcb - mad_lo), std::fabs(mad.ucb - mad_hi)});
    }
    r.pass = worst <= 1e-9;
    r.detail = "500 instances, max deviation=" + fmt(worst);
  });
}

struct RegretCampaigns {
  CampaignResult simulator;
  CampaignResult uncontrollable;
};

const RegretCampaigns& regret_campaigns() {
  static const RegretCampaigns runs = [] {
    RegretCampaigns out;
    auto cfg = syn2d_config({Strategy::Proposed, Strategy::Random, Strategy::US}, 150, 25, 707);
    cfg.bound_check = true;
    out.simulator = run_campaign(cfg);
    auto unc = syn2d_config({Strategy::Proposed, Strategy::Random}, 150, 25, 909);
    unc.setting = Setting::Uncontrollable;
    unc.bound_check = true;
    out.uncontrollable = run_campaign(unc);
    return out;
  }();
  return runs;
}

const StrategyResult& find(const CampaignResult& result, Strategy s) {
  for (const auto& sr : result.strategies) {
    if (sr.strategy == s) return sr;
  }
  throw_invalid("strategy missing from campaign");
}

std::vector<double> mean_cumulative(const StrategyResult& sr) {
  std::vector<double> mean(sr.mean_regret.size(), 0.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < mean.size(); ++t) {
    acc += sr.mean_regret[t];
    mean[t] = acc;
  }
  return mean;
}

CheckResult regret_reproduction() {
  return timed(7, "2D expectation regret: Proposed beats Random and US", [](CheckResult& r) {
    const auto& res = regret_campaigns().simulator;
    const auto& p = find(res, Strategy::Proposed).mean_regret;
    const double random = find(res, Strategy::Random).mean_regret.back();
    const double us = find(res, Strategy::US).mean_regret.back();
    const bool a = p.back() <= 0.3 * p.front();
    const bool b = p.back() < random && p.back() < us;
    r.pass = a && b;
    r.detail = "Proposed r_1=" + fmt(p.front()) + " r_150=" + fmt(p.back()) + ", Random r_150=" + fmt(random) +
               ", US r_150=" + fmt(us);
  }, 600.0);
}

CheckResult expectation_bound() {
  return timed(8, "mean cumulative regret below the closed-form bound", [](CheckResult& r) {
    const auto& res = regret_campaigns().simulator;
    const auto R = mean_cumulative(find(res, Strategy::Proposed));
    const auto& gamma = res.bounds->gamma_certified;
    const auto bound = bound_simple(MeasureClass::Other, 2500, kSyntheticNoise, gamma);
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < R.size(); ++t) worst_ratio = std::max(worst_ratio, R[t] / bound[t]);
    r.pass = worst_ratio <= 1.0;
    r.detail = "max R_t / bound=" + fmt(worst_ratio) + ", R_150=" + fmt(R.back()) + ", bound_150=" + fmt(bound.back());
  });
}

CheckResult uncontrollable_parity() {
  return timed(9, "uncontrollable setting: Proposed beats Random, bound holds", [](CheckResult& r) {
    const auto& res = regret_campaigns().uncontrollable;
    const auto& proposed = find(res, Strategy::Proposed);
    const double random = find(res, Strategy::Random).mean_regret.back();
    const auto R = mean_cumulative(proposed);
    const auto bound = bound_uncontrollable(MeasureClass::Other, 2500, kSyntheticNoise, res.bounds->gamma_certified,
                                            1.0 / 50.0);
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < R.size(); ++t) worst_ratio = std::max(worst_ratio, R[t] / bound[t]);
    r.pass = proposed.mean_regret.back() < random && worst_ratio <= 1.0;
    r.detail = "Proposed r_150=" + fmt(proposed.mean_regret.back()) + ", Random r_150=" + fmt(random) +
               ", max R_t / bound=" + fmt(worst_ratio);
  });
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CheckResult determinism() {
  return timed(10, "byte-identical outputs, serial and parallel", [](CheckResult& r) {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("robustbo_det_" + std::to_string(::getpid()));
    fs::remove_all(root);
    auto cfg = syn2d_config(all_strategies(), 15, 3, 1010);
    cfg.bound_check = true;
    std::vector<fs::path> dirs;
    for (int run = 0; run < 3; ++run) {
      cfg.workers = run == 0 ? 1 : 3;
      dirs.push_back(root / ("run" + std::to_string(run)));
      emit_csv(run_campaign(cfg), dirs.back().string());
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      const auto name = entry.path().filename();
      const std::string ref = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        if (!fs::exists(dirs[k] / name) || slurp(dirs[k] / name) != ref) ++differing;
      }
    }
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      for ([[maybe_unused]] const auto& e : fs::directory_iterator(dirs[k])) ++counts[k];
    }
    fs::remove_all(root);
    r.pass = files > 0 && differing == 0 && counts[0] == counts[1] && counts[1] == counts[2];
    r.detail = std::to_string(files) + " files compared across 3 runs, differing=" + std::to_string(differing);
  });
}

CheckResult fixed_beta_identity() {
  return timed(11, "fixed-beta BBBMOBO and Proposed pick the same x", [](CheckResult& r) {
    std::size_t mismatches = 0, steps = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto cfg = syn2d_config({Strategy::BbbmoboFixed, Strategy::ProposedFixed}, 100, 1, 1100 + seed);
      const auto res = run_campaign(cfg);
      const auto& a = res.strategies[0].traces[0].records;
      const auto& b = res.strategies[1].traces[0].records;
      for (std::size_t t = 0; t < a.size(); ++t) {
        ++steps;
        if (a[t].query.x != b[t].query.x) ++mismatches;
      }
    }
    r.pass = mismatches == 0 && steps == 1000;
    r.detail = std::to_string(steps) + " paired steps, mismatches=" + std::to_string(mismatches);
  });
}

}  // namespace

const std::vector<Check>& acceptance_checks() {
  static const std::vector<Check> checks = {
      {1, "bound containment", bound_containment},
      {2, "width inequality", width_inequality},
      {3, "single-environment equivalence", lemma_equivalence},
      {4, "beta sampler statistics", beta_statistics},
      {5, "optimal index identity", optimal_index_identity},
      {6, "oracle equivalence", oracle_equivalence},
      {7, "scaled regret reproduction", regret_reproduction},
      {8, "expectation bound check", expectation_bound},
      {9, "uncontrollable parity", uncontrollable_parity},
      {10, "determinism", determinism},
      {11, "fixed-beta identity", fixed_beta_identity},
  };
  return checks;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << " (" << r.detail << ", ";
  os.precision(3);
  os << r.seconds << " s)";
  return os.str();
}

}  // namespace robustbo::selfcheck
