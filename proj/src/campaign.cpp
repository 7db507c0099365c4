#include "robustbo/campaign.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>

#include "robustbo/csv.hpp"
#include "robustbo/diagnostics.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/sampling.hpp"

namespace robustbo {

namespace {

Benchmark benchmark_of(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Syn2D: return Benchmark::Syn2D;
    case ProblemKind::Syn4D: return Benchmark::Syn4D;
    case ProblemKind::Syn6D: return Benchmark::Syn6D;
    case ProblemKind::Carrier: return Benchmark::Carrier;
    case ProblemKind::Custom: break;
  }
  throw_invalid("custom problems have no benchmark preset");
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Index position(const std::vector<double>& sorted, double v) {
  return std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
}

/// Table `x,w,f` of scalar design and environment coordinates, every pair present.
std::pair<ProblemGrid, TabulatedOracle> load_custom(const CampaignConfig& cfg) {
  const CsvTable table = read_csv(cfg.problem_path);
  if (table.header != std::vector<std::string>{"x", "w", "f"}) {
    throw Error(ErrorCode::ParseError, cfg.problem_path + ":1: expected header 'x,w,f'");
  }
  struct Row {
    double x, w, f;
  };
  std::vector<Row> rows;
  std::vector<double> xs, ws;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto where = cfg.problem_path + ":" + std::to_string(table.line_numbers[r]);
    const auto& fields = table.rows[r];
    if (fields.size() != 3) throw Error(ErrorCode::ParseError, where + ": expected 3 fields");
    const auto x = parse_double(fields[0]), w = parse_double(fields[1]), f = parse_double(fields[2]);
    if (!x || !w || !f || !std::isfinite(*x) || !std::isfinite(*w) || !std::isfinite(*f)) {
      throw Error(ErrorCode::ParseError, where + ": malformed number");
    }
    rows.push_back({*x, *w, *f});
    xs.push_back(*x);
    ws.push_back(*w);
  }
  if (rows.empty()) throw Error(ErrorCode::DataError, cfg.problem_path + ": no data rows");
  xs = sorted_unique(std::move(xs));
  ws = sorted_unique(std::move(ws));
  TabulatedOracle oracle;
  oracle.values = TabulatedOracle::Table::Constant(static_cast<Index>(xs.size()), static_cast<Index>(ws.size()),
                                                   std::numeric_limits<double>::quiet_NaN());
  for (const auto& row : rows) oracle.values(position(xs, row.x), position(ws, row.w)) = row.f;
  for (Index i = 0; i < oracle.values.rows(); ++i) {
    for (Index j = 0; j < oracle.values.cols(); ++j) {
      if (std::isnan(oracle.values(i, j))) {
        throw Error(ErrorCode::DataError, cfg.problem_path + ": missing value at (x=" + format_double(xs[static_cast<std::size_t>(i)]) +
                                              ", w=" + format_double(ws[static_cast<std::size_t>(j)]) + ")");
      }
    }
  }

  EnvDist dist = EnvDist::uniform(ws.size());
  if (!cfg.pmf_path.empty()) {
    const CsvTable pmf = read_csv(cfg.pmf_path);
    if (pmf.header != std::vector<std::string>{"w", "p"}) {
      throw Error(ErrorCode::ParseError, cfg.pmf_path + ":1: expected header 'w,p'");
    }
    std::vector<double> weights(ws.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < pmf.rows.size(); ++r) {
      const auto where = cfg.pmf_path + ":" + std::to_string(pmf.line_numbers[r]);
      if (pmf.rows[r].size() != 2) throw Error(ErrorCode::ParseError, where + ": expected 2 fields");
      const auto w = parse_double(pmf.rows[r][0]), p = parse_double(pmf.rows[r][1]);
      if (!w || !p) throw Error(ErrorCode::ParseError, where + ": malformed number");
      const Index j = position(ws, *w);
      if (j >= static_cast<Index>(ws.size()) || ws[static_cast<std::size_t>(j)] != *w) {
        throw Error(ErrorCode::DataError, where + ": w=" + format_double(*w) + " is not in the table");
      }
      weights[static_cast<std::size_t>(j)] = *p;
    }
    for (std::size_t j = 0; j < ws.size(); ++j) {
      if (std::isnan(weights[j])) throw Error(ErrorCode::DataError, cfg.pmf_path + ": no mass given for w=" + format_double(ws[j]));
    }
    try {
      dist = EnvDist::from_weights(weights);
    } catch (const Error& e) {
      throw Error(ErrorCode::DataError, cfg.pmf_path + ": " + e.what());
    }
  }
  Eigen::MatrixXd design = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size()));
  Eigen::MatrixXd env = Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Index>(ws.size()));
  return {ProblemGrid(std::move(design), std::move(env), std::move(dist)), std::move(oracle)};
}

std::vector<Eigen::VectorXd> all_joint_points(const ProblemGrid& grid) {
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(grid.size()));
  for (Index x = 0; x < grid.design_count(); ++x) {
    for (Index w = 0; w < grid.env_count(); ++w) pts.push_back(grid.coords({x, w}));
  }
  return pts;
}

}  // namespace

Problem Problem::from_config(const CampaignConfig& config) {
  Problem p;
  p.kind_ = config.problem;
  MeasurePreset preset;
  if (config.problem == ProblemKind::Custom) {
    auto [grid, oracle] = load_custom(config);
    p.grid_ = std::move(grid);
    p.kernel_ = config.kernel_form == "matern32"
                    ? KernelSpec::matern32(config.kernel_lengthscale, config.kernel_variance)
                    : KernelSpec::squared_exponential(config.kernel_lengthscale, config.kernel_variance);
    p.gp_noise_ = config.noise_var;
    oracle.noise_var = 0.0;
    p.fixed_ = std::make_shared<const TabulatedOracle>(std::move(oracle));
    preset = {0.0, 1.0};
    p.bpt_c_ = 1.0;
  } else {
    const Benchmark b = benchmark_of(config.problem);
    p.kernel_ = benchmark_kernel(b);
    preset = benchmark_preset(b);
    p.bpt_c_ = b == Benchmark::Carrier ? 2.0 : 1.0;
    p.gp_noise_ = kSyntheticNoise;
    switch (b) {
      case Benchmark::Syn2D:
        p.grid_ = benchmark_grid(b);
        p.sampler_ = std::make_shared<const GpFunctionSampler>(p.kernel_, all_joint_points(p.grid_));
        break;
      case Benchmark::Syn4D:
        p.grid_ = benchmark_grid(b);
        p.fixed_ = std::make_shared<const TabulatedOracle>(himmelblau_oracle(p.grid_));
        break;
      case Benchmark::Syn6D:
        p.grid_ = benchmark_grid(b);
        p.sampler6d_ = std::make_shared<const Synthetic6dSampler>();
        break;
      case Benchmark::Carrier: {
        auto carrier = load_carrier_lifetime(config.problem_path);
        p.grid_ = std::move(carrier.grid);
        p.fixed_ = std::make_shared<const TabulatedOracle>(std::move(carrier.oracle));
        break;
      }
    }
  }
  if (config.bpt_c) p.bpt_c_ = *config.bpt_c;
  const double h = config.h.value_or(preset.h);
  const double alpha = config.alpha.value_or(preset.alpha);
  p.threshold_ = h;
  switch (config.measure) {
    case MeasureChoice::Exp: p.measure_ = MeasureSpec::expectation(); break;
    case MeasureChoice::Ptr: p.measure_ = MeasureSpec::prob_threshold(h); break;
    case MeasureChoice::ExpMae: p.measure_ = MeasureSpec::exp_minus_mad(alpha); break;
  }
  p.kernel_.validate(p.grid_.joint_dim());
  return p;
}

TabulatedOracle Problem::oracle(std::uint64_t function_seed) const {
  if (fixed_) return *fixed_;
  if (sampler_) return synthetic_2d(*sampler_, grid_, function_seed);
  return sampler6d_->draw(grid_, function_seed);
}

void aggregate(const std::vector<std::vector<double>>& per_rep, std::vector<double>& mean, std::vector<double>& se2) {
  mean.clear();
  se2.clear();
  if (per_rep.empty()) return;
  const std::size_t T = per_rep.front().size();
  const double R = static_cast<double>(per_rep.size());
  mean.assign(T, 0.0);
  se2.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (const auto& rep : per_rep) sum += rep[t];
    const double m = sum / R;
    mean[t] = m;
    if (per_rep.size() > 1) {
      double ss = 0.0;
      for (const auto& rep : per_rep) ss += (rep[t] - m) * (rep[t] - m);
      se2[t] = 2.0 * std::sqrt(ss / (R - 1.0) / R);
    }
  }
}

namespace {

struct RepetitionOutput {
  std::vector<RunTrace> traces;  // per strategy
  Index x_star = 0;
};

RepetitionOutput run_repetition(const CampaignConfig& cfg, const Problem& problem, int rep) {
  const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
  const TabulatedOracle oracle = problem.oracle(derive_seed(rep_seed, 0xF));
  const EnvDist& dist = problem.grid().dist();
  const Optimum opt = true_optimum(oracle, problem.measure(), dist);
  Rng init_rng = Rng::derive(rep_seed, 0x1);
  const JointPoint start = initial_point(problem.grid().design_count(), dist, cfg.setting, init_rng);
  const Evaluator evaluate = make_evaluator(oracle);

  RepetitionOutput out;
  out.x_star = opt.x_star;
  for (Strategy strategy : cfg.strategies) {
    RunState run{GPosterior(problem.kernel(), problem.gp_noise(), problem.grid()),
                 RunStreams::from_seed(derive_seed(rep_seed, 0x100)), {}, {}};
    IterationContext ctx;
    ctx.measure = &problem.measure();
    ctx.dist = &dist;
    ctx.setting = cfg.setting;
    ctx.strategy = strategy;
    ctx.threshold = problem.threshold();
    ctx.bpt_c = problem.bpt_c();
    ctx.hat_t_mode = cfg.hat_t;
    ctx.hat_t_samples = cfg.hat_t_samples;
    ctx.truth = &opt.values;
    ctx.x_star = opt.x_star;

    RunTrace trace;
    int t = 0;
    try {
      run.posterior.update(start, evaluate(start, run.streams.noise));
      for (t = 1; t <= cfg.iterations; ++t) trace.records.push_back(run_iteration(run, ctx, t, evaluate));
    } catch (const Error& e) {
      throw e.with_context("strategy " + std::string(to_string(strategy)) + ", repetition " + std::to_string(rep) +
                           ", iteration " + std::to_string(t));
    }
    out.traces.push_back(std::move(trace));
  }
  return out;
}

}  // namespace

BoundTable compute_bounds(const CampaignConfig& config, const Problem& problem) {
  BoundTable table;
  const auto curve = greedy_max_info_gain(problem.kernel(), problem.gp_noise(), problem.grid(), config.iterations);
  table.gamma_hat = curve.greedy;
  table.gamma_certified = curve.certified;
  const auto N = static_cast<std::size_t>(problem.grid().size());
  const EnvDist& dist = problem.grid().dist();
  double p_min = 1.0;
  if (config.setting == Setting::Uncontrollable) {
    if (!dist.all_positive()) return table;
    p_min = dist.p_min();
  }
  std::optional<QCoefficients> q;
  try {
    q = q_coefficients(problem.measure());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MeasureHasNoQ) throw;
    return table;
  }
  table.guaranteed = true;
  for (std::size_t i = 0; i < table.gamma_certified.size(); ++i) {
    const int t = static_cast<int>(i + 1);
    const double bound = bound_general(*q, N, problem.gp_noise(), table.gamma_certified[i], t, p_min);
    table.bound_cumulative.push_back(bound);
    table.bound_simple.push_back(bound / t);
    table.markov.push_back(markov_bound(bound, 0.05));
  }
  return table;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  if (config.strategies.empty()) throw ConfigError({"no strategies selected"});
  const Problem problem = Problem::from_config(config);

  const int R = config.repetitions;
  std::vector<RepetitionOutput> reps(static_cast<std::size_t>(R));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(R));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < R; r = next++) {
      try {
        reps[static_cast<std::size_t>(r)] = run_repetition(config, problem, r);
      } catch (...) {
        failures[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int n_workers = std::max(1, std::min(config.workers, R));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  CampaignResult result;
  result.config = config;
  for (const auto& rep : reps) result.x_star.push_back(rep.x_star);
  for (std::size_t s = 0; s < config.strategies.size(); ++s) {
    StrategyResult sr;
    sr.strategy = config.strategies[s];
    std::vector<std::vector<double>> regrets;
    for (auto& rep : reps) {
      std::vector<double> r;
      for (const auto& rec : rep.traces[s].records) r.push_back(rec.regret);
      regrets.push_back(std::move(r));
      sr.traces.push_back(std::move(rep.traces[s]));
    }
    aggregate(regrets, sr.mean_regret, sr.se2);
    result.strategies.push_back(std::move(sr));
  }
  if (config.bound_check) result.bounds = compute_bounds(config, problem);
  return result;
}

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

void emit_bounds_csv(const BoundTable& bounds, const std::string& dir) {
  ensure_dir(dir);
  std::ostringstream os;
  os << "t,gamma_hat,gamma_certified,bound_ER,bound_er,markov_R_0.05\n";
  for (std::size_t i = 0; i < bounds.gamma_hat.size(); ++i) {
    os << (i + 1) << ',' << format_double(bounds.gamma_hat[i]) << ',' << format_double(bounds.gamma_certified[i]);
    if (bounds.guaranteed) {
      os << ',' << format_double(bounds.bound_cumulative[i]) << ',' << format_double(bounds.bound_simple[i]) << ','
         << format_double(bounds.markov[i]);
    } else {
      os << ",no_guarantee,no_guarantee,no_guarantee";
    }
    os << '\n';
  }
  write_text_file(join_path(dir, "bounds.csv"), os.str());
}

void emit_csv(const CampaignResult& result, const std::string& dir) {
  ensure_dir(dir);
  for (const auto& sr : result.strategies) {
    const std::string name(to_string(sr.strategy));
    std::ostringstream agg;
    agg << "t,mean_regret,se2\n";
    for (std::size_t i = 0; i < sr.mean_regret.size(); ++i) {
      agg << (i + 1) << ',' << format_double(sr.mean_regret[i]) << ',' << format_double(sr.se2[i]) << '\n';
    }
    write_text_file(join_path(dir, "regret_" + name + ".csv"), agg.str());
    for (std::size_t rep = 0; rep < sr.traces.size(); ++rep) {
      std::ostringstream os;
      os << "t,beta,x_index,w_index,y,xhat_index,regret,info_gain\n";
      for (const auto& rec : sr.traces[rep].records) {
        os << rec.t << ',' << format_double(rec.beta) << ',' << rec.query.x << ',' << rec.query.w << ','
           << format_double(rec.y) << ',' << rec.x_hat << ',' << format_double(rec.regret) << ','
           << format_double(rec.info_gain) << '\n';
      }
      write_text_file(join_path(dir, "trace_" + name + "_" + std::to_string(rep) + ".csv"), os.str());
    }
  }
  if (result.bounds) emit_bounds_csv(*result.bounds, dir);
}

}  // namespace robustbo
