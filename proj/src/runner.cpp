#include <chrono>
#include <cmath>
#include <limits>

#include "robustbo/errors.hpp"
#include "robustbo/policy.hpp"

namespace robustbo {

namespace {

struct StrategyName {
  Strategy strategy;
  std::string_view name;
};

constexpr StrategyName kNames[] = {
    {Strategy::Random, "random"},         {Strategy::US, "us"},
    {Strategy::BQ, "bq"},                 {Strategy::BptUcb, "bptucb"},
    {Strategy::BptUcbFixed, "bptucb-fixed"}, {Strategy::Bbbmobo, "bbbmobo"},
    {Strategy::BbbmoboFixed, "bbbmobo-fixed"}, {Strategy::Proposed, "proposed"},
    {Strategy::ProposedFixed, "proposed-fixed"},
};

Index pick_w(const RunState& run, const IterationContext& ctx, Index x, Rng& env) {
  if (ctx.setting == Setting::Uncontrollable) return select_w_uncontrollable(*ctx.dist, env);
  return select_w_simulator(run.posterior, x);
}

}  // namespace

std::string_view to_string(Strategy s) {
  for (const auto& entry : kNames) {
    if (entry.strategy == s) return entry.name;
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.strategy;
  }
  return std::nullopt;
}

std::string_view to_string(Setting s) { return s == Setting::Simulator ? "simulator" : "uncontrollable"; }

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = [] {
    std::vector<Strategy> v;
    for (const auto& entry : kNames) v.push_back(entry.strategy);
    return v;
  }();
  return all;
}

RunStreams RunStreams::from_seed(std::uint64_t seed) {
  return {Rng::derive(seed, 1), Rng::derive(seed, 2), Rng::derive(seed, 3), Rng::derive(seed, 4),
          Rng::derive(seed, 5)};
}

JointPoint initial_point(Index design_count, const EnvDist& dist, Setting setting, Rng& rng) {
  if (design_count < 1 || dist.size() < 1) throw_invalid("initial_point: empty grid");
  const auto x = static_cast<Index>(rng.index(static_cast<std::uint64_t>(design_count)));
  const Index w = setting == Setting::Simulator ? static_cast<Index>(rng.index(dist.size()))
                                                : static_cast<Index>(rng.categorical(dist.pmf()));
  return {x, w};
}

TraceRecord run_iteration(RunState& run, const IterationContext& ctx, int t, const Evaluator& oracle) {
  if (ctx.measure == nullptr || ctx.dist == nullptr) throw_invalid("run_iteration: measure and pmf are required");
  if (t < 1) throw_invalid("run_iteration: t must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const MeasureSpec& spec = *ctx.measure;
  const EnvDist& dist = *ctx.dist;
  GPosterior& gp = run.posterior;
  const auto grid_size = static_cast<std::size_t>(gp.size());

  TraceRecord rec;
  rec.t = t;
  rec.beta = std::numeric_limits<double>::quiet_NaN();

  // The estimated solution is computed for every strategy so regret is comparable.
  rec.x_hat = estimate_solution(gp, spec, dist);

  switch (ctx.strategy) {
    case Strategy::Proposed:
    case Strategy::ProposedFixed: {
      rec.beta = ctx.strategy == Strategy::Proposed ? sample_beta(grid_size, run.streams.beta).beta : kFixedBeta;
      const CredibleField field = credible_field(gp, rec.beta, spec, dist);
      rec.query.x = select_x_proposed(field, rec.x_hat);
      rec.query.w = pick_w(run, ctx, rec.query.x, run.streams.env);
      break;
    }
    case Strategy::Bbbmobo:
    case Strategy::BbbmoboFixed: {
      rec.beta = ctx.strategy == Strategy::Bbbmobo ? bbbmobo_beta(grid_size, t) : kFixedBeta;
      const CredibleField field = credible_field(gp, rec.beta, spec, dist);
      rec.query.x = select_bbbmobo(field);
      rec.query.w = pick_w(run, ctx, rec.query.x, run.streams.env);
      break;
    }
    case Strategy::Random:
      rec.query = select_random(gp.design_count(), dist, run.streams.explore);
      break;
    case Strategy::US:
      rec.query = select_us(gp);
      if (ctx.setting == Setting::Uncontrollable) rec.query.w = select_w_uncontrollable(dist, run.streams.env);
      break;
    case Strategy::BQ: {
      if (run.bq_prior.size() != gp.design_count()) run.bq_prior = bq_prior_variance(gp, dist);
      rec.query.x = select_bq(bq_posterior(gp, dist, run.bq_prior));
      rec.query.w = pick_w(run, ctx, rec.query.x, run.streams.env);
      break;
    }
    case Strategy::BptUcb:
    case Strategy::BptUcbFixed: {
      const auto variant = ctx.strategy == Strategy::BptUcb ? BetaVariant::Theory : BetaVariant::Fixed;
      if (variant == BetaVariant::Theory) rec.beta = bptucb_beta(grid_size, t);
      rec.query = select_bptucb(gp, dist, ctx.threshold, t, ctx.bpt_c, variant);
      if (ctx.setting == Setting::Uncontrollable) rec.query.w = select_w_uncontrollable(dist, run.streams.env);
      break;
    }
  }

  run.x_hat_history.push_back(rec.x_hat);
  if (ctx.hat_t_mode != HatTMode::Off) {
    rec.hat_t = static_cast<int>(estimate_hat_t(gp, spec, dist, run.x_hat_history, ctx.hat_t_mode,
                                                ctx.hat_t_samples, run.streams.paths)) + 1;
  }

  rec.y = oracle(rec.query, run.streams.noise);
  if (!std::isfinite(rec.y)) throw_numerical("run_iteration: evaluator returned a non-finite value");
  gp.update(rec.query, rec.y);
  rec.info_gain = gp.realized_info_gain();

  if (ctx.truth != nullptr) {
    const auto& truth = *ctx.truth;
    rec.f_hat = truth[static_cast<std::size_t>(rec.x_hat)];
    rec.regret = truth[static_cast<std::size_t>(ctx.x_star)] - rec.f_hat;
  } else {
    rec.f_hat = std::numeric_limits<double>::quiet_NaN();
    rec.regret = std::numeric_limits<double>::quiet_NaN();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace robustbo
