#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "robustbo/gp.hpp"
#include "robustbo/grid.hpp"
#include "robustbo/measures.hpp"
#include "robustbo/rng.hpp"

namespace robustbo {

// ---------------------------------------------------------------------------
// Randomized trade-off parameter

struct BetaSample {
  double xi = 0.0;    // chi-squared(2) draw
  double beta = 0.0;  // 2 log|X x Omega| + xi
};

/// beta = 2 log(grid_size) + xi with xi = -2 log U, U ~ Uniform(0, 1].
BetaSample sample_beta(std::size_t grid_size, Rng& rng);
BetaSample beta_from_xi(std::size_t grid_size, double xi);

// ---------------------------------------------------------------------------
// Credible field and the selection rules

struct CredibleField {
  double beta = 0.0;
  Eigen::MatrixXd lower;  // |X| x |Omega|, mean - sqrt(beta) sd
  Eigen::MatrixXd upper;  // |X| x |Omega|, mean + sqrt(beta) sd
  std::vector<BoundPair> bounds;  // lcb / ucb of the measure per design

  double width(Index x) const { return bounds[static_cast<std::size_t>(x)].ucb - bounds[static_cast<std::size_t>(x)].lcb; }
};

CredibleField credible_field(const GPosterior& state, double beta, const MeasureSpec& spec, const EnvDist& dist);

/// rho(mean(x, .)) for every design x.
std::vector<double> plug_in_measure(const GPosterior& state, const MeasureSpec& spec, const EnvDist& dist);

/// argmax_x rho(mean(x, .)); lowest index on ties.
Index estimate_solution(const GPosterior& state, const MeasureSpec& spec, const EnvDist& dist);

/// argmax_x (ucb(x) - max lcb)_+. When the clamp zeroes every candidate the
/// raw-ucb argmax is returned (same maximizer up to the constant shift).
Index optimistic_max(const CredibleField& field);

/// Pick whichever of {optimistic max, x_hat} has the wider measure interval;
/// equal widths go to the lower index.
Index select_x_proposed(const CredibleField& field, Index x_hat);

/// argmax_w posterior variance along row x.
Index select_w_simulator(const GPosterior& state, Index x);

/// Draw w from the environment pmf.
Index select_w_uncontrollable(const EnvDist& dist, Rng& rng);

enum class HatTMode { Off, Exact, MonteCarlo };

/// Position (0-based, into `history`) of the historical estimate with the
/// largest conditional expectation of F. Exact mode uses the posterior mean
/// and is only valid for the expectation measure; MonteCarlo averages rho over
/// `samples` joint posterior paths. Equal scores go to the most recent entry.
std::size_t estimate_hat_t(const GPosterior& state, const MeasureSpec& spec, const EnvDist& dist,
                           std::span<const Index> history, HatTMode mode, int samples, Rng& rng);

// ---------------------------------------------------------------------------
// Baselines

JointPoint select_random(Index design_count, const EnvDist& dist, Rng& rng);

/// Global argmax of posterior variance.
JointPoint select_us(const GPosterior& state);

/// Posterior of the pmf-weighted integral of f over Omega, per design.
struct BqPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Per-design prior term sum_{w,w'} p(w) p(w') k((x,w),(x,w')).
Eigen::VectorXd bq_prior_variance(const GPosterior& state, const EnvDist& dist);

BqPosterior bq_posterior(const GPosterior& state, const EnvDist& dist);
BqPosterior bq_posterior(const GPosterior& state, const EnvDist& dist, const Eigen::VectorXd& prior_variance);

/// sd * (z Phi(z) + phi(z)) with z = (mean - best) / sd; max(mean - best, 0) when sd == 0.
double expected_improvement(double mean, double sd, double best);

/// argmax of EI on the integrated posterior; equal EI goes to the larger mean, then lower index.
Index select_bq(const BqPosterior& posterior);
Index select_bq(const GPosterior& state, const EnvDist& dist);

enum class BetaVariant { Theory, Fixed };

double bptucb_eta(double c, std::size_t grid_size);
/// |X x Omega| pi^2 t^2 / (3 * 0.05).
double bptucb_beta(std::size_t grid_size, int t);

struct BptUcbScores {
  Eigen::VectorXd p_hat;      // per design
  Eigen::VectorXd gamma_sq;   // per design
  Eigen::VectorXd score;      // per design
  Eigen::MatrixXd spread;     // Phi(z)(1 - Phi(z)) per (x, w)
};

BptUcbScores bptucb_scores(const GPosterior& state, const EnvDist& dist, double threshold, int t, double c,
                           BetaVariant variant);
JointPoint select_bptucb(const GPosterior& state, const EnvDist& dist, double threshold, int t, double c,
                         BetaVariant variant);

/// 2 log(|X x Omega| pi^2 t^2 / (6 * 0.05)).
double bbbmobo_beta(std::size_t grid_size, int t);
inline constexpr double kFixedBeta = 9.0;

/// x_t = optimistic maximum only.
Index select_bbbmobo(const CredibleField& field);

// ---------------------------------------------------------------------------
// One optimization loop iteration

enum class Strategy { Random, US, BQ, BptUcb, BptUcbFixed, Bbbmobo, BbbmoboFixed, Proposed, ProposedFixed };
enum class Setting { Simulator, Uncontrollable };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);
std::string_view to_string(Setting s);
const std::vector<Strategy>& all_strategies();

/// Black-box evaluator: returns a (possibly noisy) observation of f at a point.
using Evaluator = std::function<double(JointPoint, Rng&)>;

/// Independent random streams of one run, all derived from one seed.
struct RunStreams {
  Rng beta;
  Rng env;
  Rng explore;
  Rng noise;
  Rng paths;

  static RunStreams from_seed(std::uint64_t seed);
};

struct RunState {
  GPosterior posterior;
  RunStreams streams;
  std::vector<Index> x_hat_history;
  Eigen::VectorXd bq_prior;  // lazily filled for BQ
};

struct IterationContext {
  const MeasureSpec* measure = nullptr;
  const EnvDist* dist = nullptr;
  Setting setting = Setting::Simulator;
  Strategy strategy = Strategy::Proposed;
  double threshold = 0.0;  // BPT-UCB level h
  double bpt_c = 1.0;
  HatTMode hat_t_mode = HatTMode::Off;
  int hat_t_samples = 256;
  const std::vector<double>* truth = nullptr;  // F(x) when known
  Index x_star = 0;
};

struct TraceRecord {
  int t = 0;
  double beta = 0.0;  // NaN when the strategy has no trade-off parameter
  JointPoint query;
  double y = 0.0;
  Index x_hat = 0;
  double f_hat = 0.0;   // F(x_hat), NaN when truth unknown
  double regret = 0.0;  // NaN when truth unknown
  double info_gain = 0.0;
  double seconds = 0.0;
  int hat_t = 0;        // 1-based, 0 when not computed
};

struct RunTrace {
  std::vector<TraceRecord> records;
};

/// The pre-loop observation: uniform over X x Omega (simulator) or uniform x
/// with w ~ pmf (uncontrollable).
JointPoint initial_point(Index design_count, const EnvDist& dist, Setting setting, Rng& rng);

/// Executes one loop body in order: trade-off parameter, credible field,
/// x_hat, x selection, w selection, observation, GP update.
TraceRecord run_iteration(RunState& run, const IterationContext& ctx, int t, const Evaluator& oracle);

}  // namespace robustbo
