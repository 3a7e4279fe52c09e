#pragma once

#include "rcmdp/cmdp.hpp"
#include "rcmdp/random.hpp"
#include "rcmdp/robust.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rcmdp::sim {

/// How the constraint-cost perturbation eps is realized in rollouts.
enum class EpsMode {
    nominal,     ///< eps = 0
    worst_case,  ///< eps = eps* from the inner maximization
    sampled,     ///< eps drawn uniformly from U once per trial
};

const char* to_string(EpsMode mode);
/// Parses "nominal", "worst_case"/"worst-case" or "sampled"; throws std::invalid_argument.
EpsMode parse_eps_mode(const std::string& text);

/// Everything needed to roll out one robot.
struct RobotPlan {
    const CmdpModel* model = nullptr;
    const RandomizedPolicy* policy = nullptr;
    StateActionPair sink_pair;
    /// Required for EpsMode::sampled.
    const UncertaintySet* uncertainty = nullptr;
    /// Required for EpsMode::worst_case.
    const StateActionTable<double>* eps_star = nullptr;
};

struct TrialResult {
    bool success = false;
    double duration = 0.0;
    std::vector<StateActionPair> path;
};

struct SimStats {
    std::size_t n_trials = 0;
    std::size_t n_success = 0;
    double empirical_success_prob = 0.0;
    double success_standard_error = 0.0;  ///< sqrt(p(1-p)/n)
    double mean_duration = 0.0;
    double std_duration = 0.0;
    std::optional<double> mean_duration_given_success;
    std::optional<double> std_duration_given_success;
    /// |empirical PF - theoretical PF| / theoretical PF, when a theory value is given.
    std::optional<double> convergence_error;
    std::optional<double> kl_divergence;
};

struct SingleRunOptions {
    EpsMode eps_mode = EpsMode::nominal;
    std::uint64_t seed = 1;
    std::size_t n_trials = 1000;
    /// Theoretical failure probability rho(sink, a_sink) for the error metrics.
    std::optional<double> theoretical_pf;
    bool keep_paths = false;
    std::size_t max_steps = 10'000'000;
    /// Rejection attempts per trial before EpsMode::sampled gives up.
    std::size_t max_rejections = 100'000;
    /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
};

struct SingleRun {
    SimStats stats;
    std::vector<TrialResult> trials;
};

/**
 * Independent rollouts of one robot. Trial i draws from the counter-based
 * substream substream_key(seed, i), so results do not depend on how trials
 * are scheduled. A trial ends on entering the absorbing set (success) or
 * the sink state (failure); each action adds d(x,a) + eps(x,a) to the
 * duration, so a failed trial includes the time of the edge it failed on.
 *
 * Throws std::invalid_argument for a non-transient model, an invalid policy
 * or a missing eps source.
 */
SingleRun run_single(const RobotPlan& plan, const SingleRunOptions& options);

/**
 * Draws eps uniformly from U by rejection. The proposal is whichever superset
 * of U has the smaller volume: the box [0, eps_bar] or the corner simplex
 * {eps >= 0, sum eps <= gamma}; pairs with eps_bar = 0 stay at 0. Throws
 * std::runtime_error after `max_attempts` rejections.
 */
StateActionTable<double> sample_uncertainty(const UncertaintySet& u, CounterRng& rng, std::size_t max_attempts);

/// Two-point divergence p ln(p/q) + (1-p) ln((1-p)/(1-q)), with p and q
/// clamped to [1e-12, 1 - 1e-12].
double kl_divergence(double p_empirical, double p_theory);

struct TeamRunOptions {
    EpsMode eps_mode = EpsMode::nominal;
    std::uint64_t seed = 1;
    std::size_t n_trials = 1000;
    /// Theoretical team success phi for the error metrics.
    std::optional<double> theoretical_success;
    std::size_t max_rejections = 100'000;
};

/**
 * Team rollouts: plans[j] is the plan of target j and robots_per_target[j]
 * robots execute it independently. A trial succeeds iff every target is
 * reached by at least one robot; its duration is the longest robot duration.
 * Robot r of trial i uses substream substream_key(substream_key(seed, i), r).
 */
SimStats run_team(std::span<const RobotPlan> plans, std::span<const int> robots_per_target, const TeamRunOptions& options);

/**
 * Team rollouts under uniform random assignment: in each trial every one of
 * `team_size` robots picks its target i.i.d. uniformly (drawn from substream
 * substream_key(trial key, 2^64 - 1)), so the success rate estimates E[phi]
 * over assignments.
 */
SimStats run_team_uniform(std::span<const RobotPlan> plans, int team_size, const TeamRunOptions& options);

/// CSV trial stream: header `trial,success,duration`.
void write_trials_csv(std::ostream& out, std::span<const TrialResult> trials);

/// Shortest round-trip text for a double (std::to_chars).
std::string format_number(double v);

}  // namespace rcmdp::sim
