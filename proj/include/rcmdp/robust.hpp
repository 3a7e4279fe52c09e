#pragma once

#include "rcmdp/cmdp.hpp"
#include "rcmdp/lp.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace rcmdp {

/// Raised when the LP engine cannot certify its answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Budgeted interval uncertainty on one constraint cost:
 * U = { eps : 0 <= eps <= eps_bar, sum eps <= gamma }.
 */
struct UncertaintySet {
    StateActionTable<double> eps_bar;
    double gamma = 0.0;

    double total_bound() const;
    /// Throws std::invalid_argument unless eps_bar >= 0 and 0 <= gamma <= sum eps_bar
    /// (up to a relative 1e-12 on the upper end).
    void validate() const;

    /// gamma = factor * sum eps_bar.
    static UncertaintySet with_factor(StateActionTable<double> eps_bar, double factor);
    /// No uncertainty (gamma = 0, eps_bar = 0).
    static UncertaintySet none(const CmdpModel& model);
};

struct InnerMaxResult {
    double value = 0.0;
    StateActionTable<double> eps_star;
};

/**
 * Exact maximizer of sum rho*eps over U by the fractional-knapsack greedy:
 * pairs are visited by decreasing rho (ties by pair index), each receives
 * eps_bar until the budget runs out and the boundary pair takes the rest.
 */
InnerMaxResult inner_max_oracle(const StateActionTable<double>& rho, const UncertaintySet& u);

/// Variable and row positions inside the robust LP.
struct Opt2Layout {
    std::size_t n_pairs = 0;
    std::size_t n_constraints = 0;
    std::size_t rho(std::size_t k) const { return k; }
    std::size_t lambda(std::size_t i, std::size_t k) const { return n_pairs + i * (n_pairs + 1) + k; }
    std::size_t mu(std::size_t i) const { return n_pairs + i * (n_pairs + 1) + n_pairs; }
    std::size_t n_variables() const { return n_pairs + n_constraints * (n_pairs + 1); }
    /// Equality row of each non-absorbing state, in transient_states() order.
    std::size_t n_flow_rows = 0;
    /// Inequality rows: budget row of constraint i, then its coupling rows.
    std::size_t budget_row(std::size_t i) const { return i * (n_pairs + 1); }
    std::size_t coupling_row(std::size_t i, std::size_t k) const { return i * (n_pairs + 1) + 1 + k; }
};

struct Opt2Program {
    lp::LinearProgram lp;
    Opt2Layout layout;
};

/**
 * Builds the linear reformulation of the robust CMDP:
 *
 *   min  sum rho c
 *   s.t. sum_y sum_a rho(y,a) [delta_x(y) - P^a_yx] = beta(x)   x in X'
 *        sum rho d_i + sum eps_bar_i lambda_i + mu_i gamma_i <= D_i
 *        lambda_i(x,a) + mu_i >= rho(x,a)
 *        rho, lambda_i, mu_i >= 0
 *
 * with one uncertainty set and threshold per constraint.
 */
Opt2Program build_opt2(const CmdpModel& model, std::span<const UncertaintySet> sets, std::span<const double> thresholds);
/// Single-constraint form with deadline D (throws on D < 0).
Opt2Program build_opt2(const CmdpModel& model, const UncertaintySet& u, double deadline);

/// Nominal occupation-measure LP (no uncertainty) using the model thresholds.
lp::LinearProgram build_nominal_lp(const CmdpModel& model);

struct SolverStats {
    std::size_t lp_rows = 0;
    std::size_t lp_variables = 0;
    std::size_t phase1_pivots = 0;
    std::size_t phase2_pivots = 0;
    lp::Residuals residuals;
    lp::Tolerances tolerances;
};

struct RobustSolution {
    StateActionTable<double> rho;
    std::vector<StateActionTable<double>> lambda;  ///< per constraint
    std::vector<double> mu;                        ///< per constraint
    double objective = 0.0;
    RandomizedPolicy policy;
    std::vector<double> nominal_constraint_value;  ///< sum rho d_i
    std::vector<double> worst_case_constraint_value;
    std::vector<StateActionTable<double>> eps_star;
    std::vector<double> thresholds;
    SolverStats stats;

    double worst_case() const { return worst_case_constraint_value.at(0); }
};

enum class SolveStatus { optimal, infeasible };

struct RcmdpResult {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<RobustSolution> solution;
    SolverStats stats;

    bool feasible() const { return status == SolveStatus::optimal; }
};

/**
 * Solves the robust CMDP. The returned worst-case constraint values are
 * recomputed with inner_max_oracle on the returned rho, independently of the
 * LP's own auxiliaries. Throws NumericalError if the LP engine fails and
 * std::invalid_argument if the model is malformed.
 */
RcmdpResult solve_rcmdp(const CmdpModel& model, std::span<const UncertaintySet> sets, std::span<const double> thresholds,
                        const lp::Tolerances& tol = {});
RcmdpResult solve_rcmdp(const CmdpModel& model, const UncertaintySet& u, double deadline, const lp::Tolerances& tol = {});

/// Nominal CMDP solved through the plain occupation-measure LP.
RcmdpResult solve_nominal(const CmdpModel& model, const lp::Tolerances& tol = {});

/// rho(sink, a_sink): the probability of never reaching the target through
/// the regular edges. Throws std::invalid_argument if the pair is absent.
double failure_probability(const RobustSolution& sol, StateActionPair sink_pair);

/// Smallest deadline for which the robust problem is feasible, i.e. the
/// minimum over policies of the worst-case expected constraint cost.
double minimal_robust_deadline(const CmdpModel& model, const UncertaintySet& u, const lp::Tolerances& tol = {});

}  // namespace rcmdp
