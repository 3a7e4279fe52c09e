#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rcmdp::assign {

/// Raised when a team cannot cover the targets (K < |T| or some PF = 1).
class InfeasibleAssignment : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Target assignment instance with PF strictly inside (0,1) and K >= |T|.
class TaInstance {
public:
    TaInstance(std::vector<double> pf, int team_size);

    const std::vector<double>& pf() const { return pf_; }
    std::size_t n_targets() const { return pf_.size(); }
    int team_size() const { return team_size_; }
    /// K - |T|: robots left after the mandatory one per target.
    int extra_robots() const { return team_size_ - static_cast<int>(pf_.size()); }

private:
    std::vector<double> pf_;
    int team_size_;
};

enum class Method { exact, approx, brute };

const char* to_string(Method m);

struct TaSolution {
    std::vector<int> extra;  ///< k_j, robots beyond the mandatory one
    double objective = 0.0;  ///< prod_j (1 - PF_j^{k_j+1})
    Method method = Method::exact;

    /// Robots per target, k_j + 1.
    std::vector<int> robots() const;
};

/// prod_j (1 - pf_j^{k_j + 1}).
double ta_objective(std::span<const double> pf, std::span<const int> extra);
/// sum_j log(1 - pf_j^{k_j + 1}) for real k_j > -1.
double relaxed_log_objective(std::span<const double> pf, std::span<const double> k);

struct RelaxedSolution {
    std::vector<double> k_star;
    double lambda_star = 0.0;
    double feasibility_residual = 0.0;  ///< |sum k* - total|
    std::size_t iterations = 0;
};

/**
 * Continuous concave relaxation  max sum log(1 - pf_j^{k_j+1})  s.t. sum k_j = total,
 * k_j > -1, solved through the stationarity condition
 *
 *     lambda = pf^{k+1} log pf / (1 - pf^{k+1}),
 *     k(lambda) = log(lambda / (lambda + log pf)) / log pf - 1,
 *
 * with lambda < 0 found by bisection on log(-lambda). The bracket starts at
 * [-max|log pf| C, -1e-18], doubling C (or shrinking the upper end toward 0)
 * until sum k changes sign around `total`. Requires total > -|T|.
 */
RelaxedSolution solve_relaxed(std::span<const double> pf, double total);

/// k_j(lambda) in closed form.
double k_of_lambda(double pf, double lambda);
/// lambda as a function of k (the stationarity condition).
double lambda_of_k(double pf, double k);

/// Relaxation with total K - 2|T|; needs K >= 2|T|.
RelaxedSolution solve_rta(const TaInstance& inst);

/**
 * Rounds the relaxed solution: k_j = ceil(k*_j) + r_j, where the remainder
 * K - |T| - sum ceil(k*_j) goes one robot at a time to the target with the
 * largest marginal gain log(1 - pf^{k+2}) - log(1 - pf^{k+1}), ties to the
 * lowest index.
 */
TaSolution round_rta(const TaInstance& inst, std::span<const double> k_star);

/// Relaxation followed by rounding (needs K >= 2|T|).
TaSolution solve_ta_approx(const TaInstance& inst);

/// Best-bound-first branch and bound over integer allocations, bounded by
/// the relaxation restricted to the targets not fixed yet.
TaSolution solve_ta_exact(const TaInstance& inst, std::size_t node_limit = 10'000'000);

/// Maximum number of allocations brute_force_ta accepts.
inline constexpr double kBruteForceLimit = 1e6;
/// Number of allocations of `extra` robots over `targets` targets.
double allocation_count(int extra, std::size_t targets);
/// Exhaustive enumeration; throws std::invalid_argument above kBruteForceLimit.
TaSolution brute_force_ta(const TaInstance& inst);

/// Branch and bound for |T| <= K < 2|T|, relaxation plus rounding otherwise.
TaSolution solve_ta(const TaInstance& inst);

/**
 * Handles PF at the boundary before building a TaInstance: any PF = 1 makes
 * the deployment infeasible; every PF = 0 target receives one robot and is
 * dropped from the reduced instance.
 */
struct Preprocessed {
    std::vector<std::size_t> kept;     ///< original indices of targets in the reduced instance
    std::vector<std::size_t> settled;  ///< targets with PF = 0, one robot each
    std::vector<double> reduced_pf;
    int reduced_team = 0;
};
Preprocessed preprocess(std::span<const double> pf, int team_size);

/// Full pipeline on raw PF values: preprocessing, then solve_ta on the reduced
/// instance. Returns robots per original target.
std::vector<int> assign_robots(std::span<const double> pf, int team_size);

}  // namespace rcmdp::assign
