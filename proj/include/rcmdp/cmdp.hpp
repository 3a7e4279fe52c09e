#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcmdp {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Probability tolerance used for row sums and the distribution beta.
inline constexpr double kProbabilityTolerance = 1e-12;

struct StateActionPair {
    StateId state = 0;
    ActionId action = 0;

    friend bool operator==(const StateActionPair&, const StateActionPair&) = default;
};

struct Transition {
    StateId to = 0;
    double probability = 0.0;
};

/// One action available in a state: objective cost c(x,a), constraint costs
/// d_i(x,a) and the outgoing transition row.
struct Action {
    double cost = 0.0;
    std::vector<double> constraint_costs;
    std::vector<Transition> transitions;
    /// Free-form tag carried through serialization (the deployment builder
    /// stores the next vertex and intended traversal time here).
    std::string label;
};

/**
 * Dense indexing of the non-absorbing state-action pairs.
 *
 * Pairs are numbered state-major in increasing (StateId, ActionId) order,
 * and absorbing states contribute no pairs. The flat index is what the LP
 * variables and StateActionTable use.
 */
class StateActionIndex {
public:
    StateActionIndex() = default;
    StateActionIndex(const std::vector<std::size_t>& action_counts, const std::vector<bool>& absorbing);

    std::size_t size() const { return pairs_.size(); }
    std::size_t n_states() const { return offsets_.size() - 1; }

    /// Number of indexed actions of state x (0 for absorbing states).
    std::size_t count(StateId x) const { return offsets_[x + 1] - offsets_[x]; }
    std::size_t offset(StateId x) const { return offsets_[x]; }

    bool contains(StateActionPair p) const {
        return p.state < n_states() && p.action < count(p.state);
    }
    std::size_t index(StateId x, ActionId a) const;
    std::size_t index(StateActionPair p) const { return index(p.state, p.action); }
    StateActionPair pair(std::size_t k) const { return pairs_.at(k); }

    friend bool operator==(const StateActionIndex& a, const StateActionIndex& b) {
        return a.offsets_ == b.offsets_;
    }

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<StateActionPair> pairs_;
};

/// Flat table of values over the non-absorbing pairs of one model.
template <class V>
class StateActionTable {
public:
    StateActionTable() = default;
    explicit StateActionTable(std::shared_ptr<const StateActionIndex> index, V fill = V{})
        : index_(std::move(index)), values_(index_ ? index_->size() : 0, fill) {}
    StateActionTable(std::shared_ptr<const StateActionIndex> index, std::vector<V> values)
        : index_(std::move(index)), values_(std::move(values)) {
        if (!index_ || values_.size() != index_->size())
            throw std::invalid_argument("StateActionTable: value count does not match the pair index");
    }

    std::size_t size() const { return values_.size(); }
    const StateActionIndex& index() const { return *index_; }
    const std::shared_ptr<const StateActionIndex>& index_ptr() const { return index_; }

    V& operator[](std::size_t k) { return values_[k]; }
    const V& operator[](std::size_t k) const { return values_[k]; }
    V& operator()(StateId x, ActionId a) { return values_[index_->index(x, a)]; }
    const V& operator()(StateId x, ActionId a) const { return values_[index_->index(x, a)]; }

    std::span<V> values() { return values_; }
    std::span<const V> values() const { return values_; }

private:
    std::shared_ptr<const StateActionIndex> index_;
    std::vector<V> values_;
};

/**
 * Finite total-cost constrained MDP with an absorbing set M.
 *
 * Construction checks only shapes (sizes, index ranges); semantic
 * conditions such as stochastic rows, zero costs on M and transience are
 * reported by validate_model(). The object is immutable once built.
 */
class CmdpModel {
public:
    CmdpModel(std::size_t n_states, std::vector<StateId> absorbing, std::vector<std::vector<Action>> actions,
              std::vector<double> thresholds, std::vector<double> beta);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_constraints() const { return thresholds_.size(); }

    const std::vector<StateId>& absorbing() const { return absorbing_; }
    bool is_absorbing(StateId x) const { return absorbing_mask_[x]; }
    /// Non-absorbing states in increasing order.
    const std::vector<StateId>& transient_states() const { return transient_; }

    std::span<const Action> actions(StateId x) const { return actions_[x]; }
    const Action& action(StateId x, ActionId a) const { return actions_[x][a]; }
    const Action& action(StateActionPair p) const { return actions_[p.state][p.action]; }

    const std::vector<double>& thresholds() const { return thresholds_; }
    const std::vector<double>& beta() const { return beta_; }

    const StateActionIndex& pairs() const { return *index_; }
    const std::shared_ptr<const StateActionIndex>& pairs_ptr() const { return index_; }

    /// Constraint cost d_i over the non-absorbing pairs.
    StateActionTable<double> constraint_cost_table(std::size_t i = 0) const;

    /// Copy with every constraint cost replaced by `costs` for constraint i.
    CmdpModel with_constraint_costs(std::size_t i, const StateActionTable<double>& costs) const;
    /// Copy with the given thresholds.
    CmdpModel with_thresholds(std::vector<double> thresholds) const;

private:
    std::size_t n_states_;
    std::vector<StateId> absorbing_;
    std::vector<bool> absorbing_mask_;
    std::vector<StateId> transient_;
    std::vector<std::vector<Action>> actions_;
    std::vector<double> thresholds_;
    std::vector<double> beta_;
    std::shared_ptr<const StateActionIndex> index_;
};

enum class IssueKind {
    row_not_stochastic,
    probability_out_of_range,
    negative_cost,
    cost_on_absorbing,
    beta_on_absorbing,
    beta_not_distribution,
    leaves_absorbing_set,
    no_actions,
    not_transient,
};

const char* to_string(IssueKind kind);

struct ValidationIssue {
    IssueKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    bool has(IssueKind kind) const;
    std::string summary() const;
};

/// Lists every violated structural invariant; empty iff the model is
/// well formed and X'-transient.
ValidationReport validate_model(const CmdpModel& model);

/**
 * Maximal end components of the sub-MDP restricted to non-absorbing states
 * reachable from the support of beta. Each component is returned as its
 * sorted state set.
 */
std::vector<std::vector<StateId>> end_components_outside_absorbing(const CmdpModel& model);

/// True iff every policy reaches M with probability one from the support of
/// beta, i.e. no end component lies in X'. Requires valid transition rows.
bool check_transience(const CmdpModel& model);

/// Copy whose transition rows are rescaled to sum to one. Only called on
/// explicit request; validation never renormalizes.
CmdpModel renormalized(const CmdpModel& model);

/// Stationary randomized policy: a probability vector over A(x) for every
/// non-absorbing x; absorbing states carry an empty vector.
class RandomizedPolicy {
public:
    RandomizedPolicy() = default;
    explicit RandomizedPolicy(std::vector<std::vector<double>> probabilities)
        : probabilities_(std::move(probabilities)) {}

    std::size_t n_states() const { return probabilities_.size(); }
    std::span<const double> at(StateId x) const { return probabilities_[x]; }
    double operator()(StateId x, ActionId a) const { return probabilities_[x][a]; }

    /// States whose distribution has more than one action with positive mass.
    std::vector<StateId> randomized_states(double threshold = 1e-12) const;

    const std::vector<std::vector<double>>& raw() const { return probabilities_; }

private:
    std::vector<std::vector<double>> probabilities_;
};

/// pi(x,a) = rho(x,a) / sum_a rho(x,a); states with zero total mass get the
/// uniform distribution. Throws std::invalid_argument on a negative entry.
RandomizedPolicy occupation_to_policy(const CmdpModel& model, const StateActionTable<double>& rho);

}  // namespace rcmdp
