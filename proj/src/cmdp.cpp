#include "rcmdp/cmdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rcmdp {

StateActionIndex::StateActionIndex(const std::vector<std::size_t>& action_counts, const std::vector<bool>& absorbing) {
    offsets_.assign(action_counts.size() + 1, 0);
    for (StateId x = 0; x < action_counts.size(); ++x) {
        const std::size_t n = absorbing[x] ? 0 : action_counts[x];
        offsets_[x + 1] = offsets_[x] + n;
        for (ActionId a = 0; a < n; ++a) pairs_.push_back({x, a});
    }
}

std::size_t StateActionIndex::index(StateId x, ActionId a) const {
    if (x >= n_states() || a >= count(x))
        throw std::out_of_range("state-action pair (" + std::to_string(x) + "," + std::to_string(a) +
                                ") is not a non-absorbing pair");
    return offsets_[x] + a;
}

CmdpModel::CmdpModel(std::size_t n_states, std::vector<StateId> absorbing, std::vector<std::vector<Action>> actions,
                     std::vector<double> thresholds, std::vector<double> beta)
    : n_states_(n_states),
      absorbing_(std::move(absorbing)),
      absorbing_mask_(n_states, false),
      actions_(std::move(actions)),
      thresholds_(std::move(thresholds)),
      beta_(std::move(beta)) {
    if (actions_.size() != n_states_)
        throw std::invalid_argument("CmdpModel: expected one action list per state");
    if (beta_.size() != n_states_)
        throw std::invalid_argument("CmdpModel: beta must have one entry per state");
    std::sort(absorbing_.begin(), absorbing_.end());
    absorbing_.erase(std::unique(absorbing_.begin(), absorbing_.end()), absorbing_.end());
    for (StateId y : absorbing_) {
        if (y >= n_states_) throw std::invalid_argument("CmdpModel: absorbing state out of range");
        absorbing_mask_[y] = true;
    }
    std::vector<std::size_t> counts(n_states_);
    for (StateId x = 0; x < n_states_; ++x) {
        counts[x] = actions_[x].size();
        if (!absorbing_mask_[x]) transient_.push_back(x);
        for (const Action& act : actions_[x]) {
            if (act.constraint_costs.size() != thresholds_.size())
                throw std::invalid_argument("CmdpModel: state " + std::to_string(x) +
                                            " has an action with the wrong number of constraint costs");
            for (const Transition& t : act.transitions)
                if (t.to >= n_states_)
                    throw std::invalid_argument("CmdpModel: transition target out of range in state " +
                                                std::to_string(x));
        }
    }
    index_ = std::make_shared<const StateActionIndex>(counts, absorbing_mask_);
}

StateActionTable<double> CmdpModel::constraint_cost_table(std::size_t i) const {
    StateActionTable<double> table(index_);
    for (std::size_t k = 0; k < index_->size(); ++k) table[k] = action(index_->pair(k)).constraint_costs.at(i);
    return table;
}

CmdpModel CmdpModel::with_constraint_costs(std::size_t i, const StateActionTable<double>& costs) const {
    if (!(costs.index() == *index_)) throw std::invalid_argument("with_constraint_costs: table belongs to another model");
    auto actions = actions_;
    for (std::size_t k = 0; k < index_->size(); ++k) {
        auto p = index_->pair(k);
        actions[p.state][p.action].constraint_costs.at(i) = costs[k];
    }
    return CmdpModel(n_states_, absorbing_, std::move(actions), thresholds_, beta_);
}

CmdpModel CmdpModel::with_thresholds(std::vector<double> thresholds) const {
    if (thresholds.size() != thresholds_.size()) throw std::invalid_argument("with_thresholds: wrong constraint count");
    return CmdpModel(n_states_, absorbing_, actions_, std::move(thresholds), beta_);
}

const char* to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::row_not_stochastic: return "row_not_stochastic";
        case IssueKind::probability_out_of_range: return "probability_out_of_range";
        case IssueKind::negative_cost: return "negative_cost";
        case IssueKind::cost_on_absorbing: return "cost_on_absorbing";
        case IssueKind::beta_on_absorbing: return "beta_on_absorbing";
        case IssueKind::beta_not_distribution: return "beta_not_distribution";
        case IssueKind::leaves_absorbing_set: return "leaves_absorbing_set";
        case IssueKind::no_actions: return "no_actions";
        case IssueKind::not_transient: return "not_transient";
    }
    return "unknown";
}

bool ValidationReport::has(IssueKind kind) const {
    return std::any_of(issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.kind == kind; });
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (const auto& issue : issues) out << to_string(issue.kind) << ": " << issue.message << '\n';
    return out.str();
}

ValidationReport validate_model(const CmdpModel& model) {
    ValidationReport report;
    auto add = [&](IssueKind kind, std::string msg) { report.issues.push_back({kind, std::move(msg)}); };
    bool rows_ok = true;

    for (StateId x = 0; x < model.n_states(); ++x) {
        const auto acts = model.actions(x);
        const std::string where = "state " + std::to_string(x);
        if (acts.empty()) {
            add(IssueKind::no_actions, where + " has no actions");
            rows_ok = false;
        }
        for (ActionId a = 0; a < acts.size(); ++a) {
            const Action& act = acts[a];
            const std::string at = where + " action " + std::to_string(a);
            double sum = 0.0;
            for (const Transition& t : act.transitions) {
                if (!(t.probability >= 0.0 && t.probability <= 1.0)) {
                    add(IssueKind::probability_out_of_range, at + " has probability outside [0,1]");
                    rows_ok = false;
                }
                sum += t.probability;
                if (model.is_absorbing(x) && !model.is_absorbing(t.to) && t.probability > 0.0)
                    add(IssueKind::leaves_absorbing_set, at + " leaves the absorbing set");
            }
            if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
                add(IssueKind::row_not_stochastic, at + " transition row sums to " + std::to_string(sum));
                rows_ok = false;
            }
            if (!(act.cost >= 0.0)) add(IssueKind::negative_cost, at + " has negative objective cost");
            for (double d : act.constraint_costs)
                if (!(d >= 0.0)) add(IssueKind::negative_cost, at + " has negative constraint cost");
            if (model.is_absorbing(x)) {
                bool nonzero = act.cost != 0.0;
                for (double d : act.constraint_costs) nonzero = nonzero || d != 0.0;
                if (nonzero) add(IssueKind::cost_on_absorbing, at + " is absorbing but has nonzero cost");
            }
        }
    }

    double beta_sum = 0.0;
    bool beta_ok = true;
    for (StateId x = 0; x < model.n_states(); ++x) {
        const double b = model.beta()[x];
        if (!(b >= 0.0 && b <= 1.0)) beta_ok = false;
        beta_sum += b;
        if (model.is_absorbing(x) && b != 0.0)
            add(IssueKind::beta_on_absorbing, "beta(" + std::to_string(x) + ") is positive on an absorbing state");
    }
    if (!beta_ok || !(std::abs(beta_sum - 1.0) <= kProbabilityTolerance))
        add(IssueKind::beta_not_distribution, "beta is not a probability distribution");

    if (rows_ok) {
        for (const auto& comp : end_components_outside_absorbing(model)) {
            std::string states;
            for (StateId s : comp) states += (states.empty() ? "" : ",") + std::to_string(s);
            add(IssueKind::not_transient, "end component outside M on states {" + states + "}");
        }
    }
    return report;
}

CmdpModel renormalized(const CmdpModel& model) {
    std::vector<std::vector<Action>> actions(model.n_states());
    for (StateId x = 0; x < model.n_states(); ++x) {
        for (const Action& act : model.actions(x)) {
            Action copy = act;
            double sum = 0.0;
            for (const auto& t : copy.transitions) sum += t.probability;
            if (sum > 0.0)
                for (auto& t : copy.transitions) t.probability /= sum;
            actions[x].push_back(std::move(copy));
        }
    }
    return CmdpModel(model.n_states(), model.absorbing(), std::move(actions), model.thresholds(), model.beta());
}

std::vector<StateId> RandomizedPolicy::randomized_states(double threshold) const {
    std::vector<StateId> out;
    for (StateId x = 0; x < probabilities_.size(); ++x) {
        const auto n = std::count_if(probabilities_[x].begin(), probabilities_[x].end(),
                                     [&](double p) { return p > threshold; });
        if (n > 1) out.push_back(x);
    }
    return out;
}

RandomizedPolicy occupation_to_policy(const CmdpModel& model, const StateActionTable<double>& rho) {
    if (!(rho.index() == model.pairs())) throw std::invalid_argument("occupation_to_policy: table belongs to another model");
    for (double r : rho.values())
        if (!(r >= 0.0)) throw std::invalid_argument("occupation_to_policy: occupation measure has a negative entry");

    std::vector<std::vector<double>> probs(model.n_states());
    for (StateId x : model.transient_states()) {
        const std::size_t n = model.pairs().count(x);
        auto& p = probs[x];
        p.assign(n, 0.0);
        double total = 0.0;
        for (ActionId a = 0; a < n; ++a) total += rho(x, a);
        if (total > 0.0) {
            for (ActionId a = 0; a < n; ++a) p[a] = rho(x, a) / total;
        } else if (n > 0) {
            std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(n));
        }
    }
    return RandomizedPolicy(std::move(probs));
}

}  // namespace rcmdp
