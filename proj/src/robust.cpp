#include "rcmdp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rcmdp {

double UncertaintySet::total_bound() const {
    double s = 0.0;
    for (double e : eps_bar.values()) s += e;
    return s;
}

void UncertaintySet::validate() const {
    for (double e : eps_bar.values())
        if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("UncertaintySet: eps_bar must be finite and >= 0");
    const double total = total_bound();
    if (!(gamma >= 0.0) || gamma > total * (1.0 + 1e-12) + 1e-300)
        throw std::invalid_argument("UncertaintySet: gamma must lie in [0, sum eps_bar]");
}

UncertaintySet UncertaintySet::with_factor(StateActionTable<double> eps_bar, double factor) {
    if (!(factor >= 0.0 && factor <= 1.0)) throw std::invalid_argument("uncertainty factor must lie in [0, 1]");
    UncertaintySet u{std::move(eps_bar), 0.0};
    u.gamma = factor * u.total_bound();
    return u;
}

UncertaintySet UncertaintySet::none(const CmdpModel& model) {
    return UncertaintySet{StateActionTable<double>(model.pairs_ptr(), 0.0), 0.0};
}

InnerMaxResult inner_max_oracle(const StateActionTable<double>& rho, const UncertaintySet& u) {
    if (!(rho.index() == u.eps_bar.index())) throw std::invalid_argument("inner_max_oracle: tables index different models");
    const std::size_t n = rho.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });

    InnerMaxResult out{0.0, StateActionTable<double>(rho.index_ptr(), 0.0)};
    double budget = u.gamma;
    for (std::size_t k : order) {
        if (budget <= 0.0) break;
        const double take = std::min(u.eps_bar[k], budget);
        out.eps_star[k] = take;
        budget -= take;
        out.value += rho[k] * take;
    }
    return out;
}

Opt2Program build_opt2(const CmdpModel& model, std::span<const UncertaintySet> sets, std::span<const double> thresholds) {
    const std::size_t L = model.n_constraints();
    if (sets.size() != L || thresholds.size() != L)
        throw std::invalid_argument("build_opt2: need one uncertainty set and threshold per constraint");
    for (double D : thresholds)
        if (!(D >= 0.0) || !std::isfinite(D)) throw std::invalid_argument("build_opt2: threshold must be finite and >= 0");
    for (const auto& u : sets) {
        if (!(u.eps_bar.index() == model.pairs())) throw std::invalid_argument("build_opt2: uncertainty set indexes another model");
        u.validate();
    }

    const auto& idx = model.pairs();
    Opt2Program prog;
    Opt2Layout& lay = prog.layout;
    lay.n_pairs = idx.size();
    lay.n_constraints = L;
    lay.n_flow_rows = model.transient_states().size();
    lp::LinearProgram& lp = prog.lp;
    lp = lp::LinearProgram(lay.n_variables());

    for (std::size_t k = 0; k < lay.n_pairs; ++k) lp.objective[lay.rho(k)] = model.action(idx.pair(k)).cost;

    std::vector<long> flow_row(model.n_states(), -1);
    for (std::size_t r = 0; r < model.transient_states().size(); ++r) flow_row[model.transient_states()[r]] = static_cast<long>(r);
    std::vector<lp::Row> flow(lay.n_flow_rows, lp::Row(lay.n_variables(), 0.0));
    for (std::size_t k = 0; k < lay.n_pairs; ++k) {
        const auto p = idx.pair(k);
        flow[static_cast<std::size_t>(flow_row[p.state])][lay.rho(k)] += 1.0;
        for (const Transition& t : model.action(p).transitions)
            if (flow_row[t.to] >= 0) flow[static_cast<std::size_t>(flow_row[t.to])][lay.rho(k)] -= t.probability;
    }
    for (std::size_t r = 0; r < lay.n_flow_rows; ++r) {
        const StateId x = model.transient_states()[r];
        lp.add_eq(std::move(flow[r]), model.beta()[x], "flow_" + std::to_string(x));
    }

    for (std::size_t i = 0; i < L; ++i) {
        lp::Row budget(lay.n_variables(), 0.0);
        for (std::size_t k = 0; k < lay.n_pairs; ++k) {
            budget[lay.rho(k)] = model.action(idx.pair(k)).constraint_costs[i];
            budget[lay.lambda(i, k)] = sets[i].eps_bar[k];
        }
        budget[lay.mu(i)] = sets[i].gamma;
        lp.add_le(std::move(budget), thresholds[i], "budget_" + std::to_string(i));
        for (std::size_t k = 0; k < lay.n_pairs; ++k) {
            lp::Row coupling(lay.n_variables(), 0.0);
            coupling[lay.rho(k)] = 1.0;
            coupling[lay.lambda(i, k)] = -1.0;
            coupling[lay.mu(i)] = -1.0;
            lp.add_le(std::move(coupling), 0.0, "couple_" + std::to_string(i) + "_" + std::to_string(k));
        }
    }
    return prog;
}

Opt2Program build_opt2(const CmdpModel& model, const UncertaintySet& u, double deadline) {
    if (model.n_constraints() != 1) throw std::invalid_argument("build_opt2: single-deadline form needs exactly one constraint");
    if (!(deadline >= 0.0)) throw std::invalid_argument("build_opt2: deadline must be >= 0");
    const double d[1] = {deadline};
    return build_opt2(model, std::span<const UncertaintySet>(&u, 1), std::span<const double>(d, 1));
}

lp::LinearProgram build_nominal_lp(const CmdpModel& model) {
    const auto& idx = model.pairs();
    const std::size_t n = idx.size();
    lp::LinearProgram lp(n);
    for (std::size_t k = 0; k < n; ++k) lp.objective[k] = model.action(idx.pair(k)).cost;
    std::vector<long> flow_row(model.n_states(), -1);
    for (std::size_t r = 0; r < model.transient_states().size(); ++r) flow_row[model.transient_states()[r]] = static_cast<long>(r);
    std::vector<lp::Row> flow(model.transient_states().size(), lp::Row(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const auto p = idx.pair(k);
        flow[static_cast<std::size_t>(flow_row[p.state])][k] += 1.0;
        for (const Transition& t : model.action(p).transitions)
            if (flow_row[t.to] >= 0) flow[static_cast<std::size_t>(flow_row[t.to])][k] -= t.probability;
    }
    for (std::size_t r = 0; r < flow.size(); ++r)
        lp.add_eq(std::move(flow[r]), model.beta()[model.transient_states()[r]]);
    for (std::size_t i = 0; i < model.n_constraints(); ++i) {
        lp::Row row(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) row[k] = model.action(idx.pair(k)).constraint_costs[i];
        lp.add_le(std::move(row), model.thresholds()[i]);
    }
    return lp;
}

namespace {

void require_valid(const CmdpModel& model) {
    const auto report = validate_model(model);
    if (!report.ok()) throw std::invalid_argument("model failed validation:\n" + report.summary());
}

double clamp_nonnegative(double v, const char* what) {
    // Values at rounding level are degenerate basics; snap them to the bound.
    if (std::abs(v) < 1e-12) return 0.0;
    if (v >= 0.0) return v;
    if (v > -1e-9) return 0.0;
    throw NumericalError(std::string("LP returned a negative ") + what);
}

SolverStats stats_of(const lp::LinearProgram& lp, const lp::LpSolution& s, const lp::Tolerances& tol) {
    SolverStats st;
    st.lp_rows = lp.eq_rows.size() + lp.le_rows.size();
    st.lp_variables = lp.n_variables();
    st.phase1_pivots = s.phase1_pivots;
    st.phase2_pivots = s.phase2_pivots;
    st.residuals = s.residuals;
    st.tolerances = tol;
    return st;
}

RobustSolution finish(const CmdpModel& model, std::span<const UncertaintySet> sets, std::span<const double> thresholds,
                      StateActionTable<double> rho, std::vector<StateActionTable<double>> lambda, std::vector<double> mu,
                      double objective, SolverStats stats) {
    RobustSolution sol;
    sol.policy = occupation_to_policy(model, rho);
    sol.objective = objective;
    sol.thresholds.assign(thresholds.begin(), thresholds.end());
    for (std::size_t i = 0; i < model.n_constraints(); ++i) {
        double nominal = 0.0;
        for (std::size_t k = 0; k < rho.size(); ++k) nominal += rho[k] * model.action(model.pairs().pair(k)).constraint_costs[i];
        auto inner = inner_max_oracle(rho, sets[i]);
        sol.nominal_constraint_value.push_back(nominal);
        sol.worst_case_constraint_value.push_back(nominal + inner.value);
        sol.eps_star.push_back(std::move(inner.eps_star));
    }
    sol.rho = std::move(rho);
    sol.lambda = std::move(lambda);
    sol.mu = std::move(mu);
    sol.stats = stats;
    return sol;
}

}  // namespace

RcmdpResult solve_rcmdp(const CmdpModel& model, std::span<const UncertaintySet> sets, std::span<const double> thresholds,
                        const lp::Tolerances& tol) {
    require_valid(model);
    const Opt2Program prog = build_opt2(model, sets, thresholds);
    const lp::LpSolution s = lp::solve(prog.lp, tol);
    RcmdpResult result;
    result.stats = stats_of(prog.lp, s, tol);
    switch (s.status) {
        case lp::Status::infeasible:
            result.status = SolveStatus::infeasible;
            return result;
        case lp::Status::unbounded:
            throw NumericalError("robust LP reported unbounded; the objective is bounded below for valid models");
        case lp::Status::numerical:
            throw NumericalError("robust LP failed: " + s.message);
        case lp::Status::optimal: break;
    }
    const Opt2Layout& lay = prog.layout;
    StateActionTable<double> rho(model.pairs_ptr());
    for (std::size_t k = 0; k < lay.n_pairs; ++k) rho[k] = clamp_nonnegative(s.x[lay.rho(k)], "occupation measure");
    std::vector<StateActionTable<double>> lambda;
    std::vector<double> mu;
    for (std::size_t i = 0; i < lay.n_constraints; ++i) {
        StateActionTable<double> l(model.pairs_ptr());
        for (std::size_t k = 0; k < lay.n_pairs; ++k) l[k] = clamp_nonnegative(s.x[lay.lambda(i, k)], "lambda");
        lambda.push_back(std::move(l));
        mu.push_back(clamp_nonnegative(s.x[lay.mu(i)], "mu"));
    }
    result.status = SolveStatus::optimal;
    result.solution = finish(model, sets, thresholds, std::move(rho), std::move(lambda), std::move(mu), s.objective, result.stats);
    return result;
}

RcmdpResult solve_rcmdp(const CmdpModel& model, const UncertaintySet& u, double deadline, const lp::Tolerances& tol) {
    if (model.n_constraints() != 1) throw std::invalid_argument("solve_rcmdp: single-deadline form needs exactly one constraint");
    if (!(deadline >= 0.0)) throw std::invalid_argument("solve_rcmdp: deadline must be >= 0");
    const double d[1] = {deadline};
    return solve_rcmdp(model, std::span<const UncertaintySet>(&u, 1), std::span<const double>(d, 1), tol);
}

RcmdpResult solve_nominal(const CmdpModel& model, const lp::Tolerances& tol) {
    require_valid(model);
    const lp::LinearProgram lp = build_nominal_lp(model);
    const lp::LpSolution s = lp::solve(lp, tol);
    RcmdpResult result;
    result.stats = stats_of(lp, s, tol);
    if (s.status == lp::Status::infeasible) {
        result.status = SolveStatus::infeasible;
        return result;
    }
    if (s.status != lp::Status::optimal) throw NumericalError("nominal LP failed: " + s.message);
    StateActionTable<double> rho(model.pairs_ptr());
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = clamp_nonnegative(s.x[k], "occupation measure");
    std::vector<UncertaintySet> none(model.n_constraints(), UncertaintySet::none(model));
    std::vector<StateActionTable<double>> lambda(model.n_constraints(), StateActionTable<double>(model.pairs_ptr(), 0.0));
    result.status = SolveStatus::optimal;
    result.solution = finish(model, none, model.thresholds(), std::move(rho), std::move(lambda),
                             std::vector<double>(model.n_constraints(), 0.0), s.objective, result.stats);
    return result;
}

double failure_probability(const RobustSolution& sol, StateActionPair sink_pair) {
    if (!sol.rho.index().contains(sink_pair)) throw std::invalid_argument("failure_probability: sink pair is not a non-absorbing pair");
    return std::clamp(sol.rho(sink_pair.state, sink_pair.action), 0.0, 1.0);
}

double minimal_robust_deadline(const CmdpModel& model, const UncertaintySet& u, const lp::Tolerances& tol) {
    require_valid(model);
    Opt2Program prog = build_opt2(model, u, 0.0);
    lp::LinearProgram& lp = prog.lp;
    const std::size_t row = prog.layout.budget_row(0);
    lp.objective = lp.le_rows[row];
    lp.le_rows.erase(lp.le_rows.begin() + static_cast<long>(row));
    lp.le_rhs.erase(lp.le_rhs.begin() + static_cast<long>(row));
    lp.le_names.erase(lp.le_names.begin() + static_cast<long>(row));
    const lp::LpSolution s = lp::solve(lp, tol);
    if (s.status != lp::Status::optimal) throw NumericalError("minimum-deadline LP failed: " + s.message);
    return s.objective;
}

}  // namespace rcmdp
