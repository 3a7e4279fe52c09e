#include "rcmdp/cmdp.hpp"

#include <algorithm>
#include <map>

namespace rcmdp {
namespace {

// Iterative Tarjan over the graph induced by the enabled actions. Returns a
// component id per state (-1 for states outside `alive`).
std::vector<long> strongly_connected_components(const CmdpModel& model, const std::vector<bool>& alive,
                                                const std::vector<std::vector<bool>>& enabled) {
    const std::size_t n = model.n_states();
    std::vector<long> comp(n, -1), low(n, 0), order(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<StateId> stack;
    long counter = 0, n_comp = 0;

    auto successors = [&](StateId x) {
        std::vector<StateId> out;
        for (ActionId a = 0; a < enabled[x].size(); ++a) {
            if (!enabled[x][a]) continue;
            for (const auto& t : model.action(x, a).transitions)
                if (t.probability > 0.0 && alive[t.to]) out.push_back(t.to);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    struct Frame {
        StateId v;
        std::vector<StateId> succ;
        std::size_t next = 0;
    };

    for (StateId root = 0; root < n; ++root) {
        if (!alive[root] || order[root] >= 0) continue;
        std::vector<Frame> call;
        call.push_back({root, successors(root)});
        order[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next < f.succ.size()) {
                const StateId w = f.succ[f.next++];
                if (order[w] < 0) {
                    order[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, successors(w)});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], order[w]);
                }
                continue;
            }
            const StateId v = f.v;
            if (low[v] == order[v]) {
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                } while (w != v);
                ++n_comp;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return comp;
}

std::vector<bool> reachable_from_beta(const CmdpModel& model) {
    std::vector<bool> seen(model.n_states(), false);
    std::vector<StateId> frontier;
    for (StateId x = 0; x < model.n_states(); ++x)
        if (model.beta()[x] > 0.0) {
            seen[x] = true;
            frontier.push_back(x);
        }
    while (!frontier.empty()) {
        const StateId x = frontier.back();
        frontier.pop_back();
        for (const Action& act : model.actions(x))
            for (const auto& t : act.transitions)
                if (t.probability > 0.0 && !seen[t.to]) {
                    seen[t.to] = true;
                    frontier.push_back(t.to);
                }
    }
    return seen;
}

}  // namespace

std::vector<std::vector<StateId>> end_components_outside_absorbing(const CmdpModel& model) {
    const std::size_t n = model.n_states();
    std::vector<bool> alive = reachable_from_beta(model);
    for (StateId x = 0; x < n; ++x)
        if (model.is_absorbing(x)) alive[x] = false;

    std::vector<std::vector<bool>> enabled(n);
    for (StateId x = 0; x < n; ++x) enabled[x].assign(model.actions(x).size(), alive[x]);

    std::vector<long> comp(n, -1);
    bool changed = true;
    while (changed) {
        changed = false;
        // An action stays enabled only while its whole support is alive.
        for (StateId x = 0; x < n; ++x) {
            if (!alive[x]) continue;
            bool any = false;
            for (ActionId a = 0; a < enabled[x].size(); ++a) {
                if (!enabled[x][a]) continue;
                for (const auto& t : model.action(x, a).transitions)
                    if (t.probability > 0.0 && !alive[t.to]) {
                        enabled[x][a] = false;
                        changed = true;
                        break;
                    }
                any = any || enabled[x][a];
            }
            if (!any) {
                alive[x] = false;
                changed = true;
            }
        }
        if (changed) continue;

        comp = strongly_connected_components(model, alive, enabled);
        for (StateId x = 0; x < n; ++x) {
            if (!alive[x]) continue;
            for (ActionId a = 0; a < enabled[x].size(); ++a) {
                if (!enabled[x][a]) continue;
                for (const auto& t : model.action(x, a).transitions)
                    if (t.probability > 0.0 && comp[t.to] != comp[x]) {
                        enabled[x][a] = false;
                        changed = true;
                        break;
                    }
            }
        }
    }

    std::map<long, std::vector<StateId>> groups;
    for (StateId x = 0; x < n; ++x)
        if (alive[x]) groups[comp[x]].push_back(x);
    std::vector<std::vector<StateId>> out;
    for (auto& [id, states] : groups) out.push_back(std::move(states));
    std::sort(out.begin(), out.end());
    return out;
}

bool check_transience(const CmdpModel& model) { return end_components_outside_absorbing(model).empty(); }

}  // namespace rcmdp
