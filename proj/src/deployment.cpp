#include "rcmdp/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rcmdp::deploy {

std::size_t DeploymentMap::vertex_index(VertexId v) const {
    const auto it = std::find(vertices.begin(), vertices.end(), v);
    if (it == vertices.end()) throw std::out_of_range("unknown vertex id " + std::to_string(v));
    return static_cast<std::size_t>(it - vertices.begin());
}

bool DeploymentMap::is_target(VertexId v) const { return std::find(targets.begin(), targets.end(), v) != targets.end(); }

std::size_t speed_levels(double t_min, double t_max, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("speed_levels: delta must be > 0");
    const double steps = std::floor((t_max - t_min) / delta + 1e-9);
    return static_cast<std::size_t>(std::max(0.0, steps)) + 1;
}

void validate_map(const DeploymentMap& map) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("deployment map: " + msg); };
    if (map.vertices.empty()) fail("no vertices");
    std::set<VertexId> ids(map.vertices.begin(), map.vertices.end());
    if (ids.size() != map.vertices.size()) fail("duplicate vertex ids");
    if (!ids.count(map.start)) fail("start vertex is not a vertex");
    if (map.targets.empty()) fail("no targets");
    std::set<VertexId> tset(map.targets.begin(), map.targets.end());
    if (tset.size() != map.targets.size()) fail("duplicate targets");
    for (VertexId t : map.targets)
        if (!ids.count(t)) fail("target " + std::to_string(t) + " is not a vertex");
    if (tset.count(map.start)) fail("start vertex must not be a target");
    if (!(map.delta > 0.0) || !std::isfinite(map.delta)) fail("delta must be positive");
    if (!(map.eps_factor >= 0.0)) fail("eps_factor must be >= 0");
    if (!(map.target_loop_time > 0.0)) fail("target_loop_time must be > 0");

    std::vector<std::vector<std::size_t>> adjacency(map.vertices.size());
    for (const Edge& e : map.edges) {
        const std::string name = "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
        if (!ids.count(e.u) || !ids.count(e.v)) fail(name + " has an unknown endpoint");
        if (!(e.t_min >= 0.0) || !std::isfinite(e.t_max) || !(e.t_max > e.t_min))
            fail(name + " needs 0 <= t_min < t_max");
        if (e.steepness && !(*e.steepness > 0.0)) fail(name + " needs steepness > 0");
        if (e.eps_factor && !(*e.eps_factor >= 0.0)) fail(name + " needs eps_factor >= 0");
        if (e.u == e.v) {
            if (!tset.count(e.u)) fail(name + " is a self-loop on a non-target vertex");
            continue;
        }
        const auto a = map.vertex_index(e.u), b = map.vertex_index(e.v);
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    for (std::size_t i = 0; i < map.vertices.size(); ++i)
        if (adjacency[i].empty() && !tset.count(map.vertices[i]))
            fail("vertex " + std::to_string(map.vertices[i]) + " has no edges");

    std::vector<bool> seen(map.vertices.size(), false);
    std::vector<std::size_t> stack{map.vertex_index(map.start)};
    seen[stack.back()] = true;
    while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        for (auto y : adjacency[x])
            if (!seen[y]) {
                seen[y] = true;
                stack.push_back(y);
            }
    }
    for (VertexId t : map.targets)
        if (!seen[map.vertex_index(t)]) fail("target " + std::to_string(t) + " is unreachable from the start vertex");
}

namespace {

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

SingleRobotModel build_single_robot_rcmdp(const DeploymentMap& map, VertexId target, double deadline) {
    validate_map(map);
    if (!map.is_target(target)) throw std::invalid_argument("build_single_robot_rcmdp: vertex is not a target");
    const std::size_t n_vertices = map.vertices.size();
    const StateId sink = n_vertices;
    const StateId target_state = map.vertex_index(target);

    double loop_time = map.target_loop_time;
    for (const Edge& e : map.edges)
        if (e.u == target && e.v == target) loop_time = e.t_min;

    std::vector<std::vector<Action>> actions(n_vertices + 1);
    std::vector<std::vector<MoveAction>> moves(n_vertices + 1);
    std::vector<std::vector<double>> eps(n_vertices + 1);

    for (const Edge& e : map.edges) {
        if (e.u == e.v) continue;
        const SafetyFunction f = e.safety();
        const double factor = e.eps_factor.value_or(map.eps_factor);
        const std::size_t levels = speed_levels(e.t_min, e.t_max, map.delta);
        for (const auto& [from, to] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
            const StateId x = map.vertex_index(from);
            if (x == target_state) continue;
            const StateId y = map.vertex_index(to);
            for (std::size_t k = 0; k < levels; ++k) {
                const double t = e.t_min + static_cast<double>(k) * map.delta;
                const double s = eval_safety(f, t);
                Action act;
                act.cost = 0.0;
                act.constraint_costs = {t};
                if (s > 0.0) act.transitions.push_back({y, s});
                if (1.0 - s > 0.0) act.transitions.push_back({sink, 1.0 - s});
                act.label = "to=" + std::to_string(to) + " t=" + format_double(t);
                actions[x].push_back(std::move(act));
                moves[x].push_back({from, to, t, s});
                eps[x].push_back(factor * t);
            }
        }
    }
    // Movement actions are grouped per state in edge order; the pair index is state-major.
    Action loop;
    loop.constraint_costs = {0.0};
    loop.transitions = {{target_state, 1.0}};
    loop.label = "loop t=" + format_double(loop_time);
    actions[target_state] = {loop};
    moves[target_state].clear();
    eps[target_state].clear();

    Action fail;
    fail.cost = 1.0;
    fail.constraint_costs = {0.0};
    fail.transitions = {{target_state, 1.0}};
    fail.label = "sink";
    actions[sink] = {fail};
    moves[sink] = {{target, target, 0.0, 1.0}};
    eps[sink] = {0.0};

    std::vector<double> beta(n_vertices + 1, 0.0);
    beta[map.vertex_index(map.start)] = 1.0;

    CmdpModel model(n_vertices + 1, {target_state}, std::move(actions), {deadline}, std::move(beta));
    const auto report = validate_model(model);
    if (!report.ok()) throw std::invalid_argument("deployment model failed validation:\n" + report.summary());

    std::vector<double> eps_flat;
    std::vector<MoveAction> move_flat;
    for (StateId x = 0; x <= n_vertices; ++x) {
        if (x == target_state) continue;
        eps_flat.insert(eps_flat.end(), eps[x].begin(), eps[x].end());
        move_flat.insert(move_flat.end(), moves[x].begin(), moves[x].end());
    }
    UncertaintySet u{StateActionTable<double>(model.pairs_ptr(), std::move(eps_flat)), 0.0};
    const StateActionPair sink_pair{sink, 0};
    return SingleRobotModel{std::move(model), std::move(u), sink_pair, sink, target_state, target, std::move(move_flat)};
}

double success_probability(std::span<const double> pf, std::span<const int> robots_per_target) {
    if (pf.size() != robots_per_target.size()) throw std::invalid_argument("success_probability: size mismatch");
    double phi = 1.0;
    for (std::size_t j = 0; j < pf.size(); ++j) {
        if (!(pf[j] >= 0.0 && pf[j] <= 1.0)) throw std::invalid_argument("success_probability: PF outside [0,1]");
        if (robots_per_target[j] < 0) throw std::invalid_argument("success_probability: negative robot count");
        if (robots_per_target[j] == 0) return 0.0;
        phi *= 1.0 - std::pow(pf[j], robots_per_target[j]);
    }
    return phi;
}

double expected_uniform_success(std::span<const double> pf, int team_size) {
    const std::size_t n = pf.size();
    if (n == 0 || n > 24) throw std::invalid_argument("expected_uniform_success: need 1..24 targets");
    if (team_size < 0) throw std::invalid_argument("expected_uniform_success: negative team size");
    // E[prod_j (1 - pf_j^{c_j})] = sum_S (-1)^|S| E[prod_{j in S} pf_j^{c_j}], and each robot
    // independently contributes pf_j for its target j in S and 1 otherwise.
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double per_robot = 0.0;
        int size = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask >> j & 1U) {
                per_robot += pf[j];
                ++size;
            } else {
                per_robot += 1.0;
            }
        }
        const double term = std::pow(per_robot / static_cast<double>(n), team_size);
        total += (size % 2 == 0) ? term : -term;
    }
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace rcmdp::deploy
