#include "rcmdp/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcmdp::io {

namespace {

const json& field(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    return doc.at(key);
}

template <class T>
T get(const json& doc, const char* key) {
    try {
        return field(doc, key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

json model_to_json(const CmdpModel& model) {
    json doc;
    doc["states"] = model.n_states();
    doc["absorbing"] = model.absorbing();
    doc["beta"] = model.beta();
    doc["thresholds"] = model.thresholds();
    json actions = json::array();
    for (StateId x = 0; x < model.n_states(); ++x) {
        json list = json::array();
        for (const Action& a : model.actions(x)) {
            json item;
            item["cost"] = a.cost;
            item["dcosts"] = a.constraint_costs;
            json tr = json::array();
            for (const Transition& t : a.transitions) tr.push_back(json::array({t.to, t.probability}));
            item["transitions"] = std::move(tr);
            if (!a.label.empty()) item["label"] = a.label;
            list.push_back(std::move(item));
        }
        actions.push_back(std::move(list));
    }
    doc["actions"] = std::move(actions);
    return doc;
}

CmdpModel model_from_json(const json& doc) {
    const auto n = get<std::size_t>(doc, "states");
    const json& acts = field(doc, "actions");
    if (!acts.is_array() || acts.size() != n) throw std::invalid_argument("'actions' must hold one list per state");
    std::vector<std::vector<Action>> actions(n);
    try {
        for (std::size_t x = 0; x < n; ++x)
            for (const json& item : acts[x]) {
                Action a;
                a.cost = get<double>(item, "cost");
                a.constraint_costs = get<std::vector<double>>(item, "dcosts");
                for (const json& t : field(item, "transitions")) {
                    if (!t.is_array() || t.size() != 2) throw std::invalid_argument("transition entries are [state, p]");
                    a.transitions.push_back({t[0].get<StateId>(), t[1].get<double>()});
                }
                if (item.contains("label")) a.label = item["label"].get<std::string>();
                actions[x].push_back(std::move(a));
            }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed action: ") + e.what());
    }
    std::vector<double> thresholds;
    if (doc.contains("thresholds")) thresholds = get<std::vector<double>>(doc, "thresholds");
    return CmdpModel(n, get<std::vector<StateId>>(doc, "absorbing"), std::move(actions), std::move(thresholds),
                     get<std::vector<double>>(doc, "beta"));
}

json map_to_json(const deploy::DeploymentMap& map) {
    json doc;
    doc["vertices"] = map.vertices;
    json edges = json::array();
    for (const auto& e : map.edges) {
        json item;
        item["u"] = e.u;
        item["v"] = e.v;
        item["t_min"] = e.t_min;
        item["t_max"] = e.t_max;
        if (e.midpoint) item["m"] = *e.midpoint;
        if (e.steepness) item["s"] = *e.steepness;
        if (e.eps_factor) item["eps_factor"] = *e.eps_factor;
        edges.push_back(std::move(item));
    }
    doc["edges"] = std::move(edges);
    doc["start"] = map.start;
    doc["targets"] = map.targets;
    doc["delta"] = map.delta;
    doc["eps_factor"] = map.eps_factor;
    doc["target_loop_time"] = map.target_loop_time;
    if (map.seed) doc["seed"] = *map.seed;
    return doc;
}

deploy::DeploymentMap map_from_json(const json& doc) {
    deploy::DeploymentMap map;
    map.vertices = get<std::vector<deploy::VertexId>>(doc, "vertices");
    for (const json& item : field(doc, "edges")) {
        deploy::Edge e;
        e.u = get<deploy::VertexId>(item, "u");
        e.v = get<deploy::VertexId>(item, "v");
        e.t_min = get<double>(item, "t_min");
        e.t_max = get<double>(item, "t_max");
        if (item.contains("m")) e.midpoint = get<double>(item, "m");
        if (item.contains("s")) e.steepness = get<double>(item, "s");
        if (item.contains("eps_factor")) e.eps_factor = get<double>(item, "eps_factor");
        map.edges.push_back(e);
    }
    map.start = get<deploy::VertexId>(doc, "start");
    map.targets = get<std::vector<deploy::VertexId>>(doc, "targets");
    map.delta = get<double>(doc, "delta");
    if (doc.contains("eps_factor")) map.eps_factor = get<double>(doc, "eps_factor");
    if (doc.contains("target_loop_time")) map.target_loop_time = get<double>(doc, "target_loop_time");
    if (doc.contains("seed")) map.seed = get<std::uint64_t>(doc, "seed");
    deploy::validate_map(map);
    return map;
}

json table_to_json(const StateActionTable<double>& table) {
    json out = json::array();
    for (std::size_t k = 0; k < table.size(); ++k) {
        const auto p = table.index().pair(k);
        out.push_back(json::array({p.state, p.action, table[k]}));
    }
    return out;
}

json policy_to_json(const RandomizedPolicy& policy) {
    json out = json::array();
    for (const auto& row : policy.raw()) out.push_back(row);
    return out;
}

json uncertainty_to_json(const UncertaintySet& u) {
    json out;
    out["gamma"] = u.gamma;
    out["eps_bar_total"] = u.total_bound();
    out["eps_bar"] = table_to_json(u.eps_bar);
    return out;
}

json solution_to_json(const RobustSolution& sol) {
    json doc;
    doc["objective"] = sol.objective;
    doc["thresholds"] = sol.thresholds;
    doc["nominal_constraint_value"] = sol.nominal_constraint_value;
    doc["worst_case_constraint_value"] = sol.worst_case_constraint_value;
    doc["mu"] = sol.mu;
    doc["rho"] = table_to_json(sol.rho);
    json lambda = json::array();
    for (const auto& t : sol.lambda) lambda.push_back(table_to_json(t));
    doc["lambda"] = std::move(lambda);
    json eps = json::array();
    for (const auto& t : sol.eps_star) eps.push_back(table_to_json(t));
    doc["eps_star"] = std::move(eps);
    doc["policy"] = policy_to_json(sol.policy);
    json solver;
    solver["lp_rows"] = sol.stats.lp_rows;
    solver["lp_variables"] = sol.stats.lp_variables;
    solver["phase1_pivots"] = sol.stats.phase1_pivots;
    solver["phase2_pivots"] = sol.stats.phase2_pivots;
    solver["tolerances"] = {{"feasibility", sol.stats.tolerances.feasibility},
                            {"optimality", sol.stats.tolerances.optimality},
                            {"pivot", sol.stats.tolerances.pivot},
                            {"max_pivots", sol.stats.tolerances.max_pivots}};
    solver["residuals"] = {{"primal", sol.stats.residuals.primal},
                           {"dual", sol.stats.residuals.dual},
                           {"complementarity", sol.stats.residuals.complementarity},
                           {"duality_gap", sol.stats.residuals.duality_gap}};
    doc["solver"] = std::move(solver);
    return doc;
}

json stats_to_json(const sim::SimStats& st) {
    json doc;
    doc["n_trials"] = st.n_trials;
    doc["n_success"] = st.n_success;
    doc["empirical_success_prob"] = st.empirical_success_prob;
    doc["success_standard_error"] = st.success_standard_error;
    doc["mean_duration"] = st.mean_duration;
    doc["std_duration"] = st.std_duration;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    doc["mean_duration_given_success"] = opt(st.mean_duration_given_success);
    doc["std_duration_given_success"] = opt(st.std_duration_given_success);
    doc["convergence_error"] = opt(st.convergence_error);
    doc["kl_divergence"] = opt(st.kl_divergence);
    return doc;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace rcmdp::io
