#include "rcmdp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iterator>
#include <sstream>

namespace rcmdp::pipeline {

using deploy::VertexId;
using io::json;
using sim::format_number;

double GammaSpec::resolve(const UncertaintySet& u) const {
    if (kind == Kind::factor) {
        if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("gamma factor must lie in [0,1]");
        return value * u.total_bound();
    }
    if (!(value >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    return std::min(value, u.total_bound());
}

std::string GammaSpec::describe() const {
    return std::string(kind == Kind::factor ? "factor:" : "absolute:") + format_number(value);
}

const char* to_string(AssignMode mode) { return mode == AssignMode::optimal ? "optimal" : "uniform"; }

AssignMode parse_assign_mode(const std::string& text) {
    if (text == "optimal") return AssignMode::optimal;
    if (text == "uniform") return AssignMode::uniform;
    throw std::invalid_argument("unknown assign mode '" + text + "'");
}

sim::RobotPlan TargetSolve::plan(sim::EpsMode) const {
    if (!result.solution) throw std::logic_error("TargetSolve::plan: target has no solution");
    const RobustSolution& sol = *result.solution;
    return sim::RobotPlan{&built.model, &sol.policy, built.sink_pair, &built.uncertainty, &sol.eps_star.at(0)};
}

TargetSolve solve_target(const deploy::DeploymentMap& map, VertexId target, double deadline, const GammaSpec& gamma) {
    if (!(deadline > 0.0)) throw std::invalid_argument("deadline must be > 0");
    TargetSolve ts{target, deploy::build_single_robot_rcmdp(map, target, deadline), 0.0, {}, std::nullopt, std::nullopt};
    ts.gamma = gamma.resolve(ts.built.uncertainty);
    ts.built.uncertainty.gamma = ts.gamma;
    ts.result = solve_rcmdp(ts.built.model, ts.built.uncertainty, deadline);
    if (ts.result.feasible())
        ts.pf = failure_probability(*ts.result.solution, ts.built.sink_pair);
    else
        ts.minimal_deadline = minimal_robust_deadline(ts.built.model, ts.built.uncertainty);
    return ts;
}

std::vector<TargetSolve> solve_all_targets(const deploy::DeploymentMap& map, double deadline, const GammaSpec& gamma) {
    std::vector<std::future<TargetSolve>> jobs;
    for (VertexId t : map.targets)
        jobs.push_back(std::async(std::launch::async, [&map, t, deadline, gamma] { return solve_target(map, t, deadline, gamma); }));
    std::vector<TargetSolve> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

std::size_t count_randomized_states(const CmdpModel& model, const RobustSolution& sol, double threshold) {
    std::size_t count = 0;
    for (StateId x : model.transient_states()) {
        const std::size_t n = model.pairs().count(x), off = model.pairs().offset(x);
        double total = 0.0;
        for (std::size_t a = 0; a < n; ++a) total += sol.rho[off + a];
        if (!(total > 0.0)) continue;
        std::size_t support = 0;
        for (std::size_t a = 0; a < n; ++a)
            if (sol.rho[off + a] / total > threshold) ++support;
        if (support > 1) ++count;
    }
    return count;
}

UniformEstimate uniform_assignment(std::span<const double> pf, int team, std::uint64_t seed, std::size_t draws) {
    if (pf.empty()) throw std::invalid_argument("uniform_assignment: no targets");
    UniformEstimate est;
    est.exact = deploy::expected_uniform_success(pf, team);
    CounterRng rng(substream_key(seed, 0x756e69));
    double sum = 0.0;
    for (std::size_t r = 0; r < draws; ++r) {
        std::vector<int> counts(pf.size(), 0);
        for (int k = 0; k < team; ++k) ++counts[rng.below(pf.size())];
        sum += deploy::success_probability(pf, counts);
        est.draws.push_back(std::move(counts));
    }
    est.mean_over_draws = draws ? sum / static_cast<double>(draws) : 0.0;
    return est;
}

Deployment deploy_team(const deploy::DeploymentMap& map, int team, double deadline, const GammaSpec& gamma, AssignMode mode,
                       std::uint64_t seed, std::size_t uniform_draws) {
    if (team < static_cast<int>(map.targets.size())) throw assign::InfeasibleAssignment("team smaller than the number of targets");
    Deployment dep;
    dep.mode = mode;
    dep.per_target = solve_all_targets(map, deadline, gamma);
    for (const auto& ts : dep.per_target) {
        if (!ts.pf)
            throw assign::InfeasibleAssignment("deadline " + format_number(deadline) + " is infeasible for target " +
                                               std::to_string(ts.target) + " (minimal robust deadline " +
                                               format_number(ts.minimal_deadline.value_or(NAN)) + ")");
        dep.pf.push_back(*ts.pf);
    }
    if (mode == AssignMode::optimal) {
        dep.robots = assign::assign_robots(dep.pf, team);
        const auto pre = assign::preprocess(dep.pf, team);
        if (!pre.kept.empty())
            dep.method = pre.reduced_team >= 2 * static_cast<int>(pre.kept.size()) ? assign::Method::approx : assign::Method::exact;
        dep.success = deploy::success_probability(dep.pf, dep.robots);
    } else {
        for (double p : dep.pf)
            if (p >= 1.0) throw assign::InfeasibleAssignment("a target cannot be reached (PF = 1)");
        dep.uniform = uniform_assignment(dep.pf, team, seed, uniform_draws);
        dep.success = dep.uniform->exact;
    }
    return dep;
}

namespace {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

json manifest(const std::string& command, const RunConfig& config, const json& extra) {
    json m;
    m["tool"] = "rcmdp";
    m["version"] = RCMDP_VERSION;
    m["command"] = command;
    json c;
    if (!config.map_path.empty()) {
        c["map"] = config.map_path.filename().string();
        c["map_fnv1a64"] = file_digest(config.map_path);
    }
    c["target"] = config.target ? json(*config.target) : json(nullptr);
    c["deadline"] = config.deadline;
    c["gamma"] = config.gamma.describe();
    c["team"] = config.team;
    c["trials"] = config.trials;
    c["seed"] = config.seed;
    c["eps_mode"] = sim::to_string(config.eps_mode);
    c["assign_mode"] = to_string(config.assign_mode);
    c["uniform_draws"] = config.uniform_draws;
    m["config"] = std::move(c);
    m["rng"] = {{"generator", "splitmix64 counter"}, {"trial_stream", "substream_key(seed, trial)"}};
    const lp::Tolerances tol;
    m["tolerances"] = {{"lp_feasibility", tol.feasibility},
                       {"lp_optimality", tol.optimality},
                       {"lp_pivot", tol.pivot},
                       {"probability", kProbabilityTolerance}};
    if (!extra.is_null()) m["extra"] = extra;
    return m;
}

void write_manifest(const std::filesystem::path& dir, const json& m) { io::write_json(dir / "manifest.json", m); }

SweepAxis parse_axis(const std::string& text) {
    if (text == "deadline") return SweepAxis::deadline;
    if (text == "gamma") return SweepAxis::gamma;
    if (text == "team") return SweepAxis::team;
    throw std::invalid_argument("unknown sweep axis '" + text + "'");
}

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::deadline: return "deadline";
        case SweepAxis::gamma: return "gamma";
        case SweepAxis::team: return "team";
    }
    return "unknown";
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string quote(const std::string& s) {
    if (s.empty()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

struct Failure {
    std::string status;
    std::string message;
};

// Runs f and turns an exception into a row status.
template <class F>
std::optional<Failure> guarded(F&& f) {
    try {
        f();
        return std::nullopt;
    } catch (const NumericalError& e) {
        return Failure{"numerical", e.what()};
    } catch (const assign::InfeasibleAssignment& e) {
        return Failure{"infeasible", e.what()};
    } catch (const std::invalid_argument& e) {
        return Failure{"invalid", e.what()};
    } catch (const std::exception& e) {
        return Failure{"error", e.what()};
    }
}

std::pair<double, double> wilson(double p, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054, nn = static_cast<double>(n);
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct SinglePoint {
    double deadline = 0.0;
    GammaSpec gamma;
    std::string status = "ok";
    std::string message;
    std::optional<double> gamma_abs, pf, success_emp, se, conv, kl, mean, sd, mean_s, sd_s, nominal, worst, min_deadline;
    std::optional<std::size_t> randomized;
};

SinglePoint single_point(const deploy::DeploymentMap& map, VertexId target, double deadline, const GammaSpec& gamma,
                         const RunConfig& run) {
    SinglePoint pt;
    pt.deadline = deadline;
    pt.gamma = gamma;
    const auto failure = guarded([&] {
        const TargetSolve ts = solve_target(map, target, deadline, gamma);
        pt.gamma_abs = ts.gamma;
        if (!ts.result.feasible()) {
            pt.status = "infeasible";
            pt.min_deadline = ts.minimal_deadline;
            return;
        }
        const RobustSolution& sol = *ts.result.solution;
        pt.pf = ts.pf;
        pt.nominal = sol.nominal_constraint_value[0];
        pt.worst = sol.worst_case();
        pt.randomized = count_randomized_states(ts.built.model, sol);
        if (run.trials == 0) return;
        sim::SingleRunOptions opt;
        opt.eps_mode = run.eps_mode;
        opt.seed = run.seed;
        opt.n_trials = run.trials;
        opt.theoretical_pf = ts.pf;
        const auto st = sim::run_single(ts.plan(run.eps_mode), opt).stats;
        pt.success_emp = st.empirical_success_prob;
        pt.se = st.success_standard_error;
        pt.conv = st.convergence_error;
        pt.kl = st.kl_divergence;
        pt.mean = st.mean_duration;
        pt.sd = st.std_duration;
        pt.mean_s = st.mean_duration_given_success;
        pt.sd_s = st.std_duration_given_success;
    });
    if (failure) {
        pt.status = failure->status;
        pt.message = failure->message;
    }
    return pt;
}

void single_axis(const deploy::DeploymentMap& map, const SweepConfig& cfg, std::ostringstream& csv, SweepResult& res) {
    const VertexId target = cfg.run.target.value_or(map.targets.front());
    csv << "point,target,deadline,gamma_spec,gamma,status,pf_theory,success_theory,success_emp,success_se,"
           "convergence_error,kl_divergence,mean_duration,std_duration,mean_duration_success,std_duration_success,"
           "nominal_value,worst_case_value,randomized_states,minimal_deadline,message\n";
    std::vector<SinglePoint> points;
    for (double g : cfg.grid) {
        const double deadline = cfg.axis == SweepAxis::deadline ? g : cfg.run.deadline;
        const GammaSpec gamma = cfg.axis == SweepAxis::gamma ? GammaSpec::factor(g) : cfg.run.gamma;
        points.push_back(single_point(map, target, deadline, gamma, cfg.run));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const std::string success = p.pf ? format_number(1.0 - *p.pf) : std::string();
        const std::string rnd = p.randomized ? std::to_string(*p.randomized) : std::string();
        csv << i << ',' << target << ',' << format_number(p.deadline) << ',' << p.gamma.describe() << ',' << cell(p.gamma_abs)
            << ',' << p.status << ',' << cell(p.pf) << ',' << success << ',' << cell(p.success_emp) << ',' << cell(p.se)
            << ',' << cell(p.conv) << ',' << cell(p.kl) << ',' << cell(p.mean) << ',' << cell(p.sd) << ',' << cell(p.mean_s)
            << ',' << cell(p.sd_s) << ',' << cell(p.nominal) << ',' << cell(p.worst) << ',' << rnd << ','
            << cell(p.min_deadline) << ',' << quote(p.message) << '\n';
    }
    if (!cfg.check) return;
    // Success must be nondecreasing in D and nonincreasing in gamma.
    const double sign = cfg.axis == SweepAxis::deadline ? 1.0 : -1.0;
    const char* direction = cfg.axis == SweepAxis::deadline ? "decreases" : "increases";
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto &a = points[i], &b = points[i + 1];
        if (!a.pf || !b.pf) continue;
        if (sign * ((1.0 - *b.pf) - (1.0 - *a.pf)) < -1e-9)
            res.check_failures.push_back("theoretical success " + std::string(direction) + " between points " +
                                         std::to_string(i) + " and " + std::to_string(i + 1));
        if (a.success_emp && b.success_emp) {
            const double slack = 3.0 * std::hypot(*a.se, *b.se) + 1e-12;
            if (sign * (*b.success_emp - *a.success_emp) < -slack)
                res.check_failures.push_back("empirical success " + std::string(direction) + " beyond 3 standard errors between points " +
                                             std::to_string(i) + " and " + std::to_string(i + 1));
        }
    }
    if (cfg.run.eps_mode == sim::EpsMode::nominal)
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            if (p.mean && p.sd && cfg.run.trials > 1 &&
                *p.mean > p.deadline + 3.0 * *p.sd / std::sqrt(static_cast<double>(cfg.run.trials)))
                res.check_failures.push_back("mean duration exceeds the deadline at point " + std::to_string(i));
        }
}

void team_axis(const deploy::DeploymentMap& map, const SweepConfig& cfg, std::ostringstream& csv, SweepResult& res) {
    csv << "point,deadline,gamma_spec,team,mode,status,success_theory,success_emp,success_se,ci_low,ci_high,"
           "mean_duration,robots,message\n";
    std::vector<double> deadlines = cfg.deadlines;
    if (deadlines.empty()) deadlines.push_back(cfg.run.deadline);
    struct Row {
        double deadline;
        int team;
        AssignMode mode;
        std::optional<double> theory;
    };
    std::vector<Row> rows;
    std::size_t point = 0;
    for (double deadline : deadlines) {
        std::vector<TargetSolve> solves;
        std::vector<double> pf;
        const auto solve_failure = guarded([&] {
            solves = solve_all_targets(map, deadline, cfg.run.gamma);
            for (const auto& ts : solves) {
                if (!ts.pf)
                    throw assign::InfeasibleAssignment("deadline infeasible for target " + std::to_string(ts.target) +
                                                       " (minimal robust deadline " +
                                                       format_number(ts.minimal_deadline.value_or(NAN)) + ")");
                pf.push_back(*ts.pf);
            }
        });
        std::vector<sim::RobotPlan> plans;
        if (!solve_failure)
            for (const auto& ts : solves) plans.push_back(ts.plan(cfg.run.eps_mode));
        for (double g : cfg.grid) {
            const int team = static_cast<int>(std::llround(g));
            for (AssignMode mode : {AssignMode::optimal, AssignMode::uniform}) {
                std::string status = "ok", message, robots;
                std::optional<double> theory, emp, se, lo, hi, mean;
                auto failure = solve_failure;
                if (!failure)
                    failure = guarded([&] {
                        if (team < static_cast<int>(pf.size())) throw assign::InfeasibleAssignment("team smaller than the number of targets");
                        sim::TeamRunOptions opt;
                        opt.eps_mode = cfg.run.eps_mode;
                        opt.seed = cfg.run.seed;
                        opt.n_trials = cfg.run.trials;
                        sim::SimStats st;
                        if (mode == AssignMode::optimal) {
                            const auto counts = assign::assign_robots(pf, team);
                            theory = deploy::success_probability(pf, counts);
                            for (std::size_t j = 0; j < counts.size(); ++j) robots += (j ? ";" : "") + std::to_string(counts[j]);
                            opt.theoretical_success = theory;
                            if (cfg.run.trials) st = sim::run_team(plans, counts, opt);
                        } else {
                            theory = deploy::expected_uniform_success(pf, team);
                            opt.theoretical_success = theory;
                            if (cfg.run.trials) st = sim::run_team_uniform(plans, team, opt);
                        }
                        if (cfg.run.trials) {
                            emp = st.empirical_success_prob;
                            se = st.success_standard_error;
                            std::tie(lo, hi) = wilson(st.empirical_success_prob, st.n_trials);
                            mean = st.mean_duration;
                        }
                    });
                if (failure) {
                    status = failure->status;
                    message = failure->message;
                }
                csv << point++ << ',' << format_number(deadline) << ',' << cfg.run.gamma.describe() << ',' << team << ','
                    << to_string(mode) << ',' << status << ',' << cell(theory) << ',' << cell(emp) << ',' << cell(se) << ','
                    << cell(lo) << ',' << cell(hi) << ',' << cell(mean) << ',' << robots << ',' << quote(message) << '\n';
                rows.push_back({deadline, team, mode, theory});
            }
        }
    }
    if (!cfg.check) return;
    auto find = [&](double d, int k, AssignMode m) -> std::optional<double> {
        for (const auto& r : rows)
            if (r.deadline == d && r.team == k && r.mode == m) return r.theory;
        return std::nullopt;
    };
    for (const auto& r : rows) {
        if (!r.theory) continue;
        if (r.mode == AssignMode::optimal) {
            const auto u = find(r.deadline, r.team, AssignMode::uniform);
            if (u && *u > *r.theory + 1e-12)
                res.check_failures.push_back("uniform assignment beats the optimal one at D=" + format_number(r.deadline) +
                                             " K=" + std::to_string(r.team));
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto &a = rows[i], &b = rows[j];
            if (!a.theory || !b.theory || a.mode != b.mode || (a.deadline == b.deadline && a.team == b.team)) continue;
            if (a.deadline <= b.deadline && a.team <= b.team && *b.theory < *a.theory - 1e-9)
                res.check_failures.push_back(std::string(to_string(a.mode)) + " success decreases from (D=" +
                                             format_number(a.deadline) + ", K=" + std::to_string(a.team) + ") to (D=" +
                                             format_number(b.deadline) + ", K=" + std::to_string(b.team) + ")");
        }
}

}  // namespace

SweepResult run_sweep(const deploy::DeploymentMap& map, const SweepConfig& cfg) {
    if (cfg.grid.empty()) throw std::invalid_argument("sweep grid is empty");
    SweepResult res;
    std::ostringstream csv;
    csv << "# schema=" << kSweepSchema << " axis=" << to_string(cfg.axis) << '\n';
    if (cfg.axis == SweepAxis::team)
        team_axis(map, cfg, csv, res);
    else
        single_axis(map, cfg, csv, res);
    res.csv = csv.str();
    return res;
}

namespace {

deploy::DeploymentMap load_map(const RunConfig& config) {
    if (config.map_path.empty()) throw std::invalid_argument("--map is required");
    return io::map_from_json(io::read_json(config.map_path));
}

json policy_summary(const TargetSolve& ts) {
    json out = json::array();
    const auto& model = ts.built.model;
    const auto& sol = *ts.result.solution;
    for (std::size_t k = 0; k < sol.rho.size(); ++k) {
        const auto p = model.pairs().pair(k);
        const double prob = sol.policy(p.state, p.action);
        if (sol.rho[k] <= 0.0) continue;
        const bool sink = p.state == ts.built.sink_state;
        out.push_back({{"state", p.state},
                       {"vertex", sink ? json("sink") : json(ts.built.moves[k].from)},
                       {"action", model.action(p).label},
                       {"probability", prob},
                       {"occupation", sol.rho[k]}});
    }
    return out;
}

json target_report(const TargetSolve& ts, double deadline) {
    json r;
    r["target"] = ts.target;
    r["deadline"] = deadline;
    r["gamma"] = ts.gamma;
    r["eps_bar_total"] = ts.built.uncertainty.total_bound();
    r["states"] = ts.built.model.n_states();
    r["pairs"] = ts.built.model.pairs().size();
    if (!ts.result.feasible()) {
        r["status"] = "infeasible";
        r["minimal_deadline"] = ts.minimal_deadline.value_or(NAN);
        return r;
    }
    const auto& sol = *ts.result.solution;
    r["status"] = "optimal";
    r["pf"] = *ts.pf;
    r["success"] = 1.0 - *ts.pf;
    r["nominal_constraint_value"] = sol.nominal_constraint_value[0];
    r["worst_case_constraint_value"] = sol.worst_case();
    r["lp_rows"] = sol.stats.lp_rows;
    r["lp_variables"] = sol.stats.lp_variables;
    r["randomized_states"] = count_randomized_states(ts.built.model, sol);
    r["policy_support"] = policy_summary(ts);
    return r;
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& log) {
    const auto map = load_map(config);
    const VertexId target = config.target.value_or(map.targets.front());
    const TargetSolve ts = solve_target(map, target, config.deadline, config.gamma);
    json report = target_report(ts, config.deadline);
    io::write_json(config.out_dir / "report.json", report);
    io::write_json(config.out_dir / "model.json", io::model_to_json(ts.built.model));
    write_manifest(config.out_dir, manifest("solve", config));
    if (!ts.result.feasible()) {
        io::write_text(config.out_dir / "solution.json", "null\n");
        log << "target " << target << ": deadline " << format_number(config.deadline)
            << " is infeasible; minimal robust deadline " << format_number(*ts.minimal_deadline) << "\n";
        return kInfeasible;
    }
    json sol = io::solution_to_json(*ts.result.solution);
    sol["uncertainty"] = io::uncertainty_to_json(ts.built.uncertainty);
    io::write_json(config.out_dir / "solution.json", sol);
    const auto& s = *ts.result.solution;
    log << "target " << target << ": PF = " << format_number(*ts.pf) << ", success = " << format_number(1.0 - *ts.pf)
        << ", worst-case duration = " << format_number(s.worst_case()) << " (D = " << format_number(config.deadline)
        << "), LP " << s.stats.lp_rows << " rows x " << s.stats.lp_variables << " variables\n";
    return kOk;
}

int cmd_assign(const RunConfig& config, const std::vector<double>& pf_in, std::ostream& log) {
    std::vector<double> pf = pf_in;
    std::vector<VertexId> targets;
    if (pf.empty()) {
        const auto map = load_map(config);
        for (const auto& ts : solve_all_targets(map, config.deadline, config.gamma)) {
            if (!ts.pf) {
                log << "deadline infeasible for target " << ts.target << " (minimal robust deadline "
                    << format_number(*ts.minimal_deadline) << ")\n";
                return kInfeasible;
            }
            pf.push_back(*ts.pf);
            targets.push_back(ts.target);
        }
    }
    const auto robots = assign::assign_robots(pf, config.team);
    const auto pre = assign::preprocess(pf, config.team);
    json doc;
    doc["team"] = config.team;
    doc["pf"] = pf;
    if (!targets.empty()) doc["targets"] = targets;
    doc["robots"] = robots;
    doc["method"] = pre.kept.empty() ? "trivial"
                    : pre.reduced_team >= 2 * static_cast<int>(pre.kept.size()) ? "approx"
                                                                                 : "exact";
    doc["success"] = deploy::success_probability(pf, robots);
    io::write_json(config.out_dir / "assignment.json", doc);
    write_manifest(config.out_dir, manifest("assign", config, {{"pf", pf}}));
    log << "robots per target:";
    for (int r : robots) log << ' ' << r;
    log << ", success = " << format_number(doc["success"].get<double>()) << " (" << doc["method"].get<std::string>() << ")\n";
    return kOk;
}

namespace {

json team_stats(const Deployment& dep, const RunConfig& config) {
    std::vector<sim::RobotPlan> plans;
    for (const auto& ts : dep.per_target) plans.push_back(ts.plan(config.eps_mode));
    sim::TeamRunOptions opt;
    opt.eps_mode = config.eps_mode;
    opt.seed = config.seed;
    opt.n_trials = config.trials;
    opt.theoretical_success = dep.success;
    const auto st = dep.mode == AssignMode::optimal ? sim::run_team(plans, dep.robots, opt)
                                                    : sim::run_team_uniform(plans, config.team, opt);
    return io::stats_to_json(st);
}

json deployment_doc(const Deployment& dep, const RunConfig& config) {
    json doc;
    doc["team"] = config.team;
    doc["deadline"] = config.deadline;
    doc["assign_mode"] = to_string(dep.mode);
    json targets = json::array();
    for (std::size_t j = 0; j < dep.per_target.size(); ++j) {
        json t = target_report(dep.per_target[j], config.deadline);
        t.erase("policy_support");
        if (!dep.robots.empty()) t["robots"] = dep.robots[j];
        targets.push_back(std::move(t));
    }
    doc["targets"] = std::move(targets);
    if (dep.method) doc["method"] = assign::to_string(*dep.method);
    doc["success"] = dep.success;
    if (dep.uniform) {
        doc["uniform"] = {{"exact", dep.uniform->exact},
                          {"mean_over_draws", dep.uniform->mean_over_draws},
                          {"draws", dep.uniform->draws}};
    }
    return doc;
}

}  // namespace

int cmd_deploy(const RunConfig& config, std::ostream& log) {
    const auto map = load_map(config);
    const Deployment dep = deploy_team(map, config.team, config.deadline, config.gamma, config.assign_mode, config.seed,
                                       config.uniform_draws);
    json doc = deployment_doc(dep, config);
    if (config.trials > 0) doc["simulation"] = team_stats(dep, config);
    io::write_json(config.out_dir / "deployment.json", doc);
    for (const auto& ts : dep.per_target)
        io::write_json(config.out_dir / "policies" / ("target_" + std::to_string(ts.target) + ".json"),
                       io::solution_to_json(*ts.result.solution));
    write_manifest(config.out_dir, manifest("deploy", config));
    log << "deployment (" << to_string(dep.mode) << "): success = " << format_number(dep.success);
    if (!dep.robots.empty()) {
        log << ", robots per target:";
        for (int r : dep.robots) log << ' ' << r;
    }
    if (doc.contains("simulation"))
        log << ", simulated success = " << format_number(doc["simulation"]["empirical_success_prob"].get<double>());
    log << "\n";
    return kOk;
}

int cmd_simulate(const RunConfig& config_in, std::ostream& log) {
    RunConfig config = config_in;
    if (config.trials == 0) config.trials = 1000;
    const auto map = load_map(config);
    if (config.team > 0) {
        const Deployment dep = deploy_team(map, config.team, config.deadline, config.gamma, config.assign_mode, config.seed,
                                           config.uniform_draws);
        json doc = deployment_doc(dep, config);
        doc["simulation"] = team_stats(dep, config);
        io::write_json(config.out_dir / "team_stats.json", doc);
        write_manifest(config.out_dir, manifest("simulate", config));
        log << "team of " << config.team << ": theoretical success " << format_number(dep.success) << ", simulated "
            << format_number(doc["simulation"]["empirical_success_prob"].get<double>()) << " over " << config.trials
            << " trials\n";
        return kOk;
    }
    const VertexId target = config.target.value_or(map.targets.front());
    const TargetSolve ts = solve_target(map, target, config.deadline, config.gamma);
    if (!ts.result.feasible()) {
        log << "target " << target << ": deadline infeasible; minimal robust deadline " << format_number(*ts.minimal_deadline)
            << "\n";
        return kInfeasible;
    }
    sim::SingleRunOptions opt;
    opt.eps_mode = config.eps_mode;
    opt.seed = config.seed;
    opt.n_trials = config.trials;
    opt.theoretical_pf = ts.pf;
    const auto run = sim::run_single(ts.plan(config.eps_mode), opt);
    std::ostringstream csv;
    sim::write_trials_csv(csv, run.trials);
    io::write_text(config.out_dir / "trials.csv", csv.str());
    json doc = io::stats_to_json(run.stats);
    doc["target"] = target;
    doc["pf_theory"] = *ts.pf;
    doc["nominal_constraint_value"] = ts.result.solution->nominal_constraint_value[0];
    doc["worst_case_constraint_value"] = ts.result.solution->worst_case();
    doc["eps_mode"] = sim::to_string(config.eps_mode);
    io::write_json(config.out_dir / "stats.json", doc);
    write_manifest(config.out_dir, manifest("simulate", config));
    log << "target " << target << ": theoretical success " << format_number(1.0 - *ts.pf) << ", simulated "
        << format_number(run.stats.empirical_success_prob) << " +- " << format_number(run.stats.success_standard_error)
        << ", mean duration " << format_number(run.stats.mean_duration) << "\n";
    return kOk;
}

int cmd_sweep(const SweepConfig& config, std::ostream& log) {
    const auto map = load_map(config.run);
    const auto res = run_sweep(map, config);
    io::write_text(config.run.out_dir / "sweep.csv", res.csv);
    json extra;
    extra["axis"] = to_string(config.axis);
    extra["grid"] = config.grid;
    extra["deadlines"] = config.deadlines;
    extra["schema"] = kSweepSchema;
    write_manifest(config.run.out_dir, manifest("sweep", config.run, extra));
    log << "sweep over " << to_string(config.axis) << ": " << config.grid.size() << " points written\n";
    if (!config.check) return kOk;
    for (const auto& f : res.check_failures) log << "check failed: " << f << "\n";
    if (res.check_failures.empty()) log << "checks passed\n";
    return res.check_failures.empty() ? kOk : kFailure;
}

int cmd_generate_map(const deploy::MapGeneratorConfig& config, const std::filesystem::path& out, std::ostream& log) {
    const auto map = deploy::generate_map(config);
    io::write_json(out, io::map_to_json(map));
    log << "map with " << map.vertices.size() << " vertices, " << map.edges.size() << " edges, targets";
    for (auto t : map.targets) log << ' ' << t;
    log << " written to " << out.string() << "\n";
    return kOk;
}

int report_exception(std::ostream& log) {
    try {
        throw;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const assign::InfeasibleAssignment& e) {
        log << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const std::invalid_argument& e) {
        log << "validation failure: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace rcmdp::pipeline
