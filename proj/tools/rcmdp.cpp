#include "rcmdp/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace pl = rcmdp::pipeline;

namespace {

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("RCMDP_OUT_DIR"); env && *env) return env;
    return "rcmdp_out";
}

struct Flags {
    std::string map;
    long long target = -1;
    double deadline = 0.0;
    std::vector<double> deadlines;
    std::optional<double> gamma;
    std::optional<double> gamma_factor;
    int team = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 1;
    std::string eps_mode = "nominal";
    std::string assign_mode = "optimal";
    std::size_t draws = 32;
    std::string out;
};

pl::RunConfig to_config(const Flags& f) {
    pl::RunConfig c;
    c.map_path = f.map;
    if (f.target >= 0) c.target = f.target;
    c.deadline = f.deadlines.empty() ? f.deadline : f.deadlines.front();
    if (f.gamma && f.gamma_factor) throw std::invalid_argument("--gamma and --gamma-factor are exclusive");
    c.gamma = f.gamma ? pl::GammaSpec::absolute(*f.gamma) : pl::GammaSpec::factor(f.gamma_factor.value_or(0.0));
    c.team = f.team;
    c.trials = f.trials;
    c.seed = f.seed;
    c.eps_mode = rcmdp::sim::parse_eps_mode(f.eps_mode);
    c.assign_mode = pl::parse_assign_mode(f.assign_mode);
    c.uniform_draws = f.draws;
    c.out_dir = f.out.empty() ? default_out_dir() : std::filesystem::path(f.out);
    return c;
}

void add_common(CLI::App* cmd, Flags& f, bool needs_deadline) {
    cmd->add_option("--map", f.map, "Deployment map (JSON)")->required();
    auto* d = cmd->add_option("--deadline", f.deadline, "Expected-duration deadline D");
    if (needs_deadline) d->required();
    auto* g = cmd->add_option("--gamma", f.gamma, "Absolute uncertainty budget");
    cmd->add_option("--gamma-factor", f.gamma_factor, "Budget as a fraction of the total bound")->excludes(g);
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--out", f.out, "Output directory (default $RCMDP_OUT_DIR or ./rcmdp_out)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust constrained MDP solver for multi-robot deployment"};
    app.set_version_flag("--version", std::string(RCMDP_VERSION));
    app.require_subcommand(1);
    Flags f;

    rcmdp::deploy::MapGeneratorConfig gen;
    std::string gen_out = "map.json";
    auto* generate = app.add_subcommand("generate-map", "Generate a random seeded deployment map");
    generate->add_option("--vertices", gen.n_vertices, "Number of vertices");
    generate->add_option("--targets", gen.n_targets, "Number of targets");
    generate->add_option("--extra-edges", gen.extra_edge_fraction, "Extra edges as a fraction of the tree edges");
    generate->add_option("--delta", gen.delta, "Speed discretization step (0 = automatic)");
    generate->add_option("--eps-factor", gen.eps_factor, "eps_bar as a fraction of the intended time");
    generate->add_option("--seed", gen.seed, "Random seed");
    generate->add_option("--out", gen_out, "Output map file");

    auto* solve = app.add_subcommand("solve", "Solve the robust single-robot problem for one target");
    add_common(solve, f, true);
    solve->add_option("--target", f.target, "Target vertex (default: first target)");

    std::vector<double> pf;
    auto* assign = app.add_subcommand("assign", "Assign robots to targets");
    assign->add_option("--pf", pf, "Per-target failure probabilities (skip the solves)")->delimiter(',');
    assign->add_option("--map", f.map, "Deployment map (JSON)");
    assign->add_option("--deadline", f.deadline, "Expected-duration deadline D");
    auto* ag = assign->add_option("--gamma", f.gamma, "Absolute uncertainty budget");
    assign->add_option("--gamma-factor", f.gamma_factor, "Budget as a fraction of the total bound")->excludes(ag);
    assign->add_option("--team", f.team, "Team size K")->required();
    assign->add_option("--out", f.out, "Output directory");

    auto* deploy = app.add_subcommand("deploy", "Solve every target and assign the team");
    add_common(deploy, f, true);
    deploy->add_option("--team", f.team, "Team size K")->required();
    deploy->add_option("--assign-mode", f.assign_mode, "optimal or uniform")->check(CLI::IsMember({"optimal", "uniform"}));
    deploy->add_option("--draws", f.draws, "Assignment draws for the uniform mode");
    deploy->add_option("--trials", f.trials, "Team simulation trials (0 = none)");
    deploy->add_option("--eps-mode", f.eps_mode, "nominal, worst_case or sampled");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo validation of a solved policy");
    add_common(simulate, f, true);
    simulate->add_option("--target", f.target, "Target vertex (default: first target)");
    simulate->add_option("--team", f.team, "Simulate a team of this size instead of one robot");
    simulate->add_option("--assign-mode", f.assign_mode, "optimal or uniform")->check(CLI::IsMember({"optimal", "uniform"}));
    simulate->add_option("--trials", f.trials, "Number of trials");
    simulate->add_option("--eps-mode", f.eps_mode, "nominal, worst_case or sampled");

    std::string axis = "deadline";
    std::vector<double> grid;
    bool check = false;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep written as CSV");
    sweep->add_option("--map", f.map, "Deployment map (JSON)")->required();
    sweep->add_option("--axis", axis, "deadline, gamma or team")->check(CLI::IsMember({"deadline", "gamma", "team"}));
    sweep->add_option("--grid", grid, "Grid values of the swept axis")->delimiter(',')->required();
    sweep->add_option("--deadline", f.deadlines, "Deadline (several for the team axis)")->delimiter(',');
    auto* sg = sweep->add_option("--gamma", f.gamma, "Absolute uncertainty budget");
    sweep->add_option("--gamma-factor", f.gamma_factor, "Budget as a fraction of the total bound")->excludes(sg);
    sweep->add_option("--target", f.target, "Target vertex for the deadline and gamma axes");
    sweep->add_option("--trials", f.trials, "Simulation trials per point (0 = theory only)");
    sweep->add_option("--seed", f.seed, "Random seed");
    sweep->add_option("--eps-mode", f.eps_mode, "nominal, worst_case or sampled");
    sweep->add_option("--out", f.out, "Output directory");
    sweep->add_flag("--check", check, "Assert the expected monotonicity patterns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pl::kValidation;
    }

    try {
        if (generate->parsed()) return pl::cmd_generate_map(gen, gen_out, std::cout);
        const pl::RunConfig config = to_config(f);
        if (solve->parsed()) return pl::cmd_solve(config, std::cout);
        if (assign->parsed()) return pl::cmd_assign(config, pf, std::cout);
        if (deploy->parsed()) return pl::cmd_deploy(config, std::cout);
        if (simulate->parsed()) return pl::cmd_simulate(config, std::cout);
        if (sweep->parsed()) {
            pl::SweepConfig sc;
            sc.run = config;
            sc.axis = pl::parse_axis(axis);
            sc.grid = grid;
            sc.deadlines = f.deadlines;
            sc.check = check;
            if (sc.axis != pl::SweepAxis::deadline && f.deadlines.empty())
                throw std::invalid_argument("--deadline is required for this axis");
            return pl::cmd_sweep(sc, std::cout);
        }
    } catch (...) {
        return pl::report_exception(std::cerr);
    }
    return pl::kFailure;
}
