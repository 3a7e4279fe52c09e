#pragma once

#include "rcmdp/assignment.hpp"
#include "rcmdp/deployment.hpp"
#include "rcmdp/io.hpp"
#include "rcmdp/robust.hpp"
#include "rcmdp/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rcmdp::pipeline {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInfeasible = 2,
    kValidation = 3,
    kNumerical = 4,
};

/// Gamma either as an absolute budget or as a factor of sum eps_bar.
struct GammaSpec {
    enum class Kind { absolute, factor };
    Kind kind = Kind::factor;
    double value = 0.0;

    static GammaSpec absolute(double gamma) { return {Kind::absolute, gamma}; }
    static GammaSpec factor(double gamma_factor) { return {Kind::factor, gamma_factor}; }

    /// Throws std::invalid_argument for a factor outside [0,1] or a negative budget.
    double resolve(const UncertaintySet& u) const;
    std::string describe() const;
};

enum class AssignMode { optimal, uniform };
const char* to_string(AssignMode mode);
AssignMode parse_assign_mode(const std::string& text);

struct RunConfig {
    std::filesystem::path map_path;
    std::optional<deploy::VertexId> target;
    double deadline = 0.0;
    GammaSpec gamma;
    int team = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 1;
    sim::EpsMode eps_mode = sim::EpsMode::nominal;
    AssignMode assign_mode = AssignMode::optimal;
    /// Assignment draws averaged by the uniform mode.
    std::size_t uniform_draws = 32;
    std::filesystem::path out_dir;
};

/// Robust solve of the single-robot problem of one target.
struct TargetSolve {
    deploy::VertexId target = 0;
    deploy::SingleRobotModel built;
    double gamma = 0.0;
    RcmdpResult result;
    /// rho(sink, a_sink) when feasible.
    std::optional<double> pf;
    /// Smallest feasible deadline, filled in when the deadline is infeasible.
    std::optional<double> minimal_deadline;

    sim::RobotPlan plan(sim::EpsMode mode) const;
};

TargetSolve solve_target(const deploy::DeploymentMap& map, deploy::VertexId target, double deadline, const GammaSpec& gamma);
/// One solve per target, run concurrently; results follow map.targets order.
std::vector<TargetSolve> solve_all_targets(const deploy::DeploymentMap& map, double deadline, const GammaSpec& gamma);

/// Non-absorbing states with positive occupation mass whose policy puts
/// relative mass above `threshold` on more than one action.
std::size_t count_randomized_states(const CmdpModel& model, const RobustSolution& sol, double threshold = 1e-9);

struct UniformEstimate {
    double exact = 0.0;            ///< E[phi] by inclusion-exclusion
    double mean_over_draws = 0.0;  ///< average phi over the sampled assignments
    std::vector<std::vector<int>> draws;
};

/// R i.i.d. uniform assignments of `team` robots (stream substream_key(seed, 0x756e69)).
UniformEstimate uniform_assignment(std::span<const double> pf, int team, std::uint64_t seed, std::size_t draws);

struct Deployment {
    std::vector<TargetSolve> per_target;
    std::vector<double> pf;
    AssignMode mode = AssignMode::optimal;
    /// Robots per target for the optimal mode.
    std::vector<int> robots;
    std::optional<assign::Method> method;
    /// phi of the optimal assignment, or E[phi] for the uniform mode.
    double success = 0.0;
    std::optional<UniformEstimate> uniform;
};

/// Solves every target, then assigns the team. Throws
/// assign::InfeasibleAssignment when some target is unreachable or the
/// deadline is infeasible for it.
Deployment deploy_team(const deploy::DeploymentMap& map, int team, double deadline, const GammaSpec& gamma, AssignMode mode,
                       std::uint64_t seed, std::size_t uniform_draws);

/// Config echo, seeds, version and solver tolerances.
io::json manifest(const std::string& command, const RunConfig& config, const io::json& extra = {});
void write_manifest(const std::filesystem::path& dir, const io::json& manifest);

/// Fixed sweep schema version written in the CSV preamble.
inline constexpr const char* kSweepSchema = "rcmdp-sweep/1";

enum class SweepAxis { deadline, gamma, team };
SweepAxis parse_axis(const std::string& text);
const char* to_string(SweepAxis axis);

struct SweepConfig {
    RunConfig run;
    SweepAxis axis = SweepAxis::deadline;
    std::vector<double> grid;
    /// Deadlines crossed with the team grid (team axis only); defaults to run.deadline.
    std::vector<double> deadlines;
    bool check = false;
};

struct SweepResult {
    std::string csv;
    std::vector<std::string> check_failures;
};

/// Runs the sweep; each point's failure is recorded in its row.
SweepResult run_sweep(const deploy::DeploymentMap& map, const SweepConfig& config);

// Subcommands. Each writes its artifacts plus manifest.json into
// config.out_dir, logs a summary to `log` and returns an ExitCode.
int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_assign(const RunConfig& config, const std::vector<double>& pf, std::ostream& log);
int cmd_deploy(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_sweep(const SweepConfig& config, std::ostream& log);
int cmd_generate_map(const deploy::MapGeneratorConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Maps the exception currently being handled to an ExitCode and logs it.
int report_exception(std::ostream& log);

}  // namespace rcmdp::pipeline
