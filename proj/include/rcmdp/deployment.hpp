#pragma once

#include "rcmdp/cmdp.hpp"
#include "rcmdp/robust.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rcmdp::deploy {

using VertexId = long long;

/**
 * Normalized logistic safety function
 *
 *     S(t) = (sigma((t - m)/s) - sigma(-m/s)) / (1 - sigma(-m/s))
 *
 * with sigma the standard logistic. S(0) = 0, S is increasing and tends to 1.
 * By default m = (t_min + t_max)/2 and s = (t_max - t_min)/8, which puts
 * roughly 2% success at t_min and 98% at t_max.
 */
struct SafetyFunction {
    double t_min = 0.0;
    double t_max = 1.0;
    double midpoint = 0.5;
    double steepness = 0.125;

    static SafetyFunction with_defaults(double t_min, double t_max);
};

/// Throws std::invalid_argument for t < 0 or a non-positive steepness.
double eval_safety(const SafetyFunction& f, double t);

struct Edge {
    VertexId u = 0;
    VertexId v = 0;
    double t_min = 0.0;
    double t_max = 1.0;
    std::optional<double> midpoint;
    std::optional<double> steepness;
    /// eps_bar = eps_factor * intended time; defaults to the map-wide factor.
    std::optional<double> eps_factor;

    SafetyFunction safety() const;
};

struct DeploymentMap {
    std::vector<VertexId> vertices;
    std::vector<Edge> edges;
    VertexId start = 0;
    std::vector<VertexId> targets;
    double delta = 1.0;
    /// Default eps_bar(x,a) = eps_factor * d(x,a).
    double eps_factor = 0.5;
    /// Self-loop time on targets when the map has no explicit self-loop edge.
    double target_loop_time = 1.0;
    std::optional<std::uint64_t> seed;

    /// Dense index of a vertex id; throws std::out_of_range for unknown ids.
    std::size_t vertex_index(VertexId v) const;
    bool is_target(VertexId v) const;
};

/// Throws std::invalid_argument describing the first violated map invariant.
void validate_map(const DeploymentMap& map);

/// Number of speed levels floor((t_max - t_min)/delta) + 1 (a 1e-9 slack
/// absorbs rounding when the ratio is integral).
std::size_t speed_levels(double t_min, double t_max, double delta);

/// Per-pair description of a movement action.
struct MoveAction {
    VertexId from = 0;
    VertexId to = 0;
    double intended_time = 0.0;
    double success_probability = 1.0;
};

struct SingleRobotModel {
    CmdpModel model;
    UncertaintySet uncertainty;
    StateActionPair sink_pair;
    StateId sink_state = 0;
    StateId target_state = 0;
    VertexId target = 0;
    /// Indexed like the model's pairs; the sink pair has from = to = target.
    std::vector<MoveAction> moves;
};

/**
 * Compiles the single-robot deployment problem for one target into a
 * robust CMDP. States are the map vertices in map order followed by the
 * failure sink; the assigned target is the only absorbing state. Other
 * targets are ordinary vertices. Self-loop edges only define the target's
 * loop time and never become movement actions.
 *
 * The returned model passes validate_model(); a build that would not is
 * rejected with std::invalid_argument.
 */
SingleRobotModel build_single_robot_rcmdp(const DeploymentMap& map, VertexId target, double deadline = 0.0);

/// phi = prod_j (1 - pf_j^{c_j}); zero when some target has no robot.
double success_probability(std::span<const double> pf, std::span<const int> robots_per_target);

/// Uniform i.i.d. assignment of K robots to the targets: exact expectation
/// of phi by inclusion-exclusion over target subsets.
double expected_uniform_success(std::span<const double> pf, int team_size);

struct MapGeneratorConfig {
    std::size_t n_vertices = 16;
    std::size_t n_targets = 3;
    double extra_edge_fraction = 0.4;
    double t_min_low = 10.0;
    double t_min_high = 25.0;
    double gap_low = 20.0;
    double gap_high = 40.0;
    /// 0 selects delta so the average edge has about eight speed levels.
    double delta = 0.0;
    double eps_factor = 0.5;
    std::uint64_t seed = 1;
};

/// Random connected map: vertices placed in the unit square, joined by a
/// nearest-earlier-vertex tree plus extra short edges; start is vertex 0
/// and the targets are the vertices farthest from it in hop count.
DeploymentMap generate_map(const MapGeneratorConfig& config);

}  // namespace rcmdp::deploy
