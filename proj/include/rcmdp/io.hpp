#pragma once

#include "rcmdp/cmdp.hpp"
#include "rcmdp/deployment.hpp"
#include "rcmdp/robust.hpp"
#include "rcmdp/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace rcmdp::io {

using json = nlohmann::ordered_json;

/**
 * CMDP document:
 *
 *   { "states": n, "absorbing": [..], "beta": [..], "thresholds": [..],
 *     "actions": [ [ {"cost", "dcosts": [..], "transitions": [[to, p], ..], "label"?}, .. ], .. ] }
 *
 * `actions` has one list per state. Doubles are written in shortest
 * round-trip form, so reading back gives bit-identical values.
 */
json model_to_json(const CmdpModel& model);
/// Throws std::invalid_argument on schema errors.
CmdpModel model_from_json(const json& doc);

/// Map document: vertices, edges [{u, v, t_min, t_max, m?, s?, eps_factor?}],
/// start, targets, delta, eps_factor, target_loop_time, seed?.
json map_to_json(const deploy::DeploymentMap& map);
deploy::DeploymentMap map_from_json(const json& doc);

/// Values of a pair table as [[state, action, value], ..].
json table_to_json(const StateActionTable<double>& table);

/// Policy as one probability list per state (empty for absorbing states).
json policy_to_json(const RandomizedPolicy& policy);

json uncertainty_to_json(const UncertaintySet& u);

/// rho, lambda, mu, eps*, policy, objective and constraint values plus the
/// solver metadata (tolerances, pivot counts, residuals, LP size).
json solution_to_json(const RobustSolution& sol);

json stats_to_json(const sim::SimStats& stats);

json read_json(const std::filesystem::path& path);
/// Two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rcmdp::io
