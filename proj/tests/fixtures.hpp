#pragma once

#include "rcmdp/deployment.hpp"

#include <vector>

namespace fixture {

// 0 -- 1 with the target at 1.
inline rcmdp::deploy::DeploymentMap single_edge(double t_min, double t_max, double delta) {
    rcmdp::deploy::DeploymentMap m;
    m.vertices = {0, 1};
    m.edges = {{0, 1, t_min, t_max}};
    m.start = 0;
    m.targets = {1};
    m.delta = delta;
    return m;
}

// Path 0 -- 1 -- 2 with the target at 2.
inline rcmdp::deploy::DeploymentMap path3(double delta = 5.0) {
    rcmdp::deploy::DeploymentMap m;
    m.vertices = {0, 1, 2};
    m.edges = {{0, 1, 10.0, 30.0}, {1, 2, 12.0, 32.0}};
    m.start = 0;
    m.targets = {2};
    m.delta = delta;
    return m;
}

// Two actions from state 0 into the absorbing state 1:
// a: cost 1, d = 1, eps_bar = 0;  b: cost 0, d = 2, eps_bar = 2.
inline rcmdp::CmdpModel two_action_toy(double deadline) {
    rcmdp::Action a{1.0, {1.0}, {{1, 1.0}}, "a"};
    rcmdp::Action b{0.0, {2.0}, {{1, 1.0}}, "b"};
    rcmdp::Action stay{0.0, {0.0}, {{1, 1.0}}, ""};
    return rcmdp::CmdpModel(2, {1}, {{a, b}, {stay}}, {deadline}, {1.0, 0.0});
}

inline rcmdp::UncertaintySet two_action_toy_set(const rcmdp::CmdpModel& m, double gamma) {
    return {rcmdp::StateActionTable<double>(m.pairs_ptr(), std::vector<double>{0.0, 2.0}), gamma};
}

}  // namespace fixture
