#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace rcmdp;
using namespace rcmdp::deploy;

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Average of phi over all |T|^K assignments.
double uniform_by_enumeration(const std::vector<double>& pf, int team) {
    const std::size_t n = pf.size();
    std::vector<int> pick(static_cast<std::size_t>(team), 0);
    double total = 0.0;
    std::size_t count = 0;
    while (true) {
        std::vector<int> robots(n, 0);
        for (int p : pick) robots[static_cast<std::size_t>(p)]++;
        total += success_probability(pf, robots);
        ++count;
        std::size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < static_cast<int>(n)) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return total / static_cast<double>(count);
}

}  // namespace

TEST_CASE("safety function shape") {
    const auto f = SafetyFunction::with_defaults(10.0, 30.0);
    CHECK(eval_safety(f, 0.0) == 0.0);
    const double base = logistic(-f.midpoint / f.steepness);
    CHECK(eval_safety(f, 20.0) == doctest::Approx((0.5 - base) / (1 - base)).epsilon(1e-14));
    CHECK(eval_safety(f, 300.0) >= 0.999);
    CHECK(eval_safety(f, 3e7) > 1 - 1e-6);
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double s = eval_safety(f, 0.1 * i);
        CHECK(s >= prev);
        prev = s;
    }
    CHECK_THROWS_AS(eval_safety(f, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_safety(SafetyFunction{1.0, 2.0, 1.5, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("speed levels") {
    CHECK(speed_levels(10.0, 30.0, 5.0) == 5);
    CHECK(speed_levels(10.0, 30.0, 6.0) == 4);
    CHECK(speed_levels(0.1, 0.7, 0.2) == 4);
    CHECK(speed_levels(10.0, 12.0, 5.0) == 1);
}

TEST_CASE("single edge builds three states and two speeds") {
    const auto map = fixture::single_edge(5.0, 10.0, 5.0);
    const auto b = build_single_robot_rcmdp(map, 1, 7.5);
    const auto& m = b.model;
    CHECK(m.n_states() == 3);
    CHECK(m.pairs().count(0) == 2);
    CHECK(m.pairs().count(b.sink_state) == 1);
    CHECK(m.is_absorbing(b.target_state));
    CHECK(m.beta()[0] == 1.0);
    CHECK(validate_model(m).ok());
    for (StateId x : m.transient_states())
        for (const auto& a : m.actions(x)) {
            double s = 0.0;
            for (const auto& t : a.transitions) s += t.probability;
            CHECK(s == 1.0);
        }
    CHECK(m.action(0, 1).constraint_costs[0] == 10.0);
    CHECK(b.uncertainty.eps_bar(0, 0) == doctest::Approx(2.5));
    CHECK(b.uncertainty.eps_bar(b.sink_state, 0) == 0.0);
    CHECK(m.action(b.sink_pair).cost == 1.0);
    CHECK(b.moves[0].to == 1);
}

TEST_CASE("a step at least the gap leaves one speed") {
    const auto b = build_single_robot_rcmdp(fixture::single_edge(5.0, 10.0, 7.0), 1);
    CHECK(b.model.pairs().count(0) == 1);
}

TEST_CASE("non-target and unreachable targets are rejected") {
    auto map = fixture::path3();
    CHECK_THROWS_AS(build_single_robot_rcmdp(map, 1), std::invalid_argument);
    map.vertices.push_back(3);
    map.targets.push_back(3);
    CHECK_THROWS_AS(validate_map(map), std::invalid_argument);
}

TEST_CASE("map validation") {
    auto bad_edge = fixture::path3();
    bad_edge.edges[0].t_max = 5.0;
    CHECK_THROWS_AS(validate_map(bad_edge), std::invalid_argument);
    auto bad_delta = fixture::path3();
    bad_delta.delta = 0.0;
    CHECK_THROWS_AS(validate_map(bad_delta), std::invalid_argument);
    auto unknown = fixture::path3();
    unknown.edges.push_back({0, 9, 1.0, 2.0});
    CHECK_THROWS_AS(validate_map(unknown), std::invalid_argument);
    CHECK_NOTHROW(validate_map(fixture::path3()));
}

TEST_CASE("self-loop edges are not movement actions") {
    auto map = fixture::path3();
    map.edges.push_back({2, 2, 3.0, 4.0});
    const auto b = build_single_robot_rcmdp(map, 2);
    CHECK(b.model.pairs().size() == build_single_robot_rcmdp(fixture::path3(), 2).model.pairs().size());
}

TEST_CASE("other targets are ordinary vertices") {
    auto map = fixture::path3();
    map.targets = {1, 2};
    const auto b = build_single_robot_rcmdp(map, 2);
    CHECK_FALSE(b.model.is_absorbing(1));
    CHECK(b.model.pairs().count(1) > 0);
}

TEST_CASE("team success examples") {
    const std::vector<double> pf{0.2, 0.3};
    CHECK(success_probability(pf, std::vector<int>{1, 1}) == doctest::Approx(0.8 * 0.7));
    CHECK(success_probability(pf, std::vector<int>{0, 3}) == 0.0);
    CHECK(success_probability(std::vector<double>{0.3, 0.2}, std::vector<int>{2, 2}) == doctest::Approx(0.91 * 0.96));
    const std::vector<double> three{0.1, 0.2, 0.3};
    CHECK(success_probability(std::vector<double>{0.2, 0.4}, std::vector<int>{2, 3}) == doctest::Approx(0.898560).epsilon(1e-12));
    double prev = 0.0;
    for (int k = 1; k < 8; ++k) {
        const double s = success_probability(three, std::vector<int>{k, 2, 2});
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("team success agrees with independent Bernoulli robots") {
    CounterRng rng(substream_key(52, 0));
    const std::vector<double> pf{0.2, 0.4};
    const std::vector<int> robots{2, 3};
    const int n = 200000;
    int ok = 0;
    for (int i = 0; i < n; ++i) {
        bool all = true;
        for (std::size_t j = 0; j < pf.size(); ++j) {
            bool any = false;
            for (int r = 0; r < robots[j]; ++r) any |= rng.uniform() >= pf[j];
            all &= any;
        }
        ok += all;
    }
    const double phi = success_probability(pf, robots);
    CHECK(std::abs(ok / double(n) - phi) <= 4 * std::sqrt(phi * (1 - phi) / n));
}

TEST_CASE("uniform assignment expectation matches enumeration") {
    CounterRng rng(substream_key(51, 0));
    for (int i = 0; i < 40; ++i) {
        const std::size_t n = 1 + rng.below(4);
        std::vector<double> pf(n);
        for (auto& p : pf) p = rng.uniform(0.01, 0.9);
        const int team = 1 + static_cast<int>(rng.below(7));
        CHECK(std::abs(expected_uniform_success(pf, team) - uniform_by_enumeration(pf, team)) <= 1e-12);
    }
}

TEST_CASE("generated maps are valid and seeded") {
    MapGeneratorConfig c;
    c.n_vertices = 25;
    c.seed = 4;
    const auto a = generate_map(c), b = generate_map(c);
    CHECK_NOTHROW(validate_map(a));
    CHECK(a.targets.size() == 3);
    CHECK(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) CHECK(a.edges[i].t_min == b.edges[i].t_min);
    for (auto t : a.targets) CHECK(validate_model(build_single_robot_rcmdp(a, t).model).ok());
    c.seed = 5;
    const auto d = generate_map(c);
    CHECK((d.edges.size() != a.edges.size() || d.edges[0].t_min != a.edges[0].t_min));
}
