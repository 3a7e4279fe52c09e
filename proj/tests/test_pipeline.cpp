#include "fixtures.hpp"
#include "rcmdp/pipeline.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace rcmdp;
namespace pl = rcmdp::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("rcmdp_unit_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

deploy::DeploymentMap two_targets() {
    auto map = fixture::path3();
    map.vertices.push_back(3);
    map.edges.push_back({1, 3, 8.0, 20.0});
    map.targets = {2, 3};
    return map;
}

}  // namespace

TEST_CASE("model documents round-trip") {
    const auto b = deploy::build_single_robot_rcmdp(fixture::path3(), 2, 55.0);
    const auto doc = io::model_to_json(b.model);
    const auto back = io::model_from_json(doc);
    CHECK(io::model_to_json(back).dump() == doc.dump());
    CHECK(back.action(0, 1).constraint_costs == b.model.action(0, 1).constraint_costs);
    auto broken = doc;
    broken.erase("beta");
    CHECK_THROWS_AS(io::model_from_json(broken), std::invalid_argument);
}

TEST_CASE("map documents round-trip") {
    deploy::MapGeneratorConfig c;
    c.n_vertices = 12;
    c.seed = 8;
    const auto map = deploy::generate_map(c);
    const auto doc = io::map_to_json(map);
    CHECK(io::map_to_json(io::map_from_json(doc)).dump() == doc.dump());
    auto bad = doc;
    bad["start"] = 999;
    CHECK_THROWS_AS(io::map_from_json(bad), std::invalid_argument);
}

TEST_CASE("gamma specs") {
    const auto b = deploy::build_single_robot_rcmdp(fixture::path3(), 2);
    CHECK(pl::GammaSpec::factor(0.5).resolve(b.uncertainty) == doctest::Approx(0.5 * b.uncertainty.total_bound()));
    CHECK(pl::GammaSpec::absolute(3.0).resolve(b.uncertainty) == 3.0);
    CHECK(pl::GammaSpec::factor(0.25).describe() == "factor:0.25");
    CHECK_THROWS_AS(pl::GammaSpec::factor(1.5).resolve(b.uncertainty), std::invalid_argument);
    CHECK_THROWS_AS(pl::GammaSpec::absolute(-1.0).resolve(b.uncertainty), std::invalid_argument);
}

TEST_CASE("trivial map solve") {
    const auto map = fixture::single_edge(5.0, 10.0, 5.0);
    const auto ts = pl::solve_target(map, 1, 100.0, pl::GammaSpec::factor(0.0));
    REQUIRE(ts.pf);
    CHECK(*ts.pf == doctest::Approx(1.0 - deploy::eval_safety(map.edges[0].safety(), 10.0)));
    const auto tight = pl::solve_target(map, 1, 7.5, pl::GammaSpec::factor(1.0));
    CHECK(*tight.pf >= *pl::solve_target(map, 1, 7.5, pl::GammaSpec::factor(0.0)).pf);
    const auto infeasible = pl::solve_target(map, 1, 4.0, pl::GammaSpec::factor(0.0));
    CHECK_FALSE(infeasible.pf);
    REQUIRE(infeasible.minimal_deadline);
    CHECK(*infeasible.minimal_deadline == doctest::Approx(5.0));
    CHECK_THROWS_AS(pl::solve_target(map, 1, 0.0, pl::GammaSpec::factor(0.0)), std::invalid_argument);
}

TEST_CASE("randomized state count") {
    const auto ts = pl::solve_target(fixture::single_edge(5.0, 10.0, 5.0), 1, 7.5, pl::GammaSpec::factor(0.0));
    CHECK(pl::count_randomized_states(ts.built.model, *ts.result.solution) == 1);
}

TEST_CASE("team deployment") {
    SUBCASE("one target takes every robot") {
        const auto d = pl::deploy_team(fixture::path3(), 4, 60.0, pl::GammaSpec::factor(0.0), pl::AssignMode::optimal, 1, 32);
        CHECK(d.robots == std::vector<int>{4});
    }
    SUBCASE("K = |T| gives one robot each") {
        const auto d = pl::deploy_team(two_targets(), 2, 60.0, pl::GammaSpec::factor(0.0), pl::AssignMode::optimal, 1, 32);
        CHECK(d.robots == std::vector<int>{1, 1});
        CHECK(d.method == assign::Method::exact);
    }
    SUBCASE("optimal dominates uniform") {
        for (int k : {2, 3, 5, 8}) {
            const auto opt = pl::deploy_team(two_targets(), k, 60.0, pl::GammaSpec::factor(0.2), pl::AssignMode::optimal, 1, 32);
            const auto uni = pl::deploy_team(two_targets(), k, 60.0, pl::GammaSpec::factor(0.2), pl::AssignMode::uniform, 1, 32);
            REQUIRE(uni.uniform);
            CHECK(opt.success >= uni.uniform->exact - 1e-12);
            CHECK(uni.uniform->draws.size() == 32);
        }
    }
    SUBCASE("infeasible cases") {
        CHECK_THROWS_AS(pl::deploy_team(two_targets(), 1, 60.0, pl::GammaSpec::factor(0.0), pl::AssignMode::optimal, 1, 32),
                        assign::InfeasibleAssignment);
        CHECK_THROWS_AS(pl::deploy_team(two_targets(), 3, 5.0, pl::GammaSpec::factor(0.0), pl::AssignMode::optimal, 1, 32),
                        assign::InfeasibleAssignment);
    }
}

TEST_CASE("uniform assignment draws are seeded") {
    const std::vector<double> pf{0.2, 0.4, 0.5};
    const auto a = pl::uniform_assignment(pf, 5, 3, 16), b = pl::uniform_assignment(pf, 5, 3, 16);
    CHECK(a.draws == b.draws);
    CHECK(a.exact == doctest::Approx(deploy::expected_uniform_success(pf, 5)));
}

TEST_CASE("solve command writes reproducible artifacts") {
    const auto dir = scratch("solve");
    io::write_json(dir / "map.json", io::map_to_json(fixture::path3()));
    pl::RunConfig c;
    c.map_path = dir / "map.json";
    c.deadline = 60.0;
    c.gamma = pl::GammaSpec::factor(0.3);
    std::ostringstream log;
    c.out_dir = dir / "a";
    REQUIRE(pl::cmd_solve(c, log) == pl::kOk);
    c.out_dir = dir / "b";
    REQUIRE(pl::cmd_solve(c, log) == pl::kOk);
    for (const char* f : {"report.json", "model.json", "solution.json", "manifest.json"}) {
        REQUIRE(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto manifest = io::read_json(dir / "a" / "manifest.json");
    CHECK(manifest["command"] == "solve");
    CHECK(manifest.contains("tolerances"));

    c.deadline = 5.0;
    c.out_dir = dir / "c";
    CHECK(pl::cmd_solve(c, log) == pl::kInfeasible);
    CHECK(slurp(dir / "c" / "solution.json") == "null\n");
}

TEST_CASE("simulate and sweep commands") {
    const auto dir = scratch("sweep");
    io::write_json(dir / "map.json", io::map_to_json(fixture::path3()));
    pl::RunConfig c;
    c.map_path = dir / "map.json";
    c.deadline = 60.0;
    c.trials = 500;
    c.out_dir = dir / "sim";
    std::ostringstream log;
    REQUIRE(pl::cmd_simulate(c, log) == pl::kOk);
    const auto csv = slurp(dir / "sim" / "trials.csv");
    CHECK(csv.rfind("trial,success,duration\n", 0) == 0);
    CHECK(fs::exists(dir / "sim" / "stats.json"));

    pl::SweepConfig s;
    s.run = c;
    s.run.out_dir = dir / "sweep";
    s.grid = {45.0, 60.0, 80.0};
    s.check = true;
    REQUIRE(pl::cmd_sweep(s, log) == pl::kOk);
    const auto text = slurp(dir / "sweep" / "sweep.csv");
    CHECK(text.rfind("# schema=rcmdp-sweep/1 axis=deadline\npoint,target,deadline,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);

    s.grid = {1.0, 45.0};
    s.check = false;
    const auto res = pl::run_sweep(io::map_from_json(io::read_json(c.map_path)), s);
    CHECK(res.csv.find(",infeasible,") != std::string::npos);
}

TEST_CASE("exceptions map to exit codes") {
    auto code = [](auto thrower) {
        std::ostringstream log;
        try {
            thrower();
        } catch (...) {
            return pl::report_exception(log);
        }
        return -1;
    };
    CHECK(code([] { throw NumericalError("x"); }) == pl::kNumerical);
    CHECK(code([] { throw assign::InfeasibleAssignment("x"); }) == pl::kInfeasible);
    CHECK(code([] { throw std::invalid_argument("x"); }) == pl::kValidation);
    CHECK(code([] { throw std::runtime_error("x"); }) == pl::kFailure);
}
