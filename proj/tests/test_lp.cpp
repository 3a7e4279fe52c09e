#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace rcmdp;
using lp::LinearProgram;
using lp::Status;

namespace {

// Feasible and bounded by construction: b = A x0 with x0 > 0, c = A'y0 + s0 with s0 > 0.
LinearProgram random_lp(CounterRng& rng, std::size_t n, std::size_t m_eq, std::size_t m_le) {
    LinearProgram p(n);
    std::vector<double> x0(n), s0(n);
    for (auto& v : x0) v = rng.uniform(0.0, 2.0) * (rng.uniform() < 0.5 ? 1.0 : 0.0);
    for (auto& v : s0) v = rng.uniform(0.0, 1.0);
    std::vector<double> c(s0);
    auto add = [&](bool eq) {
        lp::Row r(n);
        for (auto& v : r) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform(-1.0, 1.0);
        double b = 0.0;
        for (std::size_t j = 0; j < n; ++j) b += r[j] * x0[j];
        const double y = eq ? rng.uniform(-1.0, 1.0) : -rng.uniform();
        for (std::size_t j = 0; j < n; ++j) c[j] += y * r[j];
        if (eq) p.add_eq(r, b);
        else p.add_le(r, b + rng.uniform() * 0.5);
    };
    for (std::size_t i = 0; i < m_eq; ++i) add(true);
    for (std::size_t i = 0; i < m_le; ++i) add(false);
    p.objective = c;
    return p;
}

}  // namespace

TEST_CASE("one-variable program") {
    LinearProgram p(1);
    p.objective = {1.0};
    p.add_ge({1.0}, 3.0);
    const auto s = lp::solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(s.x[0] == doctest::Approx(3.0));
}

TEST_CASE("simplex corner") {
    LinearProgram p(2);
    p.objective = {-1.0, -1.0};
    p.add_le({1.0, 1.0}, 1.0);
    const auto s = lp::solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(-1.0));
    CHECK(s.le_duals[0] == doctest::Approx(-1.0));
    CHECK(s.dual_objective == doctest::Approx(-1.0));
}

TEST_CASE("infeasible and unbounded programs are detected") {
    LinearProgram inf(2);
    inf.objective = {1.0, 1.0};
    inf.add_le({1.0, 1.0}, 1.0);
    inf.add_ge({1.0, 0.0}, 2.0);
    CHECK(lp::solve(inf).status == Status::infeasible);

    LinearProgram unb(2);
    unb.objective = {-1.0, 0.0};
    unb.add_le({1.0, -1.0}, 1.0);
    CHECK(lp::solve(unb).status == Status::unbounded);
}

TEST_CASE("free variables and upper bounds") {
    LinearProgram p(2);
    p.objective = {1.0, -1.0};
    p.lower[0] = -lp::kInfinity;
    p.upper[1] = 4.0;
    p.add_ge({1.0, 0.0}, -2.5);
    const auto s = lp::solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.x[0] == doctest::Approx(-2.5));
    CHECK(s.x[1] == doctest::Approx(4.0));
    CHECK(s.objective == doctest::Approx(-6.5));
}

TEST_CASE("malformed programs are rejected") {
    LinearProgram p(2);
    p.objective = {1.0, 1.0};
    p.eq_rows.push_back({1.0});
    p.eq_rhs.push_back(1.0);
    CHECK_THROWS_AS(lp::solve(p), std::invalid_argument);

    LinearProgram q(1);
    q.lower[0] = 2.0;
    q.upper[0] = 1.0;
    CHECK_THROWS_AS(lp::solve(q), std::invalid_argument);
}

TEST_CASE("random programs agree with the interior-point oracle") {
    CounterRng rng(substream_key(7, 1));
    for (int i = 0; i < 60; ++i) {
        const auto p = random_lp(rng, 20, 5, 10);
        const auto s = lp::solve(p);
        const auto ref = oracle::interior_point(p);
        REQUIRE(ref.converged);
        REQUIRE(s.status == Status::optimal);
        CHECK(s.objective == doctest::Approx(ref.objective).epsilon(1e-7).scale(1.0));
        CHECK(std::abs(s.objective - s.dual_objective) <= 1e-7 * (1.0 + std::abs(s.objective)));
        CHECK(s.residuals.primal <= 1e-8);
        CHECK(s.residuals.dual <= 1e-8);
        const auto r = lp::kkt_residuals(p, s);
        CHECK(r.complementarity <= 1e-8);
    }
}

TEST_CASE("degenerate program terminates") {
    // Many constraints active at the optimum.
    LinearProgram p(3);
    p.objective = {-1.0, -1.0, -1.0};
    for (int i = 0; i < 8; ++i) p.add_le({1.0, 1.0, 1.0}, 1.0);
    p.add_le({1.0, 0.0, 0.0}, 1.0);
    p.add_le({0.0, 1.0, 0.0}, 1.0);
    const auto s = lp::solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(-1.0));
}

TEST_CASE("solves are bitwise reproducible") {
    CounterRng rng(substream_key(7, 2));
    const auto p = random_lp(rng, 15, 4, 6);
    const auto a = lp::solve(p), b = lp::solve(p);
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
    CHECK(a.eq_duals == b.eq_duals);
}

TEST_CASE("MPS export lists every section") {
    LinearProgram p(2);
    p.objective = {1.0, 2.0};
    p.add_eq({1.0, 1.0}, 1.0);
    p.add_le({1.0, 0.0}, 0.5);
    std::ostringstream out;
    lp::write_mps(out, p, "TOY");
    const std::string s = out.str();
    for (const char* section : {"NAME", "ROWS", "COLUMNS", "RHS", "ENDATA"}) CHECK(s.find(section) != std::string::npos);
}
