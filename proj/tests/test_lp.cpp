#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pairloc/errors.hpp"
#include "pairloc/lp.hpp"
#include "pairloc/rng.hpp"

using namespace pairloc;

namespace {

lp::Problem make_problem(int rows, int cols) {
    lp::Problem p;
    p.A = Eigen::MatrixXd::Zero(rows, cols);
    p.b = Eigen::VectorXd::Zero(rows);
    p.c = Eigen::VectorXd::Zero(cols);
    p.lower = Eigen::VectorXd::Zero(cols);
    p.upper = Eigen::VectorXd::Constant(cols, lp::kInfinity);
    return p;
}

}  // namespace

TEST_CASE("maximizes a single variable against a slack row") {
    // min -x  s.t.  x + s = 5, x, s >= 0.
    lp::Problem p = make_problem(1, 2);
    p.A << 1, 1;
    p.b << 5;
    p.c << -1, 0;
    const lp::Solution sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.x[0] == doctest::Approx(5.0));
    CHECK(sol.objective == doctest::Approx(-5.0));
    CHECK(sol.y[0] == doctest::Approx(-1.0));  // marginal value of the rhs
}

TEST_CASE("respects upper bounds through bound flips") {
    // min -x1 - 2 x2  s.t.  x1 + x2 = 1,  x in [0, 0.75]^2.
    lp::Problem p = make_problem(1, 2);
    p.A << 1, 1;
    p.b << 1;
    p.c << -1, -2;
    p.upper = Eigen::VectorXd::Constant(2, 0.75);
    const lp::Solution sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.x[1] == doctest::Approx(0.75));
    CHECK(sol.x[0] == doctest::Approx(0.25));
    CHECK(sol.objective == doctest::Approx(-1.75));
}

TEST_CASE("handles shifted lower bounds") {
    // min x1 + x2  s.t.  x1 + x2 = 1,  x1 >= -2, x2 in [0.2, inf).
    lp::Problem p = make_problem(1, 2);
    p.A << 1, 1;
    p.b << 1;
    p.c << 1, 1;
    p.lower << -2, 0.2;
    const lp::Solution sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("detects infeasibility") {
    // x1 + x2 = 3 with x in [0, 1]^2.
    lp::Problem p = make_problem(1, 2);
    p.A << 1, 1;
    p.b << 3;
    p.c << 1, 1;
    p.upper = Eigen::VectorXd::Constant(2, 1.0);
    CHECK(lp::solve(p).status == lp::Status::infeasible);
}

TEST_CASE("detects unboundedness") {
    // min -x1  s.t.  x1 - x2 = 0, both unbounded above.
    lp::Problem p = make_problem(1, 2);
    p.A << 1, -1;
    p.b << 0;
    p.c << -1, 0;
    CHECK(lp::solve(p).status == lp::Status::unbounded);
}

TEST_CASE("solves a degenerate two-row program") {
    // min -x3 s.t. x1 + x3 = 1, x2 + x3 = 1, x >= 0; optimum x3 = 1.
    lp::Problem p = make_problem(2, 3);
    p.A << 1, 0, 1,
           0, 1, 1;
    p.b << 1, 1;
    p.c << 0, 0, -1;
    const lp::Solution sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.x[2] == doctest::Approx(1.0));
}

TEST_CASE("random feasible programs close the duality gap") {
    RandomStream rng(314);
    for (int trial = 0; trial < 60; ++trial) {
        const int rows = 2 + static_cast<int>(rng.integer_below(4));
        const int cols = rows + 2 + static_cast<int>(rng.integer_below(8));
        lp::Problem p = make_problem(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) p.A(r, c) = rng.normal();
        Eigen::VectorXd x0(cols);
        for (int c = 0; c < cols; ++c) x0[c] = std::abs(rng.normal());
        p.b = p.A * x0;  // feasible by construction
        for (int c = 0; c < cols; ++c) p.c[c] = rng.normal() + 2.0;  // mostly bounded

        const lp::Solution sol = lp::solve(p);
        if (sol.status != lp::Status::optimal) {
            CHECK(sol.status == lp::Status::unbounded);
            continue;
        }
        // Primal feasibility.
        CHECK((p.A * sol.x - p.b).cwiseAbs().maxCoeff() <= 1e-7);
        CHECK(sol.x.minCoeff() >= -1e-9);
        // Dual feasibility and complementary slackness give strong duality.
        const Eigen::VectorXd reduced = p.c - p.A.transpose() * sol.y;
        CHECK(reduced.minCoeff() >= -1e-7);
        for (int c = 0; c < cols; ++c) CHECK(std::abs(reduced[c] * sol.x[c]) <= 1e-6);
        CHECK(std::abs(sol.objective - p.b.dot(sol.y)) <=
              1e-7 * (1.0 + std::abs(sol.objective)));
    }
}

TEST_CASE("rejects malformed problems") {
    lp::Problem p = make_problem(1, 2);
    p.lower[0] = -lp::kInfinity;
    CHECK_THROWS_AS(lp::solve(p), InvalidParameter);
    lp::Problem q = make_problem(1, 2);
    q.lower[0] = 2.0;
    q.upper[0] = 1.0;
    CHECK_THROWS_AS(lp::solve(q), InvalidParameter);
}
