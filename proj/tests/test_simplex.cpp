#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "predopt/simplex.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace predopt;

namespace {

int col(Milp& m, const std::string& name, double lo, double hi, double obj) {
    Column c;
    c.name = name;
    c.lower = lo;
    c.upper = hi;
    c.objective = obj;
    return m.add_column(c);
}

Milp random_lp(unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_int_distribution<int> ncols(2, 8);
    std::uniform_int_distribution<int> nrows(1, 3);
    std::uniform_real_distribution<double> lo_d(-3.0, 0.0);
    std::uniform_real_distribution<double> hi_d(0.5, 4.0);
    std::uniform_real_distribution<double> obj_d(-5.0, 5.0);
    std::uniform_real_distribution<double> coeff_d(-3.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Milp m;
    m.maximize = unit(gen) < 0.5;
    const int n = ncols(gen);
    for (int j = 0; j < n; ++j)
        col(m, "x" + std::to_string(j), lo_d(gen), hi_d(gen), obj_d(gen));

    std::vector<double> anchor(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        std::uniform_real_distribution<double> point(m.columns[j].lower, m.columns[j].upper);
        anchor[static_cast<std::size_t>(j)] = point(gen);
    }

    const int rows = nrows(gen);
    for (int r = 0; r < rows; ++r) {
        std::vector<RowTerm> terms;
        double activity = 0.0;
        for (int j = 0; j < n; ++j) {
            if (unit(gen) < 0.6) {
                const double c = coeff_d(gen);
                terms.push_back({j, c});
                activity += c * anchor[static_cast<std::size_t>(j)];
            }
        }
        const std::string name = "r" + std::to_string(r);
        const double kind = unit(gen);
        if (kind < 0.3) {
            m.add_row(row_le(name, terms, activity + (unit(gen) < 0.85 ? unit(gen) * 3.0
                                                                        : -unit(gen) * 2.0)));
        } else if (kind < 0.6) {
            m.add_row(row_ge(name, terms, activity - (unit(gen) < 0.85 ? unit(gen) * 3.0
                                                                        : -unit(gen) * 2.0)));
        } else if (kind < 0.8) {
            m.add_row(row_eq(name, terms, activity));
        } else {
            const double w = unit(gen) * 2.0;
            m.add_row(row_range(name, terms, activity - w, activity + w));
        }
    }
    return m;
}

}

TEST_CASE("a single bounded column rides to the binding row") {
    Milp m;
    const int x = col(m, "x", 0.0, 10.0, 1.0);
    m.add_row(row_le("cap", {{x, 1.0}}, 3.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 3.0) <= 1e-9);
    CHECK(std::abs(r.values[0] - 3.0) <= 1e-9);
}

TEST_CASE("contradictory row and bound report infeasible") {
    Milp m;
    const int x = col(m, "x", 0.0, 10.0, 1.0);
    col(m, "y", 0.0, 10.0, 1.0);
    m.add_row(row_le("cap", {{x, 1.0}}, -1.0));
    CHECK(solve_lp(m).status == LpStatus::infeasible);
}

TEST_CASE("a free improving direction reports unbounded") {
    const double inf = std::numeric_limits<double>::infinity();
    Milp m;
    col(m, "x", -inf, inf, 1.0);
    CHECK(solve_lp(m).status == LpStatus::unbounded);

    Milp capped;
    const int x = col(capped, "x", -inf, inf, 1.0);
    capped.add_row(row_le("cap", {{x, 1.0}}, 5.0));
    const LpResult r = solve_lp(capped);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 5.0) <= 1e-9);
}

TEST_CASE("two variable polytope lands on the expected vertex") {
    Milp m;
    const int x = col(m, "x", 0.0, 10.0, 3.0);
    const int y = col(m, "y", 0.0, 10.0, 2.0);
    m.add_row(row_le("a", {{x, 1.0}, {y, 1.0}}, 4.0));
    m.add_row(row_le("b", {{x, 1.0}, {y, 3.0}}, 6.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 12.0) <= 1e-8);
    CHECK(std::abs(r.values[static_cast<std::size_t>(x)] - 4.0) <= 1e-8);
    CHECK(std::abs(r.values[static_cast<std::size_t>(y)] - 0.0) <= 1e-8);
}

TEST_CASE("range rows constrain from both sides") {
    Milp m;
    const int x = col(m, "x", 0.0, 5.0, 0.0);
    const int y = col(m, "y", 0.0, 3.0, 1.0);
    m.add_row(row_range("band", {{y, 1.0}, {x, -1.0}}, 1.0, 2.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 3.0) <= 1e-8);
    CHECK(r.values[static_cast<std::size_t>(y)] - r.values[static_cast<std::size_t>(x)] >=
          1.0 - 1e-7);
    CHECK(r.values[static_cast<std::size_t>(y)] - r.values[static_cast<std::size_t>(x)] <=
          2.0 + 1e-7);
}

TEST_CASE("minimize flips the optimization sense") {
    Milp m;
    m.maximize = false;
    const int x = col(m, "x", 0.0, 5.0, 1.0);
    const int y = col(m, "y", 0.0, 5.0, 1.0);
    m.add_row(row_ge("floor", {{x, 1.0}, {y, 1.0}}, 2.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 2.0) <= 1e-8);
}

TEST_CASE("equality rows hold exactly and fixed columns never move") {
    Milp m;
    const int x = col(m, "x", 3.0, 3.0, 0.0);
    const int y = col(m, "y", 0.0, 10.0, 1.0);
    m.add_row(row_eq("tie", {{y, 1.0}, {x, -2.0}}, 1.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(r.values[static_cast<std::size_t>(x)] == 3.0);
    CHECK(std::abs(r.values[static_cast<std::size_t>(y)] - 7.0) <= 1e-7);
}

TEST_CASE("duplicate terms on one column accumulate") {
    Milp m;
    const int x = col(m, "x", 0.0, 10.0, 1.0);
    m.add_row(row_le("twice", {{x, 1.0}, {x, 1.0}}, 4.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 2.0) <= 1e-8);
}

TEST_CASE("rows without terms only gate feasibility") {
    Milp ok;
    col(ok, "x", 0.0, 1.0, 1.0);
    ok.add_row(row_range("slackish", {}, -1.0, 1.0));
    CHECK(solve_lp(ok).status == LpStatus::optimal);

    Milp bad;
    col(bad, "x", 0.0, 1.0, 1.0);
    bad.add_row(row_eq("impossible", {}, 2.0));
    CHECK(solve_lp(bad).status == LpStatus::infeasible);
}

TEST_CASE("negative variable ranges optimize against the near bound") {
    Milp m;
    col(m, "x", -5.0, -2.0, 1.0);
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(r.objective == -2.0);
}

TEST_CASE("a degenerate vertex with redundant rows still terminates") {
    Milp m;
    const int x = col(m, "x", 0.0, 1.0, 1.0);
    const int y = col(m, "y", 0.0, 1.0, 1.0);
    m.add_row(row_le("a", {{x, 1.0}, {y, 1.0}}, 2.0));
    m.add_row(row_le("b", {{x, 2.0}, {y, 2.0}}, 4.0));
    m.add_row(row_le("c", {{x, 3.0}, {y, 3.0}}, 6.0));
    m.add_row(row_le("d", {{x, 1.0}}, 1.0));
    m.add_row(row_le("e", {{y, 1.0}}, 1.0));
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - 2.0) <= 1e-8);
}

TEST_CASE("column bound overrides replace the stored bounds") {
    Milp m;
    const int x = col(m, "x", 0.0, 8.0, 1.0);
    const int y = col(m, "y", 0.0, 8.0, 1.0);
    m.add_row(row_le("cap", {{x, 1.0}, {y, 1.0}}, 10.0));

    SimplexSolver solver;
    std::vector<Interval> bounds = {{2.0, 2.0}, {0.0, 8.0}};
    const LpResult r = solver.solve(m, bounds);
    CHECK(r.status == LpStatus::optimal);
    CHECK(r.values[static_cast<std::size_t>(x)] == 2.0);
    CHECK(std::abs(r.values[static_cast<std::size_t>(y)] - 8.0) <= 1e-8);

    std::vector<Interval> crossed = {{3.0, 2.0}, {0.0, 8.0}};
    CHECK(solver.solve(m, crossed).status == LpStatus::infeasible);

    std::vector<Interval> wrong_size = {{0.0, 1.0}};
    CHECK_THROWS_AS(solver.solve(m, wrong_size), std::invalid_argument);
}

TEST_CASE("random small programs match the vertex enumeration oracle") {
    int optimal_seen = 0;
    int infeasible_seen = 0;
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const Milp m = random_lp(seed);
        const oracle::OracleLp expect = oracle::lp_by_vertex_enumeration(m);
        const LpResult got = solve_lp(m);
        INFO("seed ", seed);
        if (expect.feasible) {
            ++optimal_seen;
            CHECK(got.status == LpStatus::optimal);
            CHECK(std::abs(got.objective - expect.objective) <=
                  1e-6 * (1.0 + std::abs(expect.objective)));
            CHECK(oracle::milp_feasible(m, got.values, 1e-6));
        } else {
            ++infeasible_seen;
            CHECK(got.status == LpStatus::infeasible);
        }
    }
    CHECK(optimal_seen >= 10);
    CHECK(infeasible_seen >= 1);
}

TEST_CASE("repeat solves are bitwise identical") {
    const Milp m = random_lp(4242);
    const LpResult a = solve_lp(m);
    const LpResult b = solve_lp(m);
    CHECK(a.status == b.status);
    CHECK(a.iterations == b.iterations);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t j = 0; j < a.values.size(); ++j)
        CHECK(a.values[j] == b.values[j]);
}
