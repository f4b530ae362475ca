#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "predopt/transcription.hpp"

#include <random>

using namespace predopt;

TEST_CASE("interval mean of the sigmoid matches frozen and integrated values") {
    CHECK(v_delta(0.0, 1.0) == doctest::Approx(0.6201145069582775).epsilon(1e-14));
    CHECK(v_delta(0.0, 1.0) == doctest::Approx(oracle::mean_sigmoid(0.0, 1.0)).epsilon(1e-10));
    for (double a : {0.5, 1.0, 3.0, 10.0})
        CHECK(v_delta(-a, a) == doctest::Approx(0.5).epsilon(1e-12));

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-8.0, 8.0);
    for (int i = 0; i < 200; ++i) {
        double lo = dist(rng), hi = dist(rng);
        if (lo > hi)
            std::swap(lo, hi);
        if (hi - lo < 1e-3)
            continue;
        CHECK(v_delta(lo, hi) == doctest::Approx(oracle::mean_sigmoid(lo, hi)).epsilon(1e-9));
    }
}

TEST_CASE("interval mean stays inside the endpoint sigmoid values far out in the tail") {
    const double v = v_delta(-50.0, -40.0);
    CHECK(v > sigmoid(-50.0));
    CHECK(v < sigmoid(-40.0));
    CHECK(v > 0.0);
}

TEST_CASE("interval mean rejects degenerate input") {
    CHECK_THROWS_AS(v_delta(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(v_delta(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(v_delta(0.0, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("log-odds range matches corner enumeration") {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::uniform_real_distribution<double> bound(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + trial % 5;
        LogisticRegressionModel m;
        m.intercept = coeff(rng);
        std::vector<Interval> box(k);
        for (std::size_t l = 0; l < k; ++l) {
            m.coefficients.push_back(coeff(rng));
            double a = bound(rng), b = bound(rng);
            if (a > b)
                std::swap(a, b);
            box[l] = {a, b};
        }
        const Interval got = logodds_range(m, box);
        const Interval want = oracle::affine_range_corners(m.intercept, m.coefficients, box);
        CHECK(got.lo == doctest::Approx(want.lo).epsilon(1e-12));
        CHECK(got.hi == doctest::Approx(want.hi).epsilon(1e-12));
    }
}

namespace {

struct LogregBlock {
    Milp milp;
    int x = -1;
    int y = -1;
    int delta = 0;
    LogisticRegressionModel m;
    Interval range{};
};

LogregBlock one_variable_block(double coeff, double intercept, double xlo, double xhi,
                               int delta) {
    LogregBlock b;
    b.delta = delta;
    b.m.coefficients = {coeff};
    b.m.intercept = intercept;
    b.x = b.milp.add_column({"x", xlo, xhi, ColumnKind::continuous});
    b.y = transcribe_logreg(b.milp, "y", b.m, std::vector<Binding>{Binding::variable(b.x)},
                            delta);
    const Interval box[]{{xlo, xhi}};
    b.range = logodds_range(b.m, box);
    return b;
}

// Full assignment for the block: x, then y, then the indicators.
std::vector<double> block_assignment(const LogregBlock& b, double x, double y, int selected) {
    std::vector<double> v(b.milp.columns.size(), 0.0);
    v[b.x] = x;
    v[b.y] = y;
    v[b.y + selected] = 1.0;
    return v;
}

} // namespace

TEST_CASE("logistic block structure") {
    LogregBlock b = one_variable_block(1.0, 0.0, 0.0, 1.0, 10);
    CHECK(b.milp.columns.size() == 1 + 1 + 10);
    CHECK(b.milp.discrete_count() == 10);
    CHECK(b.milp.columns[b.y].name == "y");
    CHECK(b.milp.columns[b.y].tag == ColumnTag::predicted_output);
    CHECK(b.milp.columns[b.y].lower == doctest::Approx(sigmoid(0.0)).epsilon(1e-15));
    CHECK(b.milp.columns[b.y].upper == doctest::Approx(sigmoid(1.0)).epsilon(1e-15));
    CHECK(b.milp.columns[b.y + 1].name == "y_z1");
    CHECK(b.milp.columns[b.y + 1].kind == ColumnKind::binary);

    // One selection row, four families of ten, the mean row, plus envelope
    // segments (at least one per side).
    int caps = 0, cups = 0;
    for (const Row& r : b.milp.rows) {
        if (r.name.find("y_cap") == 0)
            ++caps;
        if (r.name.find("y_cup") == 0)
            ++cups;
    }
    CHECK(caps >= 1);
    CHECK(cups >= 1);
    CHECK(b.milp.rows.size() == 1 + 40 + 1 + caps + cups);
}

TEST_CASE("fully fixed logistic inputs short-circuit to the exact sigmoid") {
    Milp milp;
    LogisticRegressionModel m;
    m.coefficients = {0.5, -0.25};
    m.intercept = 0.75;
    const std::vector<Binding> bindings{Binding::fixed(2.0), Binding::fixed(3.0)};
    const int y = transcribe_logreg(milp, "y", m, bindings, 10);
    CHECK(milp.columns.size() == 1);
    CHECK(milp.rows.empty());
    const double want = sigmoid(0.75 + 0.5 * 2.0 - 0.25 * 3.0);
    CHECK(milp.columns[y].lower == want);
    CHECK(milp.columns[y].upper == want);
}

TEST_CASE("a single interval pins the output to its mean") {
    LogregBlock b = one_variable_block(2.0, -1.0, 0.0, 1.0, 1);
    const double mean = v_delta(b.range.lo, b.range.hi);
    CHECK(oracle::milp_feasible(b.milp, block_assignment(b, 0.3, mean, 1), 1e-9));
    CHECK_FALSE(oracle::milp_feasible(b.milp, block_assignment(b, 0.3, mean + 0.01, 1), 1e-9));
    CHECK_FALSE(oracle::milp_feasible(b.milp, block_assignment(b, 0.3, mean - 0.01, 1), 1e-9));
}

TEST_CASE("interval membership decides which integral assignments are feasible") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> coeff(0.2, 2.5);
    std::uniform_real_distribution<double> icpt(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int delta = 2 + trial % 11;
        LogregBlock b = one_variable_block(coeff(rng), icpt(rng), -1.0, 2.0, delta);
        const double width = b.range.width() / delta;
        for (int d = 0; d < delta; ++d) {
            const double lo = b.range.lo + width * d;
            const double mid = lo + width / 2.0;
            const double x = (mid - b.m.intercept) / b.m.coefficients[0];
            const double mean = v_delta(lo, lo + width);

            CHECK(oracle::milp_feasible(b.milp, block_assignment(b, x, mean, d + 1), 1e-9));

            // The same log-odds point with a distant interval selected must
            // violate a selection row.
            const int other = d + 1 < delta ? delta : 1;
            const double other_mean =
                v_delta(b.range.lo + width * (other - 1), b.range.lo + width * other);
            CHECK_FALSE(
                oracle::milp_feasible(b.milp, block_assignment(b, x, other_mean, other), 1e-9));
        }
    }
}

TEST_CASE("both adjacent intervals accept a boundary point") {
    LogregBlock b = one_variable_block(1.0, 0.0, -2.0, 2.0, 4);
    const double width = b.range.width() / 4;
    const double boundary = b.range.lo + width * 2;
    const double x = boundary;
    CHECK(oracle::milp_feasible(
        b.milp, block_assignment(b, x, v_delta(b.range.lo + width, boundary), 2), 1e-9));
    CHECK(oracle::milp_feasible(
        b.milp, block_assignment(b, x, v_delta(boundary, boundary + width), 3), 1e-9));
}

TEST_CASE("envelope rows hold at every integral point and cut spread mass") {
    LogregBlock b = one_variable_block(1.6, -0.5, 0.0, 1.0, 10);
    const double width = b.range.width() / 10;
    // Integral points all feasible (already covered above); here check that
    // a fractional spread which the paper rows alone would accept is cut.
    std::vector<double> v(b.milp.columns.size(), 0.0);
    const double f = 0.3;
    v[b.x] = f;
    // Spread mass over the two top intervals subject to the selection caps.
    const double cap10 = f * b.range.width() / (width * 9);
    const double cap9 = f * b.range.width() / (width * 8);
    const double m10 = std::min(1.0, cap10);
    const double m9 = std::min(1.0 - m10, cap9);
    v[b.y + 10] = m10;
    v[b.y + 9] = m9;
    v[b.y + 1] = 1.0 - m10 - m9;
    const double v10 = v_delta(b.range.lo + 9 * width, b.range.hi);
    const double v9 = v_delta(b.range.lo + 8 * width, b.range.lo + 9 * width);
    const double v1 = v_delta(b.range.lo, b.range.lo + width);
    v[b.y] = v10 * m10 + v9 * m9 + v1 * (1.0 - m10 - m9);

    bool paper_rows_ok = true;
    bool cap_violated = false;
    for (const Row& r : b.milp.rows) {
        const bool envelope = r.name.find("y_cap") == 0 || r.name.find("y_cup") == 0;
        const bool ok = oracle::row_satisfied(r, v, 1e-9);
        if (envelope && !ok)
            cap_violated = true;
        if (!envelope && r.name != "y_mean" && !ok)
            paper_rows_ok = false;
    }
    CHECK(paper_rows_ok);
    CHECK(cap_violated);
}

TEST_CASE("zero-width log-odds ranges widen instead of failing") {
    LogregBlock b = one_variable_block(0.0, 0.4, 0.0, 1.0, 10);
    CHECK(b.milp.columns.size() == 12);
    CHECK(b.milp.columns[b.y].lower == doctest::Approx(sigmoid(0.4 - 1e-6)).epsilon(1e-12));
    CHECK(b.milp.columns[b.y].upper == doctest::Approx(sigmoid(0.4 + 1e-6)).epsilon(1e-12));
    // The constant log-odds point 0.4 sits on the boundary of intervals 5
    // and 6 of the widened range; select interval 6.
    const double wlo = 0.4 - 1e-6, whi = 0.4 + 1e-6;
    const double e5 = wlo + (whi - wlo) * 5 / 10;
    const double e6 = wlo + (whi - wlo) * 6 / 10;
    const double mean = v_delta(e5, e6);
    CHECK(oracle::milp_feasible(b.milp, block_assignment(b, 0.7, mean, 6), 1e-9));
}

TEST_CASE("logistic transcription is deterministic") {
    LogregBlock a = one_variable_block(1.3, -0.7, 0.0, 3.0, 7);
    LogregBlock b = one_variable_block(1.3, -0.7, 0.0, 3.0, 7);
    CHECK(oracle::milp_equal(a.milp, b.milp));
}

TEST_CASE("interval count below one is rejected") {
    Milp milp;
    milp.add_column({"x", 0.0, 1.0, ColumnKind::continuous});
    LogisticRegressionModel m;
    m.coefficients = {1.0};
    CHECK_THROWS_AS(
        transcribe_logreg(milp, "y", m, std::vector<Binding>{Binding::variable(0)}, 0),
        std::invalid_argument);
}
