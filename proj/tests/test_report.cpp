#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "opim/report.hpp"

using namespace opim;

namespace {

RunReport sample_report() {
    RunReport r;
    r.problem_id = "example2";
    r.method = "opia12";
    r.iterations = 2;
    r.degree_cap = 32;
    r.collocation_points = {0.3, 0.6};
    r.solve.constants = {1.0025, 0.0759};
    r.solve.residual_inf_norm = 3.2e-10;
    r.solve.newton_iterations = 7;
    r.solve.starts_tried = 6;
    r.solve.mode = SolveMode::Collocation;
    r.has_exact = true;
    r.wall_time_seconds = 0.0123;
    for (int i = 1; i <= 3; ++i) {
        ReportRow row;
        row.x = 0.1 * i;
        row.approx = 0.1 * i * (1.0 - 0.1 * i);
        row.exact = row.approx + 2.7e-6;
        row.abs_error = std::abs(row.approx - row.exact);
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace

TEST_CASE("run reports survive a JSON round trip") {
    RunReport r = sample_report();
    std::string text = run_report_to_json(r);
    CHECK(text.back() == '\n');

    RunReport back = run_report_from_json(text);
    CHECK(back.problem_id == r.problem_id);
    CHECK(back.method == r.method);
    CHECK(back.iterations == r.iterations);
    CHECK(back.degree_cap == r.degree_cap);
    CHECK(back.collocation_points == r.collocation_points);
    CHECK(back.solve.constants == r.solve.constants);
    CHECK(back.solve.residual_inf_norm == r.solve.residual_inf_norm);
    CHECK(back.solve.newton_iterations == r.solve.newton_iterations);
    CHECK(back.solve.starts_tried == r.solve.starts_tried);
    CHECK(back.solve.mode == r.solve.mode);
    CHECK(back.has_exact == r.has_exact);
    CHECK(back.wall_time_seconds == r.wall_time_seconds);
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(back.rows[i].x == r.rows[i].x);
        CHECK(back.rows[i].approx == r.rows[i].approx);
        CHECK(back.rows[i].exact == r.rows[i].exact);
        CHECK(back.rows[i].abs_error == r.rows[i].abs_error);
    }

    // serialization itself is deterministic
    CHECK(run_report_to_json(back) == text);
}

TEST_CASE("tampered or malformed reports are rejected") {
    RunReport r = sample_report();
    r.rows[1].abs_error = 1e-3;  // no longer |approx - exact|
    CHECK_THROWS_AS(run_report_from_json(run_report_to_json(r)), Error);

    CHECK_THROWS_AS(run_report_from_json("not json at all"), Error);
    CHECK_THROWS_AS(run_report_from_json("{\"problem\": \"x\"}"), Error);
    try {
        run_report_from_json("[1, 2]");
        FAIL("array accepted as a report");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bad run report") != std::string::npos);
    }
}

TEST_CASE("error table for the boundary problem") {
    ErrorTable t = build_error_table(2);
    CHECK(t.problem_id == "example2");
    REQUIRE(t.xs.size() == 9);
    CHECK(t.xs.front() == doctest::Approx(0.1));
    CHECK(t.xs.back() == doctest::Approx(0.9));
    REQUIRE(t.columns.size() == 5);

    CHECK(t.columns[0].method == "opia11");
    CHECK(t.columns[0].iterations == 1);
    CHECK(t.columns[1].iterations == 2);
    CHECK(t.columns[2].iterations == 3);
    CHECK(t.columns[3].method == "opia12");
    CHECK(t.columns[3].iterations == 1);
    CHECK(t.columns[4].iterations == 2);
    for (const ErrorTableColumn& c : t.columns) {
        CHECK(int(c.constants.size()) == c.iterations);
        CHECK(c.abs_errors.size() == t.xs.size());
    }

    // frozen closed-form values for the lambda = 1 problem
    CHECK(t.exact[2] == doctest::Approx(0.117609095768).epsilon(1e-10));  // x = 0.3
    double worst_y3 =
        *std::max_element(t.columns[2].abs_errors.begin(), t.columns[2].abs_errors.end());
    CHECK(worst_y3 <= 1.2e-6);  // the order-1 three-step column is sharp

    // rendering is deterministic and carries the solve context
    std::string csv = error_table_csv(t);
    CHECK(csv == error_table_csv(build_error_table(2)));
    CHECK(csv.find("# problem: example2") != std::string::npos);
    CHECK(csv.find("# degree cap: 32") != std::string::npos);
    CHECK(csv.find("collocation points: 0.3 0.6 0.9") != std::string::npos);
    CHECK(csv.find("x,opia11_y1,opia11_y2,opia11_y3,opia12_y1,opia12_y2,exact") !=
          std::string::npos);
    CHECK(csv.find("0.140539214400485") != std::string::npos);  // exact at x = 0.5
}

TEST_CASE("error tables for the other problems report the failing solve") {
    // at (0.3, 0.6, 0.9) the three-step order-1 collocation system has no
    // real solution for these two problems, so the table cannot be built
    CHECK_THROWS_AS(build_error_table(1), NoConvergenceError);
    CHECK_THROWS_AS(build_error_table(3), NoConvergenceError);
    CHECK_THROWS_AS(build_error_table(4), Error);
}

TEST_CASE("comparison against the closed form ranks the optimal variant first") {
    ComparisonTable t = build_comparison(make_example1(), {"pia11", "opia11"}, "exact");
    CHECK(t.problem_id == "example1");
    CHECK(t.oracle == "exact");
    REQUIRE(t.xs.size() == 201);
    CHECK(t.xs.front() == doctest::Approx(0.0));
    CHECK(t.xs.back() == doctest::Approx(1.0));
    REQUIRE(t.methods == std::vector<std::string>{"pia11", "opia11"});
    REQUIRE(t.method_values.size() == 2);
    REQUIRE(t.oracle_values.size() == 201);

    double worst_pia = 0.0, worst_opia = 0.0;
    for (std::size_t i = 0; i < t.xs.size(); ++i) {
        worst_pia = std::max(worst_pia, std::abs(t.method_values[0][i] - t.oracle_values[i]));
        worst_opia = std::max(worst_opia, std::abs(t.method_values[1][i] - t.oracle_values[i]));
    }
    CHECK(worst_opia < worst_pia);

    std::string csv = comparison_csv(t);
    CHECK(csv.find("# problem: example1") != std::string::npos);
    CHECK(csv.find("# oracle: exact") != std::string::npos);
    CHECK(csv.find("x,pia11,opia11,oracle") != std::string::npos);
    CHECK(csv == comparison_csv(build_comparison(make_example1(), {"pia11", "opia11"}, "exact")));
}

TEST_CASE("comparison against the difference oracle stays within the method error") {
    ProblemSpec p = make_example3();
    ComparisonTable t = build_comparison(p, {"opia12"}, "fd");

    double worst_vs_fd = 0.0;
    for (std::size_t i = 0; i < t.xs.size(); ++i)
        worst_vs_fd = std::max(worst_vs_fd,
                               std::abs(t.method_values[0][i] - t.oracle_values[i]));

    ComparisonTable e = build_comparison(p, {"opia12"}, "exact");
    double worst_vs_exact = 0.0;
    for (std::size_t i = 0; i < e.xs.size(); ++i)
        worst_vs_exact = std::max(worst_vs_exact,
                                  std::abs(e.method_values[0][i] - e.oracle_values[i]));

    // the difference oracle is orders of magnitude sharper than the method,
    // so switching oracles must not change the observed error level
    CHECK(worst_vs_fd <= worst_vs_exact + 1e-6);
    CHECK(worst_vs_fd >= 1e-8);  // and it is genuinely the method error, not zero

    CHECK_THROWS_AS(build_comparison(p, {"opia12"}, "psychic"), Error);
}
