#pragma once

// Run reports (JSON) and the CSV emitters behind the `table` and `compare`
// subcommands. All output is deterministic for fixed inputs: no timestamps,
// fixed formatting, 15 significant digits in CSV.

#include <string>
#include <vector>

#include "opim/constants.hpp"
#include "opim/problem.hpp"

namespace opim {

struct ReportRow {
    double x = 0.0;
    double approx = 0.0;
    double exact = 0.0;
    double abs_error = 0.0;
};

struct RunReport {
    std::string problem_id;
    std::string method;  // pia11 | pia12 | opia11 | opia12
    int iterations = 0;
    int degree_cap = kDefaultDegreeCap;
    std::vector<double> collocation_points;
    SolveReport solve;
    bool has_exact = false;  // rows carry exact/abs_error only when true
    std::vector<ReportRow> rows;
    double wall_time_seconds = 0.0;
};

std::string run_report_to_json(const RunReport& report);

// Parses and re-checks the stored abs_error values against |approx - exact|
// bit for bit; a mismatch means the file was edited or produced by a
// different writer, and throws Error.
RunReport run_report_from_json(const std::string& text);

// Error tables for the three bundled problems: rows x = 0.1..1.0 for the
// initial value problem, 0.1..0.9 for the boundary value problems; columns
// are |exact - y_m| for the order-1 method at m = 1,2,3 and the order-2
// method at m = 1,2, then the exact value. Collocation points for every
// column are the first m entries of (0.3, 0.6, 0.9).
struct ErrorTableColumn {
    std::string method;
    int iterations = 0;
    std::vector<double> constants;
    std::vector<double> abs_errors;  // one per row
};

struct ErrorTable {
    std::string problem_id;
    int degree_cap = kDefaultDegreeCap;
    std::vector<double> xs;
    std::vector<double> exact;
    std::vector<ErrorTableColumn> columns;
};

ErrorTable build_error_table(int which);  // 1, 2 or 3
std::string error_table_csv(const ErrorTable& table);

// Method-vs-oracle comparison: 201 uniform samples of each method's final
// iterate plus the oracle curve.
struct ComparisonTable {
    std::string problem_id;
    std::string oracle;  // rk4 | fd | exact
    std::vector<double> xs;
    std::vector<std::string> methods;
    std::vector<std::vector<double>> method_values;  // one vector per method
    std::vector<double> oracle_values;
};

ComparisonTable build_comparison(const ProblemSpec& problem,
                                 const std::vector<std::string>& methods,
                                 const std::string& oracle);
std::string comparison_csv(const ComparisonTable& table);

}  // namespace opim
