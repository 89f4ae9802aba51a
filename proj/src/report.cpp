#include "opim/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "opim/iteration.hpp"
#include "opim/oracle.hpp"

namespace opim {

namespace {

using nlohmann::json;

std::string fmt15(double v) {
    if (v == 0.0) v = 0.0;  // print negative zero as plain 0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

std::string mode_name(SolveMode mode) {
    return mode == SolveMode::Collocation ? "collocation" : "least-squares";
}

SolveMode mode_from_name(const std::string& name) {
    if (name == "collocation") return SolveMode::Collocation;
    if (name == "least-squares") return SolveMode::LeastSquares;
    throw Error("unknown solve mode '" + name + "'");
}

}  // namespace

std::string run_report_to_json(const RunReport& report) {
    json j;
    j["problem"] = report.problem_id;
    j["method"] = report.method;
    j["iterations"] = report.iterations;
    j["degree_cap"] = report.degree_cap;
    j["collocation_points"] = report.collocation_points;
    j["solve"] = {{"mode", mode_name(report.solve.mode)},
                  {"constants", report.solve.constants},
                  {"residual_inf_norm", report.solve.residual_inf_norm},
                  {"newton_iterations", report.solve.newton_iterations},
                  {"starts_tried", report.solve.starts_tried}};
    j["has_exact"] = report.has_exact;
    json rows = json::array();
    for (const ReportRow& row : report.rows) {
        json r;
        r["x"] = row.x;
        r["approx"] = row.approx;
        if (report.has_exact) {
            r["exact"] = row.exact;
            r["abs_error"] = row.abs_error;
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["wall_time_seconds"] = report.wall_time_seconds;
    return j.dump(2) + "\n";
}

RunReport run_report_from_json(const std::string& text) {
    RunReport report;
    try {
        json j = json::parse(text);
        report.problem_id = j.at("problem").get<std::string>();
        report.method = j.at("method").get<std::string>();
        report.iterations = j.at("iterations").get<int>();
        report.degree_cap = j.at("degree_cap").get<int>();
        report.collocation_points = j.at("collocation_points").get<std::vector<double>>();
        const json& s = j.at("solve");
        report.solve.mode = mode_from_name(s.at("mode").get<std::string>());
        report.solve.constants = s.at("constants").get<std::vector<double>>();
        report.solve.residual_inf_norm = s.at("residual_inf_norm").get<double>();
        report.solve.newton_iterations = s.at("newton_iterations").get<int>();
        report.solve.starts_tried = s.at("starts_tried").get<int>();
        report.has_exact = j.at("has_exact").get<bool>();
        for (const json& r : j.at("rows")) {
            ReportRow row;
            row.x = r.at("x").get<double>();
            row.approx = r.at("approx").get<double>();
            if (report.has_exact) {
                row.exact = r.at("exact").get<double>();
                row.abs_error = r.at("abs_error").get<double>();
            }
            report.rows.push_back(row);
        }
        report.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    } catch (const json::exception& e) {
        throw Error(std::string("bad run report: ") + e.what());
    }
    if (report.has_exact) {
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            const ReportRow& row = report.rows[i];
            if (std::abs(row.approx - row.exact) != row.abs_error)
                throw Error("run report row " + std::to_string(i + 1) +
                            ": abs_error does not match |approx - exact|");
        }
    }
    return report;
}

ErrorTable build_error_table(int which) {
    ProblemSpec problem;
    int rows = 0;
    switch (which) {
        case 1:
            problem = make_example1();
            rows = 10;
            break;
        case 2:
            problem = make_example2(1.0);
            rows = 9;
            break;
        case 3:
            problem = make_example3();
            rows = 9;
            break;
        default:
            throw Error("no such table: " + std::to_string(which));
    }

    ErrorTable table;
    table.problem_id = problem.id;
    for (int i = 1; i <= rows; ++i) table.xs.push_back(double(i) / 10.0);

    ExactSolution sol = exact_for(problem);
    for (double x : table.xs) table.exact.push_back(sol.eval(x));

    const std::vector<double> master_points = {0.3, 0.6, 0.9};
    struct ColumnSpec {
        const char* method;
        int iterations;
    };
    const ColumnSpec specs[] = {
        {"opia11", 1}, {"opia11", 2}, {"opia11", 3}, {"opia12", 1}, {"opia12", 2}};

    for (const ColumnSpec& cs : specs) {
        MethodConfig cfg = method_from_name(cs.method, cs.iterations);
        ResidualSystem sys;
        sys.problem = problem;
        sys.cfg = cfg;
        sys.collocation_points.assign(master_points.begin(),
                                      master_points.begin() + cs.iterations);
        SolveReport solved = solve_collocation(sys);
        TruncatedSeries y = run_iterations(problem, cfg, solved.constants).iterate;

        ErrorTableColumn col;
        col.method = cs.method;
        col.iterations = cs.iterations;
        col.constants = solved.constants;
        for (std::size_t i = 0; i < table.xs.size(); ++i)
            col.abs_errors.push_back(std::abs(table.exact[i] - y.eval(table.xs[i])));
        table.columns.push_back(std::move(col));
    }
    return table;
}

std::string error_table_csv(const ErrorTable& table) {
    std::string out;
    out += "# problem: " + table.problem_id + "\n";
    out += "# degree cap: " + std::to_string(table.degree_cap) + "\n";
    out += "# collocation points: 0.3 0.6 0.9 (first m used per column)\n";
    for (const ErrorTableColumn& col : table.columns) {
        out += "# " + col.method + " m=" + std::to_string(col.iterations) + " constants:";
        for (double c : col.constants) out += " " + fmt15(c);
        out += "\n";
    }
    out += "x,opia11_y1,opia11_y2,opia11_y3,opia12_y1,opia12_y2,exact\n";
    for (std::size_t i = 0; i < table.xs.size(); ++i) {
        out += fmt15(table.xs[i]);
        for (const ErrorTableColumn& col : table.columns)
            out += "," + fmt15(col.abs_errors[i]);
        out += "," + fmt15(table.exact[i]) + "\n";
    }
    return out;
}

ComparisonTable build_comparison(const ProblemSpec& problem,
                                 const std::vector<std::string>& methods,
                                 const std::string& oracle) {
    if (methods.empty()) throw Error("need at least one method to compare");

    ComparisonTable table;
    table.problem_id = problem.id;
    table.oracle = oracle;
    const int samples = 200;
    for (int i = 0; i <= samples; ++i)
        table.xs.push_back(problem.a + double(i) * (problem.b - problem.a) / double(samples));

    for (const std::string& name : methods) {
        MethodConfig cfg = method_from_name(name, 1);
        cfg.iterations = default_iterations(cfg.taylor_order);
        ResidualSystem sys;
        sys.problem = problem;
        sys.cfg = cfg;
        sys.collocation_points = default_points(problem.a, problem.b, cfg.iterations);

        // The plain iteration has nothing to fit; its constants are pinned
        // at one. For the optimal variants, some point sets admit no real
        // collocation root; the comparison still wants a curve, so fall
        // back to the least-squares fit in that case.
        std::vector<double> constants;
        if (cfg.optimal) {
            try {
                constants = solve_collocation(sys).constants;
            } catch (const NoConvergenceError&) {
                constants = solve_least_squares(sys).constants;
            }
        } else {
            constants.assign(std::size_t(cfg.iterations), 1.0);
        }
        TruncatedSeries y = run_iterations(problem, cfg, constants).iterate;

        std::vector<double> values;
        values.reserve(table.xs.size());
        for (double x : table.xs) values.push_back(y.eval(x));
        table.methods.push_back(method_name(cfg));
        table.method_values.push_back(std::move(values));
    }

    if (oracle == "exact") {
        ExactSolution sol = exact_for(problem);
        for (double x : table.xs) table.oracle_values.push_back(sol.eval(x));
    } else if (oracle == "rk4") {
        GridSolution grid = rk4_ivp(problem, 1e-4);
        for (double x : table.xs) table.oracle_values.push_back(grid.value_at(x));
    } else if (oracle == "fd") {
        GridSolution grid = fd_newton_bvp(problem, 2001);
        for (double x : table.xs) table.oracle_values.push_back(grid.value_at(x));
    } else {
        throw Error("unknown oracle '" + oracle + "' (expected rk4, fd or exact)");
    }
    return table;
}

std::string comparison_csv(const ComparisonTable& table) {
    std::string out;
    out += "# problem: " + table.problem_id + "\n";
    out += "# oracle: " + table.oracle + "\n";
    out += "x";
    for (const std::string& m : table.methods) out += "," + m;
    out += ",oracle\n";
    for (std::size_t i = 0; i < table.xs.size(); ++i) {
        out += fmt15(table.xs[i]);
        for (const std::vector<double>& col : table.method_values)
            out += "," + fmt15(col[i]);
        out += "," + fmt15(table.oracle_values[i]) + "\n";
    }
    return out;
}

}  // namespace opim
