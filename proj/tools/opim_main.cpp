#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opim/constants.hpp"
#include "opim/iteration.hpp"
#include "opim/oracle.hpp"
#include "opim/report.hpp"

namespace {

using namespace opim;

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
}

std::string join_constants(const std::vector<double>& c) {
    std::string s;
    char buf[64];
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g", c[i]);
        if (i) s += ", ";
        s += buf;
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbation-iteration solver for second-order nonlinear ODEs"};
    app.require_subcommand(1);

    std::string d_file, d_method = "opia11";
    int d_order = 0;
    double d_lambda = 0.0;
    CLI::App* derive = app.add_subcommand("derive", "print the correction equation");
    derive->add_option("problem", d_file, "problem definition file")->required();
    derive->add_option("--method", d_method, "pia11, pia12, opia11 or opia12");
    derive->add_option("--order", d_order, "override the Taylor order (1 or 2)");
    derive->add_option("--lambda", d_lambda, "override the lambda parameter");

    std::string s_file, s_method = "opia11", s_out;
    int s_iters = 0, s_degree = kDefaultDegreeCap;
    std::vector<double> s_points;
    bool s_ls = false;
    double s_lambda = 0.0;
    CLI::App* solve = app.add_subcommand("solve", "fit the constants and run the iteration");
    solve->add_option("problem", s_file, "problem definition file")->required();
    solve->add_option("--method", s_method, "pia11, pia12, opia11 or opia12");
    solve->add_option("--iters", s_iters, "iteration count (default depends on the method)");
    CLI::Option* colloc_opt =
        solve->add_option("--colloc", s_points, "comma-separated collocation points")
            ->delimiter(',');
    CLI::Option* ls_opt =
        solve->add_flag("--least-squares", s_ls, "minimize the integrated squared residual");
    colloc_opt->excludes(ls_opt);
    ls_opt->excludes(colloc_opt);
    solve->add_option("--degree", s_degree, "series degree cap");
    solve->add_option("--out", s_out, "write a JSON run report here");
    solve->add_option("--lambda", s_lambda, "override the lambda parameter");

    int t_which = 0;
    std::string t_out;
    CLI::App* table = app.add_subcommand("table", "rebuild one of the bundled error tables");
    table->add_option("which", t_which, "table number (1, 2 or 3)")->required();
    table->add_option("--out", t_out, "write the CSV here instead of stdout");

    std::string c_file, c_oracle = "exact", c_out;
    std::vector<std::string> c_methods;
    double c_lambda = 0.0;
    CLI::App* compare = app.add_subcommand("compare", "sample methods against an oracle");
    compare->add_option("problem", c_file, "problem definition file")->required();
    compare->add_option("--methods", c_methods, "comma-separated method names")
        ->delimiter(',')
        ->required();
    compare->add_option("--oracle", c_oracle, "rk4, fd or exact");
    compare->add_option("--plot-data", c_out, "write the CSV here instead of stdout");
    compare->add_option("--lambda", c_lambda, "override the lambda parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(derive)) {
            ProblemSpec problem = load_problem_file(d_file);
            if (derive->count("--lambda")) problem.params["lambda"] = d_lambda;
            MethodConfig cfg = method_from_name(d_method, 1);
            if (derive->count("--order")) {
                if (d_order != 1 && d_order != 2) throw Error("--order must be 1 or 2");
                cfg.taylor_order = d_order;
            }
            std::printf("%s\n", describe_correction(problem, cfg).c_str());
            return 0;
        }

        if (app.got_subcommand(solve)) {
            ProblemSpec problem = load_problem_file(s_file);
            if (solve->count("--lambda")) problem.params["lambda"] = s_lambda;
            MethodConfig cfg = method_from_name(s_method, 1);
            cfg.iterations =
                solve->count("--iters") ? s_iters : default_iterations(cfg.taylor_order);
            cfg.degree_cap = s_degree;

            ResidualSystem sys;
            sys.problem = problem;
            sys.cfg = cfg;
            sys.collocation_points =
                s_points.empty() ? default_points(problem.a, problem.b, cfg.iterations)
                                 : s_points;

            auto t0 = std::chrono::steady_clock::now();
            SolveReport solved;
            if (!cfg.optimal) {
                solved.constants.assign(std::size_t(cfg.iterations), 1.0);
                double worst = 0.0;
                for (double x : sys.collocation_points)
                    worst = std::max(worst,
                                     std::abs(residual_at(problem, cfg, solved.constants, x)));
                solved.residual_inf_norm = worst;
                solved.mode = s_ls ? SolveMode::LeastSquares : SolveMode::Collocation;
            } else if (s_ls) {
                solved = solve_least_squares(sys);
            } else {
                solved = solve_collocation(sys);
            }
            TruncatedSeries y = run_iterations(problem, cfg, solved.constants).iterate;
            double seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();

            RunReport report;
            report.problem_id = problem.id;
            report.method = method_name(cfg);
            report.iterations = cfg.iterations;
            report.degree_cap = cfg.degree_cap;
            report.collocation_points = sys.collocation_points;
            report.solve = solved;
            report.has_exact = problem.exact.has_value();
            report.wall_time_seconds = seconds;

            double max_err = 0.0;
            for (int i = 0; i <= 10; ++i) {
                ReportRow row;
                row.x = problem.a + double(i) * (problem.b - problem.a) / 10.0;
                row.approx = y.eval(row.x);
                if (report.has_exact) {
                    row.exact = exact_for(problem).eval(row.x);
                    row.abs_error = std::abs(row.approx - row.exact);
                    max_err = std::max(max_err, row.abs_error);
                }
                report.rows.push_back(row);
            }

            std::printf("%s %s m=%d: C = (%s), max |R(x_i)| = %.6g\n", problem.id.c_str(),
                        report.method.c_str(), cfg.iterations,
                        join_constants(solved.constants).c_str(), solved.residual_inf_norm);
            if (report.has_exact)
                std::printf("max |approx - exact| over 11 sample points = %.6g\n", max_err);
            if (!s_out.empty()) {
                write_or_print(run_report_to_json(report), s_out);
                std::printf("report written to %s\n", s_out.c_str());
            }
            return 0;
        }

        if (app.got_subcommand(table)) {
            if (t_which < 1 || t_which > 3) throw Error("table number must be 1, 2 or 3");
            write_or_print(error_table_csv(build_error_table(t_which)), t_out);
            return 0;
        }

        if (app.got_subcommand(compare)) {
            ProblemSpec problem = load_problem_file(c_file);
            if (compare->count("--lambda")) problem.params["lambda"] = c_lambda;
            write_or_print(comparison_csv(build_comparison(problem, c_methods, c_oracle)),
                           c_out);
            return 0;
        }
    } catch (const NoConvergenceError& e) {
        std::fprintf(stderr, "error: %s (starts tried: %d, best residual: %g)\n", e.what(),
                     e.starts_tried(), e.best_residual());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
