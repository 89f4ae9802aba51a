// End-to-end acceptance checks. Each criterion prints exactly one verdict
// line; the process exit code is the number of failures, so the suite can
// run under ctest while still reporting every criterion individually.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opim/constants.hpp"
#include "opim/iteration.hpp"
#include "opim/oracle.hpp"
#include "opim/report.hpp"

using namespace opim;

namespace {

int failures = 0;

void verdict(int n, bool pass, const std::string& detail) {
    std::printf("CRITERION %d: %s - %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// max |y_m(x) - exact(x)| over 201 uniform samples
double max_error(const ProblemSpec& p, const MethodConfig& cfg,
                 const std::vector<double>& constants) {
    IterationState st = run_iterations(p, cfg, constants);
    ExactSolution sol = exact_for(p);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        double x = p.a + (p.b - p.a) * i / 200.0;
        worst = std::max(worst, std::abs(st.iterate.eval(x) - sol.eval(x)));
    }
    return worst;
}

// Constants for an optimal method: collocation at the uniform interior
// points, falling back to least squares when no collocation root exists.
SolveReport solve_default(const ProblemSpec& p, const MethodConfig& cfg) {
    ResidualSystem sys{p, cfg, default_points(p.a, p.b, cfg.iterations), 200};
    try {
        return solve_collocation(sys);
    } catch (const NoConvergenceError&) {
        return solve_least_squares(sys);
    }
}

double column_max(const ErrorTable& t, const std::string& method, int iterations) {
    for (const ErrorTableColumn& c : t.columns)
        if (c.method == method && c.iterations == iterations)
            return *std::max_element(c.abs_errors.begin(), c.abs_errors.end());
    throw Error("no such column");
}

void criterion1() {
    try {
        auto t0 = std::chrono::steady_clock::now();
        ProblemSpec p = make_example1();
        MethodConfig cfg{1, true, 3, 32};
        ResidualSystem sys{p, cfg, {0.3, 0.6, 0.9}, 200};
        SolveReport rep = solve_collocation(sys);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const double want[] = {1.00096007239, 0.034138423506, -0.049127633506};
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(rep.constants[std::size_t(i)] - want[i]));
        verdict(1, worst <= 1e-3 && secs < 5.0,
                "constants (" + fmt(rep.constants[0]) + ", " + fmt(rep.constants[1]) + ", " +
                    fmt(rep.constants[2]) + "), worst deviation " + fmt(worst) + ", " +
                    fmt(secs) + " s");
    } catch (const std::exception& e) {
        verdict(1, false, std::string("no constants produced: ") + e.what());
    }
}

void criterion2() {
    try {
        ErrorTable t = build_error_table(1);
        double y3 = column_max(t, "opia11", 3);
        double y2 = column_max(t, "opia12", 2);
        verdict(2, y3 <= 1.2e-2 && y2 <= 4.5e-3,
                "three-step max error " + fmt(y3) + " (need <= 1.2e-2), order-2 two-step " +
                    fmt(y2) + " (need <= 4.5e-3)");
    } catch (const std::exception& e) {
        verdict(2, false, std::string("table could not be built: ") + e.what());
    }
}

void criterion3() {
    try {
        ErrorTable t = build_error_table(2);
        double y3 = column_max(t, "opia11", 3);
        double y2 = column_max(t, "opia12", 2);
        verdict(3, y3 <= 1.2e-6 && y2 <= 1e-6,
                "three-step max error " + fmt(y3) + " (need <= 1.2e-6), order-2 two-step " +
                    fmt(y2) + " (need <= 1e-6)");
    } catch (const std::exception& e) {
        verdict(3, false, std::string("table could not be built: ") + e.what());
    }
}

void criterion4() {
    try {
        ErrorTable t = build_error_table(3);
        double y3 = column_max(t, "opia11", 3);
        double y2 = column_max(t, "opia12", 2);
        verdict(4, y3 <= 7.2e-4 && y2 <= 8.9e-6,
                "three-step max error " + fmt(y3) + " (need <= 7.2e-4), order-2 two-step " +
                    fmt(y2) + " (need <= 8.9e-6)");
    } catch (const std::exception& e) {
        verdict(4, false, std::string("table could not be built: ") + e.what());
    }
}

void criterion5() {
    try {
        bool all = true;
        std::string detail;
        for (int which = 1; which <= 3; ++which) {
            ProblemSpec p = which == 1   ? make_example1()
                            : which == 2 ? make_example2(1.0)
                                         : make_example3();
            for (int order : {1, 2}) {
                MethodConfig opia{order, true, default_iterations(order), 32};
                MethodConfig pia{order, false, opia.iterations, 32};
                double opt = max_error(p, opia, solve_default(p, opia).constants);
                double plain = max_error(p, pia, {});
                if (opt >= plain) all = false;
                if (!detail.empty()) detail += ", ";
                detail += p.id + "/order" + std::to_string(order) + " " + fmt(opt) +
                          (opt < plain ? " < " : " >= ") + fmt(plain);
            }
        }
        verdict(5, all, detail);
    } catch (const std::exception& e) {
        verdict(5, false, std::string("comparison failed to run: ") + e.what());
    }
}

void criterion6() {
    try {
        int successes = 0;
        double worst = 0.0;
        for (int which = 1; which <= 3; ++which) {
            ProblemSpec p = which == 1   ? make_example1()
                            : which == 2 ? make_example2(1.0)
                                         : make_example3();
            for (const char* name : {"pia11", "pia12", "opia11", "opia12"}) {
                MethodConfig cfg = method_from_name(name, 1);
                cfg.iterations = default_iterations(cfg.taylor_order);
                if (!cfg.optimal) continue;  // nothing is solved for fixed constants
                ResidualSystem sys{p, cfg, default_points(p.a, p.b, cfg.iterations), 200};
                try {
                    SolveReport rep = solve_collocation(sys);
                    ++successes;
                    worst = std::max(worst, rep.residual_inf_norm);
                } catch (const NoConvergenceError&) {
                    // acceptable: that combination has no collocation root
                }
            }
        }
        verdict(6, successes >= 1 && worst <= 1e-9,
                std::to_string(successes) + " successful solves, worst residual " + fmt(worst));
    } catch (const std::exception& e) {
        verdict(6, false, std::string("matrix failed to run: ") + e.what());
    }
}

void criterion7() {
    try {
        // the three-step order-1 iterate for the initial value problem
        // (least squares; no collocation root exists) against RK4
        ProblemSpec p1 = make_example1();
        MethodConfig cfg{1, true, 3, 32};
        ResidualSystem sys{p1, cfg, default_points(0.0, 1.0, 3), 200};
        SolveReport rep = solve_least_squares(sys);
        IterationState st = run_iterations(p1, cfg, rep.constants);

        GridSolution rk = rk4_ivp(p1, 1e-4);
        ExactSolution e1 = ExactSolution::example1();
        double vs_rk4 = 0.0, vs_exact = 0.0;
        for (int i = 0; i <= 200; ++i) {
            double x = i / 200.0;
            double y = st.iterate.eval(x);
            vs_rk4 = std::max(vs_rk4, std::abs(y - rk.value_at(x)));
            vs_exact = std::max(vs_exact, std::abs(y - e1.eval(x)));
        }

        double fd2 = fd_newton_bvp(make_example2(1.0), 2001).max_abs_diff(ExactSolution::bratu1(1.0));
        double fd3 = fd_newton_bvp(make_example3(), 2001).max_abs_diff(ExactSolution::bratu2());

        verdict(7, vs_rk4 <= 1.5 * vs_exact && fd2 <= 1e-6 && fd3 <= 1e-6,
                "|y3 - rk4| " + fmt(vs_rk4) + " vs |y3 - exact| " + fmt(vs_exact) +
                    "; fd errors " + fmt(fd2) + ", " + fmt(fd3));
    } catch (const std::exception& e) {
        verdict(7, false, std::string("oracle comparison failed: ") + e.what());
    }
}

void criterion8() {
    try {
        double th = solve_theta(1.0, Branch::Lower);
        double identity = std::abs(th - std::sqrt(2.0) * std::cosh(th / 4.0));
        double mid1 = std::abs(ExactSolution::bratu1(1.0).eval(0.5) - 0.1405383);
        double mid2 = std::abs(ExactSolution::bratu2().eval(0.5) - std::log(2.0));
        // the sine argument shifted by 1 cannot satisfy y(0) = 0
        double erratum = std::abs(std::log(1.0 + std::sin(1.0)));
        verdict(8, identity <= 1e-12 && mid1 <= 1e-6 && mid2 <= 1e-12 && erratum > 0.6,
                "theta identity " + fmt(identity) + ", midpoint deviations " + fmt(mid1) +
                    " and " + fmt(mid2) + ", erratum offset " + fmt(erratum));
    } catch (const std::exception& e) {
        verdict(8, false, std::string("closed-form checks failed: ") + e.what());
    }
}

// small random expression trees with bounded pieces, as in the unit tests
ExprPtr random_expr(std::mt19937& rng, int depth) {
    std::uniform_real_distribution<double> cdist(-2.0, 2.0);
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 4 : 10);
    switch (pick(rng)) {
        case 0: return variable(Var::X);
        case 1: return variable(Var::Y);
        case 2: return variable(Var::DY);
        case 3: return constant(cdist(rng));
        case 4: return constant(cdist(rng));
        case 5:
            return binary(BinaryOp::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 6:
            return binary(BinaryOp::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 7:
            return binary(BinaryOp::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 8: {
            std::uniform_int_distribution<int> edist(2, 3);
            return power(random_expr(rng, depth - 1), edist(rng));
        }
        case 9: {
            UnaryOp ops[] = {UnaryOp::Exp, UnaryOp::Sin, UnaryOp::Cos};
            std::uniform_int_distribution<int> fdist(0, 2);
            return unary(ops[fdist(rng)],
                         binary(BinaryOp::Mul, constant(0.3), random_expr(rng, depth - 1)));
        }
        default:
            return unary(UnaryOp::Ln,
                         binary(BinaryOp::Add, constant(1.5), power(random_expr(rng, depth - 1), 2)));
    }
}

void criterion9() {
    try {
        // symbolic vs five-point finite differences
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> pdist(-1.0, 1.0);
        int checked = 0, guard = 0;
        double worst_rel = 0.0;
        Var wrt[] = {Var::X, Var::Y, Var::DY};
        while (checked < 100 && guard < 2000) {
            ++guard;
            ExprPtr e = random_expr(rng, 3);
            Var v = wrt[guard % 3];
            ExprPtr de = differentiate(e, v);
            VarBindings pt;
            pt.x = pdist(rng);
            pt.y = pdist(rng);
            pt.dy = pdist(rng);
            auto shifted = [&](double s) {
                VarBindings w = pt;
                if (v == Var::X) w.x = *w.x + s;
                if (v == Var::Y) w.y = *w.y + s;
                if (v == Var::DY) w.dy = *w.dy + s;
                return eval_at(e, w, {});
            };
            double sym, base;
            try {
                sym = eval_at(de, pt, {});
                base = eval_at(e, pt, {});
            } catch (const EvalError&) {
                continue;
            }
            if (!std::isfinite(sym) || std::abs(sym) > 1e3 || std::abs(base) > 1e3) continue;
            const double h = 1e-4;
            double fd = (shifted(-2 * h) - 8 * shifted(-h) + 8 * shifted(h) - shifted(2 * h)) /
                        (12 * h);
            worst_rel = std::max(worst_rel, std::abs(sym - fd) / std::max(1.0, std::abs(sym)));
            ++checked;
        }
        bool deriv_ok = checked == 100 && worst_rel <= 1e-6;

        // differentiate-then-integrate identity on a random series
        std::uniform_real_distribution<double> sdist(-1.0, 1.0);
        TruncatedSeries s(16, 0.0, 1.0);
        for (int k = 0; k <= 16; ++k) s.set_coefficient(k, sdist(rng));
        TruncatedSeries back = s.derivative().antiderivative(s.coefficient(0));
        bool series_ok = true;
        for (int k = 0; k <= 15; ++k)
            if (std::abs(back.coefficient(k) - s.coefficient(k)) > 1e-14) series_ok = false;

        // convergence orders of the two reference solvers
        ProblemSpec p1 = make_example1();
        double r1 = rk4_ivp(p1, 0.05).max_abs_diff(ExactSolution::example1());
        double r2 = rk4_ivp(p1, 0.025).max_abs_diff(ExactSolution::example1());
        double rk_factor = r1 / r2;
        double f1 = fd_newton_bvp(make_example2(1.0), 101).max_abs_diff(ExactSolution::bratu1(1.0));
        double f2 = fd_newton_bvp(make_example2(1.0), 201).max_abs_diff(ExactSolution::bratu1(1.0));
        double fd_factor = f1 / f2;
        bool orders_ok = rk_factor >= 12.0 && rk_factor <= 20.0 && fd_factor >= 3.8 &&
                         fd_factor <= 4.2;

        verdict(9, deriv_ok && series_ok && orders_ok,
                "worst derivative mismatch " + fmt(worst_rel) + " over " +
                    std::to_string(checked) + " samples, step-halving factors " +
                    fmt(rk_factor) + " and " + fmt(fd_factor));
    } catch (const std::exception& e) {
        verdict(9, false, std::string("kernel properties failed to run: ") + e.what());
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void criterion10() {
    try {
        const std::string cli = OPIM_CLI_PATH;
        const std::string a = "acceptance_table_a.csv";
        const std::string b = "acceptance_table_b.csv";
        int ra = std::system(("\"" + cli + "\" table 2 --out " + a + " > /dev/null").c_str());
        int rb = std::system(("\"" + cli + "\" table 2 --out " + b + " > /dev/null").c_str());
        std::string ca = slurp(a);
        std::string cb = slurp(b);
        std::remove(a.c_str());
        std::remove(b.c_str());
        verdict(10, ra == 0 && rb == 0 && !ca.empty() && ca == cb,
                "two runs wrote " + std::to_string(ca.size()) + " and " +
                    std::to_string(cb.size()) + " bytes, byte-identical: " +
                    (ca == cb ? "yes" : "no"));
    } catch (const std::exception& e) {
        verdict(10, false, std::string("CLI runs failed: ") + e.what());
    }
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}
