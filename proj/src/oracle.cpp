#include "opim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace opim {

namespace {

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

double solve_theta(double lambda, Branch branch) {
    if (lambda < 0.0)
        throw NoRealRootError("theta equation has no real root for lambda = " +
                              fmt_double(lambda));
    auto g = [&](double theta) {
        return theta - std::sqrt(2.0 * lambda) * std::cosh(theta / 4.0);
    };

    double lo = branch == Branch::Lower ? 0.0 : 4.0;
    double hi = branch == Branch::Lower ? 4.0 : 50.0;
    double glo = g(lo);
    double ghi = g(hi);
    if (std::abs(glo) <= 1e-13) return lo;
    if (std::abs(ghi) <= 1e-13) return hi;
    if (glo * ghi > 0.0)
        throw NoRealRootError("no " +
                              std::string(branch == Branch::Lower ? "lower" : "upper") +
                              "-branch root in the bracket for lambda = " + fmt_double(lambda));

    for (int iter = 0; iter < 500; ++iter) {
        double mid = 0.5 * (lo + hi);
        double gmid = g(mid);
        if (std::abs(gmid) <= 1e-13) return mid;
        if (glo * gmid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gmid;
        }
    }
    throw Error("theta bisection stalled for lambda = " + fmt_double(lambda));
}

ExactSolution ExactSolution::example1() {
    return ExactSolution(Kind::Example1, 0.0, 0.0);
}

ExactSolution ExactSolution::bratu1(double lambda, Branch branch) {
    return ExactSolution(Kind::Bratu1, lambda, solve_theta(lambda, branch));
}

ExactSolution ExactSolution::bratu2() {
    return ExactSolution(Kind::Bratu2, 0.0, 0.0);
}

double ExactSolution::eval(double x) const {
    switch (kind_) {
        case Kind::Example1: {
            double c = std::cos(x);
            if (c <= 0.0) throw Error("outside the domain of -2 ln(cos x)");
            return -2.0 * std::log(c);
        }
        case Kind::Bratu1: {
            double top = std::cosh((x - 0.5) * theta_ / 2.0);
            double bottom = std::cosh(theta_ / 4.0);
            return -2.0 * std::log(top / bottom);
        }
        case Kind::Bratu2: {
            double s = 1.0 + std::sin(std::numbers::pi * x);
            if (s <= 0.0) throw Error("outside the domain of ln(1 + sin(pi x))");
            return std::log(s);
        }
    }
    throw Error("unreachable exact-solution kind");
}

ExactSolution exact_for(const ProblemSpec& problem, Branch branch) {
    if (!problem.exact)
        throw Error("problem '" + problem.id + "' declares no exact solution");
    const std::string& name = *problem.exact;
    if (name == "example1") return ExactSolution::example1();
    if (name == "bratu1") return ExactSolution::bratu1(problem.param("lambda"), branch);
    if (name == "bratu2") return ExactSolution::bratu2();
    throw Error("unknown exact solution '" + name + "'");
}

double GridSolution::value_at(double xq) const {
    if (x.empty()) throw Error("empty grid");
    auto it = std::lower_bound(x.begin(), x.end(), xq);
    std::size_t hi = std::size_t(it - x.begin());
    std::size_t nearest = hi;
    if (hi == x.size()) {
        nearest = hi - 1;
    } else if (hi > 0 && xq - x[hi - 1] < x[hi] - xq) {
        nearest = hi - 1;
    }
    if (std::abs(x[nearest] - xq) <= 1e-9) return y[nearest];
    if (xq < x.front() || xq > x.back())
        throw Error("query " + fmt_double(xq) + " is outside the grid");
    std::size_t right = hi == 0 ? 1 : hi;
    double t = (xq - x[right - 1]) / (x[right] - x[right - 1]);
    return (1.0 - t) * y[right - 1] + t * y[right];
}

double GridSolution::max_abs_diff(const ExactSolution& sol) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(y[i] - sol.eval(x[i])));
    return worst;
}

GridSolution rk4_ivp(const ProblemSpec& problem, double step) {
    if (problem.conditions.kind != ConditionKind::Ivp)
        throw Error("the explicit integrator needs initial conditions");
    if (!(step > 0.0)) throw Error("step must be positive");
    if (contains(problem.nonlinearity, Var::DDY))
        throw UnsupportedProblemError(
            "cannot integrate explicitly: the nonlinearity involves y''");

    auto accel = [&](double x, double y, double dy) {
        VarBindings v;
        v.x = x;
        v.y = y;
        v.dy = dy;
        v.eps = 1.0;
        double n = eval_at(problem.nonlinearity, v, problem.params);
        return -(problem.p1 * dy + problem.p0 * y + n) / problem.p2;
    };

    long long n = std::max(1ll, std::llround((problem.b - problem.a) / step));
    GridSolution out;
    out.x.reserve(std::size_t(n) + 1);
    out.y.reserve(std::size_t(n) + 1);

    double y = problem.conditions.first;
    double dy = problem.conditions.second;
    out.x.push_back(problem.a);
    out.y.push_back(y);

    for (long long i = 0; i < n; ++i) {
        double xi = problem.a + double(i) * step;
        double k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v;
        try {
            k1y = dy;
            k1v = accel(xi, y, dy);
            k2y = dy + 0.5 * step * k1v;
            k2v = accel(xi + 0.5 * step, y + 0.5 * step * k1y, dy + 0.5 * step * k1v);
            k3y = dy + 0.5 * step * k2v;
            k3v = accel(xi + 0.5 * step, y + 0.5 * step * k2y, dy + 0.5 * step * k2v);
            k4y = dy + step * k3v;
            k4v = accel(xi + step, y + step * k3y, dy + step * k3v);
        } catch (const EvalError&) {
            throw OverflowError("solution left the evaluable region", xi);
        }
        double yn = y + step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        double vn = dy + step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!std::isfinite(yn) || !std::isfinite(vn) || std::abs(yn) > 1e150 ||
            std::abs(vn) > 1e150)
            throw OverflowError("solution blew up during integration", xi);
        y = yn;
        dy = vn;
        out.x.push_back(problem.a + double(i + 1) * step);
        out.y.push_back(y);
    }
    return out;
}

GridSolution fd_newton_bvp(const ProblemSpec& problem, int nodes) {
    if (problem.conditions.kind != ConditionKind::Bvp)
        throw Error("the finite-difference solver needs boundary conditions");
    if (nodes < 3) throw Error("need at least 3 grid nodes");
    if (contains(problem.nonlinearity, Var::DDY))
        throw UnsupportedProblemError(
            "cannot discretize: the nonlinearity involves y''");

    const int n = nodes;
    const double h = (problem.b - problem.a) / double(n - 1);
    ExprPtr n_y = differentiate(problem.nonlinearity, Var::Y);
    ExprPtr n_dy = differentiate(problem.nonlinearity, Var::DY);

    std::vector<double> xs(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) xs[std::size_t(i)] = problem.a + double(i) * h;

    std::vector<double> y(std::size_t(n), 0.0);
    y[0] = problem.conditions.first;
    y[std::size_t(n - 1)] = problem.conditions.second;

    const int m = n - 2;
    std::vector<double> f(std::size_t(m), 0.0), sub(std::size_t(m), 0.0), diag(std::size_t(m), 0.0),
        super(std::size_t(m), 0.0);

    for (int newton = 0; newton < 50; ++newton) {
        for (int i = 1; i <= m; ++i) {
            double dy = (y[std::size_t(i + 1)] - y[std::size_t(i - 1)]) / (2.0 * h);
            double ddy = (y[std::size_t(i + 1)] - 2.0 * y[std::size_t(i)] +
                          y[std::size_t(i - 1)]) /
                         (h * h);
            VarBindings v;
            v.x = xs[std::size_t(i)];
            v.y = y[std::size_t(i)];
            v.dy = dy;
            v.eps = 1.0;
            double nval = eval_at(problem.nonlinearity, v, problem.params);
            double ny = eval_at(n_y, v, problem.params);
            double ndy = eval_at(n_dy, v, problem.params);

            f[std::size_t(i - 1)] = problem.p2 * ddy + problem.p1 * dy +
                                    problem.p0 * y[std::size_t(i)] + nval;
            sub[std::size_t(i - 1)] =
                problem.p2 / (h * h) - problem.p1 / (2.0 * h) - ndy / (2.0 * h);
            diag[std::size_t(i - 1)] = -2.0 * problem.p2 / (h * h) + problem.p0 + ny;
            super[std::size_t(i - 1)] =
                problem.p2 / (h * h) + problem.p1 / (2.0 * h) + ndy / (2.0 * h);
        }

        // Thomas sweep on the tridiagonal system J * delta = -f.
        std::vector<double> cp(std::size_t(m), 0.0), dp(std::size_t(m), 0.0);
        double pivot = diag[0];
        if (std::abs(pivot) < 1e-300)
            throw DivergenceError("singular Jacobian in the finite-difference solver");
        cp[0] = super[0] / pivot;
        dp[0] = -f[0] / pivot;
        for (int i = 1; i < m; ++i) {
            pivot = diag[std::size_t(i)] - sub[std::size_t(i)] * cp[std::size_t(i - 1)];
            if (std::abs(pivot) < 1e-300)
                throw DivergenceError("singular Jacobian in the finite-difference solver");
            cp[std::size_t(i)] = super[std::size_t(i)] / pivot;
            dp[std::size_t(i)] =
                (-f[std::size_t(i)] - sub[std::size_t(i)] * dp[std::size_t(i - 1)]) / pivot;
        }
        std::vector<double> delta(std::size_t(m), 0.0);
        delta[std::size_t(m - 1)] = dp[std::size_t(m - 1)];
        for (int i = m - 2; i >= 0; --i)
            delta[std::size_t(i)] =
                dp[std::size_t(i)] - cp[std::size_t(i)] * delta[std::size_t(i + 1)];

        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            y[std::size_t(i + 1)] += delta[std::size_t(i)];
            worst = std::max(worst, std::abs(delta[std::size_t(i)]));
        }
        if (!std::isfinite(worst))
            throw DivergenceError("finite-difference Newton iteration produced non-finite values");
        if (worst <= 1e-12) return GridSolution{std::move(xs), std::move(y)};
    }
    throw DivergenceError("finite-difference Newton iteration did not converge in 50 steps");
}

}  // namespace opim
