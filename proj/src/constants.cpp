#include "opim/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opim/iteration.hpp"

namespace opim {

void ResidualSystem::validate() const {
    if (cfg.iterations < 1) throw Error("iteration count must be at least 1");
    if (int(collocation_points.size()) != cfg.iterations)
        throw Error("need exactly one collocation point per iteration (" +
                    std::to_string(cfg.iterations) + " expected, " +
                    std::to_string(collocation_points.size()) + " given)");
    double prev = problem.a;
    for (double x : collocation_points) {
        if (!(x > prev) || !(x < problem.b))
            throw Error("collocation points must be strictly increasing inside the domain");
        prev = x;
    }
    if (quadrature_panels < 2) throw Error("quadrature needs at least 2 panels");
}

std::vector<double> default_points(double a, double b, int m) {
    if (m < 1) throw Error("need at least one collocation point");
    std::vector<double> pts(std::size_t(m), 0.0);
    for (int i = 1; i <= m; ++i)
        pts[std::size_t(i - 1)] = a + double(i) * (b - a) / double(m + 1);
    return pts;
}

namespace {

// Residual evaluator for a fixed constants vector: the iteration runs once
// up front, after which R(x) is a couple of polynomial evaluations and one
// pointwise pass over the nonlinearity.
class ResidualFunction {
public:
    ResidualFunction(const ProblemSpec& problem, const MethodConfig& cfg,
                     const std::vector<double>& constants)
        : problem_(problem),
          y_(run_iterations(problem, cfg, constants).iterate),
          dy_(y_.derivative()),
          ddy_(dy_.derivative()) {}

    double operator()(double x) const {
        VarBindings v;
        v.x = x;
        v.y = y_.eval(x);
        v.dy = dy_.eval(x);
        v.ddy = ddy_.eval(x);
        v.eps = 1.0;
        return problem_.p2 * *v.ddy + problem_.p1 * *v.dy + problem_.p0 * *v.y +
               eval_at(problem_.nonlinearity, v, problem_.params);
    }

private:
    const ProblemSpec& problem_;
    TruncatedSeries y_, dy_, ddy_;
};

double inf_norm(const std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n = std::max(n, std::abs(x));
    return n;
}

// Composite Simpson over [a,b]; panels is rounded up to an even count.
double simpson_of_square(const ResidualFunction& f, double a, double b, int panels) {
    int n = panels + (panels % 2);
    double h = (b - a) / double(n);
    auto sq = [&](double x) {
        double r = f(x);
        return r * r;
    };
    double acc = sq(a) + sq(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * sq(a + double(i) * h);
    return acc * h / 3.0;
}

// Gaussian elimination with partial pivoting on an m-by-m system; the
// matrix is stored row-major. Returns false when a pivot degenerates.
bool solve_dense(std::vector<double> a, std::vector<double> rhs, std::vector<double>& out) {
    int m = int(rhs.size());
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[std::size_t(r * m + col)]) > std::abs(a[std::size_t(pivot * m + col)]))
                pivot = r;
        if (std::abs(a[std::size_t(pivot * m + col)]) < 1e-300) return false;
        if (pivot != col) {
            for (int c = 0; c < m; ++c)
                std::swap(a[std::size_t(col * m + c)], a[std::size_t(pivot * m + c)]);
            std::swap(rhs[std::size_t(col)], rhs[std::size_t(pivot)]);
        }
        for (int r = col + 1; r < m; ++r) {
            double f = a[std::size_t(r * m + col)] / a[std::size_t(col * m + col)];
            if (f == 0.0) continue;
            for (int c = col; c < m; ++c)
                a[std::size_t(r * m + c)] -= f * a[std::size_t(col * m + c)];
            rhs[std::size_t(r)] -= f * rhs[std::size_t(col)];
        }
    }
    out.assign(std::size_t(m), 0.0);
    for (int r = m - 1; r >= 0; --r) {
        double s = rhs[std::size_t(r)];
        for (int c = r + 1; c < m; ++c) s -= a[std::size_t(r * m + c)] * out[std::size_t(c)];
        out[std::size_t(r)] = s / a[std::size_t(r * m + r)];
    }
    return true;
}

const double kStartGrid[] = {-1.5, -1.0, -0.5, 0.5, 1.0, 1.5};

std::vector<double> start_vector(double c0, int m) {
    std::vector<double> c(std::size_t(m), 0.05);
    c[0] = c0;
    return c;
}

std::vector<double> probe_vector(int m) {
    std::vector<double> c(std::size_t(m), 0.0);
    c[0] = 1.0;
    return c;
}

struct Candidate {
    std::vector<double> constants;
    double norm;
    int iterations;
};

bool already_found(const std::vector<Candidate>& cands, const std::vector<double>& c) {
    for (const Candidate& k : cands) {
        double d = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            d = std::max(d, std::abs(k.constants[i] - c[i]));
        if (d <= 1e-6) return true;
    }
    return false;
}

}  // namespace

double residual_at(const ProblemSpec& problem, const MethodConfig& cfg,
                   const std::vector<double>& constants, double x) {
    return ResidualFunction(problem, cfg, constants)(x);
}

double integrated_square_residual(const ProblemSpec& problem, const MethodConfig& cfg,
                                  const std::vector<double>& constants, int panels) {
    if (panels < 2) throw Error("quadrature needs at least 2 panels");
    ResidualFunction f(problem, cfg, constants);
    return simpson_of_square(f, problem.a, problem.b, panels);
}

SolveReport solve_collocation(const ResidualSystem& sys) {
    sys.validate();
    const int m = sys.cfg.iterations;

    auto eval_points = [&](const std::vector<double>& c) {
        ResidualFunction f(sys.problem, sys.cfg, c);
        std::vector<double> r(sys.collocation_points.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = f(sys.collocation_points[i]);
        return r;
    };

    // Linear problems leave the constants indeterminate; the canonical
    // probe already solving the system is the clean exit.
    {
        std::vector<double> probe = probe_vector(m);
        double n = inf_norm(eval_points(probe));
        if (n <= 1e-12) return SolveReport{probe, n, 0, 0, SolveMode::Collocation};
    }

    std::vector<Candidate> found;
    double best_failed_norm = std::numeric_limits<double>::infinity();
    int starts = 0;

    for (double c0 : kStartGrid) {
        ++starts;
        std::vector<double> c = start_vector(c0, m);
        try {
            std::vector<double> f = eval_points(c);
            double norm = inf_norm(f);
            for (int iter = 0; iter <= 100; ++iter) {
                if (norm <= 1e-9) {
                    if (!already_found(found, c)) found.push_back({c, norm, iter});
                    break;
                }
                if (iter == 100) break;

                // Forward-difference Jacobian, one column per constant.
                std::vector<double> jac(std::size_t(m * m));
                for (int j = 0; j < m; ++j) {
                    double h = 1e-7 * std::max(1.0, std::abs(c[std::size_t(j)]));
                    std::vector<double> cj = c;
                    cj[std::size_t(j)] += h;
                    std::vector<double> fj = eval_points(cj);
                    for (int i = 0; i < m; ++i)
                        jac[std::size_t(i * m + j)] = (fj[std::size_t(i)] - f[std::size_t(i)]) / h;
                }

                std::vector<double> neg_f(f.size());
                for (std::size_t i = 0; i < f.size(); ++i) neg_f[i] = -f[i];
                std::vector<double> step;
                if (!solve_dense(jac, neg_f, step)) break;

                // Halve until the residual norm actually drops.
                double t = 1.0;
                bool accepted = false;
                for (int halving = 0; halving <= 40; ++halving) {
                    std::vector<double> ct = c;
                    for (int j = 0; j < m; ++j) ct[std::size_t(j)] += t * step[std::size_t(j)];
                    std::vector<double> ft = eval_points(ct);
                    double nt = inf_norm(ft);
                    if (nt < norm) {
                        c = std::move(ct);
                        f = std::move(ft);
                        norm = nt;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if (!accepted) break;
            }
            if (norm > 1e-9) best_failed_norm = std::min(best_failed_norm, norm);
        } catch (const Error&) {
            // A start that wanders somewhere the pipeline cannot evaluate
            // simply doesn't contribute a candidate.
        }
    }

    if (found.empty())
        throw NoConvergenceError("collocation did not converge from any start", starts,
                                 best_failed_norm);

    // The system can have several real roots; keep the one whose residual
    // is smallest in the integral sense.
    const Candidate* best = nullptr;
    double best_j = std::numeric_limits<double>::infinity();
    for (const Candidate& cand : found) {
        double j = integrated_square_residual(sys.problem, sys.cfg, cand.constants,
                                              sys.quadrature_panels);
        if (j < best_j) {
            best_j = j;
            best = &cand;
        }
    }
    return SolveReport{best->constants, best->norm, best->iterations, starts,
                       SolveMode::Collocation};
}

SolveReport solve_least_squares(const ResidualSystem& sys) {
    sys.validate();
    const int m = sys.cfg.iterations;

    auto objective = [&](const std::vector<double>& c) {
        ResidualFunction f(sys.problem, sys.cfg, c);
        return simpson_of_square(f, sys.problem.a, sys.problem.b, sys.quadrature_panels);
    };
    // Central differences: the gradient of a quadratic objective comes out
    // exact, so the linear-residual sanity case converges in one step.
    auto gradient = [&](const std::vector<double>& c) {
        std::vector<double> g(std::size_t(m), 0.0);
        for (int j = 0; j < m; ++j) {
            double h = 1e-5 * std::max(1.0, std::abs(c[std::size_t(j)]));
            std::vector<double> cp = c, cm = c;
            cp[std::size_t(j)] += h;
            cm[std::size_t(j)] -= h;
            g[std::size_t(j)] = (objective(cp) - objective(cm)) / (2.0 * h);
        }
        return g;
    };
    auto points_norm = [&](const std::vector<double>& c) {
        ResidualFunction f(sys.problem, sys.cfg, c);
        double n = 0.0;
        for (double x : sys.collocation_points) n = std::max(n, std::abs(f(x)));
        return n;
    };

    {
        std::vector<double> probe = probe_vector(m);
        ResidualFunction f(sys.problem, sys.cfg, probe);
        double n = 0.0;
        int grid = sys.quadrature_panels;
        for (int i = 0; i <= grid; ++i) {
            double x = sys.problem.a +
                       double(i) * (sys.problem.b - sys.problem.a) / double(grid);
            n = std::max(n, std::abs(f(x)));
        }
        if (n <= 1e-12)
            return SolveReport{probe, points_norm(probe), 0, 0, SolveMode::LeastSquares};
    }

    std::vector<Candidate> found;
    double best_failed_norm = std::numeric_limits<double>::infinity();
    int starts = 0;

    for (double c0 : kStartGrid) {
        ++starts;
        std::vector<double> c = start_vector(c0, m);
        try {
            std::vector<double> g = gradient(c);
            double gnorm = inf_norm(g);
            double j_val = objective(c);
            for (int iter = 0; iter <= 100; ++iter) {
                if (gnorm <= 1e-8) {
                    if (!already_found(found, c)) found.push_back({c, gnorm, iter});
                    break;
                }
                if (iter == 100) break;

                std::vector<double> hess(std::size_t(m * m));
                for (int j = 0; j < m; ++j) {
                    double h = 1e-5 * std::max(1.0, std::abs(c[std::size_t(j)]));
                    std::vector<double> cp = c, cm = c;
                    cp[std::size_t(j)] += h;
                    cm[std::size_t(j)] -= h;
                    std::vector<double> gp = gradient(cp);
                    std::vector<double> gm = gradient(cm);
                    for (int i = 0; i < m; ++i)
                        hess[std::size_t(i * m + j)] =
                            (gp[std::size_t(i)] - gm[std::size_t(i)]) / (2.0 * h);
                }
                for (int i = 0; i < m; ++i)
                    for (int j = i + 1; j < m; ++j) {
                        double s = 0.5 * (hess[std::size_t(i * m + j)] +
                                          hess[std::size_t(j * m + i)]);
                        hess[std::size_t(i * m + j)] = s;
                        hess[std::size_t(j * m + i)] = s;
                    }

                std::vector<double> neg_g(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) neg_g[i] = -g[i];
                std::vector<double> step;
                if (!solve_dense(hess, neg_g, step)) break;

                double t = 1.0;
                bool accepted = false;
                for (int halving = 0; halving <= 40; ++halving) {
                    std::vector<double> ct = c;
                    for (int j = 0; j < m; ++j) ct[std::size_t(j)] += t * step[std::size_t(j)];
                    double jt = objective(ct);
                    if (jt < j_val) {
                        c = std::move(ct);
                        j_val = jt;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if (!accepted) break;
                g = gradient(c);
                gnorm = inf_norm(g);
            }
            if (gnorm > 1e-8) best_failed_norm = std::min(best_failed_norm, gnorm);
        } catch (const Error&) {
        }
    }

    if (found.empty())
        throw NoConvergenceError("least-squares minimization did not converge from any start",
                                 starts, best_failed_norm);

    const Candidate* best = nullptr;
    double best_j = std::numeric_limits<double>::infinity();
    for (const Candidate& cand : found) {
        double j = objective(cand.constants);
        if (j < best_j) {
            best_j = j;
            best = &cand;
        }
    }
    return SolveReport{best->constants, points_norm(best->constants), best->iterations, starts,
                       SolveMode::LeastSquares};
}

}  // namespace opim
