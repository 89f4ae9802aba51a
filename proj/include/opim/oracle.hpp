#pragma once

// Independent ground truth: closed-form solutions of the three bundled
// problems and two reference solvers (RK4 for initial value problems,
// finite-difference Newton for boundary value problems). Nothing here
// touches the iteration machinery, so agreement between the two sides is
// meaningful evidence.

#include <vector>

#include "opim/problem.hpp"

namespace opim {

enum class Branch { Lower, Upper };

// theta = sqrt(2*lambda) * cosh(theta/4), bisected to |g(theta)| <= 1e-13.
// The lower root is sought on [0,4], the upper on [4,50]; both brackets are
// checked for a sign change first. Throws NoRealRootError when lambda is
// past the turning point (no real solution).
double solve_theta(double lambda, Branch branch);

class ExactSolution {
public:
    static ExactSolution example1();                    // -2 ln(cos x) on [0,1]
    static ExactSolution bratu1(double lambda, Branch branch = Branch::Lower);
    static ExactSolution bratu2();                      // ln(1 + sin(pi x)) on [0,1]

    double eval(double x) const;

    // bratu1 only; zero otherwise.
    double theta() const { return theta_; }

private:
    enum class Kind { Example1, Bratu1, Bratu2 };
    ExactSolution(Kind kind, double lambda, double theta)
        : kind_(kind), lambda_(lambda), theta_(theta) {}

    Kind kind_;
    double lambda_;
    double theta_;
};

// Build the oracle named by problem.exact ("example1", "bratu1" with the
// problem's lambda, or "bratu2"). Throws Error when the problem declares no
// exact solution or an unknown id.
ExactSolution exact_for(const ProblemSpec& problem, Branch branch = Branch::Lower);

struct GridSolution {
    std::vector<double> x;
    std::vector<double> y;

    // Value at the grid point nearest to xq when one lies within 1e-9;
    // linear interpolation otherwise.
    double value_at(double xq) const;
    double max_abs_diff(const ExactSolution& sol) const;
};

// Classical fourth-order Runge-Kutta on (y, y') over [a,b] with the given
// step. IVP conditions required; the nonlinearity must not involve y''.
// Throws OverflowError (carrying the last finite x) when the solution blows
// up mid-integration.
GridSolution rk4_ivp(const ProblemSpec& problem, double step);

// Second-order central differences with Newton iteration on the interior
// unknowns; tridiagonal Jacobian assembled from symbolic partials of the
// nonlinearity and solved by the Thomas algorithm. Starts from the zero
// function (lower branch), converges when the update inf-norm is <= 1e-12,
// throws DivergenceError after 50 iterations without convergence.
GridSolution fd_newton_bvp(const ProblemSpec& problem, int nodes);

}  // namespace opim
