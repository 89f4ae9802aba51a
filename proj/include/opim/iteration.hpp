#pragma once

// The iteration core: derive the linear correction ODE for the current
// iterate, solve it as a truncated series under homogeneous conditions, and
// accumulate  y_{k+1} = y_k + (C_0 + ... + C_k) * (y_c)_k.

#include <string>
#include <vector>

#include "opim/problem.hpp"
#include "opim/series.hpp"

namespace opim {

// y_c'' + q1*y_c' + q0*y_c = rhs, normalized so the y_c'' coefficient is 1.
struct LinearCorrectionODE {
    double q1 = 0.0;
    double q0 = 0.0;
    TruncatedSeries rhs;
};

// Zero when the conditions are homogeneous, otherwise the affine function
// matching them; either way the starting iterate satisfies the conditions
// exactly.
TruncatedSeries trivial_start(const ProblemSpec& problem, int degree_cap);

// Assemble the correction equation at iterate y_n. Terms linear in the
// correction with constant coefficients form the left side; everything else
// is evaluated over the series y_n and collected into rhs. Throws
// UnsupportedProblemError when a left-side coefficient is not a constant or
// when quadratic correction terms survive (nonlinearities outside the
// exp-type family handled here).
LinearCorrectionODE build_correction(const ProblemSpec& problem, const MethodConfig& cfg,
                                     const TruncatedSeries& y_n);

// Solve the correction ODE with the correction pinned to zero at the
// problem's condition functionals (IVP: value and slope at a; BVP: values at
// a and b), so iterates keep satisfying the conditions. Requires q1 = 0
// (UnsupportedProblemError otherwise); throws ResonanceError when the
// homogeneous solutions cannot match the conditions (singular 2x2 system).
TruncatedSeries solve_correction(const LinearCorrectionODE& ode, const ProblemSpec& problem,
                                 int degree_cap);

struct IterationState {
    TruncatedSeries iterate;
    std::vector<double> consumed_constants;
    std::vector<TruncatedSeries> history;  // y_1 .. y_m (excludes y_0)
};

// Run cfg.iterations correction steps. In optimal mode `constants` must have
// exactly cfg.iterations entries; otherwise it is ignored and every constant
// is 1.
IterationState run_iterations(const ProblemSpec& problem, const MethodConfig& cfg,
                              const std::vector<double>& constants);

// Human-readable correction equation at a generic iterate, e.g.
//   (y_c)'' = -y'' + 2 y + 2
// for the exp-type IVP at Taylor order 1. Deterministic.
std::string describe_correction(const ProblemSpec& problem, const MethodConfig& cfg);

}  // namespace opim
