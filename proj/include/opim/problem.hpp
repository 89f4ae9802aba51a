#pragma once

// Problem and method descriptions: the ODE  p2*y'' + p1*y' + p0*y + N = 0
// with two conditions (initial or two-point boundary), plus the knobs that
// select a perturbation-iteration variant.

#include <optional>
#include <string>

#include "opim/expr.hpp"
#include "opim/series.hpp"

namespace opim {

enum class ConditionKind { Ivp, Bvp };

// Ivp: y(a) = first, y'(a) = second.  Bvp: y(a) = first, y(b) = second.
struct Conditions {
    ConditionKind kind = ConditionKind::Ivp;
    double first = 0.0;
    double second = 0.0;

    bool homogeneous() const { return first == 0.0 && second == 0.0; }
};

struct ProblemSpec {
    std::string id;

    // Linear part L[y] = p2*y'' + p1*y' + p0*y. p2 must be nonzero.
    double p2 = 1.0, p1 = 0.0, p0 = 0.0;

    // Nonlinear part N, as written (the artificial parameter is inserted
    // later). The full equation is L[y] + N = 0.
    ExprPtr nonlinearity;

    ParamBindings params;

    double a = 0.0, b = 1.0;
    Conditions conditions;

    // Closed-form reference, when one is known: "example1", "bratu1" or
    // "bratu2" (see oracle.hpp).
    std::optional<std::string> exact;

    double param(const std::string& name) const;
};

struct MethodConfig {
    int taylor_order = 1;  // 1 or 2
    bool optimal = true;   // false: every constant is 1
    int iterations = 3;
    int degree_cap = kDefaultDegreeCap;
};

// Method labels used by the CLI and reports: pia11, pia12, opia11, opia12.
// The first digit is the number of correction terms (always 1 here), the
// second the Taylor order. Throws Error for anything else.
MethodConfig method_from_name(const std::string& name, int iterations);
std::string method_name(const MethodConfig& cfg);

// Default iteration counts: 3 at Taylor order 1, 2 at order 2.
int default_iterations(int taylor_order);

// The three bundled problems.
ProblemSpec make_example1();                        // y'' - 2 e^y = 0, y(0)=y'(0)=0 on [0,1]
ProblemSpec make_example2(double lambda = 1.0);     // y'' + lambda e^y = 0, y(0)=y(1)=0
ProblemSpec make_example3();                        // y'' + pi^2 e^{-y} = 0, y(0)=y(1)=0

// Problem definition files: one `key = value` pair per line, '#' comments.
//
//   linear     = ddy                     (expression in y, dy, ddy; optional, default ddy)
//   nonlinear  = -2*exp(y)               (expression; the N of L[y] + N = 0)
//   domain     = 0 1
//   conditions = ivp 0 0                 (or: bvp 0 0)
//   param lambda = 1                     (repeatable; names become usable in expressions)
//   exact      = example1                (optional oracle id)
//
// Malformed input raises Error with a "<id> line N: ..." message.
ProblemSpec parse_problem_text(const std::string& text, const std::string& id);
ProblemSpec load_problem_file(const std::string& path);

}  // namespace opim
