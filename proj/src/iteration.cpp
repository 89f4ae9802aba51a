#include "opim/iteration.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace opim {

TruncatedSeries trivial_start(const ProblemSpec& problem, int degree_cap) {
    TruncatedSeries y0(degree_cap, problem.a, problem.b);
    if (problem.conditions.homogeneous()) return y0;

    // Affine function matching the two conditions.
    double c0, c1;
    if (problem.conditions.kind == ConditionKind::Ivp) {
        c1 = problem.conditions.second;
        c0 = problem.conditions.first - c1 * problem.a;
    } else {
        c1 = (problem.conditions.second - problem.conditions.first) / (problem.b - problem.a);
        c0 = problem.conditions.first - c1 * problem.a;
    }
    y0.set_coefficient(0, c0);
    y0.set_coefficient(1, c1);
    return y0;
}

namespace {

// Evaluate an expression whose variables stand for whole functions: x is
// the identity series and y, dy, ddy are the given series. Only polynomial
// structure survives this (sums, products, integer powers, division by
// constants); a transcendental applied to anything containing a variable
// has no series counterpart here and is rejected.
struct SeriesEnv {
    const TruncatedSeries& x;
    const TruncatedSeries& y;
    const TruncatedSeries& dy;
    const TruncatedSeries& ddy;
    const ParamBindings& params;
};

TruncatedSeries series_eval(const ExprPtr& e, const SeriesEnv& env) {
    if (!contains_any_variable(e)) {
        return TruncatedSeries::constant(eval_at(e, VarBindings{}, env.params),
                                         env.x.degree_cap(), env.x.lo(), env.x.hi());
    }
    switch (e->kind()) {
        case Expr::Kind::Variable:
            switch (e->var()) {
                case Var::X: return env.x;
                case Var::Y: return env.y;
                case Var::DY: return env.dy;
                case Var::DDY: return env.ddy;
                case Var::Eps:
                    throw UnsupportedProblemError(
                        "eps left over in a series coefficient");
            }
            break;
        case Expr::Kind::Unary:
            if (e->unary_op() == UnaryOp::Neg) return -series_eval(e->operand(), env);
            throw UnsupportedProblemError(
                "cannot take a transcendental function of the iterate in a correction "
                "right-hand side");
        case Expr::Kind::Binary: {
            if (e->binary_op() == BinaryOp::Div) {
                if (contains_any_variable(e->rhs()))
                    throw UnsupportedProblemError("cannot divide by the iterate");
                double d = eval_at(e->rhs(), VarBindings{}, env.params);
                if (d == 0.0) throw EvalError("division by zero");
                return series_eval(e->lhs(), env) * (1.0 / d);
            }
            TruncatedSeries a = series_eval(e->lhs(), env);
            TruncatedSeries b = series_eval(e->rhs(), env);
            switch (e->binary_op()) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                default: break;
            }
            break;
        }
        case Expr::Kind::Power: {
            if (e->exponent() < 0)
                throw UnsupportedProblemError("cannot raise the iterate to a negative power");
            return pow(series_eval(e->operand(), env), e->exponent());
        }
        default:
            break;
    }
    throw UnsupportedProblemError("expression has no series form");
}

// A left-side coefficient comes from an eps-Taylor slot and must reduce to
// a number once parameters are bound.
double left_coefficient(const EpsTaylorTerms& terms, TaylorSlot slot,
                        const ParamBindings& params, const char* what) {
    if (!terms.has(slot)) return 0.0;
    ExprPtr c = terms.coefficient(slot);
    if (contains_any_variable(c))
        throw UnsupportedProblemError(std::string("coefficient of ") + what +
                                      " in the correction equation depends on the state");
    return eval_at(c, VarBindings{}, params);
}

}  // namespace

LinearCorrectionODE build_correction(const ProblemSpec& problem, const MethodConfig& cfg,
                                     const TruncatedSeries& y_n) {
    EpsTaylorTerms terms = eps_taylor(insert_epsilon(problem.nonlinearity), cfg.taylor_order);

    if (terms.has(TaylorSlot::Yc2) || terms.has(TaylorSlot::DYc2))
        throw UnsupportedProblemError(
            "quadratic correction terms survive the expansion; this nonlinearity is "
            "outside the supported family");

    double q2 = problem.p2 + left_coefficient(terms, TaylorSlot::DDYc, problem.params, "(y_c)''");
    double q1 = problem.p1 + left_coefficient(terms, TaylorSlot::DYc, problem.params, "(y_c)'") +
                left_coefficient(terms, TaylorSlot::EpsDYc, problem.params, "(y_c)'");
    double q0 = problem.p0 + left_coefficient(terms, TaylorSlot::Yc, problem.params, "(y_c)") +
                left_coefficient(terms, TaylorSlot::EpsYc, problem.params, "(y_c)");
    if (q2 == 0.0)
        throw UnsupportedProblemError("correction equation has no second-order term");

    TruncatedSeries x = TruncatedSeries::identity(y_n.degree_cap(), y_n.lo(), y_n.hi());
    TruncatedSeries dy_n = y_n.derivative();
    TruncatedSeries ddy_n = dy_n.derivative();
    SeriesEnv env{x, y_n, dy_n, ddy_n, problem.params};

    TruncatedSeries rhs = env.ddy * (-problem.p2);
    rhs -= env.dy * problem.p1;
    rhs -= y_n * problem.p0;
    for (TaylorSlot slot : {TaylorSlot::N0, TaylorSlot::Eps, TaylorSlot::Eps2})
        if (terms.has(slot)) rhs -= series_eval(terms.coefficient(slot), env);

    return LinearCorrectionODE{q1 / q2, q0 / q2, rhs * (1.0 / q2)};
}

TruncatedSeries solve_correction(const LinearCorrectionODE& ode, const ProblemSpec& problem,
                                 int degree_cap) {
    if (std::abs(ode.q1) > 1e-13)
        throw UnsupportedProblemError(
            "correction equation has a first-derivative term; only y_c'' + q0*y_c = rhs "
            "is handled");

    int cap = degree_cap;
    double lo = problem.a, hi = problem.b;
    if (ode.q0 == 0.0 && ode.rhs.degree() > cap - 2)
        throw SeriesError("correction right-hand side too rich for the degree cap");

    // y'' + q0*y = r termwise: a_{k+2} = (r_k - q0*a_k) / ((k+2)(k+1)).
    auto propagate = [&](double s0, double s1, const TruncatedSeries* r) {
        TruncatedSeries s(cap, lo, hi);
        s.set_coefficient(0, s0);
        if (cap >= 1) s.set_coefficient(1, s1);
        for (int k = 0; k + 2 <= cap; ++k) {
            double rk = r ? r->coefficient(k) : 0.0;
            s.set_coefficient(k + 2,
                              (rk - ode.q0 * s.coefficient(k)) / double((k + 2) * (k + 1)));
        }
        return s;
    };

    TruncatedSeries yp = propagate(0.0, 0.0, &ode.rhs);
    TruncatedSeries h1 = propagate(1.0, 0.0, nullptr);
    TruncatedSeries h2 = propagate(0.0, 1.0, nullptr);

    // Weights w so that yp + w1*h1 + w2*h2 vanishes at the two condition
    // functionals.
    double m00, m01, m10, m11, r0, r1;
    if (problem.conditions.kind == ConditionKind::Ivp) {
        m00 = h1.eval(problem.a);
        m01 = h2.eval(problem.a);
        m10 = h1.derivative().eval(problem.a);
        m11 = h2.derivative().eval(problem.a);
        r0 = -yp.eval(problem.a);
        r1 = -yp.derivative().eval(problem.a);
    } else {
        m00 = h1.eval(problem.a);
        m01 = h2.eval(problem.a);
        m10 = h1.eval(problem.b);
        m11 = h2.eval(problem.b);
        r0 = -yp.eval(problem.a);
        r1 = -yp.eval(problem.b);
    }

    double det = m00 * m11 - m01 * m10;
    if (std::abs(det) < 1e-12)
        throw ResonanceError(
            "homogeneous solutions of the correction equation cannot match the "
            "conditions (singular system)");
    double w1 = (r0 * m11 - r1 * m01) / det;
    double w2 = (m00 * r1 - m10 * r0) / det;

    return yp + h1 * w1 + h2 * w2;
}

IterationState run_iterations(const ProblemSpec& problem, const MethodConfig& cfg,
                              const std::vector<double>& constants) {
    if (cfg.iterations < 1) throw Error("iteration count must be at least 1");
    if (cfg.taylor_order != 1 && cfg.taylor_order != 2)
        throw Error("taylor order must be 1 or 2");

    std::vector<double> c = constants;
    if (!cfg.optimal) {
        c.assign(std::size_t(cfg.iterations), 1.0);
    } else if (int(c.size()) != cfg.iterations) {
        throw Error("expected " + std::to_string(cfg.iterations) + " constants, got " +
                    std::to_string(c.size()));
    }

    IterationState state{trivial_start(problem, cfg.degree_cap), c, {}};
    double multiplier = 0.0;
    for (int k = 0; k < cfg.iterations; ++k) {
        LinearCorrectionODE ode = build_correction(problem, cfg, state.iterate);
        TruncatedSeries yc = solve_correction(ode, problem, cfg.degree_cap);
        multiplier += c[std::size_t(k)];
        state.iterate += yc * multiplier;
        state.history.push_back(state.iterate);
    }
    return state;
}

// --- symbolic rendering -------------------------------------------------------

namespace {

// One product term: numeric factor times symbolic atoms with multiplicities,
// e.g. -0.5 * pi^2 * y^2.
struct Monomial {
    double factor = 1.0;
    std::vector<std::pair<std::string, int>> atoms;  // (rendered base, power)

    void push_atom(const std::string& base, int power) {
        for (auto& a : atoms) {
            if (a.first == base) {
                a.second += power;
                return;
            }
        }
        atoms.emplace_back(base, power);
    }
};

std::string atom_for(const ExprPtr& e) {
    if (e->kind() == Expr::Kind::Variable) {
        switch (e->var()) {
            case Var::X: return "x";
            case Var::Y: return "y";
            case Var::DY: return "y'";
            case Var::DDY: return "y''";
            case Var::Eps: return "eps";
        }
    }
    if (e->kind() == Expr::Kind::Parameter) return e->name();
    return to_string(e);
}

void flatten_product(const ExprPtr& e, Monomial& m) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
            m.factor *= e->value();
            return;
        case Expr::Kind::Unary:
            if (e->unary_op() == UnaryOp::Neg) {
                m.factor = -m.factor;
                flatten_product(e->operand(), m);
                return;
            }
            break;
        case Expr::Kind::Binary:
            if (e->binary_op() == BinaryOp::Mul) {
                flatten_product(e->lhs(), m);
                flatten_product(e->rhs(), m);
                return;
            }
            if (e->binary_op() == BinaryOp::Div && !contains_any_variable(e->rhs())) {
                auto d = as_constant(e->rhs());
                if (d && *d != 0.0) {
                    m.factor /= *d;
                    flatten_product(e->lhs(), m);
                    return;
                }
            }
            break;
        case Expr::Kind::Power:
            if (e->exponent() > 0 && (e->operand()->kind() == Expr::Kind::Variable ||
                                      e->operand()->kind() == Expr::Kind::Parameter)) {
                m.push_atom(atom_for(e->operand()), e->exponent());
                return;
            }
            break;
        default:
            break;
    }
    m.push_atom(atom_for(e), 1);
}

// Split sums into monomials; `negate` flips every collected sign.
void flatten_sum(const ExprPtr& e, bool negate, std::vector<Monomial>& out) {
    if (e->kind() == Expr::Kind::Binary &&
        (e->binary_op() == BinaryOp::Add || e->binary_op() == BinaryOp::Sub)) {
        flatten_sum(e->lhs(), negate, out);
        flatten_sum(e->rhs(), negate != (e->binary_op() == BinaryOp::Sub), out);
        return;
    }
    if (e->kind() == Expr::Kind::Unary && e->unary_op() == UnaryOp::Neg) {
        flatten_sum(e->operand(), !negate, out);
        return;
    }
    Monomial m;
    flatten_product(e, m);
    if (negate) m.factor = -m.factor;
    if (m.factor != 0.0) out.push_back(std::move(m));
}

std::string format_factor(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// |factor| and atoms, without a sign: "2 y", "pi^2", "0.5 pi^2 y^2".
std::string magnitude(const Monomial& m) {
    std::string out;
    double mag = std::abs(m.factor);
    if (mag != 1.0 || m.atoms.empty()) out = format_factor(mag);
    for (const auto& a : m.atoms) {
        if (!out.empty()) out += ' ';
        out += a.first;
        if (a.second != 1) out += '^' + std::to_string(a.second);
    }
    return out;
}

void append_terms(std::string& line, const std::vector<Monomial>& terms, bool& first) {
    for (const Monomial& m : terms) {
        if (first) {
            if (m.factor < 0) line += '-';
            first = false;
        } else {
            line += m.factor < 0 ? " - " : " + ";
        }
        line += magnitude(m);
    }
}

// Left-side coefficient together with its (y_c) basis label. Multi-term
// coefficients get parenthesized.
void append_left(std::string& line, const std::vector<Monomial>& coeff, const char* basis) {
    if (coeff.empty()) return;
    if (coeff.size() == 1) {
        const Monomial& m = coeff.front();
        line += m.factor < 0 ? " - " : " + ";
        std::string mag = magnitude(m);
        if (mag != "1") {
            line += mag;
            line += ' ';
        }
        line += basis;
        return;
    }
    line += " + (";
    bool first = true;
    append_terms(line, coeff, first);
    line += ") ";
    line += basis;
}

}  // namespace

std::string describe_correction(const ProblemSpec& problem, const MethodConfig& cfg) {
    EpsTaylorTerms terms = eps_taylor(insert_epsilon(problem.nonlinearity), cfg.taylor_order);

    auto slot_monomials = [&](TaylorSlot slot, bool negate) {
        std::vector<Monomial> out;
        if (terms.has(slot)) flatten_sum(terms.coefficient(slot), negate, out);
        return out;
    };

    // Left side: (y_c)'' plus the constant-coefficient groups. Taylor slots
    // contribute alongside the problem's own linear part.
    std::vector<Monomial> q2 = slot_monomials(TaylorSlot::DDYc, false);
    std::vector<Monomial> q1 = slot_monomials(TaylorSlot::DYc, false);
    std::vector<Monomial> q0 = slot_monomials(TaylorSlot::Yc, false);
    {
        std::vector<Monomial> extra = slot_monomials(TaylorSlot::EpsDYc, false);
        q1.insert(q1.end(), extra.begin(), extra.end());
        extra = slot_monomials(TaylorSlot::EpsYc, false);
        q0.insert(q0.end(), extra.begin(), extra.end());
    }
    if (problem.p1 != 0.0) {
        Monomial m;
        m.factor = problem.p1;
        q1.insert(q1.begin(), m);
    }
    if (problem.p0 != 0.0) {
        Monomial m;
        m.factor = problem.p0;
        q0.insert(q0.begin(), m);
    }

    std::string line;
    if (problem.p2 != 1.0 || !q2.empty()) {
        Monomial m;
        m.factor = problem.p2;
        q2.insert(q2.begin(), m);
        line += '(';
        bool first = true;
        append_terms(line, q2, first);
        line += ") ";
    }
    line += "(y_c)''";
    append_left(line, q1, "(y_c)'");
    append_left(line, q0, "(y_c)");
    line += " = ";

    std::vector<Monomial> l_terms;
    {
        Monomial m;
        m.factor = -problem.p2;
        m.push_atom("y''", 1);
        l_terms.push_back(m);
        if (problem.p1 != 0.0) {
            Monomial t;
            t.factor = -problem.p1;
            t.push_atom("y'", 1);
            l_terms.push_back(t);
        }
        if (problem.p0 != 0.0) {
            Monomial t;
            t.factor = -problem.p0;
            t.push_atom("y", 1);
            l_terms.push_back(t);
        }
    }
    std::vector<Monomial> eps_terms = slot_monomials(TaylorSlot::Eps, true);
    std::vector<Monomial> n0_terms = slot_monomials(TaylorSlot::N0, true);
    std::vector<Monomial> eps2_terms = slot_monomials(TaylorSlot::Eps2, true);

    // First-order corrections with a plain y'' and a positive forcing term
    // print in the grouped shape "eps-part - (y'' + N0)"; everything else is
    // a flat signed sum. Orders chosen to match the worked derivations.
    bool plain_l = problem.p1 == 0.0 && problem.p0 == 0.0 && problem.p2 == 1.0;
    bool grouped = cfg.taylor_order == 1 && plain_l && n0_terms.size() == 1 &&
                   n0_terms.front().factor < 0 && !eps_terms.empty();
    bool first = true;
    if (grouped) {
        append_terms(line, eps_terms, first);
        Monomial n0 = n0_terms.front();
        n0.factor = -n0.factor;
        line += " - (y'' + " + magnitude(n0) + ")";
    } else if (cfg.taylor_order == 1) {
        append_terms(line, l_terms, first);
        append_terms(line, eps_terms, first);
        append_terms(line, n0_terms, first);
    } else {
        append_terms(line, eps_terms, first);
        append_terms(line, eps2_terms, first);
        append_terms(line, l_terms, first);
        append_terms(line, n0_terms, first);
    }
    if (first) line += '0';
    return line;
}

}  // namespace opim
