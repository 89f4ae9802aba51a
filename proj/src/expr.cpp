#include "opim/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace opim {

const char* var_name(Var v) {
    switch (v) {
        case Var::X: return "x";
        case Var::Y: return "y";
        case Var::DY: return "dy";
        case Var::DDY: return "ddy";
        case Var::Eps: return "eps";
    }
    return "?";
}

// Sole point of node construction. Expr's default constructor is private and
// the smart constructors below fold constants before calling in here, so an
// ExprPtr always refers to a frozen, minimally simplified node.
class ExprFactory {
public:
    static ExprPtr constant(double v) {
        Expr e;
        e.kind_ = Expr::Kind::Constant;
        e.value_ = v;
        return wrap(std::move(e));
    }
    static ExprPtr parameter(std::string name) {
        Expr e;
        e.kind_ = Expr::Kind::Parameter;
        e.name_ = std::move(name);
        return wrap(std::move(e));
    }
    static ExprPtr variable(Var v) {
        Expr e;
        e.kind_ = Expr::Kind::Variable;
        e.var_ = v;
        return wrap(std::move(e));
    }
    static ExprPtr unary(UnaryOp op, ExprPtr a) {
        Expr e;
        e.kind_ = Expr::Kind::Unary;
        e.unary_op_ = op;
        e.lhs_ = std::move(a);
        return wrap(std::move(e));
    }
    static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b) {
        Expr e;
        e.kind_ = Expr::Kind::Binary;
        e.binary_op_ = op;
        e.lhs_ = std::move(a);
        e.rhs_ = std::move(b);
        return wrap(std::move(e));
    }
    static ExprPtr power(ExprPtr a, int k) {
        Expr e;
        e.kind_ = Expr::Kind::Power;
        e.lhs_ = std::move(a);
        e.exponent_ = k;
        return wrap(std::move(e));
    }

private:
    static ExprPtr wrap(Expr&& e) { return ExprPtr(new Expr(std::move(e))); }
};

// --- smart constructors ------------------------------------------------------

ExprPtr constant(double value) { return ExprFactory::constant(value); }
ExprPtr parameter(std::string name) { return ExprFactory::parameter(std::move(name)); }
ExprPtr variable(Var v) { return ExprFactory::variable(v); }

std::optional<double> as_constant(const ExprPtr& e) {
    if (e && e->kind() == Expr::Kind::Constant) return e->value();
    return std::nullopt;
}

bool is_zero(const ExprPtr& e) {
    auto c = as_constant(e);
    return c && *c == 0.0;
}

namespace {

double apply_unary(UnaryOp op, double v, bool* ok) {
    *ok = true;
    switch (op) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Exp: return std::exp(v);
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
        case UnaryOp::Sinh: return std::sinh(v);
        case UnaryOp::Cosh: return std::cosh(v);
        case UnaryOp::Ln:
            if (v <= 0.0) {
                *ok = false;
                return 0.0;
            }
            return std::log(v);
    }
    *ok = false;
    return 0.0;
}

}  // namespace

ExprPtr unary(UnaryOp op, ExprPtr operand) {
    if (auto c = as_constant(operand)) {
        bool ok = false;
        double v = apply_unary(op, *c, &ok);
        // Fold only when the result is well defined and finite; otherwise
        // keep the node so eval_at reports the domain error.
        if (ok && std::isfinite(v)) return constant(v);
    }
    if (op == UnaryOp::Neg && operand->kind() == Expr::Kind::Unary &&
        operand->unary_op() == UnaryOp::Neg) {
        return operand->operand();
    }
    return ExprFactory::unary(op, std::move(operand));
}

ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    auto cl = as_constant(lhs);
    auto cr = as_constant(rhs);
    switch (op) {
        case BinaryOp::Add:
            if (cl && cr) return constant(*cl + *cr);
            if (cl && *cl == 0.0) return rhs;
            if (cr && *cr == 0.0) return lhs;
            break;
        case BinaryOp::Sub:
            if (cl && cr) return constant(*cl - *cr);
            if (cr && *cr == 0.0) return lhs;
            if (cl && *cl == 0.0) return unary(UnaryOp::Neg, std::move(rhs));
            break;
        case BinaryOp::Mul:
            if (cl && cr) return constant(*cl * *cr);
            if ((cl && *cl == 0.0) || (cr && *cr == 0.0)) return constant(0.0);
            if (cl && *cl == 1.0) return rhs;
            if (cr && *cr == 1.0) return lhs;
            break;
        case BinaryOp::Div:
            if (cl && cr && *cr != 0.0) return constant(*cl / *cr);
            if (cl && *cl == 0.0 && !(cr && *cr == 0.0)) return constant(0.0);
            if (cr && *cr == 1.0) return lhs;
            break;
    }
    return ExprFactory::binary(op, std::move(lhs), std::move(rhs));
}

ExprPtr power(ExprPtr base, int exponent) {
    if (exponent == 0) return constant(1.0);
    if (exponent == 1) return base;
    if (auto c = as_constant(base)) {
        double v = std::pow(*c, exponent);
        if (std::isfinite(v)) return constant(v);
    }
    return ExprFactory::power(std::move(base), exponent);
}

// --- evaluation ----------------------------------------------------------------

std::optional<double> VarBindings::get(Var v) const {
    switch (v) {
        case Var::X: return x;
        case Var::Y: return y;
        case Var::DY: return dy;
        case Var::DDY: return ddy;
        case Var::Eps: return eps;
    }
    return std::nullopt;
}

double eval_at(const ExprPtr& e, const VarBindings& vars, const ParamBindings& params) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
            return e->value();
        case Expr::Kind::Parameter: {
            auto it = params.find(e->name());
            if (it != params.end()) return it->second;
            if (e->name() == "pi") return std::numbers::pi;
            throw EvalError("unbound parameter '" + e->name() + "'");
        }
        case Expr::Kind::Variable: {
            auto v = vars.get(e->var());
            if (!v) throw EvalError(std::string("unbound variable '") + var_name(e->var()) + "'");
            return *v;
        }
        case Expr::Kind::Unary: {
            double v = eval_at(e->operand(), vars, params);
            if (e->unary_op() == UnaryOp::Ln && v <= 0.0)
                throw EvalError("ln of non-positive value");
            bool ok = false;
            return apply_unary(e->unary_op(), v, &ok);
        }
        case Expr::Kind::Binary: {
            double a = eval_at(e->lhs(), vars, params);
            double b = eval_at(e->rhs(), vars, params);
            switch (e->binary_op()) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
            }
            throw EvalError("corrupt binary node");
        }
        case Expr::Kind::Power: {
            double a = eval_at(e->operand(), vars, params);
            int k = e->exponent();
            if (a == 0.0 && k < 0) throw EvalError("zero raised to a negative power");
            return std::pow(a, k);
        }
    }
    throw EvalError("corrupt expression node");
}

// --- structure -------------------------------------------------------------------

bool contains(const ExprPtr& e, Var v) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Parameter:
            return false;
        case Expr::Kind::Variable:
            return e->var() == v;
        case Expr::Kind::Unary:
        case Expr::Kind::Power:
            return contains(e->operand(), v);
        case Expr::Kind::Binary:
            return contains(e->lhs(), v) || contains(e->rhs(), v);
    }
    return false;
}

bool contains_any_variable(const ExprPtr& e) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Parameter:
            return false;
        case Expr::Kind::Variable:
            return true;
        case Expr::Kind::Unary:
        case Expr::Kind::Power:
            return contains_any_variable(e->operand());
        case Expr::Kind::Binary:
            return contains_any_variable(e->lhs()) || contains_any_variable(e->rhs());
    }
    return false;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Expr::Kind::Constant:
            return a->value() == b->value();
        case Expr::Kind::Parameter:
            return a->name() == b->name();
        case Expr::Kind::Variable:
            return a->var() == b->var();
        case Expr::Kind::Unary:
            return a->unary_op() == b->unary_op() &&
                   structurally_equal(a->operand(), b->operand());
        case Expr::Kind::Binary:
            return a->binary_op() == b->binary_op() &&
                   structurally_equal(a->lhs(), b->lhs()) &&
                   structurally_equal(a->rhs(), b->rhs());
        case Expr::Kind::Power:
            return a->exponent() == b->exponent() &&
                   structurally_equal(a->operand(), b->operand());
    }
    return false;
}

ExprPtr substitute(const ExprPtr& e, Var v, const ExprPtr& replacement) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Parameter:
            return e;
        case Expr::Kind::Variable:
            return e->var() == v ? replacement : e;
        case Expr::Kind::Unary:
            return unary(e->unary_op(), substitute(e->operand(), v, replacement));
        case Expr::Kind::Binary:
            return binary(e->binary_op(), substitute(e->lhs(), v, replacement),
                          substitute(e->rhs(), v, replacement));
        case Expr::Kind::Power:
            return power(substitute(e->operand(), v, replacement), e->exponent());
    }
    return e;
}

// --- differentiation ----------------------------------------------------------

ExprPtr differentiate(const ExprPtr& e, Var v) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Parameter:
            return constant(0.0);
        case Expr::Kind::Variable:
            return constant(e->var() == v ? 1.0 : 0.0);
        case Expr::Kind::Unary: {
            const ExprPtr& u = e->operand();
            ExprPtr du = differentiate(u, v);
            if (is_zero(du)) return constant(0.0);
            ExprPtr outer;
            switch (e->unary_op()) {
                case UnaryOp::Neg:
                    return unary(UnaryOp::Neg, du);
                case UnaryOp::Exp:
                    outer = unary(UnaryOp::Exp, u);
                    break;
                case UnaryOp::Sin:
                    outer = unary(UnaryOp::Cos, u);
                    break;
                case UnaryOp::Cos:
                    outer = unary(UnaryOp::Neg, unary(UnaryOp::Sin, u));
                    break;
                case UnaryOp::Sinh:
                    outer = unary(UnaryOp::Cosh, u);
                    break;
                case UnaryOp::Cosh:
                    outer = unary(UnaryOp::Sinh, u);
                    break;
                case UnaryOp::Ln:
                    return binary(BinaryOp::Div, du, u);
            }
            return binary(BinaryOp::Mul, outer, du);
        }
        case Expr::Kind::Binary: {
            ExprPtr da = differentiate(e->lhs(), v);
            ExprPtr db = differentiate(e->rhs(), v);
            switch (e->binary_op()) {
                case BinaryOp::Add:
                    return binary(BinaryOp::Add, da, db);
                case BinaryOp::Sub:
                    return binary(BinaryOp::Sub, da, db);
                case BinaryOp::Mul:
                    return binary(BinaryOp::Add,
                                  binary(BinaryOp::Mul, da, e->rhs()),
                                  binary(BinaryOp::Mul, e->lhs(), db));
                case BinaryOp::Div:
                    // (a/b)' = a'/b - a*b'/b^2
                    return binary(
                        BinaryOp::Sub, binary(BinaryOp::Div, da, e->rhs()),
                        binary(BinaryOp::Div,
                               binary(BinaryOp::Mul, e->lhs(), db),
                               power(e->rhs(), 2)));
            }
            return constant(0.0);
        }
        case Expr::Kind::Power: {
            // (u^k)' = k*u^(k-1)*u'
            const ExprPtr& u = e->operand();
            ExprPtr du = differentiate(u, v);
            if (is_zero(du)) return constant(0.0);
            return binary(BinaryOp::Mul,
                          binary(BinaryOp::Mul, constant(double(e->exponent())),
                                 power(u, e->exponent() - 1)),
                          du);
        }
    }
    return constant(0.0);
}

// --- printing -------------------------------------------------------------------

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Neg: return "-";
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Cos: return "cos";
        case UnaryOp::Sinh: return "sinh";
        case UnaryOp::Cosh: return "cosh";
        case UnaryOp::Ln: return "ln";
    }
    return "?";
}

// Printer precedence: additive 1, multiplicative 2, power base 3, atoms 4.
// Negative constants and unary minus print at additive level so products and
// powers around them get parenthesized.
int precedence(const ExprPtr& e) {
    switch (e->kind()) {
        case Expr::Kind::Binary:
            return (e->binary_op() == BinaryOp::Add || e->binary_op() == BinaryOp::Sub) ? 1 : 2;
        case Expr::Kind::Unary:
            return e->unary_op() == UnaryOp::Neg ? 1 : 4;
        case Expr::Kind::Power:
            return 3;
        case Expr::Kind::Constant:
            return e->value() < 0 ? 1 : 4;
        default:
            return 4;
    }
}

void print(const ExprPtr& e, std::string& out);

void print_wrapped(const ExprPtr& e, int min_prec, std::string& out) {
    if (precedence(e) < min_prec) {
        out += '(';
        print(e, out);
        out += ')';
    } else {
        print(e, out);
    }
}

void print(const ExprPtr& e, std::string& out) {
    switch (e->kind()) {
        case Expr::Kind::Constant:
            out += format_number(e->value());
            return;
        case Expr::Kind::Parameter:
            out += e->name();
            return;
        case Expr::Kind::Variable:
            out += var_name(e->var());
            return;
        case Expr::Kind::Unary:
            if (e->unary_op() == UnaryOp::Neg) {
                out += '-';
                // The grammar binds '-' tighter than '^' (base := '-' base),
                // so -u^2 would re-parse as (-u)^2; wrap anything compound.
                print_wrapped(e->operand(), 4, out);
            } else {
                out += unary_name(e->unary_op());
                out += '(';
                print(e->operand(), out);
                out += ')';
            }
            return;
        case Expr::Kind::Binary: {
            bool additive = e->binary_op() == BinaryOp::Add || e->binary_op() == BinaryOp::Sub;
            int prec = additive ? 1 : 2;
            print_wrapped(e->lhs(), prec, out);
            switch (e->binary_op()) {
                case BinaryOp::Add: out += " + "; break;
                case BinaryOp::Sub: out += " - "; break;
                case BinaryOp::Mul: out += "*"; break;
                case BinaryOp::Div: out += "/"; break;
            }
            // Right operand needs one more level to preserve a - (b - c)
            // and a / (b * c).
            print_wrapped(e->rhs(), prec + 1, out);
            return;
        }
        case Expr::Kind::Power:
            print_wrapped(e->operand(), 4, out);
            out += '^';
            out += std::to_string(e->exponent());
            return;
    }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
    std::string out;
    print(e, out);
    return out;
}

// --- parser ---------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::set<std::string>& params)
        : text_(text), params_(params) {}

    ExprPtr run() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_ + 1);
        return e;
    }

private:
    const std::string& text_;
    const std::set<std::string>& params_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            if (eat('+')) {
                e = binary(BinaryOp::Add, e, parse_term());
            } else if (eat('-')) {
                e = binary(BinaryOp::Sub, e, parse_term());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (eat('*')) {
                e = binary(BinaryOp::Mul, e, parse_factor());
            } else if (eat('/')) {
                e = binary(BinaryOp::Div, e, parse_factor());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_factor() {
        ExprPtr base = parse_base();
        if (eat('^')) return power(base, parse_integer());
        return base;
    }

    int parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && text_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("expected integer exponent");
        long value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value = value * 10 + (text_[pos_] - '0');
            if (value > 1000) {
                pos_ = start;
                fail("exponent out of range");
            }
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
            fail("expected integer exponent");
        return negative ? int(-value) : int(value);
    }

    ExprPtr parse_base() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return unary(UnaryOp::Neg, parse_base());
        }
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin || !std::isfinite(v)) fail("malformed number");
        pos_ += std::size_t(end - begin);
        return constant(v);
    }

    ExprPtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);

        if (name == "x") return variable(Var::X);
        if (name == "y") return variable(Var::Y);
        if (name == "dy") return variable(Var::DY);
        if (name == "ddy") return variable(Var::DDY);
        if (name == "eps") return variable(Var::Eps);

        static const std::map<std::string, UnaryOp> funcs = {
            {"exp", UnaryOp::Exp},   {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos},
            {"sinh", UnaryOp::Sinh}, {"cosh", UnaryOp::Cosh}, {"ln", UnaryOp::Ln}};
        auto fit = funcs.find(name);
        if (fit != funcs.end()) {
            if (!eat('(')) fail("expected '(' after function name");
            ExprPtr arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return unary(fit->second, arg);
        }

        if (name == "pi" || params_.count(name)) return parameter(name);

        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

}  // namespace

ExprPtr parse(const std::string& text, const std::set<std::string>& param_names) {
    return Parser(text, param_names).run();
}

// --- epsilon embedding ------------------------------------------------------------

ExprPtr insert_epsilon(const ExprPtr& n) {
    if (contains(n, Var::Eps)) return n;
    ExprPtr eps = variable(Var::Eps);
    ExprPtr e = substitute(n, Var::Y, binary(BinaryOp::Mul, eps, variable(Var::Y)));
    e = substitute(e, Var::DY, binary(BinaryOp::Mul, eps, variable(Var::DY)));
    e = substitute(e, Var::DDY, binary(BinaryOp::Mul, eps, variable(Var::DDY)));
    return e;
}

ExprPtr EpsTaylorTerms::coefficient(TaylorSlot slot) const {
    auto it = coefficients.find(slot);
    return it == coefficients.end() ? constant(0.0) : it->second;
}

EpsTaylorTerms eps_taylor(const ExprPtr& n, int order) {
    if (order != 1 && order != 2) throw Error("taylor order must be 1 or 2");

    EpsTaylorTerms terms;
    terms.order = order;

    auto at0 = [](const ExprPtr& e) { return substitute(e, Var::Eps, constant(0.0)); };
    auto put = [&](TaylorSlot slot, const ExprPtr& coeff) {
        if (!is_zero(coeff)) terms.coefficients.emplace(slot, coeff);
    };

    ExprPtr d_eps = differentiate(n, Var::Eps);

    put(TaylorSlot::N0, at0(n));
    put(TaylorSlot::Yc, at0(differentiate(n, Var::Y)));
    put(TaylorSlot::DYc, at0(differentiate(n, Var::DY)));
    put(TaylorSlot::Eps, at0(d_eps));

    if (order == 1) {
        put(TaylorSlot::DDYc, at0(differentiate(n, Var::DDY)));
        return terms;
    }

    ExprPtr half = constant(0.5);
    put(TaylorSlot::EpsYc, at0(differentiate(d_eps, Var::Y)));
    put(TaylorSlot::EpsDYc, at0(differentiate(d_eps, Var::DY)));
    put(TaylorSlot::Eps2, binary(BinaryOp::Mul, half, at0(differentiate(d_eps, Var::Eps))));
    put(TaylorSlot::Yc2,
        binary(BinaryOp::Mul, half, at0(differentiate(differentiate(n, Var::Y), Var::Y))));
    put(TaylorSlot::DYc2,
        binary(BinaryOp::Mul, half, at0(differentiate(differentiate(n, Var::DY), Var::DY))));
    return terms;
}

}  // namespace opim
