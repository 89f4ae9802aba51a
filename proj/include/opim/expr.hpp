#pragma once

// Symbolic expressions for the nonlinear part N(y'', y', y, eps) of a
// second-order ODE. Supports parsing, differentiation, substitution,
// pointwise evaluation, and extraction of the eps-Taylor coefficients that
// drive the correction equations.
//
// Trees are immutable: every node is held through a shared_ptr-to-const, so
// subtrees are shared freely and expressions are safe to read from several
// threads at once.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "opim/errors.hpp"

namespace opim {

enum class Var { X, Y, DY, DDY, Eps };

const char* var_name(Var v);

enum class UnaryOp { Neg, Exp, Sin, Cos, Sinh, Cosh, Ln };
enum class BinaryOp { Add, Sub, Mul, Div };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
public:
    enum class Kind { Constant, Parameter, Variable, Unary, Binary, Power };

    Kind kind() const noexcept { return kind_; }

    // Constant
    double value() const { return value_; }
    // Parameter
    const std::string& name() const { return name_; }
    // Variable
    Var var() const { return var_; }
    // Unary / Binary / Power
    UnaryOp unary_op() const { return unary_op_; }
    BinaryOp binary_op() const { return binary_op_; }
    const ExprPtr& lhs() const { return lhs_; }
    const ExprPtr& rhs() const { return rhs_; }
    const ExprPtr& operand() const { return lhs_; }
    int exponent() const { return exponent_; }

private:
    friend class ExprFactory;
    Expr() = default;

    Kind kind_ = Kind::Constant;
    double value_ = 0.0;
    std::string name_;
    Var var_ = Var::X;
    UnaryOp unary_op_ = UnaryOp::Neg;
    BinaryOp binary_op_ = BinaryOp::Add;
    ExprPtr lhs_, rhs_;
    int exponent_ = 0;
};

// Smart constructors. Each applies the small simplification rule set
// (constant folding, 0*e -> 0, 1*e -> e, e+0 -> e, e^0 -> 1, ...) so that
// coefficients that reduce to zero are recognizably zero nodes.
ExprPtr constant(double value);
ExprPtr parameter(std::string name);
ExprPtr variable(Var v);
ExprPtr unary(UnaryOp op, ExprPtr operand);
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr power(ExprPtr base, int exponent);

// Bindings for evaluation. Unset variables may be referenced only by
// expressions that never touch them; otherwise eval_at throws EvalError.
struct VarBindings {
    std::optional<double> x, y, dy, ddy, eps;
    std::optional<double> get(Var v) const;
};

using ParamBindings = std::map<std::string, double>;

// Evaluate the expression at a point. The parameter "pi" is implicitly
// bound unless the caller overrides it. Throws EvalError on division by
// zero, ln of a non-positive argument, or an unbound symbol.
double eval_at(const ExprPtr& e, const VarBindings& vars,
               const ParamBindings& params = {});

// Exact symbolic partial derivative with respect to one variable.
// Parameters and the other variables are treated as constants.
ExprPtr differentiate(const ExprPtr& e, Var v);

// Replace every occurrence of `v` by `replacement`, rebuilding through the
// smart constructors so the usual simplifications fire.
ExprPtr substitute(const ExprPtr& e, Var v, const ExprPtr& replacement);

bool contains(const ExprPtr& e, Var v);
bool contains_any_variable(const ExprPtr& e);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Non-empty when the node is a plain numeric constant.
std::optional<double> as_constant(const ExprPtr& e);
bool is_zero(const ExprPtr& e);

// Deterministic rendering that round-trips through parse().
std::string to_string(const ExprPtr& e);

// Recursive-descent parser for the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := number | ident | '(' expr ')' | func '(' expr ')' | '-' base
// Identifiers are the variables x, y, dy, ddy, eps, the builtin constant
// pi, and any name listed in `param_names`. Functions: exp, sin, cos,
// sinh, cosh, ln. Unknown identifiers raise ParseError with a 1-based
// position.
ExprPtr parse(const std::string& text,
              const std::set<std::string>& param_names = {"lambda"});

// The artificial-parameter embedding: y -> eps*y, y' -> eps*y', y'' ->
// eps*y''. An expression that already mentions eps is returned unchanged.
ExprPtr insert_epsilon(const ExprPtr& n);

// Coefficient slots of the eps-Taylor expansion of N about eps = 0 after
// substituting y -> y + eps*y_c. First order keeps the slots
//   N0 + Yc*(y_c) + DYc*(y_c') + DDYc*(y_c'') + Eps,
// second order drops DDYc and adds
//   EpsYc*(y_c) + EpsDYc*(y_c') + Eps2 + Yc2*(y_c)^2 + DYc2*(y_c')^2,
// where every slot past N0 carries at least one power of eps. Slots whose
// coefficient simplifies to zero are omitted from the map.
enum class TaylorSlot { N0, Yc, DYc, DDYc, Eps, EpsYc, EpsDYc, Eps2, Yc2, DYc2 };

struct EpsTaylorTerms {
    int order = 1;
    std::map<TaylorSlot, ExprPtr> coefficients;

    bool has(TaylorSlot slot) const { return coefficients.count(slot) != 0; }
    // Zero constant when the slot is absent.
    ExprPtr coefficient(TaylorSlot slot) const;
};

EpsTaylorTerms eps_taylor(const ExprPtr& n, int order);

}  // namespace opim
