#pragma once
// Expression front end for stream functions, velocity components, metrics.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' atom)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom

#include "maf/jet.hpp"

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace maf {

struct ExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : ExprError {
    ParseError(const std::string& msg, std::size_t off)
        : ExprError(msg + " at offset " + std::to_string(off)), offset(off) {}
    std::size_t offset;
};
struct UnknownIdentifier : ExprError {
    UnknownIdentifier(const std::string& id, std::size_t off)
        : ExprError("unknown identifier '" + id + "' at offset " + std::to_string(off)), name(id), offset(off) {}
    std::string name;
    std::size_t offset;
};
struct ArityError : ExprError {
    using ExprError::ExprError;
};

enum class ExprKind { Number, Variable, Parameter, Neg, Add, Sub, Mul, Div, Pow, Call };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind = ExprKind::Number;
    double number = 0;
    std::string name;  // variable, parameter or function name
    ElemFn fn = ElemFn::Sin;
    Expr lhs, rhs;     // rhs unused for Neg and Call
};

// Names accepted as variables. Geometry coordinates outside this set
// (theta) are bound at evaluation time only.
const std::set<std::string>& expression_variables();

Expr parse_expression(const std::string& text, const std::set<std::string>& parameters = {});
std::string print_expression(const Expr& e);
bool same_expression(const Expr& a, const Expr& b);
bool depends_on_variables(const Expr& e);

Expr number(double v);
Expr variable(const std::string& name);
Expr parameter(const std::string& name);
Expr unary(ExprKind kind, Expr a);
Expr binary(ExprKind kind, Expr a, Expr b);
Expr call(ElemFn fn, Expr a);

struct Bindings {
    std::map<std::string, Jet> vars;
    std::map<std::string, double> params;
};

Jet evaluate(const Expr& e, const Bindings& b);
double evaluate_scalar(const Expr& e, const std::map<std::string, double>& values);

}  // namespace maf
