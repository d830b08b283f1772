#include "maf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace maf {

namespace {

const std::map<std::string, ElemFn>& functions() {
    static const std::map<std::string, ElemFn> f = {
        {"sin", ElemFn::Sin},   {"cos", ElemFn::Cos},   {"tan", ElemFn::Tan},
        {"exp", ElemFn::Exp},   {"log", ElemFn::Log},   {"sqrt", ElemFn::Sqrt},
        {"sinh", ElemFn::Sinh}, {"cosh", ElemFn::Cosh}, {"atan", ElemFn::Atan},
    };
    return f;
}

class Parser {
public:
    Parser(const std::string& s, const std::set<std::string>& params) : s_(s), params_(params) {}

    Expr parse() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        Expr e = expr();
        skip();
        if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+')) e = binary(ExprKind::Add, e, term());
            else if (accept('-')) e = binary(ExprKind::Sub, e, term());
            else return e;
        }
    }
    Expr term() {
        Expr e = factor();
        for (;;) {
            if (accept('*')) e = binary(ExprKind::Mul, e, factor());
            else if (accept('/')) e = binary(ExprKind::Div, e, factor());
            else return e;
        }
    }
    Expr factor() {
        Expr e = atom();
        if (accept('^')) e = binary(ExprKind::Pow, e, atom());
        return e;
    }
    Expr atom() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '-') {
            ++pos_;
            return unary(ExprKind::Neg, atom());
        }
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return num();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }
    Expr num() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        double v = 0;
        auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc() || p != s_.data() + pos_) throw ParseError("malformed number", start);
        return number(v);
    }
    Expr ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        auto fn = functions().find(id);
        if (fn != functions().end()) {
            skip();
            if (pos_ >= s_.size() || s_[pos_] != '(') throw ParseError("expected '(' after " + id, pos_);
            ++pos_;
            skip();
            if (pos_ < s_.size() && s_[pos_] == ')') throw ArityError(id + " takes exactly one argument, got 0");
            Expr arg = expr();
            if (accept(',')) throw ArityError(id + " takes exactly one argument");
            expect(')');
            return call(fn->second, arg);
        }
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') throw UnknownIdentifier(id, start);
        if (expression_variables().count(id)) return variable(id);
        if (params_.count(id)) return parameter(id);
        if (id == "pi") return number(std::numbers::pi);
        throw UnknownIdentifier(id, start);
    }

    const std::string& s_;
    const std::set<std::string>& params_;
    std::size_t pos_ = 0;
};

std::string fmt_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

const char* fn_name(ElemFn f) {
    switch (f) {
        case ElemFn::Sin: return "sin";
        case ElemFn::Cos: return "cos";
        case ElemFn::Tan: return "tan";
        case ElemFn::Exp: return "exp";
        case ElemFn::Log: return "log";
        case ElemFn::Sqrt: return "sqrt";
        case ElemFn::Sinh: return "sinh";
        case ElemFn::Cosh: return "cosh";
        case ElemFn::Atan: return "atan";
    }
    return "?";
}

}  // namespace

const std::set<std::string>& expression_variables() {
    static const std::set<std::string> v = {"x", "y", "z", "t", "r"};
    return v;
}

Expr parse_expression(const std::string& text, const std::set<std::string>& parameters) {
    return Parser(text, parameters).parse();
}

Expr number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Number;
    n->number = v;
    return n;
}
Expr variable(const std::string& name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Variable;
    n->name = name;
    return n;
}
Expr parameter(const std::string& name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Parameter;
    n->name = name;
    return n;
}
Expr unary(ExprKind kind, Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(a);
    return n;
}
Expr binary(ExprKind kind, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}
Expr call(ElemFn fn, Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Call;
    n->fn = fn;
    n->name = fn_name(fn);
    n->lhs = std::move(a);
    return n;
}

// Binary nodes are always parenthesised so the output reparses to the same tree.
std::string print_expression(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Number: return fmt_number(e->number);
        case ExprKind::Variable:
        case ExprKind::Parameter: return e->name;
        case ExprKind::Neg: return "-" + print_expression(e->lhs);
        case ExprKind::Call: return std::string(fn_name(e->fn)) + "(" + print_expression(e->lhs) + ")";
        default: break;
    }
    const char* op = e->kind == ExprKind::Add ? "+" : e->kind == ExprKind::Sub ? "-"
                   : e->kind == ExprKind::Mul ? "*" : e->kind == ExprKind::Div ? "/" : "^";
    return "(" + print_expression(e->lhs) + op + print_expression(e->rhs) + ")";
}

bool same_expression(const Expr& a, const Expr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Number: return a->number == b->number;
        case ExprKind::Variable:
        case ExprKind::Parameter: return a->name == b->name;
        case ExprKind::Call: return a->fn == b->fn && same_expression(a->lhs, b->lhs);
        default: return same_expression(a->lhs, b->lhs) && same_expression(a->rhs, b->rhs);
    }
}

bool depends_on_variables(const Expr& e) {
    if (!e) return false;
    if (e->kind == ExprKind::Variable) return true;
    return depends_on_variables(e->lhs) || depends_on_variables(e->rhs);
}

namespace {

std::optional<double> constant_value(const Expr& e, const Bindings& b) {
    if (depends_on_variables(e)) return std::nullopt;
    std::map<std::string, double> vals(b.params.begin(), b.params.end());
    return evaluate_scalar(e, vals);
}

}  // namespace

Jet evaluate(const Expr& e, const Bindings& b) {
    switch (e->kind) {
        case ExprKind::Number: {
            const Jet& proto = b.vars.begin()->second;
            return Jet(proto.dim(), proto.order(), e->number);
        }
        case ExprKind::Variable: {
            auto it = b.vars.find(e->name);
            if (it == b.vars.end()) throw UnknownIdentifier(e->name, 0);
            return it->second;
        }
        case ExprKind::Parameter: {
            auto it = b.params.find(e->name);
            if (it == b.params.end()) throw UnknownIdentifier(e->name, 0);
            const Jet& proto = b.vars.begin()->second;
            return Jet(proto.dim(), proto.order(), it->second);
        }
        case ExprKind::Neg: return -evaluate(e->lhs, b);
        case ExprKind::Add: return evaluate(e->lhs, b) + evaluate(e->rhs, b);
        case ExprKind::Sub: return evaluate(e->lhs, b) - evaluate(e->rhs, b);
        case ExprKind::Mul: return evaluate(e->lhs, b) * evaluate(e->rhs, b);
        case ExprKind::Div: return evaluate(e->lhs, b) / evaluate(e->rhs, b);
        case ExprKind::Pow: {
            Jet base = evaluate(e->lhs, b);
            if (auto p = constant_value(e->rhs, b)) return pow(base, *p);
            return pow(base, evaluate(e->rhs, b));
        }
        case ExprKind::Call: return apply(e->fn, evaluate(e->lhs, b));
    }
    throw ExprError("bad expression node");
}

double evaluate_scalar(const Expr& e, const std::map<std::string, double>& values) {
    auto get = [&](const std::string& n) {
        auto it = values.find(n);
        if (it == values.end()) throw UnknownIdentifier(n, 0);
        return it->second;
    };
    switch (e->kind) {
        case ExprKind::Number: return e->number;
        case ExprKind::Variable:
        case ExprKind::Parameter: return get(e->name);
        case ExprKind::Neg: return -evaluate_scalar(e->lhs, values);
        case ExprKind::Add: return evaluate_scalar(e->lhs, values) + evaluate_scalar(e->rhs, values);
        case ExprKind::Sub: return evaluate_scalar(e->lhs, values) - evaluate_scalar(e->rhs, values);
        case ExprKind::Mul: return evaluate_scalar(e->lhs, values) * evaluate_scalar(e->rhs, values);
        case ExprKind::Div: return evaluate_scalar(e->lhs, values) / evaluate_scalar(e->rhs, values);
        case ExprKind::Pow: return std::pow(evaluate_scalar(e->lhs, values), evaluate_scalar(e->rhs, values));
        case ExprKind::Call: {
            Jet j(1, 0, evaluate_scalar(e->lhs, values));
            return apply(e->fn, j).value();
        }
    }
    throw ExprError("bad expression node");
}

}  // namespace maf
