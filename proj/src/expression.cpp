#include "mather_twist/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "mather_twist/errors.hpp"

namespace mather_twist {

using Op = Expression::Op;

Expression Expression::constant(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = v;
    return Expression(std::move(n));
}

Expression Expression::variable(Variable v) {
    auto n = std::make_shared<Node>();
    n->op = v == Variable::x ? Op::var_x : Op::var_xp;
    return Expression(std::move(n));
}

Expression Expression::make(Op op, const Expression& a, const Expression& b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expression(std::move(n));
}

namespace {
bool is_const(const Expression& e, double v) { return e.is_constant() && e.constant_value() == v; }
}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() + b.constant_value());
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return Expression::make(Op::add, a, b);
}

Expression operator-(const Expression& a, const Expression& b) {
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() - b.constant_value());
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return -b;
    return Expression::make(Op::sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b) {
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() * b.constant_value());
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Expression::constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return Expression::make(Op::mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() / b.constant_value());
    if (is_const(a, 0.0)) return Expression::constant(0.0);
    if (is_const(b, 1.0)) return a;
    return Expression::make(Op::div, a, b);
}

Expression operator-(const Expression& a) {
    if (a.is_constant()) return Expression::constant(-a.constant_value());
    return Expression::make(Op::neg, a, Expression::constant(0.0));
}

Expression pow(const Expression& a, const Expression& b) {
    if (a.is_constant() && b.is_constant()) return Expression::constant(std::pow(a.constant_value(), b.constant_value()));
    if (is_const(b, 0.0)) return Expression::constant(1.0);
    if (is_const(b, 1.0)) return a;
    return Expression::make(Op::pow, a, b);
}

Expression apply(Op fn, const Expression& a) {
    if (a.is_constant()) {
        const double v = a.constant_value();
        switch (fn) {
            case Op::sin: return Expression::constant(std::sin(v));
            case Op::cos: return Expression::constant(std::cos(v));
            case Op::exp: return Expression::constant(std::exp(v));
            case Op::log: return Expression::constant(std::log(v));
            case Op::sqrt: return Expression::constant(std::sqrt(v));
            default: break;
        }
    }
    return Expression::make(fn, a, Expression::constant(0.0));
}

namespace {

double eval_node(const Expression::Node& n, double x, double xp) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::var_x: return x;
        case Op::var_xp: return xp;
        case Op::add: return eval_node(*n.lhs, x, xp) + eval_node(*n.rhs, x, xp);
        case Op::sub: return eval_node(*n.lhs, x, xp) - eval_node(*n.rhs, x, xp);
        case Op::mul: return eval_node(*n.lhs, x, xp) * eval_node(*n.rhs, x, xp);
        case Op::div: return eval_node(*n.lhs, x, xp) / eval_node(*n.rhs, x, xp);
        case Op::pow: {
            const double b = eval_node(*n.lhs, x, xp);
            const double e = eval_node(*n.rhs, x, xp);
            if (e == 2.0) return b * b;
            return std::pow(b, e);
        }
        case Op::neg: return -eval_node(*n.lhs, x, xp);
        case Op::sin: return std::sin(eval_node(*n.lhs, x, xp));
        case Op::cos: return std::cos(eval_node(*n.lhs, x, xp));
        case Op::exp: return std::exp(eval_node(*n.lhs, x, xp));
        case Op::log: return std::log(eval_node(*n.lhs, x, xp));
        case Op::sqrt: return std::sqrt(eval_node(*n.lhs, x, xp));
    }
    return 0.0;
}

const char* fn_name(Op op) {
    switch (op) {
        case Op::sin: return "sin";
        case Op::cos: return "cos";
        case Op::exp: return "exp";
        case Op::log: return "log";
        case Op::sqrt: return "sqrt";
        default: return "?";
    }
}

void print_node(std::ostringstream& os, const Expression::Node& n) {
    switch (n.op) {
        case Op::constant: os.precision(17); os << n.value; return;
        case Op::var_x: os << "x"; return;
        case Op::var_xp: os << "xp"; return;
        case Op::add: case Op::sub: case Op::mul: case Op::div: case Op::pow: {
            const char sym = n.op == Op::add ? '+' : n.op == Op::sub ? '-' : n.op == Op::mul ? '*'
                           : n.op == Op::div ? '/' : '^';
            os << '(';
            print_node(os, *n.lhs);
            os << ' ' << sym << ' ';
            print_node(os, *n.rhs);
            os << ')';
            return;
        }
        case Op::neg: os << "(-"; print_node(os, *n.lhs); os << ')'; return;
        default:
            os << fn_name(n.op) << '(';
            print_node(os, *n.lhs);
            os << ')';
    }
}

// Recursive-descent parser.
class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Expression parse_all() {
        Expression e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw UsageError("expression parse error at column " + std::to_string(pos_ + 1) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression parse_sum() {
        Expression lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = lhs + parse_product();
            else if (accept('-')) lhs = lhs - parse_product();
            else return lhs;
        }
    }

    Expression parse_product() {
        Expression lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = lhs * parse_unary();
            else if (accept('/')) lhs = lhs / parse_unary();
            else return lhs;
        }
    }

    Expression parse_unary() {
        if (accept('-')) return -parse_unary();
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    Expression parse_power() {
        Expression base = parse_primary();
        if (accept('^')) return pow(base, parse_unary());
        return base;
    }

    Expression parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expression e = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(s_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(rest.c_str(), &end);
            if (end == rest.c_str()) fail("bad number");
            pos_ += static_cast<std::size_t>(end - rest.c_str());
            return Expression::constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string_view id = s_.substr(start, pos_ - start);
            if (id == "x") {
                if (pos_ < s_.size() && s_[pos_] == '\'') {
                    ++pos_;
                    return Expression::variable(Variable::xp);
                }
                // U+2032 PRIME
                if (s_.substr(pos_, 3) == "\xE2\x80\xB2") {
                    pos_ += 3;
                    return Expression::variable(Variable::xp);
                }
                return Expression::variable(Variable::x);
            }
            if (id == "xp") return Expression::variable(Variable::xp);
            if (id == "pi") return Expression::constant(std::numbers::pi);
            if (id == "e") return Expression::constant(std::numbers::e);
            Op fn;
            if (id == "sin") fn = Op::sin;
            else if (id == "cos") fn = Op::cos;
            else if (id == "exp") fn = Op::exp;
            else if (id == "log") fn = Op::log;
            else if (id == "sqrt") fn = Op::sqrt;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(id) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            Expression arg = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return apply(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) { return Parser(text).parse_all(); }

double Expression::operator()(double x, double xp) const { return eval_node(*node_, x, xp); }

Expression Expression::derivative(Variable v) const {
    const Node& n = *node_;
    const auto sub = [](const std::shared_ptr<const Node>& p) { return Expression(p); };
    switch (n.op) {
        case Op::constant: return constant(0.0);
        case Op::var_x: return constant(v == Variable::x ? 1.0 : 0.0);
        case Op::var_xp: return constant(v == Variable::xp ? 1.0 : 0.0);
        case Op::add: return sub(n.lhs).derivative(v) + sub(n.rhs).derivative(v);
        case Op::sub: return sub(n.lhs).derivative(v) - sub(n.rhs).derivative(v);
        case Op::mul: {
            const Expression a = sub(n.lhs), b = sub(n.rhs);
            return a.derivative(v) * b + a * b.derivative(v);
        }
        case Op::div: {
            const Expression a = sub(n.lhs), b = sub(n.rhs);
            return (a.derivative(v) * b - a * b.derivative(v)) / (b * b);
        }
        case Op::pow: {
            const Expression a = sub(n.lhs), b = sub(n.rhs);
            if (b.is_constant())
                return b * pow(a, constant(b.constant_value() - 1.0)) * a.derivative(v);
            // a^b = exp(b log a)
            return *this * (b.derivative(v) * apply(Op::log, a) + b * a.derivative(v) / a);
        }
        case Op::neg: return -sub(n.lhs).derivative(v);
        case Op::sin: return apply(Op::cos, sub(n.lhs)) * sub(n.lhs).derivative(v);
        case Op::cos: return -(apply(Op::sin, sub(n.lhs)) * sub(n.lhs).derivative(v));
        case Op::exp: return *this * sub(n.lhs).derivative(v);
        case Op::log: return sub(n.lhs).derivative(v) / sub(n.lhs);
        case Op::sqrt: return sub(n.lhs).derivative(v) / (constant(2.0) * *this);
    }
    return constant(0.0);
}

std::string Expression::to_string() const {
    std::ostringstream os;
    print_node(os, *node_);
    return os.str();
}

}  // namespace mather_twist
