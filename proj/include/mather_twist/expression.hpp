#pragma once

// Closed-form scalar expressions in two variables (x, x'), used for custom
// generating functions. Supports + - * / ^, unary minus, sin, cos, exp, log,
// sqrt, numeric literals and the constants pi and e. The second variable may
// be written as x', xp or x′.

#include <memory>
#include <string>
#include <string_view>

namespace mather_twist {

enum class Variable { x, xp };

class Expression {
public:
    enum class Op { constant, var_x, var_xp, add, sub, mul, div, pow, neg, sin, cos, exp, log, sqrt };

    struct Node {
        Op op;
        double value = 0.0;
        std::shared_ptr<const Node> lhs, rhs;
    };

    Expression() : Expression(constant(0.0)) {}

    static Expression constant(double v);
    static Expression variable(Variable v);

    /// Throws UsageError with the offending column on malformed input.
    static Expression parse(std::string_view text);

    double operator()(double x, double xp) const;

    /// Symbolic partial derivative, constant-folded.
    Expression derivative(Variable v) const;

    std::string to_string() const;
    bool is_constant() const { return node_->op == Op::constant; }
    double constant_value() const { return node_->value; }

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    friend Expression pow(const Expression& a, const Expression& b);
    friend Expression apply(Op fn, const Expression& a);

private:
    explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expression make(Op op, const Expression& a, const Expression& b);
    std::shared_ptr<const Node> node_;
};

}  // namespace mather_twist
