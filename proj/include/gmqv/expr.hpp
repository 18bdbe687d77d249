#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gmqv {

/// Parse failure with the byte offset into the source and a short
/// description of what the parser expected at that position.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, std::string expected, const std::string& what)
        : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

/// Raised when evaluation leaves the real domain (division by zero, ln of a
/// non-positive value, non-integer power of a negative base) or produces a
/// non-finite value.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string subexpr, double x, const std::string& what)
        : std::runtime_error(what), subexpr_(std::move(subexpr)), x_(x) {}

    const std::string& subexpr() const noexcept { return subexpr_; }
    double x() const noexcept { return x_; }

private:
    std::string subexpr_;
    double x_;
};

/// Immutable expression tree in the single variable `x`.
///
/// Grammar (loosest to tightest):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          -- right-associative
///   primary := number | 'x' | ('exp' | 'ln') '(' sum ')' | '(' sum ')'
///
/// A unary minus applied directly to a literal folds into a negative literal.
/// Copies share the underlying nodes.
class Expr {
public:
    enum class Kind { number, variable, negate, add, sub, mul, div, pow, exp, ln };

    static Expr number(double v);
    static Expr variable();
    static Expr unary(Kind kind, Expr operand);
    static Expr binary(Kind kind, Expr lhs, Expr rhs);

    Kind kind() const;
    /// Literal value; only meaningful for Kind::number.
    double value() const;
    /// Operand of negate/exp/ln, left operand of binary nodes.
    const Expr& lhs() const;
    /// Right operand of binary nodes.
    const Expr& rhs() const;

    double operator()(double x) const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr parse_expr(std::string_view source);

double eval(const Expr& e, double x);

/// Canonical, fully parenthesised text. Literals print with round-trip
/// precision, so parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);

}  // namespace gmqv
