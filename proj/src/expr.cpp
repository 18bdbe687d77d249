#include "gmqv/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace gmqv {

struct Expr::Node {
    Kind kind;
    double value = 0.0;
    Expr lhs{nullptr};
    Expr rhs{nullptr};
};

Expr Expr::number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::number;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::variable() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    return Expr(std::move(n));
}

Expr Expr::unary(Kind kind, Expr operand) {
    if (kind != Kind::negate && kind != Kind::exp && kind != Kind::ln) {
        throw std::invalid_argument("Expr::unary: not a unary kind");
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(operand);
    return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
    switch (kind) {
        case Kind::add:
        case Kind::sub:
        case Kind::mul:
        case Kind::div:
        case Kind::pow:
            break;
        default:
            throw std::invalid_argument("Expr::binary: not a binary kind");
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const Expr& Expr::lhs() const { return node_->lhs; }
const Expr& Expr::rhs() const { return node_->rhs; }

double Expr::operator()(double x) const { return eval(*this, x); }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::number:
            return a.value() == b.value();
        case Expr::Kind::variable:
            return true;
        case Expr::Kind::negate:
        case Expr::Kind::exp:
        case Expr::Kind::ln:
            return a.lhs() == b.lhs();
        default:
            return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        skip_ws();
        if (pos_ == src_.size()) fail("expression", "empty expression");
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') fail("end of input", "unbalanced ')'");
            fail("operator or end of input", "unexpected character");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& expected, const std::string& msg) const {
        throw ParseError(pos_, expected,
                         msg + " at offset " + std::to_string(pos_) + " (expected " + expected + ")");
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = Expr::binary(Expr::Kind::add, lhs, parse_product());
            } else if (accept('-')) {
                lhs = Expr::binary(Expr::Kind::sub, lhs, parse_product());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::binary(Expr::Kind::mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = Expr::binary(Expr::Kind::div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        if (accept('-')) {
            skip_ws();
            const bool bare_literal =
                pos_ < src_.size() &&
                (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.');
            Expr operand = parse_unary();
            if (bare_literal && operand.kind() == Expr::Kind::number) {
                return Expr::number(-operand.value());
            }
            return Expr::unary(Expr::Kind::negate, operand);
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) return Expr::binary(Expr::Kind::pow, base, parse_unary());
        return base;
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ == src_.size()) fail("number, 'x', function or '('", "unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_sum();
            if (!accept(')')) fail("')'", "unbalanced '('");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view ident = src_.substr(start, pos_ - start);
            if (ident == "x") return Expr::variable();
            if (ident == "exp" || ident == "ln") {
                if (!accept('(')) fail("'('", "function call without '('");
                Expr arg = parse_sum();
                if (!accept(')')) fail("')'", "unbalanced '('");
                return Expr::unary(ident == "exp" ? Expr::Kind::exp : Expr::Kind::ln, arg);
            }
            pos_ = start;
            fail("'x', 'exp' or 'ln'", "unknown identifier '" + std::string(ident) + "'");
        }
        if (c == ')') fail("number, 'x', function or '('", "unbalanced ')'");
        fail("number, 'x', function or '('", std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        bool digits = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
            digits = true;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                digits = true;
            }
        }
        if (!digits) {
            pos_ = start;
            fail("digit", "malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
                pos_ = p;
            } else {
                pos_ = p;
                fail("exponent digits", "malformed exponent");
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (!std::isfinite(v)) {
            pos_ = start;
            fail("finite number", "numeric literal out of range");
        }
        return Expr::number(v);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void domain_fail(const Expr& e, double x, const std::string& why) {
    const std::string sub = to_string(e);
    throw DomainError(sub, x, why + " in " + sub + " at x=" + format_number(x));
}

double checked(const Expr& e, double x, double v) {
    if (!std::isfinite(v)) domain_fail(e, x, "non-finite value");
    return v;
}

}  // namespace

Expr parse_expr(std::string_view source) { return Parser(source).parse(); }

double eval(const Expr& e, double x) {
    using K = Expr::Kind;
    switch (e.kind()) {
        case K::number:
            return e.value();
        case K::variable:
            return checked(e, x, x);
        case K::negate:
            return -eval(e.lhs(), x);
        case K::add:
            return checked(e, x, eval(e.lhs(), x) + eval(e.rhs(), x));
        case K::sub:
            return checked(e, x, eval(e.lhs(), x) - eval(e.rhs(), x));
        case K::mul:
            return checked(e, x, eval(e.lhs(), x) * eval(e.rhs(), x));
        case K::div: {
            const double num = eval(e.lhs(), x);
            const double den = eval(e.rhs(), x);
            if (den == 0.0) domain_fail(e, x, "division by zero");
            return checked(e, x, num / den);
        }
        case K::pow: {
            const double base = eval(e.lhs(), x);
            const double expo = eval(e.rhs(), x);
            if (base < 0.0 && std::trunc(expo) != expo) {
                domain_fail(e, x, "non-integer power of a negative number");
            }
            return checked(e, x, std::pow(base, expo));
        }
        case K::exp:
            return checked(e, x, std::exp(eval(e.lhs(), x)));
        case K::ln: {
            const double arg = eval(e.lhs(), x);
            if (arg <= 0.0) domain_fail(e, x, "ln of a non-positive number");
            return checked(e, x, std::log(arg));
        }
    }
    return 0.0;  // unreachable
}

std::string to_string(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind()) {
        case K::number: {
            const std::string s = format_number(e.value());
            return std::signbit(e.value()) ? "(" + s + ")" : s;
        }
        case K::variable:
            return "x";
        case K::negate: {
            const std::string inner = to_string(e.lhs());
            // a bare literal after '-' would fold back into a negative literal
            if (e.lhs().kind() == K::number) return "(-(" + inner + "))";
            return "(-" + inner + ")";
        }
        case K::exp:
            return "exp(" + to_string(e.lhs()) + ")";
        case K::ln:
            return "ln(" + to_string(e.lhs()) + ")";
        case K::add:
            return "(" + to_string(e.lhs()) + "+" + to_string(e.rhs()) + ")";
        case K::sub:
            return "(" + to_string(e.lhs()) + "-" + to_string(e.rhs()) + ")";
        case K::mul:
            return "(" + to_string(e.lhs()) + "*" + to_string(e.rhs()) + ")";
        case K::div:
            return "(" + to_string(e.lhs()) + "/" + to_string(e.rhs()) + ")";
        case K::pow:
            return "(" + to_string(e.lhs()) + "^" + to_string(e.rhs()) + ")";
    }
    return {};
}

}  // namespace gmqv
