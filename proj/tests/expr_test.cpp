#include "gmqv/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace gmqv {
namespace {

using K = Expr::Kind;

TEST(ExprParse, Variable) {
    const Expr e = parse_expr("x");
    EXPECT_EQ(e.kind(), K::variable);
}

TEST(ExprParse, ScaledExponential) {
    const Expr e = parse_expr("2*exp(-0.5*x)");
    ASSERT_EQ(e.kind(), K::mul);
    EXPECT_EQ(e.lhs().kind(), K::number);
    EXPECT_EQ(e.lhs().value(), 2.0);
    const Expr& call = e.rhs();
    ASSERT_EQ(call.kind(), K::exp);
    const Expr& arg = call.lhs();
    ASSERT_EQ(arg.kind(), K::mul);
    EXPECT_EQ(arg.lhs().kind(), K::number);
    EXPECT_EQ(arg.lhs().value(), -0.5);
    EXPECT_EQ(arg.rhs().kind(), K::variable);
}

TEST(ExprEval, BridgeVarianceOnDiagonal) {
    // min(s,t)(1-max(s,t)) at s = t = 0.3
    EXPECT_NEAR(eval(parse_expr("x*(1-x)"), 0.3), 0.21, 1e-15);
}

TEST(ExprEval, Examples) {
    EXPECT_EQ(eval(parse_expr("1"), 17.3), 1.0);
    EXPECT_EQ(eval(parse_expr("exp(-x)"), 0.0), 1.0);
    EXPECT_EQ(eval(parse_expr("x/(1-x)"), 0.5), 1.0);
}

TEST(ExprEval, Precedence) {
    EXPECT_EQ(eval(parse_expr("2+3*4"), 0.0), 14.0);
    EXPECT_EQ(eval(parse_expr("2^3^2"), 0.0), 512.0);
    EXPECT_EQ(eval(parse_expr("-2^2"), 0.0), -4.0);
    EXPECT_EQ(eval(parse_expr("2^-1"), 0.0), 0.5);
    EXPECT_EQ(eval(parse_expr("8/4/2"), 0.0), 1.0);
    EXPECT_EQ(eval(parse_expr("1-2-3"), 0.0), -4.0);
    EXPECT_EQ(eval(parse_expr("-x*3"), 2.0), -6.0);
    EXPECT_DOUBLE_EQ(eval(parse_expr("ln(exp(1.5e0))"), 0.0), 1.5);
    EXPECT_EQ(eval(parse_expr(" ( x + 1 ) * .5 "), 3.0), 2.0);
}

TEST(ExprParse, Errors) {
    auto offset_of = [](const char* src) -> std::size_t {
        try {
            parse_expr(src);
        } catch (const ParseError& e) {
            EXPECT_FALSE(e.expected().empty());
            return e.offset();
        }
        ADD_FAILURE() << "no parse error for '" << src << "'";
        return 0;
    };
    EXPECT_EQ(offset_of(""), 0u);
    EXPECT_EQ(offset_of("   "), 3u);
    EXPECT_EQ(offset_of("(x+1"), 4u);
    EXPECT_EQ(offset_of("x)"), 1u);
    EXPECT_EQ(offset_of("2*y"), 2u);
    EXPECT_EQ(offset_of("sin(x)"), 0u);
    EXPECT_EQ(offset_of("inf"), 0u);
    EXPECT_EQ(offset_of("exp x"), 4u);
    EXPECT_EQ(offset_of("1e"), 2u);
    EXPECT_EQ(offset_of("x+"), 2u);
}

TEST(ExprEval, DomainErrors) {
    EXPECT_THROW(eval(parse_expr("1/x"), 0.0), DomainError);
    EXPECT_THROW(eval(parse_expr("ln(x)"), 0.0), DomainError);
    EXPECT_THROW(eval(parse_expr("ln(x)"), -1.0), DomainError);
    EXPECT_THROW(eval(parse_expr("x^0.5"), -1.0), DomainError);
    EXPECT_THROW(eval(parse_expr("exp(x)"), 1000.0), DomainError);
    EXPECT_THROW(eval(parse_expr("x^(-1)"), 0.0), DomainError);
    EXPECT_EQ(eval(parse_expr("x^2"), -3.0), 9.0);

    try {
        eval(parse_expr("1 + 1/(1-x)"), 1.0);
        FAIL() << "expected a domain error";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.x(), 1.0);
        EXPECT_EQ(e.subexpr(), "(1/(1-x))");
    }
}

// Random trees over the whole grammar, for the print/parse round trip.
Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> lit(-5.0, 5.0);
    switch (pick(rng)) {
        case 0:
            return Expr::number(lit(rng));
        case 1:
            return Expr::variable();
        case 2:
            return Expr::unary(K::negate, random_expr(rng, depth - 1));
        case 3:
            return Expr::unary(K::exp, random_expr(rng, depth - 1));
        case 4:
            return Expr::unary(K::ln, random_expr(rng, depth - 1));
        case 5:
            return Expr::binary(K::add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 6:
            return Expr::binary(K::sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 7:
            return Expr::binary(K::mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 8:
            return Expr::binary(K::div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        default:
            return Expr::binary(K::pow, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
}

TEST(ExprProperty, PrintParseRoundTrip) {
    std::mt19937 rng(20241028);
    std::uniform_real_distribution<double> xs(-3.0, 3.0);
    int evaluated = 0;
    for (int i = 0; i < 2000; ++i) {
        const Expr e = random_expr(rng, 5);
        const std::string text = to_string(e);
        const Expr back = parse_expr(text);
        ASSERT_TRUE(back == e) << text;
        EXPECT_EQ(to_string(back), text);
        const double x = xs(rng);
        try {
            const double v = eval(e, x);
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_EQ(eval(back, x), v) << text;
            ++evaluated;
        } catch (const DomainError&) {
            EXPECT_THROW(eval(back, x), DomainError);
        }
    }
    EXPECT_GT(evaluated, 500);
}

TEST(ExprProperty, NegatedLiteralsRoundTrip) {
    for (const Expr& e : {Expr::number(-2.0), Expr::unary(K::negate, Expr::number(2.0)),
                          Expr::unary(K::negate, Expr::number(-2.0)),
                          Expr::unary(K::negate, Expr::unary(K::negate, Expr::variable()))}) {
        EXPECT_TRUE(parse_expr(to_string(e)) == e) << to_string(e);
    }
}

}  // namespace
}  // namespace gmqv
