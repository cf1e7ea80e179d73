#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mveq/expr.hpp"

using namespace mveq;

namespace {

double fd(const Expr& e, double x) {
    double step = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x));
    return (eval(e, x + step) - eval(e, x - step)) / (2.0 * step);
}

} // namespace

TEST_CASE("parsing and evaluation of arithmetic") {
    CHECK(eval(parse("1 + 2*3"), 0.0) == doctest::Approx(7.0));
    CHECK(eval(parse("(1 + 2)*3"), 0.0) == doctest::Approx(9.0));
    CHECK(eval(parse("2*x^3"), 2.0) == doctest::Approx(16.0));
    CHECK(eval(parse("-x^2"), 3.0) == doctest::Approx(-9.0));   // unary minus binds looser than ^
    CHECK(eval(parse("2^3^2"), 0.0) == doctest::Approx(512.0)); // right associative
    CHECK(eval(parse("x^-2"), 2.0) == doctest::Approx(0.25));
    CHECK(eval(parse("10 - 4 - 3"), 0.0) == doctest::Approx(3.0)); // left associative
    CHECK(eval(parse("12 / 4 / 3"), 0.0) == doctest::Approx(1.0));
    CHECK(eval(parse("2e2 + 1.5"), 0.0) == doctest::Approx(201.5));
    CHECK(eval(parse(".5 * 4"), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("constants and functions") {
    CHECK(eval(parse("pi"), 0.0) == doctest::Approx(3.14159265358979));
    CHECK(eval(parse("e"), 0.0) == doctest::Approx(2.71828182845905));
    CHECK(eval(parse("sin(pi/2)"), 0.0) == doctest::Approx(1.0));
    CHECK(eval(parse("cos(0)"), 123.0) == doctest::Approx(1.0));
    CHECK(eval(parse("exp(1)"), 0.0) == doctest::Approx(std::exp(1.0)));
    CHECK(eval(parse("ln(e)"), 0.0) == doctest::Approx(1.0));
    CHECK(eval(parse("sqrt(16)"), 0.0) == doctest::Approx(4.0));
    CHECK(eval(parse("sinh(1) + cosh(1)"), 0.0) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("2 +"), ParseError);
    CHECK_THROWS_AS(parse("(1 + 2"), ParseError);
    CHECK_THROWS_AS(parse("foo(3)"), ParseError);
    CHECK_THROWS_AS(parse("sin 3"), ParseError);
    CHECK_THROWS_AS(parse("2 x"), ParseError); // implicit multiplication rejected
    CHECK_THROWS_AS(parse("1 @ 2"), ParseError);
    try {
        parse("1 + @");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    try {
        parse("2 y");
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
    }
}

TEST_CASE("evaluation domain errors are eager") {
    CHECK_THROWS_AS(eval(parse("ln(x)"), -1.0), DomainError);
    CHECK_THROWS_AS(eval(parse("ln(x)"), 0.0), DomainError);
    CHECK_THROWS_AS(eval(parse("1/x"), 0.0), DomainError);
    CHECK_THROWS_AS(eval(parse("sqrt(x)"), -4.0), DomainError);
    CHECK_THROWS_AS(eval(parse("x^0.5"), -4.0), DomainError);  // non-integer power, negative base
    CHECK(eval(parse("x^2"), -4.0) == doctest::Approx(16.0));  // integer power is fine
    CHECK(eval(parse("x^3"), -2.0) == doctest::Approx(-8.0));
    CHECK_THROWS_AS(eval(parse("x^-1"), 0.0), DomainError);
    CHECK_THROWS_AS(eval(parse("exp(x)"), 1000.0), DomainError); // overflow surfaces as DomainError
    CHECK_THROWS_AS(eval(parse("x"), std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("serialization round trips structurally") {
    const std::vector<std::string> sources = {
        "x",
        "-x",
        "3.5",
        "-3.5",
        "x^2 + 3*x - 1",
        "2*x^3 - x^-2",
        "(x + 1)*(x - 1)",
        "sin(2*x) + cos(x/3)",
        "exp(-x^2)",
        "ln(x + sqrt(x^2 + 1))",
        "x^(1/3)",
        "2^3^2",
        "-(x + 1)",
        "1 - (2 - 3)",
        "x/(x + 1)/2",
        "sinh(x)*cosh(x)",
        "pi*x + e",
        "x^-0.5",
        "-x^2 + x^-3",
        "sqrt(1 - x^2)",
    };
    for (const auto& s : sources) {
        CAPTURE(s);
        Expr e = parse(s);
        std::string text = serialize(e);
        CAPTURE(text);
        Expr back = parse(text);
        CHECK(structurally_equal(e, back));
        // and the re-serialization is a fixed point
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("structural equality distinguishes different trees") {
    CHECK(structurally_equal(parse("x + 1"), parse("x + 1")));
    CHECK_FALSE(structurally_equal(parse("x + 1"), parse("1 + x")));
    CHECK_FALSE(structurally_equal(parse("x"), parse("2*x")));
    CHECK_FALSE(structurally_equal(parse("sin(x)"), parse("cos(x)")));
}

TEST_CASE("negation of literals folds at construction") {
    Expr e = parse("-3");
    CHECK(e.kind() == NodeKind::Literal);
    CHECK(e.literalValue() == -3.0);
    CHECK(serialize(e) == "-3");
    // a negative literal as a right operand stays parenthesized
    Expr diff = Expr::binary(BinaryOp::Sub, Expr::variable(), Expr::literal(-2.0));
    std::string text = serialize(diff);
    CHECK(structurally_equal(parse(text), diff));
}

TEST_CASE("symbolic derivatives agree with central differences") {
    struct Case {
        const char* src;
        double lo, hi;
    };
    const std::vector<Case> cases = {
        {"x^2 + 3*x - 1", -5.0, 5.0},
        {"x^3 - 2*x", -3.0, 3.0},
        {"sin(2*x)", -3.0, 3.0},
        {"cos(x/2 + 1)", -3.0, 3.0},
        {"exp(-x^2)", -2.0, 2.0},
        {"ln(x)", 0.5, 6.0},
        {"sqrt(x)", 0.5, 6.0},
        {"sinh(x)*cosh(x)", -2.0, 2.0},
        {"x^x", 0.5, 3.0},               // general power: exponent depends on x
        {"x^2.5", 0.5, 3.0},             // non-integer constant exponent
        {"x^-3", 0.5, 3.0},
        {"(x^2 + 1)/(x + 2)", -1.0, 4.0},
        {"ln(x + sqrt(x^2 + 1))", -3.0, 3.0},
        {"exp(sin(x))", -3.0, 3.0},
        {"-x^3 + 2*x^-1", 0.3, 3.0},
        {"2^x", -2.0, 3.0},              // constant base, variable exponent
    };
    std::mt19937_64 rng(7);
    for (const auto& c : cases) {
        CAPTURE(c.src);
        Expr e = parse(c.src);
        Expr d = differentiate(e);
        std::uniform_real_distribution<double> dist(c.lo, c.hi);
        for (int k = 0; k < 100; ++k) {
            double x = dist(rng);
            double exact = eval(d, x);
            double approx = fd(e, x);
            CHECK(std::abs(exact - approx) <= 1e-6 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("derivatives of specific forms") {
    Expr d1 = differentiate(parse("x^3"));
    CHECK(eval(d1, 2.0) == doctest::Approx(12.0));
    Expr d2 = differentiate(parse("sin(2*x)"));
    CHECK(eval(d2, 0.0) == doctest::Approx(2.0));
    Expr d3 = differentiate(parse("7"));
    CHECK(eval(d3, 5.0) == doctest::Approx(0.0));
    Expr d4 = differentiate(parse("pi*x"));
    CHECK(eval(d4, 1.0) == doctest::Approx(3.14159265358979));
    // second derivative through repeated differentiation
    Expr dd = differentiate(differentiate(parse("x^4")));
    CHECK(eval(dd, 2.0) == doctest::Approx(48.0));
}

TEST_CASE("dependsOnVariable") {
    CHECK(parse("x + 1").dependsOnVariable());
    CHECK_FALSE(parse("pi + 2^3").dependsOnVariable());
    CHECK(parse("sin(cos(x))").dependsOnVariable());
    CHECK_FALSE(parse("ln(e)").dependsOnVariable());
}
