#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mveq/qam.hpp"

using namespace mveq;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("built-in generators and their mean values") {
    // arithmetic mean
    {
        Generator g = identity_generator();
        QuasiArithmeticMean m(g, MeanWeights(0.5));
        CHECK(m.mean(2.0, 4.0) == doctest::Approx(3.0));
    }
    // geometric mean
    {
        Generator g = ln_generator(Interval(0.0, kInf));
        QuasiArithmeticMean m(g, MeanWeights(0.5));
        CHECK(m.mean(1.0, 4.0) == doctest::Approx(2.0));
    }
    // root-mean-square: sqrt((1 + 49)/2) = 5
    {
        Generator g = power_mean_generator(2.0, Interval(0.0, kInf));
        QuasiArithmeticMean m(g, MeanWeights(0.5));
        CHECK(m.mean(1.0, 7.0) == doctest::Approx(5.0));
    }
    // harmonic mean: 2/(1/2 + 1/6) = 3
    {
        Generator g = power_mean_generator(-1.0, Interval(0.0, kInf));
        QuasiArithmeticMean m(g, MeanWeights(0.5));
        CHECK(m.mean(2.0, 6.0) == doctest::Approx(3.0));
    }
    // weighted arithmetic mean
    {
        Generator g = identity_generator();
        QuasiArithmeticMean m(g, MeanWeights(0.25));
        CHECK(m.mean(0.0, 4.0) == doctest::Approx(3.0));
    }
}

TEST_CASE("builtin generator lookup by name") {
    CHECK(builtin_generator("identity").name() == "identity");
    CHECK(builtin_generator("ln").name() == "ln");
    CHECK(builtin_generator("exp").name() == "exp");
    Generator p = builtin_generator("power:2");
    CHECK(p.value(3.0) == doctest::Approx(9.0));
    Generator p25 = builtin_generator("power:2.5");
    CHECK(p25.value(2.0) == doctest::Approx(std::pow(2.0, 2.5)));
    Generator pneg = builtin_generator("power:-1");
    CHECK(pneg.value(2.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(builtin_generator("power:0"), SpecError);
    CHECK_THROWS_AS(builtin_generator("power:abc"), SpecError);
    // an arbitrary expression is accepted as a custom generator
    Generator c = builtin_generator("2*x + 1");
    CHECK(c.value(3.0) == doctest::Approx(7.0));
    CHECK(c.inverse(7.0) == doctest::Approx(3.0));
}

TEST_CASE("custom generator domains are honored") {
    Interval narrow(0.5, 4.5);
    const Interval* p = &narrow;
    Generator g = builtin_generator("ln", p);
    CHECK(g.domain().lo == doctest::Approx(0.5));
    CHECK(g.domain().hi == doctest::Approx(4.5));
    QuasiArithmeticMean m(g, MeanWeights(0.5));
    CHECK(m.mean(1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(m.mean(0.1, 1.0), DomainError);
    // domain outside the generator's natural domain is rejected
    Interval bad(-1.0, 1.0);
    const Interval* pb = &bad;
    CHECK_THROWS_AS(builtin_generator("ln", pb), SpecError);
}

TEST_CASE("non-monotone generator expressions are rejected") {
    CHECK_THROWS_AS(make_generator_from_text("x^2", Interval(-1.0, 1.0)), MonotonicityError);
    CHECK_THROWS_AS(make_generator_from_text("sin(x)", Interval(0.0, 10.0)), MonotonicityError);
    CHECK_THROWS_AS(make_generator_from_text("3", Interval(0.0, 1.0)), MonotonicityError);
    // an isolated critical point does not break strict monotonicity
    Generator cube = make_generator_from_text("x^3", Interval(-kInf, kInf));
    CHECK(cube.increasing());
    CHECK(cube.inverse(8.0) == doctest::Approx(2.0).epsilon(1e-10));
    // decreasing generators work too
    Generator dec = make_generator_from_text("-x", Interval(-kInf, kInf));
    CHECK_FALSE(dec.increasing());
    QuasiArithmeticMean m(dec, MeanWeights(0.5));
    CHECK(m.mean(2.0, 4.0) == doctest::Approx(3.0));
}

TEST_CASE("numeric inversion on generators without closed-form inverses") {
    Generator g = make_generator_from_text("x + x^3", Interval(-kInf, kInf));
    CHECK(g.inverse(2.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.inverse(0.0) == doctest::Approx(0.0));
    CHECK(g.inverse(-10.0) == doctest::Approx(-2.0).epsilon(1e-10));

    Generator e = make_generator_from_text("exp(x)", Interval(-kInf, kInf));
    CHECK(e.inverse(1.0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(e.inverse(std::exp(3.0)) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("range detection for unbounded images") {
    // ln maps (0, inf) onto all of R: both range ends must be infinite
    Generator g = make_generator_from_text("ln(x)", Interval(0.0, kInf));
    CHECK(std::isinf(g.range().lo));
    CHECK(std::isinf(g.range().hi));
    CHECK(g.range().lo < 0.0);
    CHECK(g.range().hi > 0.0);
    // exp maps R onto (0, inf): lower end finite at 0
    Generator e = make_generator_from_text("exp(x)", Interval(-kInf, kInf));
    CHECK(e.range().lo == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::isinf(e.range().hi));
    // a bounded image: atan-like saturation via x/(1+x^2)-free example:
    // H(x) = x/(1 + x) on (0, inf) has image (0, 1)
    Generator b = make_generator_from_text("x/(1 + x)", Interval(0.0, kInf));
    CHECK(b.range().lo == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(b.range().hi == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("inversion outside the range fails cleanly") {
    Generator g = make_generator_from_text("x", Interval(0.0, 1.0));
    CHECK_THROWS_AS(g.inverse(2.0), InversionError);
    CHECK_THROWS_AS(g.inverse(-1.0), InversionError);
}

TEST_CASE("mean weights validation") {
    CHECK_THROWS_AS(MeanWeights(0.0), SpecError);
    CHECK_THROWS_AS(MeanWeights(1.0), SpecError);
    CHECK_THROWS_AS(MeanWeights(-0.5), SpecError);
    CHECK_THROWS_AS(MeanWeights(1.5), SpecError);
    MeanWeights w(0.3);
    CHECK(w.alpha() == doctest::Approx(0.3));
    CHECK(w.beta() == doctest::Approx(0.7));
}

TEST_CASE("idempotency, internality, and inverse round trips") {
    struct Setup {
        Generator gen;
        Interval window;
    };
    std::vector<Setup> setups;
    setups.push_back({identity_generator(), Interval(-1.5, 1.5)});
    setups.push_back({ln_generator(Interval(0.0, kInf)), Interval(0.25, 4.5)});
    setups.push_back({exp_generator(), Interval(-1.5, 1.5)});
    setups.push_back({power_mean_generator(2.0, Interval(0.0, kInf)), Interval(0.5, 2.0)});
    setups.push_back({power_mean_generator(-1.0, Interval(0.0, kInf)), Interval(0.4, 2.5)});
    setups.push_back({make_generator_from_text("x + x^3", Interval(-kInf, kInf)), Interval(-1.2, 1.2)});

    std::mt19937_64 rng(2024);
    for (auto& s : setups) {
        CAPTURE(s.gen.name());
        std::uniform_real_distribution<double> dist(s.window.lo, s.window.hi);
        std::uniform_real_distribution<double> adist(0.05, 0.95);
        for (int k = 0; k < 200; ++k) {
            double x = dist(rng);
            double y = dist(rng);
            double alpha = adist(rng);
            QuasiArithmeticMean m(s.gen, MeanWeights(alpha));
            // idempotency
            double mx = m.mean(x, x);
            CHECK(std::abs(mx - x) <= 1e-12 * (1.0 + std::abs(x)));
            // internality (strict when x != y)
            if (x != y) {
                double h = m.mean(x, y);
                double lo = std::min(x, y), hi = std::max(x, y);
                CHECK(h >= lo - 1e-12 * (1.0 + std::abs(lo)));
                CHECK(h <= hi + 1e-12 * (1.0 + std::abs(hi)));
            }
            // inverse round trip
            double u = s.gen.value(x);
            CHECK(std::abs(s.gen.inverse(u) - x) <= 1e-10 * (1.0 + std::abs(x)));
        }
    }
}

TEST_CASE("affine images of a generator give the same mean") {
    Generator base = ln_generator(Interval(0.0, kInf));
    Generator affine = make_generator_from_text("2*ln(x) - 3", Interval(0.0, kInf));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.3, 5.0);
    for (int k = 0; k < 100; ++k) {
        double x = dist(rng), y = dist(rng);
        for (double alpha : {0.25, 0.5, 0.8}) {
            QuasiArithmeticMean m1(base, MeanWeights(alpha));
            QuasiArithmeticMean m2(affine, MeanWeights(alpha));
            double h1 = m1.mean(x, y);
            double h2 = m2.mean(x, y);
            CHECK(std::abs(h1 - h2) <= 1e-10 * (1.0 + std::abs(h1)));
        }
    }
    // an affine image with negative scale still induces the same mean
    Generator flipped = make_generator_from_text("-ln(x)", Interval(0.0, kInf));
    QuasiArithmeticMean m1(base, MeanWeights(0.3));
    QuasiArithmeticMean m3(flipped, MeanWeights(0.3));
    CHECK(std::abs(m1.mean(1.0, 4.0) - m3.mean(1.0, 4.0)) <= 1e-10 * 4.0);
}

TEST_CASE("mean rejects arguments outside the generator domain") {
    Generator g = ln_generator(Interval(0.0, kInf));
    QuasiArithmeticMean m(g, MeanWeights(0.5));
    CHECK_THROWS_AS(m.mean(-1.0, 2.0), DomainError);
    CHECK_THROWS_AS(m.mean(1.0, 0.0), DomainError);
}

TEST_CASE("power generator domain restrictions") {
    // power generators live on (0, inf) or subsets of it
    Interval neg(-2.0, -1.0);
    const Interval* pn = &neg;
    CHECK_THROWS_AS(builtin_generator("power:2", pn), SpecError);
    Interval ok(1.0, 3.0);
    const Interval* pok = &ok;
    Generator g = builtin_generator("power:3", pok);
    QuasiArithmeticMean m(g, MeanWeights(0.5));
    double h = m.mean(1.5, 2.5);
    CHECK(h == doctest::Approx(std::cbrt((std::pow(1.5, 3) + std::pow(2.5, 3)) / 2.0)));
}
