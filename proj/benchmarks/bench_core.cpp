// Microbenchmarks for the hot paths: expression evaluation, mean inversion
// (analytic vs numeric), grid verification, and classification.

#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>

#include "mveq/classify.hpp"
#include "mveq/expr.hpp"
#include "mveq/families.hpp"
#include "mveq/qam.hpp"
#include "mveq/residual.hpp"

using namespace mveq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void BM_ExprEval(benchmark::State& state) {
    Expr e = parse("sin(2*x) + x^3 - exp(-x)/(1 + x^2)");
    double x = 0.37;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(e, x));
        x += 1e-9;
    }
}
BENCHMARK(BM_ExprEval);

void BM_ExprDerivEval(benchmark::State& state) {
    Expr e = differentiate(parse("sin(2*x) + x^3 - exp(-x)/(1 + x^2)"));
    double x = 0.37;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(e, x));
        x += 1e-9;
    }
}
BENCHMARK(BM_ExprDerivEval);

void BM_MeanAnalyticInverse(benchmark::State& state) {
    QuasiArithmeticMean q(ln_generator(Interval(0.0, kInf)), MeanWeights(0.5));
    double x = 1.0, y = 4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(q.mean(x, y));
        y += 1e-9;
    }
}
BENCHMARK(BM_MeanAnalyticInverse);

void BM_MeanNumericInverse(benchmark::State& state) {
    // x + x^3 has no analytic inverse registered; the mean falls back to
    // bracketed Newton iteration.
    Generator gen = make_generator_from_text("x + x^3", Interval(-kInf, kInf));
    QuasiArithmeticMean q(gen, MeanWeights(0.5));
    double x = 0.5, y = 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(q.mean(x, y));
        y += 1e-9;
    }
}
BENCHMARK(BM_MeanNumericInverse);

void BM_VerifyGrid(benchmark::State& state) {
    FamilySpec spec;
    spec.caseKind = SolutionCase::Exponential;
    spec.mu = 1.5;
    spec.coeffsPhi = {0.3, 1.0, -0.4};
    spec.coeffsPsi = {0.0, 0.5, 0.9};
    SolutionPair pair = build_pair(spec, identity_generator(Interval(-kInf, kInf)));
    QuasiArithmeticMean q(pair.gen, MeanWeights(0.5));
    SamplePlan plan(Interval(-1.5, 1.5), static_cast<int>(state.range(0)), SampleMode::Uniform,
                    42);
    for (auto _ : state) {
        ResidualReport r = verify_grid(pair.phi, pair.psi, q, plan, 1e-9, 0);
        benchmark::DoNotOptimize(r.maxScaled);
    }
}
BENCHMARK(BM_VerifyGrid)->Arg(32)->Arg(101);

void BM_Classify(benchmark::State& state) {
    FamilySpec spec;
    spec.caseKind = SolutionCase::Trigonometric;
    spec.mu = 1.2;
    spec.coeffsPhi = {0.3, 0.8, -0.5};
    spec.coeffsPsi = {-0.2, 0.7, 1.0};
    SolutionPair pair = build_pair(spec, identity_generator(Interval(-kInf, kInf)));
    ClassifyOptions opts;
    opts.gridN = static_cast<int>(state.range(0));
    for (auto _ : state) {
        ClassificationReport r = classify_pair(pair.phi, pair.psi, Interval(-1.5, 1.5), opts);
        benchmark::DoNotOptimize(r.caseKind);
    }
}
BENCHMARK(BM_Classify)->Arg(256)->Arg(1024);

} // namespace

BENCHMARK_MAIN();
