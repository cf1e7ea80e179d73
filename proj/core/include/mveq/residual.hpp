#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "mveq/func1d.hpp"
#include "mveq/qam.hpp"
#include "mveq/sampling.hpp"

namespace mveq {

/// R(x,y) = [phi(y) - phi(x)] * psi'(h) - [psi(y) - psi(x)] * phi'(h),
/// h = mean(x,y).  Zero exactly on solution pairs; returns 0 when x == y.
double residual(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q,
                double x, double y);

/// |R| / (1 + |phi(y)-phi(x)|*|psi'(h)| + |psi(y)-psi(x)|*|phi'(h)|).
/// Scale-invariant enough for a fixed tolerance across coefficient sizes.
double scaled_residual(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q,
                       double x, double y);

struct ResidualReport {
    double maxScaled = 0.0;
    std::pair<double, double> argmaxPair{0.0, 0.0};
    long count = 0;           ///< pairs evaluated
    double tolerance = 0.0;
    bool pass = false;
    long domainFailures = 0;  ///< pairs that threw; counted as failures
};

/// Sweeps scaled_residual over all ordered pairs x < y of the plan's points,
/// plus `randomPairs` extra seeded random pairs (negative means "use
/// plan.count").  A pair that throws a domain error fails the report and is
/// recorded as the argmax witness.
ResidualReport verify_grid(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q,
                           const SamplePlan& plan, double tol, long randomPairs = -1);

/// Writes `x,y,h,residual,scaled_residual` rows (17 significant digits) for
/// all ordered pairs x < y of the plan's points.  Deterministic per plan.
void write_residual_grid_csv(std::ostream& out, const Func1D& phi, const Func1D& psi,
                             const QuasiArithmeticMean& q, const SamplePlan& plan);

struct LocateResult {
    std::vector<double> points;
    bool identicallyZero = false; ///< r(c) = 0 at every scan point (dependent pair)
};

/// Roots c in (a,b) of r(c) = [phi(b)-phi(a)] psi'(c) - [psi(b)-psi(a)] phi'(c),
/// by sign-change scan over `grid` subintervals then bisection to
/// 1e-10*(b-a).  Tangential roots that never change sign are missed by
/// construction.
LocateResult locate_mean_points(const Func1D& phi, const Func1D& psi, double a, double b,
                                int grid = 2048);

/// F = phi o H^{-1}, G = psi o H^{-1} on J = H(E), with derivatives
/// F'(u) = phi'(H^{-1}(u)) / H'(H^{-1}(u)).
struct ReducedPair {
    Func1D F;
    Func1D G;
    Interval J;
};

ReducedPair reduce(const Func1D& phi, const Func1D& psi, const Generator& gen);

/// The substitution identity connecting the two problems:
///   R_original(x, y) = R_reduced(H(x), H(y)) * H'(h(x,y)).
/// Exposed for property checks; both sides evaluated independently.
double reduced_residual(const ReducedPair& rp, double alpha, double a, double b);

/// beta*g(a)*(v(m) - v(a)) - alpha*g(b)*(v(b) - v(m)), m = alpha*a + beta*b,
/// v = f/g, f = F', g = G'.  Vanishes on solutions wherever g != 0.
double dependence_identity(const Func1D& F, const Func1D& G, double alpha, double a, double b);

/// Scaled variant of dependence_identity: |value| / (1 + |term1| + |term2|).
double scaled_dependence_identity(const Func1D& F, const Func1D& G, double alpha, double a,
                                  double b);

} // namespace mveq
