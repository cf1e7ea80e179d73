#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mveq/families.hpp"
#include "mveq/func1d.hpp"
#include "mveq/qam.hpp"

namespace mveq {

/// Maximal open intervals where |g| exceeds tauG, in increasing order.
struct SupportDecomposition {
    std::vector<Interval> intervals;
    double tauG = 0.0;
    Interval window{};
};

/// Samples |g| on a margined uniform grid; tauG = tauRel * max|g| (all-zero g
/// gives an empty decomposition).  Maximal runs above the threshold become
/// intervals; runs shorter than 3 grid points are discarded.  Runs touching
/// the margined grid boundary extend to the window endpoint.
SupportDecomposition decompose_support(const Func1D& G, const Interval& window, int gridN,
                                       double tauRel);

/// Tests f = c*g on I: returns c = median(f/g) when
/// max|v - median| <= tauV * (1 + |median|), else nullopt.
std::optional<double> dependence_test(const Func1D& F, const Func1D& G, const Interval& I,
                                      int gridN, double tauV);

struct OdeLevel {
    double cEstimate = 0.0; ///< median of g''/g over interior grid points
    double spread = 0.0;    ///< interquartile range of g''/g
};

/// Estimates the constant c in g'' = c*g on an interval where g does not
/// vanish, with g = G'.  g'' is formed by a 5-point central stencil on the
/// sampled values of g (no third derivative of G is required).  Throws
/// SpecError when the interval is shorter than 7 grid points.
OdeLevel ode_level(const Func1D& G, const Interval& I, int gridN);

/// Least-squares fit of f = (A + K * S(x)) * g with S(x) = integral from x0
/// to x of dt/g(t)^2, x0 = midpoint of I, S by cumulative trapezoid.
/// Constant v = f/g (K ~ 0) reports rSquared = 1 by convention.
struct RepresentationFit {
    double A = 0.0;
    double K = 0.0;
    double x0 = 0.0;
    double rSquared = 0.0;
    Interval interval{};
};

RepresentationFit fit_representation(const Func1D& F, const Func1D& G, const Interval& I,
                                     int gridN);

struct ClassifyOptions {
    int gridN = 1024;
    double tauRel = 1e-8;  ///< support threshold (relative to max |g|)
    double tauV = 1e-6;    ///< dependence spread tolerance
    double tauC = 1e-4;    ///< dead band between quadratic and typed cases
    double fitTol = 1e-6;  ///< max relative deviation before Indeterminate
    double margin = 1e-3;
    bool refineMu = true;  ///< polish mu by minimizing the basis-fit residual
};

struct ClassificationReport {
    SolutionCase caseKind = SolutionCase::Indeterminate;
    std::optional<double> mu;
    std::array<double, 3> coeffsF{0.0, 0.0, 0.0};
    std::array<double, 3> coeffsG{0.0, 0.0, 0.0};
    std::vector<std::pair<Interval, double>> perIntervalDependence;
    double cEstimate = 0.0;
    double fitResidual = 0.0;
    SupportDecomposition support;
    std::vector<std::string> notes;
};

/// Decision pipeline over the reduced pair (F, G) on a finite window:
///   1. decompose the support of g = G';
///   2. empty support, or every interval passing dependence_test, means
///      Dependent (per-interval constants may differ on bounded windows);
///   3. otherwise g''/g on the largest non-dependent interval picks the case:
///      |c| <= tauC quadratic, c > tauC exponential (mu = sqrt(c)),
///      c < -tauC trigonometric (mu = sqrt(-c));
///   4. coefficients fitted by least squares in the detected basis over the
///      whole window (typed forms propagate across interior zeros of g);
///   5. fitResidual > fitTol demotes the verdict to Indeterminate.
ClassificationReport classify_pair(const Func1D& F, const Func1D& G, const Interval& window,
                                   const ClassifyOptions& opts = {});

/// Reduces (phi, psi) through the generator and classifies; coefficients are
/// reported in the H-basis ({1,H,H^2}, {1,e^{mu H},e^{-mu H}}, ...), which is
/// the same coefficient vector as the reduced classification.
ClassificationReport classify_original(const Func1D& phi, const Func1D& psi,
                                       const Generator& gen, const Interval& window,
                                       const ClassifyOptions& opts = {});

/// JSON object {schemaVersion, case, mu, coeffsF, coeffsG,
/// perIntervalDependence, cEstimate, fitResidual, support:{intervals,tauG},
/// notes}.
std::string classification_report_json(const ClassificationReport& r);

/// Reads `x,F,G` CSV (header required, strictly increasing x) into a pair of
/// spline-backed functions.
std::pair<Func1D, Func1D> load_samples_csv(std::istream& in);

} // namespace mveq
