#pragma once

#include <array>
#include <optional>
#include <string>

#include "mveq/func1d.hpp"
#include "mveq/qam.hpp"

namespace mveq {

enum class SolutionCase { Dependent, Quadratic, Exponential, Trigonometric, Indeterminate };

std::string to_string(SolutionCase c);
SolutionCase solution_case_from_string(std::string_view s);

/// Coefficients for a pair in one of the closed-form bases:
///   Quadratic      {1, u, u^2}
///   Exponential    {1, e^{mu*u}, e^{-mu*u}}        (mu > 0)
///   Trigonometric  {1, sin(mu*u), cos(mu*u)}       (mu > 0)
/// with u = H(x).  mu is normalized positive: negating mu swaps the two
/// exponential coefficients, and negates the sine coefficient.
///
/// For the Dependent case, `dependence` holds (c1,c2,c3), not all zero, with
/// c1*phi + c2*psi + c3 = 0.  The free function is taken from coeffsPsi in
/// the basis {1, u, u^3} when c1 != 0 (psi free, phi determined), otherwise
/// from coeffsPhi (phi free, psi determined); c1 = c2 = 0 is rejected.
struct FamilySpec {
    SolutionCase caseKind = SolutionCase::Quadratic;
    std::optional<double> mu;
    std::array<double, 3> coeffsPhi{0.0, 0.0, 0.0};
    std::array<double, 3> coeffsPsi{0.0, 0.0, 0.0};
    std::optional<std::array<double, 3>> dependence;
};

std::string family_spec_to_json(const FamilySpec& spec);
FamilySpec family_spec_from_json(const std::string& text);

/// An exact solution pair (phi, psi) = (P o H, Q o H) with chain-rule
/// derivatives, sharing the generator's domain.
struct SolutionPair {
    Func1D phi;
    Func1D psi;
    Generator gen;
    FamilySpec spec;
};

SolutionPair build_pair(const FamilySpec& spec, const Generator& gen);

/// The bounded-interval pair with disjoint derivative supports on (0,1):
///   F = c1 on (0,4/5],  (x-4/5)^2 + c1 on (4/5,1)
///   G = (x-2/5)^2 + c2 on (0,2/5),  c2 on [2/5,1)
/// Both are C^1 (one-sided derivatives vanish at the junctions), and the
/// pair satisfies the defining equation exactly at alpha = 1/2 even though
/// it is not globally dependent: f lives on (4/5,1), g on (0,2/5).
struct CounterexamplePair {
    Func1D F;
    Func1D G;
    double c1 = 0.0;
    double c2 = 0.0;
};

CounterexamplePair counterexample_pair(double c1 = 0.0, double c2 = 0.0);

} // namespace mveq
