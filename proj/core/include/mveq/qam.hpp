#pragma once

#include <functional>
#include <string>

#include "mveq/expr.hpp"
#include "mveq/func1d.hpp"
#include "mveq/interval.hpp"

namespace mveq {

/// A strictly monotone differentiable generator H : E -> J with an inverse.
/// Built-in generators carry analytic inverses; make_generator produces a
/// numeric inverse (bracketed bisection + Newton polish).
class Generator {
public:
    Generator() = default;
    Generator(Func1D H, Interval domain, Interval range, bool increasing,
              std::function<double(double)> analyticInverse = nullptr,
              std::string name = {});

    double operator()(double x) const { return H_.value(x); }
    double value(double x) const { return H_.value(x); }
    double deriv(double x) const { return H_.deriv(x); }

    /// x in E with |H(x) - u| <= 1e-12 * (1 + |u|).  Throws InversionError
    /// when u lies outside the range or bracketing fails.
    double inverse(double u) const;

    const Interval& domain() const { return domain_; }
    const Interval& range() const { return range_; }
    bool increasing() const { return increasing_; }
    const Func1D& func() const { return H_; }
    const std::string& name() const { return name_; }

private:
    double numericInverse(double u) const;

    Func1D H_;
    Interval domain_{};
    Interval range_{};
    bool increasing_ = true;
    std::function<double(double)> analyticInverse_;
    std::string name_;
};

/// Convex weights alpha + beta = 1 with alpha in (0,1).  beta is stored as
/// 1 - alpha so the sum is exact.
class MeanWeights {
public:
    explicit MeanWeights(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw SpecError("mean weight alpha must lie strictly in (0,1)");
    }
    double alpha() const { return alpha_; }
    double beta() const { return 1.0 - alpha_; }

private:
    double alpha_;
};

/// h(x,y) = H^{-1}(alpha*H(x) + beta*H(y)).  Internal: the mean always lies
/// between its arguments.
class QuasiArithmeticMean {
public:
    QuasiArithmeticMean(Generator gen, MeanWeights w) : gen_(std::move(gen)), w_(w) {}

    double mean(double x, double y) const;
    double operator()(double x, double y) const { return mean(x, y); }

    const Generator& generator() const { return gen_; }
    const MeanWeights& weights() const { return w_; }

private:
    Generator gen_;
    MeanWeights w_;
};

/// Builds a generator from an expression for H, verifying strict monotonicity
/// by a 1001-point sign sweep of H' over a finite window of E.  The range is
/// detected by following H toward each endpoint (values past 1e15 in absolute
/// value, or still growing at the closest approach, are recorded as infinite).
Generator make_generator(const Expr& H, Interval E);
Generator make_generator_from_text(std::string_view Htext, Interval E);

/// H(x) = x^p on E within (0, inf), p != 0, with analytic inverse u^{1/p}.
/// E defaults to the widest natural domain of each builtin.
Generator power_mean_generator(
    double p, Interval E = Interval(0.0, std::numeric_limits<double>::infinity()));

Generator identity_generator(Interval E = {});
Generator ln_generator(  ///< E within (0, inf)
    Interval E = Interval(0.0, std::numeric_limits<double>::infinity()));
Generator exp_generator(Interval E = {});

/// Resolves "identity", "ln", "exp", "power:<p>"; anything else is parsed as
/// an expression for H.  E defaults to the widest natural domain of the
/// builtin when unspecified.
Generator builtin_generator(std::string_view name, const Interval* E = nullptr);

} // namespace mveq
