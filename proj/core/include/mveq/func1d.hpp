#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mveq/expr.hpp"
#include "mveq/interval.hpp"

namespace mveq {

/// How a Func1D knows its derivative.
enum class DerivativeKind {
    Symbolic, ///< exact derivative of a parsed expression
    Provided, ///< caller-supplied callable
    Numeric,  ///< spline/differencing fallback
};

/// A scalar function on an open interval, with first and second derivatives.
///
/// Three construction routes:
///  - fromExpression: parses the text, differentiates symbolically;
///  - fromCallables: wraps caller-supplied value/derivative callables
///    (missing derivatives fall back to central differences);
///  - fromSamples: interpolates (x, f(x)) pairs with a not-a-knot cubic
///    spline and differentiates the spline.
///
/// Evaluation outside `domain()` throws DomainError.
class Func1D {
public:
    Func1D() = default;

    static Func1D fromExpression(std::string_view text, Interval domain);
    static Func1D fromExpr(const Expr& e, Interval domain);
    static Func1D fromCallables(std::function<double(double)> value, Interval domain,
                                std::function<double(double)> deriv = nullptr,
                                std::function<double(double)> deriv2 = nullptr);
    /// Sample abscissae must be strictly increasing and at least 4 points.
    /// The spline's domain is the open interval (xs.front(), xs.back()).
    static Func1D fromSamples(const std::vector<double>& xs, const std::vector<double>& ys);

    double operator()(double x) const { return value(x); }
    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;

    const Interval& domain() const { return domain_; }
    DerivativeKind derivativeKind() const { return derivKind_; }
    bool valid() const { return static_cast<bool>(value_); }

    /// Source text when built from an expression, empty otherwise.
    const std::string& sourceText() const { return sourceText_; }

private:
    void checkDomain(double x) const;

    std::function<double(double)> value_;
    std::function<double(double)> deriv_;
    std::function<double(double)> deriv2_;
    Interval domain_{};
    DerivativeKind derivKind_ = DerivativeKind::Numeric;
    std::string sourceText_;
};

} // namespace mveq
