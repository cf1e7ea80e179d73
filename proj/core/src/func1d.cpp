#include "mveq/func1d.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace mveq {

namespace {

// Cubic spline with not-a-knot end conditions: the third derivative is
// continuous across the first and last interior knots, so polynomial data up
// to cubic is reproduced exactly and second derivatives stay clean at the
// ends (a natural spline would force s'' = 0 there and poison g''/g
// estimates).
class CubicSpline {
public:
    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 4) throw SpecError("spline needs at least 4 sample points");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw SpecError("spline abscissae must be strictly increasing");
        solveSecondDerivatives();
    }

    double value(double x) const {
        std::size_t i = segment(x);
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - x) / h;
        double b = (x - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    double deriv(double x) const {
        std::size_t i = segment(x);
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - x) / h;
        double b = (x - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
    }

    double deriv2(double x) const {
        std::size_t i = segment(x);
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - x) / h;
        double b = (x - x_[i]) / h;
        return a * m_[i] + b * m_[i + 1];
    }

private:
    std::size_t segment(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) return 0;
        if (i >= x_.size()) return x_.size() - 2;
        return i - 1;
    }

    // Solve for knot second derivatives m_i.  Not-a-knot couples m_0, m_1,
    // m_2 (and the mirror at the right end); eliminate the boundary unknowns
    // into the first/last interior equations, solve the interior tridiagonal
    // system by the Thomas algorithm, then back out m_0 and m_{n-1}.
    void solveSecondDerivatives() {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i < n - 1; ++i) h[i] = x_[i + 1] - x_[i];

        const std::size_t m = n - 2; // interior unknowns m_1..m_{n-2}
        std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0), rhs(m, 0.0);
        for (std::size_t i = 1; i <= m; ++i) {
            lower[i - 1] = h[i - 1];
            diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
            upper[i - 1] = h[i];
            rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        }

        // not-a-knot left: m_0 = m_1 - h0*(m_2 - m_1)/h1
        {
            double r = h[0] / h[1];
            diag[0] += h[0] * (1.0 + r);
            upper[0] -= h[0] * r;
        }
        // not-a-knot right: m_{n-1} = m_{n-2} + h_{n-2}*(m_{n-2} - m_{n-3})/h_{n-3}
        {
            double r = h[n - 2] / h[n - 3];
            diag[m - 1] += h[n - 2] * (1.0 + r);
            lower[m - 1] -= h[n - 2] * r;
        }

        for (std::size_t i = 1; i < m; ++i) {
            double w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        std::vector<double> sol(m);
        sol[m - 1] = rhs[m - 1] / diag[m - 1];
        for (std::size_t i = m - 1; i-- > 0;)
            sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];

        m_.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) m_[i + 1] = sol[i];
        m_[0] = m_[1] - h[0] * (m_[2] - m_[1]) / h[1];
        m_[n - 1] = m_[n - 2] + h[n - 2] * (m_[n - 2] - m_[n - 3]) / h[n - 3];
    }

    std::vector<double> x_, y_;
    std::vector<double> m_;
};

} // namespace

void Func1D::checkDomain(double x) const {
    if (!value_) throw Error("evaluating a default-constructed function");
    if (!std::isfinite(x)) throw DomainError("evaluation point is not finite");
    if (!domain_.contains(x)) throw DomainError("evaluation point outside domain");
}

double Func1D::value(double x) const {
    checkDomain(x);
    return value_(x);
}

double Func1D::deriv(double x) const {
    checkDomain(x);
    return deriv_(x);
}

double Func1D::deriv2(double x) const {
    checkDomain(x);
    return deriv2_(x);
}

Func1D Func1D::fromExpression(std::string_view text, Interval domain) {
    Func1D f = fromExpr(parse(text), domain);
    f.sourceText_ = std::string(text);
    return f;
}

Func1D Func1D::fromExpr(const Expr& e, Interval domain) {
    Func1D f;
    Expr d1 = differentiate(e);
    Expr d2 = differentiate(d1);
    f.value_ = [e](double x) { return eval(e, x); };
    f.deriv_ = [d1](double x) { return eval(d1, x); };
    f.deriv2_ = [d2](double x) { return eval(d2, x); };
    f.domain_ = domain;
    f.derivKind_ = DerivativeKind::Symbolic;
    f.sourceText_ = serialize(e);
    return f;
}

Func1D Func1D::fromCallables(std::function<double(double)> value, Interval domain,
                             std::function<double(double)> deriv,
                             std::function<double(double)> deriv2) {
    if (!value) throw SpecError("value callable must be provided");
    Func1D f;
    f.domain_ = domain;
    f.value_ = value;
    if (deriv) {
        f.deriv_ = std::move(deriv);
        f.derivKind_ = DerivativeKind::Provided;
    } else {
        f.deriv_ = [value, domain](double x) {
            double step = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x));
            double lo = std::max(domain.lo, x - step);
            double hi = std::min(domain.hi, x + step);
            // shrink one-sidedly near endpoints to stay strictly inside
            if (!(lo < x)) lo = x;
            if (!(hi > x)) hi = x;
            if (lo == hi) throw DomainError("cannot difference at an isolated point");
            return (value(hi) - value(lo)) / (hi - lo);
        };
        f.derivKind_ = DerivativeKind::Numeric;
    }
    if (deriv2) {
        f.deriv2_ = std::move(deriv2);
    } else {
        auto d1 = f.deriv_;
        f.deriv2_ = [d1, domain](double x) {
            double step =
                std::sqrt(std::cbrt(std::numeric_limits<double>::epsilon())) * (1.0 + std::abs(x));
            double lo = std::max(domain.lo + 0.25 * step, x - step);
            double hi = std::min(domain.hi - 0.25 * step, x + step);
            if (!(lo < hi)) throw DomainError("cannot difference at an isolated point");
            return (d1(hi) - d1(lo)) / (hi - lo);
        };
    }
    return f;
}

Func1D Func1D::fromSamples(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw SpecError("sample arrays differ in length");
    auto spline = std::make_shared<CubicSpline>(xs, ys);
    Func1D f;
    f.domain_ = Interval(xs.front(), xs.back());
    f.value_ = [spline](double x) { return spline->value(x); };
    f.deriv_ = [spline](double x) { return spline->deriv(x); };
    f.deriv2_ = [spline](double x) { return spline->deriv2(x); };
    f.derivKind_ = DerivativeKind::Numeric;
    return f;
}

} // namespace mveq
