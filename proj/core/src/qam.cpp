#include "mveq/qam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace mveq {

namespace {

constexpr double kInvTolRel = 1e-12;
constexpr double kRangeHuge = 1e15; // |H| beyond this counts as an infinite range endpoint
constexpr double kSweepSpan = 20.0;
constexpr double kSweepMargin = 1e-3;
constexpr double kInf = std::numeric_limits<double>::infinity();

Interval marginned(const Interval& iv, double marginFraction) {
    double pad = marginFraction * iv.width();
    return Interval(iv.lo + pad, iv.hi - pad);
}

// Follow H along a sequence of points toward an endpoint of E and decide the
// corresponding range endpoint.  Stabilized values give a finite limit;
// |H| > kRangeHuge, or failure to stabilize (slow divergence like ln at 0),
// gives an infinite one with the sign of the trend.
double limitToward(const Func1D& H, double start, double endpoint) {
    const bool towardInf = !std::isfinite(endpoint);
    double prev = H.value(start);
    double prevDelta = kInf;
    double x = start;
    double offset = towardInf ? std::max(1.0, std::abs(start)) : (endpoint - start);
    for (int k = 0; k < 900; ++k) {
        if (towardInf) {
            offset *= 2.0;
            if (offset > 1e300) break;
            x = start + (endpoint > 0 ? offset : -offset);
        } else {
            offset *= 0.5;
            x = endpoint - offset;
            if (x == endpoint) break;
        }
        double v;
        try {
            v = H.value(x);
        } catch (const Error&) {
            break; // evaluation blew up on approach: decide from the trend so far
        }
        if (std::abs(v) > kRangeHuge) return v > 0 ? kInf : -kInf;
        double delta = v - prev;
        if (std::abs(delta) <= 1e-13 * (1.0 + std::abs(v))) return v;
        prev = v;
        prevDelta = delta;
    }
    if (std::abs(prev) > kRangeHuge || !std::isfinite(prevDelta))
        return prev > 0 ? kInf : -kInf;
    // Never stabilized: monotone drift without a Cauchy tail means divergence.
    return prevDelta > 0 ? kInf : -kInf;
}

} // namespace

Generator::Generator(Func1D H, Interval domain, Interval range, bool increasing,
                     std::function<double(double)> analyticInverse, std::string name)
    : H_(std::move(H)),
      domain_(domain),
      range_(range),
      increasing_(increasing),
      analyticInverse_(std::move(analyticInverse)),
      name_(std::move(name)) {}

double Generator::inverse(double u) const {
    if (!std::isfinite(u)) throw InversionError("inverse target is not finite");
    if (!(range_.lo < u && u < range_.hi))
        throw InversionError("value outside generator range");
    if (analyticInverse_) return analyticInverse_(u);
    return numericInverse(u);
}

double Generator::numericInverse(double u) const {
    const Interval W = marginned(finite_window(domain_, kSweepSpan), kSweepMargin);
    const double sgn = increasing_ ? 1.0 : -1.0;
    auto f = [&](double x) { return sgn * (H_.value(x) - u); }; // increasing in x
    const double tol = kInvTolRel * (1.0 + std::abs(u));

    double lo = 0.5 * (W.lo + W.hi);
    double hi = lo;
    double flo = f(lo);
    double fhi = flo;
    double step = 0.25 * W.width();
    // Expand left until f(lo) <= 0: double steps toward an infinite domain
    // endpoint, halve the remaining gap toward a finite one.
    for (int k = 0; flo > 0.0; ++k) {
        if (k >= 200) throw InversionError("failed to bracket inverse target (left)");
        hi = lo;
        fhi = flo;
        if (std::isfinite(domain_.lo)) {
            lo = domain_.lo + 0.5 * (lo - domain_.lo);
        } else {
            lo -= step;
            step *= 2.0;
        }
        flo = f(lo);
    }
    step = 0.25 * W.width();
    for (int k = 0; fhi < 0.0; ++k) {
        if (k >= 200) throw InversionError("failed to bracket inverse target (right)");
        lo = std::max(lo, hi); // keep the tightest known left edge
        flo = std::min(flo, 0.0);
        if (std::isfinite(domain_.hi)) {
            hi = domain_.hi - 0.5 * (domain_.hi - hi);
        } else {
            hi += step;
            step *= 2.0;
        }
        fhi = f(hi);
    }

    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        x = 0.5 * (lo + hi);
        double fx = f(x);
        if (std::abs(fx) <= tol) break;
        (fx > 0.0 ? hi : lo) = x;
        if (hi - lo <= std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) break;
    }
    for (int i = 0; i < 20; ++i) {
        double r = H_.value(x) - u;
        if (std::abs(r) <= tol) break;
        double d = H_.deriv(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        double xn = x - r / d;
        if (!(xn > lo && xn < hi)) break; // Newton left the bracket: keep bisection result
        x = xn;
    }
    if (std::abs(H_.value(x) - u) > tol)
        throw InversionError("inverse iteration did not reach tolerance");
    return x;
}

double QuasiArithmeticMean::mean(double x, double y) const {
    const Interval& E = gen_.domain();
    if (!E.contains(x) || !E.contains(y)) throw DomainError("mean argument outside domain");
    double u = w_.alpha() * gen_.value(x) + w_.beta() * gen_.value(y);
    double m = gen_.inverse(u);
    // the exact mean is internal; clamp away inversion round-off
    return std::clamp(m, std::min(x, y), std::max(x, y));
}

Generator make_generator(const Expr& H, Interval E) {
    Func1D f = Func1D::fromExpr(H, E);
    const Interval W = marginned(finite_window(E, kSweepSpan), kSweepMargin);

    // Strict monotonicity allows isolated zeros of H' (x^3 is fine); only an
    // actual sign change is a violation.
    const int n = 1001;
    long pos = 0, neg = 0;
    for (int i = 0; i < n; ++i) {
        double x = W.lo + (W.hi - W.lo) * i / (n - 1);
        double d = f.deriv(x);
        if (d > 0.0)
            ++pos;
        else if (d < 0.0)
            ++neg;
    }
    if (pos > 0 && neg > 0)
        throw MonotonicityError("generator derivative changes sign on the domain");
    if (pos == 0 && neg == 0)
        throw MonotonicityError("generator derivative vanishes identically");
    const bool increasing = pos > 0;

    double atLo = std::isfinite(E.lo) ? limitToward(f, W.lo, E.lo) : limitToward(f, W.lo, -kInf);
    double atHi = std::isfinite(E.hi) ? limitToward(f, W.hi, E.hi) : limitToward(f, W.hi, kInf);
    Interval J = increasing ? Interval(atLo, atHi) : Interval(atHi, atLo);
    return Generator(std::move(f), E, J, increasing);
}

Generator make_generator_from_text(std::string_view Htext, Interval E) {
    return make_generator(parse(Htext), E);
}

Generator identity_generator(Interval E) {
    return Generator(Func1D::fromExpression("x", E), E, E, true,
                     [](double u) { return u; }, "identity");
}

Generator ln_generator(Interval E) {
    if (!(E.lo >= 0.0)) throw SpecError("ln generator needs a domain within (0, inf)");
    double jlo = E.lo > 0.0 ? std::log(E.lo) : -kInf;
    double jhi = std::isfinite(E.hi) ? std::log(E.hi) : kInf;
    return Generator(Func1D::fromExpression("ln(x)", E), E, Interval(jlo, jhi), true,
                     [](double u) { return std::exp(u); }, "ln");
}

Generator exp_generator(Interval E) {
    double jlo = std::isfinite(E.lo) ? std::exp(E.lo) : 0.0;
    double jhi = std::isfinite(E.hi) ? std::exp(E.hi) : kInf;
    return Generator(Func1D::fromExpression("exp(x)", E), E, Interval(jlo, jhi), true,
                     [](double u) { return std::log(u); }, "exp");
}

Generator power_mean_generator(double p, Interval E) {
    if (p == 0.0) throw SpecError("power mean exponent must be nonzero");
    if (!(E.lo >= 0.0)) throw SpecError("power generator needs a domain within (0, inf)");
    auto powOrLimit = [p](double x) {
        if (x == 0.0) return p > 0 ? 0.0 : kInf;
        if (!std::isfinite(x)) return p > 0 ? kInf : 0.0;
        return std::pow(x, p);
    };
    double vlo = powOrLimit(E.lo);
    double vhi = powOrLimit(E.hi);
    Interval J = p > 0 ? Interval(vlo, vhi) : Interval(vhi, vlo);
    Func1D H = Func1D::fromExpression("x^" + serialize(Expr::literal(p)), E);
    double invp = 1.0 / p;
    return Generator(std::move(H), E, J, p > 0,
                     [invp](double u) { return std::pow(u, invp); },
                     "power:" + serialize(Expr::literal(p)));
}

Generator builtin_generator(std::string_view name, const Interval* E) {
    const Interval positive(0.0, kInf);
    const Interval realLine(-kInf, kInf);
    auto pick = [&](const Interval& natural) {
        if (!E) return natural;
        if (E->lo < natural.lo || E->hi > natural.hi)
            throw SpecError("generator domain must lie within its natural domain");
        return *E;
    };
    if (name == "identity") return identity_generator(pick(realLine));
    if (name == "ln") return ln_generator(pick(positive));
    if (name == "exp") return exp_generator(pick(realLine));
    if (name.rfind("power:", 0) == 0) {
        std::string ptext(name.substr(6));
        char* end = nullptr;
        double p = std::strtod(ptext.c_str(), &end);
        if (end == ptext.c_str() || *end != '\0' || !std::isfinite(p))
            throw SpecError("malformed power generator exponent: " + ptext);
        return power_mean_generator(p, pick(positive));
    }
    return make_generator_from_text(name, E ? *E : realLine);
}

} // namespace mveq
