#include "mveq/residual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace mveq {

namespace {

struct ResidualParts {
    double raw;
    double scaled;
};

ResidualParts residualParts(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q,
                            double x, double y) {
    if (x == y) return {0.0, 0.0};
    double h = q.mean(x, y);
    double dphi = phi.value(y) - phi.value(x);
    double dpsi = psi.value(y) - psi.value(x);
    double phiD = phi.deriv(h);
    double psiD = psi.deriv(h);
    double raw = dphi * psiD - dpsi * phiD;
    double denom = 1.0 + std::abs(dphi) * std::abs(psiD) + std::abs(dpsi) * std::abs(phiD);
    return {raw, std::abs(raw) / denom};
}

} // namespace

double residual(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q, double x,
                double y) {
    return residualParts(phi, psi, q, x, y).raw;
}

double scaled_residual(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q,
                       double x, double y) {
    return residualParts(phi, psi, q, x, y).scaled;
}

ResidualReport verify_grid(const Func1D& phi, const Func1D& psi, const QuasiArithmeticMean& q,
                           const SamplePlan& plan, double tol, long randomPairs) {
    ResidualReport rep;
    rep.tolerance = tol;

    auto consider = [&](double x, double y) {
        double s;
        try {
            s = residualParts(phi, psi, q, x, y).scaled;
        } catch (const Error&) {
            ++rep.domainFailures;
            s = std::numeric_limits<double>::infinity();
        }
        ++rep.count;
        if (s > rep.maxScaled || rep.count == 1) {
            rep.maxScaled = s;
            rep.argmaxPair = {x, y};
        }
    };

    const std::vector<double> pts = sample(plan);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) consider(pts[i], pts[j]);

    if (randomPairs < 0) randomPairs = plan.count;
    const double pad = plan.margin * plan.window.width();
    std::mt19937_64 rng(plan.seed ^ 0x9e3779b97f4a7c15ULL); // distinct stream from sample()
    std::uniform_real_distribution<double> dist(plan.window.lo + pad, plan.window.hi - pad);
    for (long k = 0; k < randomPairs; ++k) {
        double x = dist(rng);
        double y = dist(rng);
        if (x == y) continue;
        if (x > y) std::swap(x, y);
        consider(x, y);
    }

    rep.pass = rep.domainFailures == 0 && rep.maxScaled <= tol;
    return rep;
}

void write_residual_grid_csv(std::ostream& out, const Func1D& phi, const Func1D& psi,
                             const QuasiArithmeticMean& q, const SamplePlan& plan) {
    out << "x,y,h,residual,scaled_residual\n";
    const std::vector<double> pts = sample(plan);
    char buf[512];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double x = pts[i], y = pts[j];
            double h = q.mean(x, y);
            ResidualParts r = residualParts(phi, psi, q, x, y);
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", x, y, h, r.raw,
                          r.scaled);
            out << buf;
        }
    }
}

LocateResult locate_mean_points(const Func1D& phi, const Func1D& psi, double a, double b,
                                int grid) {
    if (!(a < b)) throw SpecError("locate needs a < b");
    if (grid < 2) throw SpecError("locate grid must have at least 2 subintervals");
    const double dphi = phi.value(b) - phi.value(a);
    const double dpsi = psi.value(b) - psi.value(a);
    auto r = [&](double c) { return dphi * psi.deriv(c) - dpsi * phi.deriv(c); };

    LocateResult out;
    const double tol = 1e-10 * (b - a);
    std::vector<double> vals(static_cast<std::size_t>(grid) + 1);
    bool allZero = true;
    for (int i = 0; i <= grid; ++i) {
        double c = a + (b - a) * i / grid;
        vals[i] = r(c);
        if (vals[i] != 0.0) allZero = false;
    }
    if (allZero) {
        out.identicallyZero = true;
        return out;
    }

    auto push = [&](double c) {
        if (!(c > a && c < b)) return;
        if (!out.points.empty() && std::abs(c - out.points.back()) <= 10.0 * tol) return;
        out.points.push_back(c);
    };

    for (int i = 0; i < grid; ++i) {
        double lo = a + (b - a) * i / grid;
        double hi = a + (b - a) * (i + 1) / grid;
        double flo = vals[i], fhi = vals[i + 1];
        if (flo == 0.0) {
            push(lo);
            continue;
        }
        if (fhi == 0.0 || flo * fhi > 0.0) continue;
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            double fmid = r(mid);
            if (fmid == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((flo > 0.0) == (fmid > 0.0)) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
            }
        }
        push(0.5 * (lo + hi));
    }
    return out;
}

ReducedPair reduce(const Func1D& phi, const Func1D& psi, const Generator& gen) {
    ReducedPair out;
    out.J = gen.range();
    const Func1D H = gen.func();
    auto makeReduced = [&](const Func1D& f) {
        return Func1D::fromCallables(
            [f, gen](double u) { return f.value(gen.inverse(u)); }, gen.range(),
            [f, gen](double u) {
                double x = gen.inverse(u);
                return f.deriv(x) / gen.deriv(x);
            },
            [f, gen, H](double u) {
                // d/du [f'(x)/H'(x)] with dx/du = 1/H'(x)
                double x = gen.inverse(u);
                double h1 = gen.deriv(x);
                return (f.deriv2(x) * h1 - f.deriv(x) * H.deriv2(x)) / (h1 * h1 * h1);
            });
    };
    out.F = makeReduced(phi);
    out.G = makeReduced(psi);
    return out;
}

double reduced_residual(const ReducedPair& rp, double alpha, double a, double b) {
    if (a == b) return 0.0;
    double beta = 1.0 - alpha;
    double m = alpha * a + beta * b;
    return (rp.F.value(b) - rp.F.value(a)) * rp.G.deriv(m) -
           (rp.G.value(b) - rp.G.value(a)) * rp.F.deriv(m);
}

namespace {

struct IdentityParts {
    double raw;
    double scaled;
};

IdentityParts identityParts(const Func1D& F, const Func1D& G, double alpha, double a, double b) {
    double beta = 1.0 - alpha;
    double m = alpha * a + beta * b;
    auto v = [&](double t) {
        double g = G.deriv(t);
        if (g == 0.0) throw DomainError("dependence identity needs g != 0");
        return F.deriv(t) / g;
    };
    double vm = v(m);
    double t1 = beta * G.deriv(a) * (vm - v(a));
    double t2 = alpha * G.deriv(b) * (v(b) - vm);
    double raw = t1 - t2;
    return {raw, std::abs(raw) / (1.0 + std::abs(t1) + std::abs(t2))};
}

} // namespace

double dependence_identity(const Func1D& F, const Func1D& G, double alpha, double a, double b) {
    return identityParts(F, G, alpha, a, b).raw;
}

double scaled_dependence_identity(const Func1D& F, const Func1D& G, double alpha, double a,
                                  double b) {
    return identityParts(F, G, alpha, a, b).scaled;
}

} // namespace mveq
