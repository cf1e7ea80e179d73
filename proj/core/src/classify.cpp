#include "mveq/classify.hpp"

#include "mveq/residual.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace mveq {

namespace {

constexpr double kGridMargin = 1e-3;

std::vector<double> uniformGrid(const Interval& I, int n, double marginFraction = kGridMargin) {
    if (n < 2) throw SpecError("grid needs at least 2 points");
    double pad = marginFraction * I.width();
    double lo = I.lo + pad, hi = I.hi - pad;
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

double median(std::vector<double> v) {
    if (v.empty()) throw SpecError("median of empty set");
    std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + m - 1, v.end());
    return 0.5 * (v[m - 1] + hi);
}

double quantile(std::vector<double> v, double q) {
    std::size_t k = static_cast<std::size_t>(q * (v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

// Least squares min ||A c - y|| for an n x 3 design matrix, by Householder QR
// with column scaling (the exponential basis spans many magnitudes).
std::array<double, 3> solveLsq3(std::vector<std::array<double, 3>> A, std::vector<double> y) {
    const std::size_t n = A.size();
    if (n < 3) throw SpecError("least squares needs at least 3 rows");
    std::array<double, 3> scale{};
    for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += A[i][j] * A[i][j];
        scale[j] = s > 0.0 ? std::sqrt(s) : 1.0;
        for (std::size_t i = 0; i < n; ++i) A[i][j] /= scale[j];
    }
    for (int j = 0; j < 3; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += A[i][j] * A[i][j];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw SpecError("rank-deficient least squares system");
        double alpha = A[j][j] > 0 ? -norm : norm;
        // Householder vector v = a - alpha*e_j, applied implicitly
        std::vector<double> v(n - j);
        v[0] = A[j][j] - alpha;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = A[i][j];
        double vtv = 0.0;
        for (double t : v) vtv += t * t;
        if (vtv == 0.0) continue;
        for (int k = j; k < 3; ++k) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i - j] * A[i][k];
            double f = 2.0 * dot / vtv;
            for (std::size_t i = j; i < n; ++i) A[i][k] -= f * v[i - j];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * y[i];
        double f = 2.0 * dot / vtv;
        for (std::size_t i = j; i < n; ++i) y[i] -= f * v[i - j];
    }
    std::array<double, 3> c{};
    for (int j = 2; j >= 0; --j) {
        double s = y[j];
        for (int k = j + 1; k < 3; ++k) s -= A[j][k] * c[k];
        c[j] = s / A[j][j];
    }
    for (int j = 0; j < 3; ++j) c[j] /= scale[j];
    return c;
}

std::array<double, 3> basisRow(SolutionCase kind, double mu, double u) {
    switch (kind) {
        case SolutionCase::Quadratic: return {1.0, u, u * u};
        case SolutionCase::Exponential: return {1.0, std::exp(mu * u), std::exp(-mu * u)};
        case SolutionCase::Trigonometric: return {1.0, std::sin(mu * u), std::cos(mu * u)};
        default: throw SpecError("no basis for this case");
    }
}

struct BasisFit {
    std::array<double, 3> coeffsF{};
    std::array<double, 3> coeffsG{};
    double maxRelDev = 0.0; ///< max over grid and both functions
    double sse = 0.0;       ///< sum of squared relative deviations
};

// Fits both functions in the shared basis; rows are weighted by 1/(1+|y|)
// so the objective matches the relative fitResidual metric.
BasisFit fitBasis(const Func1D& F, const Func1D& G, const std::vector<double>& xs,
                  SolutionCase kind, double mu) {
    const std::size_t n = xs.size();
    std::vector<std::array<double, 3>> rowsF(n), rowsG(n);
    std::vector<double> yF(n), yG(n);
    std::vector<double> fv(n), gv(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = basisRow(kind, mu, xs[i]);
        fv[i] = F.value(xs[i]);
        gv[i] = G.value(xs[i]);
        double wF = 1.0 / (1.0 + std::abs(fv[i]));
        double wG = 1.0 / (1.0 + std::abs(gv[i]));
        for (int j = 0; j < 3; ++j) {
            rowsF[i][j] = row[j] * wF;
            rowsG[i][j] = row[j] * wG;
        }
        yF[i] = fv[i] * wF;
        yG[i] = gv[i] * wG;
    }
    BasisFit fit;
    fit.coeffsF = solveLsq3(rowsF, yF);
    fit.coeffsG = solveLsq3(rowsG, yG);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = basisRow(kind, mu, xs[i]);
        double fHat = row[0] * fit.coeffsF[0] + row[1] * fit.coeffsF[1] + row[2] * fit.coeffsF[2];
        double gHat = row[0] * fit.coeffsG[0] + row[1] * fit.coeffsG[1] + row[2] * fit.coeffsG[2];
        double dF = std::abs(fHat - fv[i]) / (1.0 + std::abs(fv[i]));
        double dG = std::abs(gHat - gv[i]) / (1.0 + std::abs(gv[i]));
        fit.maxRelDev = std::max({fit.maxRelDev, dF, dG});
        fit.sse += dF * dF + dG * dG;
    }
    return fit;
}

// Profile objective in mu, minimized by golden section: the basis-fit SSE
// with coefficients re-fitted at each trial mu.
double refineMu(const Func1D& F, const Func1D& G, const std::vector<double>& xs,
                SolutionCase kind, double mu0) {
    const double inv_phi = 0.6180339887498949;
    double a = 0.9 * mu0, b = 1.1 * mu0;
    auto sse = [&](double mu) { return fitBasis(F, G, xs, kind, mu).sse; };
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = sse(c), fd = sse(d);
    for (int it = 0; it < 60 && (b - a) > 1e-13 * mu0; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse(d);
        }
    }
    return 0.5 * (a + b);
}

std::string intervalText(const Interval& iv) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << iv.lo << ", " << iv.hi << ")";
    return os.str();
}

} // namespace

SupportDecomposition decompose_support(const Func1D& G, const Interval& window, int gridN,
                                       double tauRel) {
    if (gridN < 64) throw SpecError("support decomposition needs gridN >= 64");
    SupportDecomposition out;
    out.window = window;

    std::vector<double> xs = uniformGrid(window, gridN);
    std::vector<double> g(xs.size());
    double maxAbs = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        g[i] = G.deriv(xs[i]);
        maxAbs = std::max(maxAbs, std::abs(g[i]));
    }
    out.tauG = tauRel * maxAbs;
    if (out.tauG == 0.0) return out; // g vanishes everywhere sampled

    // Maximal runs with |g| > tauG.  A sign flip between adjacent kept points
    // marks a crossing zero whose sub-threshold zone is too narrow for the
    // grid to see, so it also ends the run.  Runs under 3 points are noise.
    auto boundaryLeft = [&](std::size_t i0) {
        return i0 == 0 ? window.lo : 0.5 * (xs[i0 - 1] + xs[i0]);
    };
    auto boundaryRight = [&](std::size_t i1) {
        return i1 + 1 == xs.size() ? window.hi : 0.5 * (xs[i1] + xs[i1 + 1]);
    };
    bool inRun = false;
    std::size_t runStart = 0;
    double runLeftEdge = 0.0; // valid while inRun
    auto close = [&](std::size_t lastIdx, double rightEdge) {
        if (inRun && lastIdx - runStart + 1 >= 3)
            out.intervals.emplace_back(runLeftEdge, rightEdge);
        inRun = false;
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(std::abs(g[i]) > out.tauG)) {
            if (i > 0) close(i - 1, boundaryRight(i - 1));
            continue;
        }
        if (inRun && std::signbit(g[i]) != std::signbit(g[i - 1])) {
            double cross = 0.5 * (xs[i - 1] + xs[i]);
            close(i - 1, cross);
            inRun = true;
            runStart = i;
            runLeftEdge = cross;
        } else if (!inRun) {
            inRun = true;
            runStart = i;
            runLeftEdge = boundaryLeft(i);
        }
    }
    close(xs.size() - 1, boundaryRight(xs.size() - 1));
    return out;
}

std::optional<double> dependence_test(const Func1D& F, const Func1D& G, const Interval& I,
                                      int gridN, double tauV) {
    std::vector<double> xs = uniformGrid(I, std::max(gridN, 8));
    std::vector<double> vs;
    vs.reserve(xs.size());
    for (double x : xs) {
        double g = G.deriv(x);
        double f = F.deriv(x);
        if (g == 0.0) {
            if (f == 0.0) continue; // 0/0 carries no information
            return std::nullopt;
        }
        vs.push_back(f / g);
    }
    if (vs.empty()) return 0.0; // f and g both vanish at all grid points
    double med = median(vs);
    for (double v : vs)
        if (std::abs(v - med) > tauV * (1.0 + std::abs(med))) return std::nullopt;
    return med;
}

OdeLevel ode_level(const Func1D& G, const Interval& I, int gridN) {
    if (gridN < 7) throw SpecError("ode level estimation needs at least 7 grid points");
    std::vector<double> xs = uniformGrid(I, gridN);
    const double step = xs[1] - xs[0];
    std::vector<double> g(xs.size());
    double maxAbs = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        g[i] = G.deriv(xs[i]);
        maxAbs = std::max(maxAbs, std::abs(g[i]));
    }
    std::vector<double> ratios;
    ratios.reserve(xs.size());
    for (std::size_t i = 2; i + 2 < xs.size(); ++i) {
        if (std::abs(g[i]) <= 1e-10 * maxAbs) continue; // near a zero of g the ratio is noise
        double second = (-g[i - 2] + 16.0 * g[i - 1] - 30.0 * g[i] + 16.0 * g[i + 1] - g[i + 2]) /
                        (12.0 * step * step);
        ratios.push_back(second / g[i]);
    }
    if (ratios.size() < 3) throw SpecError("interval too short for ode level estimation");
    OdeLevel out;
    out.cEstimate = median(ratios);
    out.spread = quantile(ratios, 0.75) - quantile(ratios, 0.25);
    return out;
}

RepresentationFit fit_representation(const Func1D& F, const Func1D& G, const Interval& I,
                                     int gridN) {
    if (gridN < 7) throw SpecError("representation fit needs at least 7 grid points");
    int n = gridN | 1; // odd, so the middle grid point is the interval midpoint
    std::vector<double> xs = uniformGrid(I, n);
    const std::size_t mid = static_cast<std::size_t>(n / 2);

    std::vector<double> w(xs.size()), v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double g = G.deriv(xs[i]);
        if (g == 0.0) throw SpecError("representation fit needs g != 0 on the interval");
        w[i] = 1.0 / (g * g);
        v[i] = F.deriv(xs[i]) / g;
    }
    // cumulative trapezoid of 1/g^2, anchored at the midpoint
    std::vector<double> S(xs.size(), 0.0);
    for (std::size_t i = mid; i + 1 < xs.size(); ++i)
        S[i + 1] = S[i] + 0.5 * (w[i] + w[i + 1]) * (xs[i + 1] - xs[i]);
    for (std::size_t i = mid; i > 0; --i)
        S[i - 1] = S[i] - 0.5 * (w[i] + w[i - 1]) * (xs[i] - xs[i - 1]);

    double meanS = std::accumulate(S.begin(), S.end(), 0.0) / S.size();
    double meanV = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double cov = 0.0, varS = 0.0, varV = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        cov += (S[i] - meanS) * (v[i] - meanV);
        varS += (S[i] - meanS) * (S[i] - meanS);
        varV += (v[i] - meanV) * (v[i] - meanV);
    }

    RepresentationFit out;
    out.interval = I;
    out.x0 = xs[mid];
    const double vScale = 1.0 + std::abs(meanV);
    if (varV <= 1e-24 * static_cast<double>(v.size()) * vScale * vScale || varS == 0.0) {
        // v is constant: the dependent case; rSquared is 1 by convention
        out.A = meanV;
        out.K = 0.0;
        out.rSquared = 1.0;
        return out;
    }
    out.K = cov / varS;
    out.A = meanV - out.K * meanS;
    double ssRes = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        double r = v[i] - (out.A + out.K * S[i]);
        ssRes += r * r;
    }
    out.rSquared = 1.0 - ssRes / varV;
    return out;
}

ClassificationReport classify_pair(const Func1D& F, const Func1D& G, const Interval& window,
                                   const ClassifyOptions& opts) {
    if (!window.isFinite()) throw SpecError("classification window must be finite");
    ClassificationReport rep;
    rep.support = decompose_support(G, window, opts.gridN, opts.tauRel);

    // note disjoint derivative supports (the bounded-interval phenomenon)
    try {
        SupportDecomposition supF = decompose_support(F, window, opts.gridN, opts.tauRel);
        bool overlap = false;
        for (const auto& a : supF.intervals)
            for (const auto& b : rep.support.intervals)
                if (a.lo < b.hi && b.lo < a.hi) overlap = true;
        if (!overlap && !supF.intervals.empty() && !rep.support.intervals.empty())
            rep.notes.push_back("supports of f and g are disjoint on this window");
    } catch (const Error&) {
        // support of F is informational only
    }

    if (rep.support.intervals.empty()) {
        rep.caseKind = SolutionCase::Dependent;
        rep.notes.push_back(
            "derivative of the second function vanishes on the whole window; "
            "every pair with this second component satisfies the equation");
        return rep;
    }

    const Interval* largestFree = nullptr;
    for (const auto& I : rep.support.intervals) {
        auto c = dependence_test(F, G, I, opts.gridN, opts.tauV);
        if (c) {
            rep.perIntervalDependence.emplace_back(I, *c);
        } else if (!largestFree || I.width() > largestFree->width()) {
            largestFree = &I;
        }
    }
    if (!largestFree) {
        rep.caseKind = SolutionCase::Dependent;
        return rep;
    }
    if (!rep.perIntervalDependence.empty())
        rep.notes.push_back("some support intervals are dependent, others carry a typed form");

    OdeLevel ode = ode_level(G, *largestFree, opts.gridN);
    rep.cEstimate = ode.cEstimate;
    const double band = opts.tauC * (1.0 + std::abs(ode.cEstimate));
    SolutionCase kind;
    if (std::abs(ode.cEstimate) <= band) {
        kind = SolutionCase::Quadratic;
        if (std::abs(ode.cEstimate) > 0.5 * band)
            rep.notes.push_back(
                "ode level near the dead-band edge; competing hypothesis: " +
                std::string(ode.cEstimate > 0 ? "Exponential" : "Trigonometric") +
                " with mu = " + std::to_string(std::sqrt(std::abs(ode.cEstimate))));
    } else {
        kind = ode.cEstimate > 0 ? SolutionCase::Exponential : SolutionCase::Trigonometric;
        if (std::abs(ode.cEstimate) <= 2.0 * band)
            rep.notes.push_back("ode level near the dead-band edge; competing hypothesis: Quadratic");
    }

    std::vector<double> xs = uniformGrid(window, opts.gridN, opts.margin);
    double mu = 0.0;
    if (kind != SolutionCase::Quadratic) {
        mu = std::sqrt(std::abs(ode.cEstimate));
        if (opts.refineMu) mu = refineMu(F, G, xs, kind, mu);
    }
    BasisFit fit = fitBasis(F, G, xs, kind, mu);
    rep.coeffsF = fit.coeffsF;
    rep.coeffsG = fit.coeffsG;
    rep.fitResidual = fit.maxRelDev;

    if (fit.maxRelDev > opts.fitTol) {
        rep.notes.push_back("basis fit exceeded tolerance; nearest hypothesis was " +
                            to_string(kind) +
                            " (ode level " + std::to_string(ode.cEstimate) + ", IQR " +
                            std::to_string(ode.spread) + ")");
        rep.caseKind = SolutionCase::Indeterminate;
        return rep;
    }

    rep.caseKind = kind;
    if (kind == SolutionCase::Exponential) {
        rep.mu = mu;
        rep.notes.push_back("raw ode level " + std::to_string(ode.cEstimate) + ", IQR " +
                            std::to_string(ode.spread));
        rep.cEstimate = mu * mu;
    } else if (kind == SolutionCase::Trigonometric) {
        rep.mu = mu;
        rep.notes.push_back("raw ode level " + std::to_string(ode.cEstimate) + ", IQR " +
                            std::to_string(ode.spread));
        rep.cEstimate = -mu * mu;
    }
    return rep;
}

ClassificationReport classify_original(const Func1D& phi, const Func1D& psi,
                                       const Generator& gen, const Interval& window,
                                       const ClassifyOptions& opts) {
    const Interval& E = gen.domain();
    if (window.lo < E.lo || window.hi > E.hi)
        throw SpecError("classification window must lie within the generator domain");
    ReducedPair rp = reduce(phi, psi, gen);
    double pad = opts.margin * finite_window(window, 20.0).width();
    Interval w = finite_window(window, 20.0);
    double u1 = gen.value(w.lo + pad);
    double u2 = gen.value(w.hi - pad);
    Interval mapped(std::min(u1, u2), std::max(u1, u2));
    ClassificationReport rep = classify_pair(rp.F, rp.G, mapped, opts);
    rep.notes.push_back("classified after reduction through generator " +
                        (gen.name().empty() ? std::string("<expression>") : gen.name()) +
                        "; coefficients refer to the generator basis");
    return rep;
}

std::string classification_report_json(const ClassificationReport& r) {
    nlohmann::json j;
    j["schemaVersion"] = 1;
    j["case"] = to_string(r.caseKind);
    if (r.mu)
        j["mu"] = *r.mu;
    else
        j["mu"] = nullptr;
    j["coeffsF"] = {r.coeffsF[0], r.coeffsF[1], r.coeffsF[2]};
    j["coeffsG"] = {r.coeffsG[0], r.coeffsG[1], r.coeffsG[2]};
    auto deps = nlohmann::json::array();
    for (const auto& [iv, c] : r.perIntervalDependence)
        deps.push_back({{"interval", {iv.lo, iv.hi}}, {"c", c}});
    j["perIntervalDependence"] = deps;
    j["cEstimate"] = r.cEstimate;
    j["fitResidual"] = r.fitResidual;
    auto ivs = nlohmann::json::array();
    for (const auto& iv : r.support.intervals) ivs.push_back({iv.lo, iv.hi});
    j["support"] = {{"intervals", ivs}, {"tauG", r.support.tauG}};
    j["notes"] = r.notes;
    return j.dump(2);
}

std::pair<Func1D, Func1D> load_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SpecError("samples CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,F,G") throw SpecError("samples CSV must start with header 'x,F,G'");
    std::vector<double> xs, fs, gs;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ','))
                throw SpecError("samples CSV row " + std::to_string(lineNo) + " needs 3 columns");
            try {
                vals[k] = std::stod(cell);
            } catch (const std::exception&) {
                throw SpecError("samples CSV row " + std::to_string(lineNo) +
                                " has a malformed number");
            }
        }
        if (!xs.empty() && !(vals[0] > xs.back()))
            throw SpecError("samples CSV x values must be strictly increasing (row " +
                            std::to_string(lineNo) + ")");
        xs.push_back(vals[0]);
        fs.push_back(vals[1]);
        gs.push_back(vals[2]);
    }
    if (xs.size() < 4) throw SpecError("samples CSV needs at least 4 rows");
    return {Func1D::fromSamples(xs, fs), Func1D::fromSamples(xs, gs)};
}

} // namespace mveq
