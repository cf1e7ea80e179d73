#include "mveq/families.hpp"

#include <cmath>
#include <utility>

#include "json.hpp"

namespace mveq {

std::string to_string(SolutionCase c) {
    switch (c) {
        case SolutionCase::Dependent: return "Dependent";
        case SolutionCase::Quadratic: return "Quadratic";
        case SolutionCase::Exponential: return "Exponential";
        case SolutionCase::Trigonometric: return "Trigonometric";
        case SolutionCase::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

SolutionCase solution_case_from_string(std::string_view s) {
    if (s == "Dependent") return SolutionCase::Dependent;
    if (s == "Quadratic") return SolutionCase::Quadratic;
    if (s == "Exponential") return SolutionCase::Exponential;
    if (s == "Trigonometric") return SolutionCase::Trigonometric;
    if (s == "Indeterminate") return SolutionCase::Indeterminate;
    throw SpecError("unknown solution case: " + std::string(s));
}

namespace {

// P(u), P'(u), P''(u) for the typed bases.
struct BasisCombo {
    SolutionCase kind;
    double mu = 0.0;
    std::array<double, 3> c{};

    double eval0(double u) const {
        switch (kind) {
            case SolutionCase::Quadratic:
                return c[0] + u * (c[1] + u * c[2]);
            case SolutionCase::Exponential:
                return c[0] + c[1] * std::exp(mu * u) + c[2] * std::exp(-mu * u);
            case SolutionCase::Trigonometric:
                return c[0] + c[1] * std::sin(mu * u) + c[2] * std::cos(mu * u);
            default:
                throw SpecError("basis combo is only defined for typed cases");
        }
    }
    double eval1(double u) const {
        switch (kind) {
            case SolutionCase::Quadratic:
                return c[1] + 2.0 * c[2] * u;
            case SolutionCase::Exponential:
                return mu * (c[1] * std::exp(mu * u) - c[2] * std::exp(-mu * u));
            case SolutionCase::Trigonometric:
                return mu * (c[1] * std::cos(mu * u) - c[2] * std::sin(mu * u));
            default:
                throw SpecError("basis combo is only defined for typed cases");
        }
    }
    double eval2(double u) const {
        switch (kind) {
            case SolutionCase::Quadratic:
                return 2.0 * c[2];
            case SolutionCase::Exponential:
                return mu * mu * (c[1] * std::exp(mu * u) + c[2] * std::exp(-mu * u));
            case SolutionCase::Trigonometric:
                return -mu * mu * (c[1] * std::sin(mu * u) + c[2] * std::cos(mu * u));
            default:
                throw SpecError("basis combo is only defined for typed cases");
        }
    }
};

// Composes a basis combination with the generator: (P o H) with chain-rule
// derivatives.  H carries exact derivatives, so the result does too.
Func1D composeWithGenerator(const BasisCombo& P, const Generator& gen) {
    const Func1D H = gen.func();
    return Func1D::fromCallables(
        [P, H](double x) { return P.eval0(H.value(x)); }, gen.domain(),
        [P, H](double x) { return P.eval1(H.value(x)) * H.deriv(x); },
        [P, H](double x) {
            double d = H.deriv(x);
            return P.eval2(H.value(x)) * d * d + P.eval1(H.value(x)) * H.deriv2(x);
        });
}

// Free function for the dependent case: a0 + a1*u + a3*u^3 in u = H(x).
// Deliberately outside every typed basis so dependence is the only structure.
struct CubicCombo {
    std::array<double, 3> c{};
    double eval0(double u) const { return c[0] + c[1] * u + c[2] * u * u * u; }
    double eval1(double u) const { return c[1] + 3.0 * c[2] * u * u; }
    double eval2(double u) const { return 6.0 * c[2] * u; }
};

Func1D composeCubic(const CubicCombo& P, const Generator& gen) {
    const Func1D H = gen.func();
    return Func1D::fromCallables(
        [P, H](double x) { return P.eval0(H.value(x)); }, gen.domain(),
        [P, H](double x) { return P.eval1(H.value(x)) * H.deriv(x); },
        [P, H](double x) {
            double d = H.deriv(x);
            return P.eval2(H.value(x)) * d * d + P.eval1(H.value(x)) * H.deriv2(x);
        });
}

Func1D affineOf(const Func1D& base, double scale, double shift, Interval domain) {
    return Func1D::fromCallables(
        [base, scale, shift](double x) { return scale * base.value(x) + shift; }, domain,
        [base, scale](double x) { return scale * base.deriv(x); },
        [base, scale](double x) { return scale * base.deriv2(x); });
}

Func1D constantFunc(double v, Interval domain) {
    return Func1D::fromCallables([v](double) { return v; }, domain, [](double) { return 0.0; },
                                 [](double) { return 0.0; });
}

FamilySpec normalized(FamilySpec spec) {
    const bool typedMu = spec.caseKind == SolutionCase::Exponential ||
                         spec.caseKind == SolutionCase::Trigonometric;
    if (typedMu) {
        if (!spec.mu) throw SpecError("exponential/trigonometric spec requires mu");
        if (*spec.mu == 0.0 || !std::isfinite(*spec.mu))
            throw SpecError("mu must be a nonzero finite real");
        if (*spec.mu < 0.0) {
            spec.mu = -*spec.mu;
            if (spec.caseKind == SolutionCase::Exponential) {
                std::swap(spec.coeffsPhi[1], spec.coeffsPhi[2]);
                std::swap(spec.coeffsPsi[1], spec.coeffsPsi[2]);
            } else {
                spec.coeffsPhi[1] = -spec.coeffsPhi[1];
                spec.coeffsPsi[1] = -spec.coeffsPsi[1];
            }
        }
    } else if (spec.mu) {
        throw SpecError("mu is only meaningful for exponential/trigonometric specs");
    }
    if (spec.caseKind == SolutionCase::Dependent) {
        if (!spec.dependence) throw SpecError("dependent spec requires dependence constants");
        const auto& d = *spec.dependence;
        if (d[0] == 0.0 && d[1] == 0.0)
            throw SpecError("dependence needs c1 or c2 nonzero (c3 alone is unsatisfiable)");
    } else if (spec.dependence) {
        throw SpecError("dependence constants are only meaningful for the dependent case");
    }
    if (spec.caseKind == SolutionCase::Indeterminate)
        throw SpecError("cannot build a pair for the indeterminate case");
    return spec;
}

} // namespace

SolutionPair build_pair(const FamilySpec& rawSpec, const Generator& gen) {
    FamilySpec spec = normalized(rawSpec);
    SolutionPair out;
    out.gen = gen;
    out.spec = spec;

    if (spec.caseKind == SolutionCase::Dependent) {
        const auto [c1, c2, c3] = *spec.dependence;
        if (c1 != 0.0) {
            // psi free, phi = (-c2*psi - c3)/c1
            CubicCombo q{spec.coeffsPsi};
            out.psi = composeCubic(q, gen);
            out.phi = affineOf(out.psi, -c2 / c1, -c3 / c1, gen.domain());
        } else {
            // c2 != 0: phi free, psi = -c3/c2 constant
            CubicCombo p{spec.coeffsPhi};
            out.phi = composeCubic(p, gen);
            out.psi = constantFunc(-c3 / c2, gen.domain());
        }
        return out;
    }

    double mu = spec.mu ? *spec.mu : 0.0;
    BasisCombo P{spec.caseKind, mu, spec.coeffsPhi};
    BasisCombo Q{spec.caseKind, mu, spec.coeffsPsi};
    out.phi = composeWithGenerator(P, gen);
    out.psi = composeWithGenerator(Q, gen);
    return out;
}

CounterexamplePair counterexample_pair(double c1, double c2) {
    const Interval J(0.0, 1.0);
    const double tF = 0.8; // F is flat left of this knot
    const double tG = 0.4; // G is flat right of this knot

    CounterexamplePair out;
    out.c1 = c1;
    out.c2 = c2;
    out.F = Func1D::fromCallables(
        [c1, tF](double x) { return x <= tF ? c1 : (x - tF) * (x - tF) + c1; }, J,
        [tF](double x) { return x <= tF ? 0.0 : 2.0 * (x - tF); },
        [tF](double x) { return x <= tF ? 0.0 : 2.0; });
    out.G = Func1D::fromCallables(
        [c2, tG](double x) { return x < tG ? (x - tG) * (x - tG) + c2 : c2; }, J,
        [tG](double x) { return x < tG ? 2.0 * (x - tG) : 0.0; },
        [tG](double x) { return x < tG ? 2.0 : 0.0; });
    return out;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json coeffsToJson(const std::array<double, 3>& c) { return json::array({c[0], c[1], c[2]}); }

std::array<double, 3> coeffsFromJson(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 3)
        throw SpecError(std::string(key) + " must be an array of 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw SpecError(std::string(key) + " must contain numbers");
        out[i] = j[i].get<double>();
    }
    return out;
}

} // namespace

std::string family_spec_to_json(const FamilySpec& spec) {
    json j;
    j["case"] = to_string(spec.caseKind);
    if (spec.mu) j["mu"] = *spec.mu;
    j["coeffsPhi"] = coeffsToJson(spec.coeffsPhi);
    j["coeffsPsi"] = coeffsToJson(spec.coeffsPsi);
    if (spec.dependence) j["dependence"] = coeffsToJson(*spec.dependence);
    return j.dump(2);
}

FamilySpec family_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("malformed family spec JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("family spec must be a JSON object");
    if (!j.contains("case") || !j["case"].is_string())
        throw SpecError("family spec needs a string 'case'");

    FamilySpec spec;
    spec.caseKind = solution_case_from_string(j["case"].get<std::string>());
    if (j.contains("mu")) {
        if (!j["mu"].is_number()) throw SpecError("mu must be a number");
        spec.mu = j["mu"].get<double>();
    }
    if (j.contains("coeffsPhi")) spec.coeffsPhi = coeffsFromJson(j["coeffsPhi"], "coeffsPhi");
    if (j.contains("coeffsPsi")) spec.coeffsPsi = coeffsFromJson(j["coeffsPsi"], "coeffsPsi");
    if (j.contains("dependence"))
        spec.dependence = coeffsFromJson(j["dependence"], "dependence");
    return spec;
}

} // namespace mveq
