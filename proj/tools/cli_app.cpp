#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mveq/classify.hpp"
#include "mveq/families.hpp"
#include "mveq/qam.hpp"
#include "mveq/residual.hpp"

namespace mveq::cli {

namespace {

double parseEndpoint(std::string text) {
    auto ltrim = text.find_first_not_of(" \t");
    auto rtrim = text.find_last_not_of(" \t");
    if (ltrim == std::string::npos) throw SpecError("empty domain endpoint");
    text = text.substr(ltrim, rtrim - ltrim + 1);
    const char* s = text.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw SpecError("malformed domain endpoint: '" + text + "' (use a number, -inf, or inf)");
    return v;
}

Interval parseDomain(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw SpecError("domain must be 'lo,hi' (got '" + text + "')");
    double lo = parseEndpoint(text.substr(0, comma));
    double hi = parseEndpoint(text.substr(comma + 1));
    if (!(lo < hi)) throw SpecError("domain endpoints must satisfy lo < hi");
    return Interval(lo, hi);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct CommonArgs {
    std::string phi;
    std::string psi;
    std::string generator = "identity";
    double alpha = 0.5;
    std::string domainText;
    int samples = 101;
    std::uint64_t seed = 42;
    double tol = 1e-9;
    double span = 20.0;
    std::string format = "human";
    std::string outPath;
};

void addPairFlags(CLI::App* cmd, CommonArgs& a, bool needPair) {
    auto* phi = cmd->add_option("--phi", a.phi, "expression for the first function (in x)");
    auto* psi = cmd->add_option("--psi", a.psi, "expression for the second function (in x)");
    if (needPair) {
        phi->required();
        psi->required();
    }
    cmd->add_option("--generator", a.generator,
                    "mean generator: identity, ln, exp, power:<p>, or an expression")
        ->capture_default_str();
    cmd->add_option("--alpha", a.alpha, "left mean weight in (0,1)")->capture_default_str();
    cmd->add_option("--domain", a.domainText,
                    "domain 'lo,hi'; endpoints may be -inf/inf (default: generator's "
                    "natural domain)");
    cmd->add_option("--span", a.span, "finite window span used to clamp infinite domains")
        ->capture_default_str();
}

void addOutputFlags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"human", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", a.outPath, "write output to this path instead of stdout");
}

struct PairSetup {
    Func1D phi, psi;
    Generator gen;
    Interval domain{};   ///< generator domain E (may be infinite)
    Interval window{};   ///< finite margin-safe window inside E
    bool clamped = false;
};

PairSetup buildPair(const CommonArgs& a) {
    PairSetup s;
    if (a.domainText.empty()) {
        s.gen = builtin_generator(a.generator);
    } else {
        Interval E = parseDomain(a.domainText);
        s.gen = builtin_generator(a.generator, &E);
    }
    s.domain = s.gen.domain();
    s.window = finite_window(s.domain, a.span);
    s.clamped = !s.domain.isFinite();
    s.phi = Func1D::fromExpression(a.phi, s.domain);
    s.psi = Func1D::fromExpression(a.psi, s.domain);
    return s;
}

std::ostream& pickSink(const CommonArgs& a, std::ostream& out, std::ofstream& file) {
    if (a.outPath.empty()) return out;
    file.open(a.outPath);
    if (!file) throw SpecError("cannot open output path: " + a.outPath);
    return file;
}

nlohmann::json residualReportJson(const ResidualReport& rep) {
    return {{"schemaVersion", 1},
            {"pass", rep.pass},
            {"maxScaled", rep.maxScaled},
            {"argmaxPair", {rep.argmaxPair.first, rep.argmaxPair.second}},
            {"count", rep.count},
            {"tolerance", rep.tolerance},
            {"domainFailures", rep.domainFailures}};
}

void printResidualReport(std::ostream& os, const ResidualReport& rep, const std::string& format) {
    if (format == "json") {
        os << residualReportJson(rep).dump(2) << "\n";
        return;
    }
    os << (rep.pass ? "pass" : "FAIL") << "\n";
    os << "max scaled residual: " << fmt(rep.maxScaled) << " (tolerance " << fmt(rep.tolerance)
       << ")\n";
    os << "witness pair: (" << fmt(rep.argmaxPair.first) << ", " << fmt(rep.argmaxPair.second)
       << ")\n";
    os << "pairs evaluated: " << rep.count << "\n";
    if (rep.domainFailures > 0) os << "domain failures: " << rep.domainFailures << "\n";
}

int cmdVerify(const CommonArgs& a, std::ostream& out) {
    PairSetup s = buildPair(a);
    QuasiArithmeticMean q(s.gen, MeanWeights(a.alpha));
    SamplePlan plan(s.window, a.samples, SampleMode::Uniform, a.seed);
    ResidualReport rep = verify_grid(s.phi, s.psi, q, plan, a.tol);
    std::ofstream file;
    std::ostream& os = pickSink(a, out, file);
    if (s.clamped && a.format != "json")
        os << "note: infinite domain clamped to (" << fmt(s.window.lo) << ", "
           << fmt(s.window.hi) << ")\n";
    printResidualReport(os, rep, a.format);
    return rep.pass ? 0 : 1;
}

int cmdClassify(const CommonArgs& a, const std::string& samplesFile, ClassifyOptions opts,
                std::ostream& out) {
    ClassificationReport rep;
    bool haveExprs = !a.phi.empty() || !a.psi.empty();
    if (!samplesFile.empty() && haveExprs)
        throw SpecError("give either --samples-file or --phi/--psi, not both");
    if (!samplesFile.empty()) {
        std::ifstream in(samplesFile);
        if (!in) throw SpecError("cannot open samples file: " + samplesFile);
        auto [F, G] = load_samples_csv(in);
        rep = classify_pair(F, G, F.domain(), opts);
    } else {
        if (a.phi.empty() || a.psi.empty())
            throw SpecError("classify needs --phi and --psi (or --samples-file)");
        PairSetup s = buildPair(a);
        rep = classify_original(s.phi, s.psi, s.gen, s.window, opts);
        if (s.clamped)
            rep.notes.push_back("infinite domain clamped to (" + fmt(s.window.lo) + ", " +
                                fmt(s.window.hi) + ") before scanning");
    }
    std::ofstream file;
    std::ostream& os = pickSink(a, out, file);
    os << classification_report_json(rep) << "\n";
    return rep.caseKind == SolutionCase::Indeterminate ? 1 : 0;
}

int cmdLocate(const CommonArgs& a, double pa, double pb, int grid, std::ostream& out) {
    Interval domain = a.domainText.empty()
                          ? Interval(-std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity())
                          : parseDomain(a.domainText);
    Func1D phi = Func1D::fromExpression(a.phi, domain);
    Func1D psi = Func1D::fromExpression(a.psi, domain);
    if (!domain.contains(pa) || !domain.contains(pb))
        throw SpecError("locate endpoints must lie inside the domain");
    LocateResult res = locate_mean_points(phi, psi, pa, pb, grid);

    std::ofstream file;
    std::ostream& os = pickSink(a, out, file);
    if (a.format == "json") {
        nlohmann::json j{{"schemaVersion", 1},
                         {"points", res.points},
                         {"identicallyZero", res.identicallyZero}};
        os << j.dump(2) << "\n";
    } else if (res.identicallyZero) {
        os << "identically zero residual: every interior point is a mean value point\n";
    } else if (res.points.empty()) {
        os << "no sign change found\n";
    } else {
        for (double c : res.points) os << fmt(c) << "\n";
    }
    if (res.identicallyZero) return 0;
    return res.points.empty() ? 1 : 0;
}

int cmdCounterexample(const CommonArgs& a, double c1, double c2, int gridN, double tol,
                      std::ostream& out) {
    CounterexamplePair cp = counterexample_pair(c1, c2);
    Generator gen = identity_generator(Interval(0.0, 1.0));
    QuasiArithmeticMean q(gen, MeanWeights(a.alpha));
    SamplePlan plan(Interval(0.0, 1.0), a.samples, SampleMode::Uniform, a.seed);
    ResidualReport rep = verify_grid(cp.F, cp.G, q, plan, tol);
    SupportDecomposition Uf = decompose_support(cp.F, Interval(0.0, 1.0), gridN, 1e-8);
    SupportDecomposition Ug = decompose_support(cp.G, Interval(0.0, 1.0), gridN, 1e-8);
    bool disjoint = true;
    for (const auto& fi : Uf.intervals)
        for (const auto& gi : Ug.intervals)
            if (fi.lo < gi.hi && gi.lo < fi.hi) disjoint = false;

    std::ofstream file;
    std::ostream& os = pickSink(a, out, file);
    auto ivList = [](const SupportDecomposition& d) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& iv : d.intervals) arr.push_back({iv.lo, iv.hi});
        return arr;
    };
    if (a.format == "json") {
        nlohmann::json j{{"schemaVersion", 1},
                         {"alpha", a.alpha},
                         {"c1", c1},
                         {"c2", c2},
                         {"Uf", ivList(Uf)},
                         {"Ug", ivList(Ug)},
                         {"disjointSupports", disjoint},
                         {"verification", residualReportJson(rep)}};
        os << j.dump(2) << "\n";
    } else {
        auto printSet = [&](const char* name, const SupportDecomposition& d) {
            os << name << ":";
            for (const auto& iv : d.intervals)
                os << " (" << fmt(iv.lo) << ", " << fmt(iv.hi) << ")";
            if (d.intervals.empty()) os << " empty";
            os << "\n";
        };
        printSet("U_f", Uf);
        printSet("U_g", Ug);
        os << "disjoint supports: " << (disjoint ? "yes" : "no") << "\n";
        printResidualReport(os, rep, a.format);
    }
    return rep.pass ? 0 : 1;
}

int cmdGrid(const CommonArgs& a, std::ostream& out) {
    PairSetup s = buildPair(a);
    QuasiArithmeticMean q(s.gen, MeanWeights(a.alpha));
    SamplePlan plan(s.window, a.samples, SampleMode::Uniform, a.seed);
    std::ofstream file;
    std::ostream& os = pickSink(a, out, file);
    write_residual_grid_csv(os, s.phi, s.psi, q, plan);
    if (!os) throw SpecError("write failed");
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"quasi-arithmetic mean-value equation toolkit"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string samplesFile;
    ClassifyOptions opts;
    double pa = 0.0, pb = 1.0;
    int locateGrid = 2048;
    double c1 = 0.0, c2 = 0.0;
    int supportGrid = 1024;

    auto* verify = app.add_subcommand("verify", "check the defining equation over a grid");
    addPairFlags(verify, a, true);
    verify->add_option("--samples", a.samples, "grid points per axis")->capture_default_str();
    verify->add_option("--seed", a.seed, "random pair seed")->capture_default_str();
    verify->add_option("--tol", a.tol, "scaled residual tolerance")->capture_default_str();
    addOutputFlags(verify, a);

    auto* classify = app.add_subcommand("classify", "identify the solution family of a pair");
    addPairFlags(classify, a, false);
    classify->add_option("--samples-file", samplesFile, "CSV with header x,F,G");
    classify->add_option("--grid", opts.gridN, "classification grid size")->capture_default_str();
    classify->add_option("--tau-rel", opts.tauRel, "support threshold (relative)")
        ->capture_default_str();
    classify->add_option("--tau-v", opts.tauV, "dependence spread tolerance")
        ->capture_default_str();
    classify->add_option("--tau-c", opts.tauC, "quadratic dead band")->capture_default_str();
    classify->add_option("--fit-tol", opts.fitTol, "max relative basis-fit deviation")
        ->capture_default_str();
    addOutputFlags(classify, a);

    auto* locate = app.add_subcommand("locate", "find mean value points in (a,b)");
    locate->add_option("--phi", a.phi, "expression for the first function")->required();
    locate->add_option("--psi", a.psi, "expression for the second function")->required();
    locate->add_option("--a", pa, "left endpoint")->required();
    locate->add_option("--b", pb, "right endpoint")->required();
    locate->add_option("--grid", locateGrid, "scan subintervals")->capture_default_str();
    locate->add_option("--domain", a.domainText, "domain 'lo,hi' (default: all reals)");
    addOutputFlags(locate, a);

    auto* counter = app.add_subcommand(
        "counterexample", "bounded-interval pair with disjoint derivative supports");
    counter->add_option("--alpha", a.alpha, "left mean weight")->capture_default_str();
    counter->add_option("--c1", c1, "additive constant of the first function")
        ->capture_default_str();
    counter->add_option("--c2", c2, "additive constant of the second function")
        ->capture_default_str();
    counter->add_option("--grid", supportGrid, "support scan grid")->capture_default_str();
    counter->add_option("--samples", a.samples, "verification grid points")
        ->capture_default_str();
    counter->add_option("--seed", a.seed, "random pair seed")->capture_default_str();
    // the pair satisfies the equation exactly; demand near machine precision
    double ceTol = 1e-12;
    counter->add_option("--tol", ceTol, "scaled residual tolerance")->capture_default_str();
    addOutputFlags(counter, a);

    auto* grid = app.add_subcommand("grid", "export the residual grid as CSV");
    addPairFlags(grid, a, true);
    grid->add_option("--samples", a.samples, "grid points per axis")->capture_default_str();
    grid->add_option("--seed", a.seed, "sampling seed")->capture_default_str();
    grid->add_option("--out", a.outPath, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(verify)) return cmdVerify(a, out);
        if (app.got_subcommand(classify)) return cmdClassify(a, samplesFile, opts, out);
        if (app.got_subcommand(locate)) return cmdLocate(a, pa, pb, locateGrid, out);
        if (app.got_subcommand(counter))
            return cmdCounterexample(a, c1, c2, supportGrid, ceTol, out);
        if (app.got_subcommand(grid)) return cmdGrid(a, out);
        err << "error: no command given\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace mveq::cli
