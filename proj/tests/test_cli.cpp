#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cli_app.hpp"

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult runCli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("mveq");
    for (const auto& s : args) argv.push_back(s.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = mveq::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

nlohmann::json parseJson(const std::string& text) { return nlohmann::json::parse(text); }

} // namespace

TEST_CASE("verify exit codes cover pass, fail, and usage error") {
    CliResult pass = runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "0,1"});
    CHECK(pass.code == 0);
    CHECK(pass.out.find("pass") != std::string::npos);

    CliResult fail = runCli(
        {"verify", "--phi", "x^2", "--psi", "x", "--domain", "0,1", "--alpha", "0.3"});
    CHECK(fail.code == 1);
    CHECK(fail.out.find("FAIL") != std::string::npos);

    CliResult usage = runCli(
        {"verify", "--phi", "x^2", "--psi", "x", "--generator", "x^2", "--domain", "-1,1"});
    CHECK(usage.code == 2);
    CHECK(usage.err.find("error") != std::string::npos);
}

TEST_CASE("verify json output carries the report schema") {
    CliResult r = runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "0,1", "--format",
                          "json"});
    REQUIRE(r.code == 0);
    auto j = parseJson(r.out);
    CHECK(j["schemaVersion"] == 1);
    CHECK(j["pass"] == true);
    CHECK(j["maxScaled"].get<double>() <= 1e-9);
    CHECK(j["tolerance"].get<double>() == doctest::Approx(1e-9));
    CHECK(j["count"].get<long>() > 5000);
    CHECK(j["argmaxPair"].is_array());
    CHECK(j["domainFailures"] == 0);
}

TEST_CASE("verify notes the clamping of infinite domains") {
    CliResult r = runCli({"verify", "--phi", "x^2", "--psi", "x"});
    CHECK(r.code == 0);
    CHECK(r.out.find("clamped") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(runCli({"verify", "--psi", "x"}).code == 2);               // missing --phi
    CHECK(runCli({"verify", "--phi", "x", "--psi", "x", "--bogus"}).code == 2);
    CHECK(runCli({}).code == 2);                                     // no subcommand
    CHECK(runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "1,0"}).code == 2);
    CHECK(runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "zero,1"}).code == 2);
    CHECK(runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "0,1", "--alpha",
                  "1.5"}).code == 2);
    CHECK(runCli({"verify", "--phi", "x^(", "--psi", "x", "--domain", "0,1"}).code == 2);
    CHECK(runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "0,1", "--format",
                  "yaml"}).code == 2);
}

TEST_CASE("help exits cleanly") {
    CliResult top = runCli({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("verify") != std::string::npos);
    CliResult sub = runCli({"classify", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("--samples-file") != std::string::npos);
}

TEST_CASE("classify identifies a trigonometric pair from expressions") {
    CliResult r = runCli(
        {"classify", "--phi", "sin(2*x)", "--psi", "cos(2*x)", "--domain", "0,3"});
    REQUIRE(r.code == 0);
    auto j = parseJson(r.out);
    CHECK(j["schemaVersion"] == 1);
    CHECK(j["case"] == "Trigonometric");
    CHECK(std::abs(j["mu"].get<double>() - 2.0) <= 1e-3);
    CHECK(j["coeffsF"][1].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(j["coeffsG"][2].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("classify identifies dependence and reports the constant") {
    CliResult r = runCli({"classify", "--phi", "3*x + 1", "--psi", "x", "--domain", "-2,2"});
    REQUIRE(r.code == 0);
    auto j = parseJson(r.out);
    CHECK(j["case"] == "Dependent");
    REQUIRE(j["perIntervalDependence"].size() == 1);
    CHECK(j["perIntervalDependence"][0]["c"].get<double>() == doctest::Approx(3.0));
}

TEST_CASE("classify through a non-identity generator") {
    CliResult r = runCli({"classify", "--phi", "x^2", "--psi", "x^-2", "--generator", "ln",
                          "--domain", "0.5,5"});
    REQUIRE(r.code == 0);
    auto j = parseJson(r.out);
    CHECK(j["case"] == "Exponential");
    CHECK(std::abs(j["mu"].get<double>() - 2.0) <= 1e-3);
}

TEST_CASE("classify returns 1 for indeterminate pairs") {
    CliResult r = runCli(
        {"classify", "--phi", "x^3 + sin(x)", "--psi", "x", "--domain", "-2,2"});
    CHECK(r.code == 1);
    auto j = parseJson(r.out);
    CHECK(j["case"] == "Indeterminate");
}

TEST_CASE("classify notes the clamp when no domain is given") {
    CliResult r = runCli({"classify", "--phi", "x^2", "--psi", "x"});
    REQUIRE(r.code == 0);
    auto j = parseJson(r.out);
    CHECK(j["case"] == "Quadratic");
    bool clampNote = false;
    for (const auto& n : j["notes"])
        if (n.get<std::string>().find("clamped") != std::string::npos) clampNote = true;
    CHECK(clampNote);
}

TEST_CASE("classify from a samples file") {
    const std::string path = "mveq_cli_test_samples.csv";
    {
        std::ofstream f(path);
        f << "x,F,G\n";
        char buf[128];
        const int rows = 400;
        for (int i = 0; i <= rows; ++i) {
            double x = 2.0 * i / rows;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, std::exp(x), std::exp(-x));
            f << buf;
        }
    }
    CliResult r = runCli({"classify", "--samples-file", path});
    CHECK(r.code == 0);
    auto j = parseJson(r.out);
    CHECK(j["case"] == "Exponential");
    CHECK(std::abs(j["mu"].get<double>() - 1.0) <= 1e-3);

    // samples file and expressions are mutually exclusive
    CliResult conflict = runCli({"classify", "--samples-file", path, "--phi", "x", "--psi", "x"});
    CHECK(conflict.code == 2);

    CliResult missing = runCli({"classify", "--samples-file", "no_such_file.csv"});
    CHECK(missing.code == 2);

    std::remove(path.c_str());
}

TEST_CASE("locate prints points and honors formats") {
    CliResult r = runCli({"locate", "--phi", "x^3", "--psi", "x", "--a", "0", "--b", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("0.577350269") != std::string::npos);

    CliResult j = runCli({"locate", "--phi", "x^3", "--psi", "x", "--a", "0", "--b", "1",
                          "--format", "json"});
    REQUIRE(j.code == 0);
    auto doc = parseJson(j.out);
    CHECK(doc["schemaVersion"] == 1);
    REQUIRE(doc["points"].size() == 1);
    CHECK(std::abs(doc["points"][0].get<double>() - 1.0 / std::sqrt(3.0)) <= 1e-10);
    CHECK(doc["identicallyZero"] == false);
}

TEST_CASE("locate reports the degenerate identically-zero case") {
    CliResult r = runCli({"locate", "--phi", "x", "--psi", "x", "--a", "0", "--b", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("identically zero") != std::string::npos);
}

TEST_CASE("locate reports when the scan finds no crossing") {
    // a fast oscillation with the scan nodes in phase: every node sees the
    // same sign although the relation crosses zero inside each subinterval
    CliResult r = runCli({"locate", "--phi", "sin(1000*x)", "--psi", "x", "--a", "0", "--b",
                          "0.0125664", "--grid", "2"});
    CHECK(r.code == 1);
    CHECK(r.out.find("no sign change found") != std::string::npos);
}

TEST_CASE("locate validates endpoints against the domain") {
    CliResult r = runCli({"locate", "--phi", "ln(x)", "--psi", "x", "--a", "-1", "--b", "2",
                          "--domain", "0,10"});
    CHECK(r.code == 2);
}

TEST_CASE("counterexample defaults pass at machine precision") {
    CliResult r = runCli({"counterexample"});
    CHECK(r.code == 0);
    CHECK(r.out.find("disjoint supports: yes") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);

    CliResult j = runCli({"counterexample", "--format", "json"});
    REQUIRE(j.code == 0);
    auto doc = parseJson(j.out);
    CHECK(doc["schemaVersion"] == 1);
    CHECK(doc["disjointSupports"] == true);
    REQUIRE(doc["Uf"].size() == 1);
    REQUIRE(doc["Ug"].size() == 1);
    CHECK(std::abs(doc["Uf"][0][0].get<double>() - 0.8) <= 2.0 / 1024.0);
    CHECK(std::abs(doc["Ug"][0][1].get<double>() - 0.4) <= 2.0 / 1024.0);
    CHECK(doc["verification"]["pass"] == true);
    CHECK(doc["verification"]["maxScaled"].get<double>() == 0.0);
}

TEST_CASE("counterexample weight sensitivity") {
    // the construction survives moderate asymmetry ...
    CliResult mid = runCli({"counterexample", "--alpha", "0.4"});
    CHECK(mid.code == 0);
    // ... but not strong asymmetry, which pushes the mean into the support
    CliResult skew = runCli({"counterexample", "--alpha", "0.2"});
    CHECK(skew.code == 1);
    CHECK(skew.out.find("FAIL") != std::string::npos);
}

TEST_CASE("grid emits a deterministic residual table") {
    std::vector<std::string> args = {"grid", "--phi", "x^2", "--psi", "x",
                                     "--domain", "0,1", "--samples", "5"};
    CliResult a = runCli(args);
    CliResult b = runCli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    std::istringstream in(a.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,h,residual,scaled_residual");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);

    // --out writes the same bytes to a file
    const std::string path = "mveq_cli_test_grid.csv";
    std::vector<std::string> fileArgs = args;
    fileArgs.push_back("--out");
    fileArgs.push_back(path);
    CliResult c = runCli(fileArgs);
    REQUIRE(c.code == 0);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == a.out);
    std::remove(path.c_str());
}

TEST_CASE("verify can write its report to a file") {
    const std::string path = "mveq_cli_test_report.txt";
    CliResult r = runCli({"verify", "--phi", "x^2", "--psi", "x", "--domain", "0,1", "--out",
                          path});
    CHECK(r.code == 0);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str().find("pass") != std::string::npos);
    CHECK(r.out.empty());
    std::remove(path.c_str());
}
