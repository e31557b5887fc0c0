#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "treeharm/io.hpp"

using namespace treeharm;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(TREEHARM_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string data_path(const std::string& name) {
    return std::string(TREEHARM_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) {
    return std::string(::testing::TempDir()) + name;
}

} // namespace

TEST(CliGamma, PrintsSpectralRecord) {
    const RunResult r = run("gamma --q 2 --z 1");
    ASSERT_EQ(r.exit_code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_NEAR(j["lambda"]["re"].get<double>(), 1.0, 1e-14);
    EXPECT_NEAR(j["rho"].get<double>(), 0.9428090415820634, 1e-12);
    EXPECT_FALSE(j["in_spectrum"].get<bool>());
}

TEST(CliGamma, InSpectrumLambdaFailsNumerically) {
    EXPECT_EQ(run("gamma --q 2 --lambda 0.5").exit_code, 3);
}

TEST(CliGamma, BoundaryZStillPrints) {
    const RunResult r = run("gamma --q 4 --z 0.5");
    ASSERT_EQ(r.exit_code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_NEAR(j["lambda"]["re"].get<double>(), 0.8, 1e-14);
    EXPECT_TRUE(j["in_spectrum"].get<bool>());
}

TEST(CliGamma, UsageErrors) {
    EXPECT_EQ(run("gamma --q 2").exit_code, 2);
    EXPECT_EQ(run("gamma --q 2 --z 1 --lambda 1").exit_code, 2);
    EXPECT_EQ(run("gamma --q 2 --z 1.5x").exit_code, 2);
    EXPECT_EQ(run("nonsense").exit_code, 2);
}

TEST(CliEval, MatchesLibraryByteForByte) {
    const std::string out = tmp_path("eval_out.csv");
    const RunResult r = run("eval --input " + data_path("harmonic_atom.json") +
                            " --radius 4 --out " + out);
    ASSERT_EQ(r.exit_code, 0);
    const auto parsed = poly_function_from_json(Json::parse(slurp(data_path("harmonic_atom.json"))));
    EXPECT_EQ(slurp(out), ball_values_csv(evaluate_ball(parsed.fn, 4)));
}

TEST(CliEval, RowCountAndRootNormalization) {
    const RunResult r = run("eval --input " + data_path("harmonic_atom.json") + " --radius 4");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = parse_ball_csv(r.out);
    ASSERT_EQ(static_cast<std::int64_t>(rows.size()), ball_size(Degree(2), 4));
    EXPECT_EQ(rows[0].first, root());
    EXPECT_EQ(rows[0].second, Complex(1.0)); // K(o, xi) = 1
}

TEST(CliEval, ParseErrorsExitWithUsage) {
    const std::string bad = tmp_path("bad.json");
    std::ofstream(bad) << R"({"q": 2, "z": {"re": 1.2, "im": 0}, "sigmas": []})";
    EXPECT_EQ(run("eval --input " + bad + " --radius 3").exit_code, 2);
    EXPECT_EQ(run("eval --input /nonexistent.json --radius 3").exit_code, 2);
}

TEST(CliOrbit, LaplacianNormsVanishAtOrder) {
    const RunResult r = run("orbit --input " + data_path("order3_mixed.json") +
                            " --steps 5 --operator shifted-laplacian");
    ASSERT_EQ(r.exit_code, 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line); // header
    std::vector<double> norms;
    while (std::getline(lines, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        norms.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1), "norm"));
    }
    ASSERT_EQ(norms.size(), 6u);
    EXPECT_GT(norms[2], 0.0);
    EXPECT_EQ(norms[3], 0.0);
    EXPECT_EQ(norms[4], 0.0);
    EXPECT_EQ(norms[5], 0.0);
}

TEST(CliOrbit, HeatRejectsZeroTime) {
    EXPECT_EQ(run("orbit --input " + data_path("order3_mixed.json") +
                  " --steps 3 --operator heat --t 0")
                  .exit_code,
              3);
}

TEST(CliOrbit, SemigroupConsistencyAcrossStepSizes) {
    const RunResult two = run("orbit --input " + data_path("order3_mixed.json") +
                              " --steps 2 --operator heat --t 0.5");
    const RunResult one = run("orbit --input " + data_path("order3_mixed.json") +
                              " --steps 1 --operator heat --t 1.0");
    ASSERT_EQ(two.exit_code, 0);
    ASSERT_EQ(one.exit_code, 0);
    auto last_total = [](const std::string& csv) {
        std::istringstream lines(csv);
        std::string line, last;
        std::getline(lines, line);
        while (std::getline(lines, line))
            if (!line.empty()) last = line;
        const auto c1 = last.find(',');
        const auto c2 = last.find(',', c1 + 1);
        return parse_double(last.substr(c1 + 1, c2 - c1 - 1), "norm");
    };
    EXPECT_NEAR(last_total(two.out), last_total(one.out), 1e-11 * (1.0 + last_total(one.out)));
}

TEST(CliRightInverse, NormPreservedAndInvertible) {
    const std::string out = tmp_path("finv.json");
    const RunResult r = run("right-inverse --input " + data_path("order3_mixed.json") +
                            " --out " + out);
    ASSERT_EQ(r.exit_code, 0);
    const Json info = Json::parse(r.out);
    EXPECT_EQ(info["output_order"], info["input_order"].get<int>() + 1);
    EXPECT_NEAR(info["input_norm"].get<double>(), info["output_norm"].get<double>(),
                1e-12 * (1.0 + info["input_norm"].get<double>()));
    const auto fh = poly_function_from_json(Json::parse(slurp(out)));
    const auto h = poly_function_from_json(Json::parse(slurp(data_path("order3_mixed.json"))));
    const PolyFunction back = apply_shifted_laplacian(fh.fn);
    ASSERT_EQ(order(back), order(h.fn));
    for (int j = 0; j < order(back); ++j)
        EXPECT_LT(diff_tv(back.sigmas[static_cast<std::size_t>(j)],
                          h.fn.sigmas[static_cast<std::size_t>(j)]),
                  1e-12);
}

TEST(CliVerify, IdentitiesPassBogusRejected) {
    EXPECT_EQ(run("verify identities --q 2").exit_code, 0);
    EXPECT_EQ(run("verify bogus-suite --q 2").exit_code, 2);
    EXPECT_EQ(run("verify identities --q 2 --radius 0").exit_code, 2);
}

TEST(CliVerify, ReportFileWritten) {
    const std::string out = tmp_path("report.json");
    const RunResult r = run("verify norms --q 2 --seed 7 --out " + out);
    ASSERT_EQ(r.exit_code, 0);
    const Json j = Json::parse(slurp(out));
    EXPECT_EQ(j["suite"], "norms");
    EXPECT_EQ(j["seed"], 7);
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(CliCoeffs, EmitsMatrix) {
    const RunResult r = run("coeffs --q 2 --z 1.2 --order 5");
    ASSERT_EQ(r.exit_code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["n"], 5);
    EXPECT_EQ(j["entries"].size(), 10u);
}

TEST(CliSpherical, NuFunctionEvaluates) {
    const RunResult r = run("eval --input " + data_path("spherical_nu.json") + " --radius 3");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = parse_ball_csv(r.out);
    // radial: all depth-1 values equal (up to summation rounding)
    EXPECT_LT(std::abs(rows[1].second - rows[2].second), 1e-14);
    EXPECT_LT(std::abs(rows[2].second - rows[3].second), 1e-14);
}
