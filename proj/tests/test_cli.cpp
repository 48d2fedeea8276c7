#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chmlab_cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "chmlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = chmlab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

}  // namespace

TEST(Cli, HelpExitsZero) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("horizons"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndFlagAreUsageErrors) {
    EXPECT_EQ(invoke({"bogus"}).code, 2);
    EXPECT_EQ(invoke({"horizons", "--neck-a", "0.5", "--q", "0.3", "--frobnicate"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
}

TEST(Cli, HorizonsDoubleOuterAtWindowEdge) {
    const auto r = invoke({"horizons", "--neck-a", "0.8", "--q", "0.48"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = chmlab::json::parse(r.out);
    EXPECT_EQ(j["classification"], "double-outer");
    EXPECT_NEAR(j["r_plus"].get<double>(), 0.8, 1e-12);
}

TEST(Cli, HorizonsRejectsMissingParameters) { EXPECT_EQ(invoke({"horizons", "--q", "0.3"}).code, 2); }

TEST(Cli, MassOfZeroGraphMatchesModel) {
    const std::string path = temp_path("zero_surface.json");
    {
        std::ofstream f(path);
        f << R"({"base":{"neck_a":0.5,"q":0.3,"lambda":1.0,"s0":0.0},"phi":{"n_theta":8,"n_phi":16,"values":[)";
        for (int i = 0; i < 128; ++i) f << (i ? "," : "") << 0;
        f << "]}}";
    }
    const auto r = invoke({"mass", "--surface", path});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = chmlab::json::parse(r.out);
    EXPECT_NEAR(j["mch"].get<double>(), 0.31916666666666665, 1e-12);
    std::remove(path.c_str());
}

TEST(Cli, MalformedSurfaceIsUsageError) {
    const std::string path = temp_path("bad_surface.json");
    std::ofstream(path) << "{not json";
    EXPECT_EQ(invoke({"mass", "--surface", path}).code, 2);
    std::remove(path.c_str());
}

TEST(Cli, CsvHeaders) {
    const auto p = invoke({"profile", "--neck-a", "0.5", "--q", "0.3", "--format", "csv", "--steps", "10"});
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_EQ(p.out.substr(0, p.out.find('\n')), "s,u,du,ddu,R,ric_nn,H,mch");
    const auto f = invoke({"foliate", "--neck-a", "0.5", "--q", "0.3", "--format", "csv", "--steps", "4"});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_EQ(f.out.substr(0, f.out.find('\n')), "t,u,H,dH,lambda1,dmch");
}

TEST(Cli, SweepIsIndependentOfJobs) {
    const std::vector<std::string> base{"sweep", "--check", "corA2", "--x", "0.05:0.45:6", "--y", "0.1:0.9:5"};
    auto one = base, many = base;
    one.insert(one.end(), {"--jobs", "1"});
    many.insert(many.end(), {"--jobs", "7"});
    const auto a = invoke(one), b = invoke(many);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 31);
}

TEST(Cli, SweepEmptyGridIsUsageError) {
    EXPECT_EQ(invoke({"sweep", "--check", "window", "--x", "0:1:0"}).code, 2);
    EXPECT_EQ(invoke({"sweep", "--check", "nope"}).code, 2);
}

TEST(Cli, CommandLineOverridesConfig) {
    const std::string cfg = temp_path("chmlab_test.cfg");
    std::ofstream(cfg) << "# comment\nneck-a = 0.5\nq = 0.3\n";
    const auto r = invoke({"horizons", "--config", cfg, "--q", "0.2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = chmlab::json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["q"].get<double>(), 0.2);
    std::ofstream(cfg) << "warp = 9\n";
    EXPECT_EQ(invoke({"horizons", "--config", cfg, "--neck-a", "0.5", "--q", "0.3"}).code, 2);
    std::remove(cfg.c_str());
}

TEST(Cli, OutFileReceivesReport) {
    const std::string path = temp_path("horizons_out.json");
    const auto r = invoke({"horizons", "--neck-a", "0.5", "--q", "0.3", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    const auto j = chmlab::json::parse(in);
    EXPECT_EQ(j["classification"], "three-distinct-positive");
    std::remove(path.c_str());
}

TEST(Cli, VariationDomainErrorExitsTwo) {
    EXPECT_EQ(invoke({"variation", "--neck-a", "0.5", "--q", "0.3", "--phi", "Y:1"}).code, 2);
    EXPECT_EQ(invoke({"variation", "--neck-a", "-1", "--q", "0.3", "--phi", "Y:1,0"}).code, 2);
}

TEST(Cli, VerifySubsetPasses) {
    const auto r = invoke({"verify", "--suite", "1,7", "--format", "text"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("ALL PASS"), std::string::npos);
}
