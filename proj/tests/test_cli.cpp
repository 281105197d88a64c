#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sampcorr/birge.hpp"
#include "sampcorr/generators.hpp"
#include "sampcorr_cli/cli.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using sampcorr::cli::run_cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sampcorr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    std::string write_pmf(const std::string& name, const std::vector<double>& p) const {
        return write(name, json{{"p", p}}.dump());
    }

    static std::string slurp(const std::string& p) {
        std::ifstream f(p);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    }

    static Outcome run(std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenUniform) {
    const Outcome r = run({"gen", "--kind", "uniform", "--n", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto p = json::parse(r.out)["p"].get<std::vector<double>>();
    EXPECT_EQ(p, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
}

TEST_F(Cli, GenPerturbedCarriesDistance) {
    const Outcome r = run({"gen", "--kind", "perturbed-monotone", "--n", "256", "--dist", "0.05", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["distance"].get<double>(), 0.05, 1e-6);
}

TEST_F(Cli, GenUnknownKindIsUsage) {
    EXPECT_EQ(run({"gen", "--kind", "bogus", "--n", "4"}).code, 2);
    EXPECT_EQ(run({"gen", "--n", "4"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST_F(Cli, EvalDistToMonotone) {
    const auto in = write_pmf("d.json", {0.2, 0.5, 0.3});
    const Outcome r = run({"eval", "dist-to-monotone", "--in", in});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 0.15, 1e-9);
}

TEST_F(Cli, EvalTvNeedsOther) {
    const auto in = write_pmf("d.json", {0.5, 0.5});
    EXPECT_EQ(run({"eval", "tv", "--in", in}).code, 2);
    const auto other = write_pmf("e.json", {1.0, 0.0});
    const Outcome r = run({"eval", "tv", "--in", in, "--other", other});
    EXPECT_DOUBLE_EQ(json::parse(r.out)["value"].get<double>(), 0.5);
}

TEST_F(Cli, RenormalizeRule) {
    const auto in = write_pmf("d.json", {1.0, 3.0});
    EXPECT_EQ(run({"eval", "tv-to-uniform", "--in", in}).code, 2);
    const Outcome r = run({"eval", "tv-to-uniform", "--in", in, "--renormalize"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(json::parse(r.out)["value"].get<double>(), 0.25);
}

TEST_F(Cli, BadInputsAreUsage) {
    EXPECT_EQ(run({"eval", "tv-to-uniform", "--in", path("missing.json")}).code, 2);
    EXPECT_EQ(run({"eval", "tv-to-uniform", "--in", write("bad.json", "{not json")}).code, 2);
}

TEST_F(Cli, CorruptMissing) {
    const auto in = write_pmf("u.json", {0.25, 0.25, 0.25, 0.25});
    const Outcome r = run({"corrupt", "missing", "--in", in, "--from", "2", "--to", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["w"].get<double>(), 0.5);
    EXPECT_EQ(j["p"].get<std::vector<double>>(), (std::vector<double>{0.5, 0.0, 0.0, 0.5}));
}

TEST_F(Cli, ObliviousZeroEpsIsFlattening) {
    const auto d = sampcorr::gen_zipf_monotone(200, 1.0);
    const auto in = write_pmf("z.json", d.p());
    const auto rep = path("report.json");
    const Outcome r = run({"correct", "--method", "oblivious", "--in", in, "--eps", "0", "--alpha", "0.1", "--report", rep});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto out = json::parse(r.out)["p"].get<std::vector<double>>();
    const auto flat = sampcorr::flatten(d, sampcorr::birge_partition(200, 0.1));
    for (std::size_t i = 0; i < 200; ++i) EXPECT_NEAR(out[i], flat[i], 1e-12);
    const json report = json::parse(slurp(rep));
    EXPECT_EQ(report["schema"], 1);
    EXPECT_LE(report["tv_to_input"].get<double>(), 0.1);
    EXPECT_TRUE(report.contains("tv_to_property"));
    EXPECT_EQ(report["draws_consumed"], 0);
}

TEST_F(Cli, ObliviousPromiseViolationIsContractFailure) {
    std::vector<double> p(14, 0.01);
    p[13] = 0.87;
    const auto in = write_pmf("far.json", p);
    const Outcome r = run({"correct", "--method", "oblivious", "--in", in, "--eps", "0.001", "--alpha", "1"});
    EXPECT_EQ(r.code, 1) << r.err;
}

TEST_F(Cli, WaterfillWithoutCdfIsUsage) {
    const auto s = write("s.csv", "1\n2\n1\n3\n");
    const Outcome r = run({"correct", "--method", "waterfill", "--mode", "sample", "--samples", s, "--n", "4"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("cdf"), std::string::npos);
}

TEST_F(Cli, SampleStreamTooShortIsContractFailure) {
    const auto s = write("s.csv", "1\n2\n");
    EXPECT_EQ(run({"correct", "--method", "hybrid", "--mode", "sample", "--samples", s, "--n", "4", "--queries", "10"})
                  .code,
              1);
}

TEST_F(Cli, SampleModeDeterministicAndCounted) {
    const auto in = write_pmf("z.json", sampcorr::gen_zipf_monotone(64, 1.0).p());
    auto once = [&](const std::string& rep) {
        return run({"correct", "--method", "oblivious", "--mode", "sample", "--in", in, "--eps", "0.2", "--queries",
                    "500", "--seed", "9", "--report", rep});
    };
    const Outcome a = once(path("r1.json")), b = once(path("r2.json"));
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const json r1 = json::parse(slurp(path("r1.json")));
    EXPECT_EQ(r1["output_digest"], json::parse(slurp(path("r2.json")))["output_digest"]);
    EXPECT_EQ(r1["outputs"], 500);
    EXPECT_LE(r1["draws_consumed"].get<std::size_t>(), 500u);
    EXPECT_TRUE(r1.contains("empirical_tv_to_input"));
    EXPECT_FALSE(r1.contains("tv_to_input"));
}

TEST_F(Cli, GlobalFlagsAfterSubcommand) {
    const auto out = path("g.json");
    ASSERT_EQ(run({"gen", "--kind", "uniform", "--n", "2", "--out", out}).code, 0);
    EXPECT_EQ(json::parse(slurp(out))["n"], 2);
}

TEST_F(Cli, TolerantMonotoneAccepts) {
    const auto in = write_pmf("z.json", sampcorr::gen_zipf_monotone(16, 1.0).p());
    const Outcome r = run({"test", "tolerant-monotone", "--in", in, "--eps-lo", "0.1", "--eps-hi", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["decision"], "ACCEPT");
}

TEST_F(Cli, Fnv1a) {
    EXPECT_EQ(sampcorr::cli::fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(sampcorr::cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}
