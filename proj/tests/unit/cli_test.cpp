#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("ineq_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(INEQ_CLI_PATH) + " --quiet --output-dir " + dir_.string() + " " + args +
                                " > " + (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    Json json(const std::string& name) const { return Json::parse(read(name)); }

    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    fs::path dir_;
};

const char* kFourRows = "id,weight,income\n1,3,1\n2,3,2\n3,2,5\n4,2,10\n";

}  // namespace

TEST_F(Cli, SharesHappyPath) {
    write("data.csv", kFourRows);
    ASSERT_EQ(run("shares --input " + path("data.csv") + " --k 0.9 --variable income"), 0) << read("stderr.txt");
    const auto j = json("shares.json");
    EXPECT_NEAR(j[0]["point"].get<double>(), 10.0 / 39.0, 1e-15);
    const auto m = json("shares.manifest.json");
    EXPECT_EQ(m["subcommand"], "shares");
    EXPECT_EQ(m["status"], "ok");
    EXPECT_TRUE(m.contains("wall_time_seconds"));
    EXPECT_FALSE(m["inputs"].empty());
    EXPECT_FALSE(m["version"].get<std::string>().empty());
}

TEST_F(Cli, UnknownFlagIsUsageError) {
    EXPECT_EQ(run("shares --bogus 1"), 64);
    EXPECT_NE(read("stderr.txt").find("Usage"), std::string::npos);
    EXPECT_EQ(run("frobnicate"), 64);
}

TEST_F(Cli, ValidationErrorExitsOne) {
    write("bad.csv", "id,weight,income\n1,0,1\n2,1,2\n");
    EXPECT_EQ(run("shares --input " + path("bad.csv")), 1);
    EXPECT_NE(read("stderr.txt").find("row 1"), std::string::npos);
    EXPECT_EQ(json("shares.manifest.json")["status"], "validation_error");
}

TEST_F(Cli, NumericalErrorExitsTwo) {
    write("zero.csv", "id,weight,income\n1,1,-1\n2,1,1\n");
    EXPECT_EQ(run("shares --input " + path("zero.csv") + " --k 0.5"), 2);
    EXPECT_EQ(json("shares.manifest.json")["status"], "numerical_error");
}

TEST_F(Cli, BootstrapReplaysExactly) {
    ASSERT_EQ(run("sample --size 20000 --seed 3 --implicates 3 --missing 0.2 --variables income"), 0)
        << read("stderr.txt");
    const std::string args = "bootstrap --input " + path("sample.csv") + " --strata " + path("strata.csv") +
                             " --k 0.9 --L 99 --seed 7";
    ASSERT_EQ(run(args + " --out " + path("a.json")), 0) << read("stderr.txt");
    ASSERT_EQ(run(args + " --out " + path("b.json") + " --threads 3"), 0) << read("stderr.txt");
    EXPECT_EQ(read("a.json"), read("b.json"));
    const auto j = json("a.json");
    const auto& e = j["estimates"][0];
    for (const char* key : {"sigma1", "sigma2", "sigma", "ci"}) EXPECT_FALSE(e[key].is_null()) << key;
    EXPECT_EQ(json("bootstrap.manifest.json")["seed"], 7);
}

TEST_F(Cli, SampleIsDeterministic) {
    ASSERT_EQ(run("sample --size 5000 --seed 11 --out " + path("s1.csv")), 0) << read("stderr.txt");
    ASSERT_EQ(run("sample --size 5000 --seed 11 --out " + path("s2.csv")), 0);
    EXPECT_EQ(read("s1.csv"), read("s2.csv"));
    ASSERT_EQ(run("sample --size 5000 --seed 12 --out " + path("s3.csv")), 0);
    EXPECT_NE(read("s1.csv"), read("s3.csv"));
}

TEST_F(Cli, SynthWritesTruth) {
    ASSERT_EQ(run("synth --size 2000 --seed 5 --truth-out " + path("truth.json") + " --strata-out " +
                  path("strata.csv")),
              0)
        << read("stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "population.csv"));
    EXPECT_FALSE(json("truth.json").empty());
    EXPECT_NE(read("strata.csv").find("stratum_id"), std::string::npos);
}

TEST_F(Cli, TrendFitsSeries) {
    write("series.csv", "year,estimate,se\n2000,0.10,0.01\n2001,0.11,0.01\n2002,0.13,0.02\n2003,0.14,0.01\n");
    ASSERT_EQ(run("trend --input " + path("series.csv") + " --se se --band-out " + path("band.csv")), 0)
        << read("stderr.txt");
    const auto j = json("trend.json");
    EXPECT_GT(j["slope"].get<double>(), 0.0);
    EXPECT_NE(read("band.csv").find("year,fitted,lower95,upper95"), std::string::npos);
}

TEST_F(Cli, CapitalizeAppendsWealth) {
    write("cap.csv", "id,weight,income_dividends\n1,1,6710\n2,2,100\n3,1,0\n");
    write("spec.json", R"({"categories": ["dividends"], "fa_totals": {"dividends": 1000000}})");
    ASSERT_EQ(run("capitalize --input " + path("cap.csv") + " --spec " + path("spec.json")), 0) << read("stderr.txt");
    EXPECT_NE(read("capitalized.csv").find("wealth_cap"), std::string::npos);
    EXPECT_NEAR(json("rates.json")[0]["rates"]["dividends"]["rate"].get<double>(), 6910.0 / 1e6, 1e-15);
}

TEST_F(Cli, SimulateWritesEnvelope) {
    write("exp.json", R"({
      "calibration": {"label": "toy", "eta_hat": 0.39, "se": 0.01, "draws": 4, "sigma_high": [0.15]},
      "shock": {"start_year": 2000, "end_year": 2003, "delta_mu": 0.03},
      "grid": {"lo": -5, "hi": 20, "points": 1001},
      "dt": 0.1
    })");
    ASSERT_EQ(run("simulate --calib " + path("exp.json") + " --seed 1"), 0) << read("stderr.txt");
    const auto csv = read("envelope.csv");
    EXPECT_EQ(csv.rfind("year,sigmaH,median,lo95,hi95\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    ASSERT_EQ(run("simulate --calib " + path("exp.json") + " --seed 1 --out " + path("again.csv")), 0);
    EXPECT_EQ(read("again.csv"), csv);
}

TEST_F(Cli, MissingRequiredSeed) { EXPECT_EQ(run("bootstrap --input " + std::string(INEQ_CONFIG_DIR) + "/experiment_puf1973.json"), 64); }
