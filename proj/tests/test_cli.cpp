#include "gelfand/cli.hpp"
#include "gelfand/errors.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using gelfand::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("gelfand_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args, const std::string& sub = "") {
    const fs::path out = sub.empty() ? dir_ : dir_ / sub;
    args.push_back("--out");
    args.push_back(out.string());
    stdout_.str("");
    stderr_.str("");
    return run(args, stdout_, stderr_);
  }

  std::string read(const std::string& rel) const {
    std::ifstream is(dir_ / rel, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream stdout_;
  std::ostringstream stderr_;
};

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(CliFormat, TwelveSignificantDigits) {
  EXPECT_EQ(gelfand::cli::format_real(std::acos(-1.0), 12), "3.14159265359e+00");
  EXPECT_EQ(gelfand::cli::format_real(-0.000125, 3), "-1.25e-04");
  EXPECT_EQ(gelfand::cli::format_real(std::nan(""), 12), "nan");
  EXPECT_EQ(gelfand::cli::format_real(-INFINITY, 12), "-inf");
}

TEST_F(CliTest, ConfigFileParsing) {
  std::ofstream(dir_ / "run.cfg") << "# comment\n nr = 64 \n\nrect = 1 2  # trailing\n";
  const auto kv = gelfand::cli::read_config_file((dir_ / "run.cfg").string());
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0].first, "nr");
  EXPECT_EQ(kv[0].second, "64");
  EXPECT_EQ(kv[1].second, "1 2");
  std::ofstream(dir_ / "bad.cfg") << "nr 64\n";
  EXPECT_THROW(gelfand::cli::read_config_file((dir_ / "bad.cfg").string()), gelfand::InvalidSpec);
  EXPECT_THROW(gelfand::cli::read_config_file((dir_ / "missing.cfg").string()), gelfand::InvalidSpec);
}

TEST_F(CliTest, BranchDiskFiles) {
  ASSERT_EQ(call({"branch", "--disk", "--nr", "1024", "--lmin", "-10", "--lmax", "25.03", "--emax", "10"}), 0)
      << stderr_.str();
  const std::string branch = read("branch.csv");
  EXPECT_EQ(branch.substr(0, branch.find('\n')), "lambda,E,mu,g,sigma1,nu1,mean_z,min_z,mass_eu,newton_iters");
  const std::string diagram = read("diagram.csv");
  EXPECT_EQ(diagram.substr(0, diagram.find('\n')), "E,mu,lambda");
  EXPECT_NE(read("plot.gp").find("diagram.csv"), std::string::npos);

  const auto rows = csv_rows(diagram);
  const double four_pi = 4.0 * std::acos(-1.0);
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::abs(rows[i][2] - four_pi) < std::abs(rows[nearest][2] - four_pi)) nearest = i;
  EXPECT_NEAR(rows[nearest][1], 2.0, 1e-3);
  EXPECT_NEAR(rows.front()[2], -10.0, 1e-12);
  EXPECT_NEAR(rows.back()[2], 25.03, 1e-9);
}

TEST_F(CliTest, SquareEnergyIncreasing) {
  ASSERT_EQ(call({"branch", "--rect", "1", "1", "--n", "32"}), 0) << stderr_.str();
  const auto rows = csv_rows(read("branch.csv"));
  ASSERT_GT(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i][1], rows[i - 1][1]);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({"branch", "--disk", "--lmax", "26"}), 2);
  EXPECT_EQ(call({"branch", "--disk", "--bogus"}), 2);
  EXPECT_EQ(call({"branch"}), 2);
  EXPECT_EQ(call({"branch", "--disk", "--rect", "1", "1"}), 2);
  EXPECT_EQ(call({"branch", "--rect", "2", "1"}), 2);
  EXPECT_EQ(call({"spectrum", "--disk", "--lambda", "30"}), 2);
  EXPECT_EQ(call({"nonsense"}), 2);
  EXPECT_EQ(call({"branch", "--disk", "--format", "xml"}), 2);
  EXPECT_EQ(call({}), 2);
  EXPECT_EQ(call({"branch", "--help"}), 0);
}

TEST_F(CliTest, IncompleteBranchKeepsPartialFiles) {
  EXPECT_EQ(call({"branch", "--disk", "--nr", "16", "--lmax", "25.1"}), 3);
  EXPECT_EQ(read("branch.csv").rfind("# INCOMPLETE", 0), 0u);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  std::ofstream(dir_ / "run.cfg") << "disk = true\nnr = 48\nlmax = 5\n";
  const std::string cfg = (dir_ / "run.cfg").string();
  ASSERT_EQ(call({"branch", "--config", cfg}), 0) << stderr_.str();
  EXPECT_NE(stdout_.str().find("n_r=48"), std::string::npos);
  ASSERT_EQ(call({"branch", "--config", cfg, "--nr", "64"}), 0) << stderr_.str();
  EXPECT_NE(stdout_.str().find("n_r=64"), std::string::npos);
}

TEST_F(CliTest, JsonFormat) {
  ASSERT_EQ(call({"branch", "--disk", "--nr", "64", "--lmax", "5", "--format", "json"}), 0);
  const auto doc = nlohmann::json::parse(read("branch.json"));
  EXPECT_EQ(doc["columns"][0], "lambda");
  EXPECT_GT(doc["rows"].size(), 5u);
  EXPECT_FALSE(fs::exists(dir_ / "branch.csv"));
}

TEST_F(CliTest, VerifyCoarseDiskNamesFailure) {
  EXPECT_EQ(call({"verify", "--disk", "--nr", "32"}), 1);
  const auto doc = nlohmann::json::parse(read("report.json"));
  bool failed = false;
  for (const auto& c : doc["checks"]) failed = failed || !c["pass"].get<bool>();
  EXPECT_TRUE(failed);
  EXPECT_NE(stdout_.str().find("FAIL "), std::string::npos);
}

TEST_F(CliTest, VerifyReportKeysAndDeterminism) {
  ASSERT_EQ(call({"verify", "--disk", "--nr", "512"}, "a"), 0) << stdout_.str();
  ASSERT_EQ(call({"verify", "--disk", "--nr", "512"}, "b"), 0);
  for (const char* f : {"report.json", "branch.csv", "diagram.csv", "plot.gp"})
    EXPECT_EQ(read(std::string("a/") + f), read(std::string("b/") + f)) << f;
  const auto doc = nlohmann::ordered_json::parse(read("a/report.json"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  ASSERT_GE(keys.size(), 6u);
  EXPECT_EQ(std::vector<std::string>(keys.begin(), keys.begin() + 6),
            (std::vector<std::string>{"checks", "lambda_star", "E_star", "mu_star", "domain", "resolution"}));
  EXPECT_NEAR(doc["lambda_star"].get<double>(), 4.0 * std::acos(-1.0), 1e-3 * 4.0 * std::acos(-1.0));
  for (const auto& c : doc["checks"]) {
    EXPECT_TRUE(c.contains("name"));
    EXPECT_TRUE(c.contains("residual"));
    EXPECT_TRUE(c.contains("tolerance"));
  }
}

TEST_F(CliTest, SpectrumUniformDisk) {
  ASSERT_EQ(call({"spectrum", "--disk", "--uniform", "--k", "6"}), 0);
  const std::string text = read("spectrum.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,sigma,mode,multiplicity,residual,bessel_sigma");
  const auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 6u);
  const double expected = std::acos(-1.0) * 3.8317059702075125 * 3.8317059702075125;
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(rows[j][1], expected, 1e-3 * expected);
    EXPECT_EQ(rows[j][3], 3.0);
    EXPECT_NEAR(rows[j][5], expected, 1e-9 * expected);
  }
}

TEST_F(CliTest, SpectrumOnBranch) {
  ASSERT_EQ(call({"spectrum", "--disk", "--lambda", "12.0", "--k", "3"}), 0);
  for (const auto& row : csv_rows(read("spectrum.csv"))) EXPECT_GT(row[1], 0.0);
  ASSERT_EQ(call({"spectrum", "--rect", "1", "1", "--lambda", "0", "--k", "1"}), 0);
  const auto rows = csv_rows(read("spectrum.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0][1], 0.0);
  EXPECT_LE(rows[0][4], 1e-8);
}

TEST_F(CliTest, ClassifyDisk) {
  ASSERT_EQ(call({"classify", "--disk", "--nr", "512"}), 0);
  EXPECT_NE(read("classify.csv").find("FirstKindEvidence"), std::string::npos);
}

TEST_F(CliTest, SweepSortedAndThreadIndependent) {
  setenv("GELFAND_THREADS", "1", 1);
  EXPECT_EQ(gelfand::cli::sweep_threads(), 1u);
  ASSERT_EQ(call({"classify", "--rect-sweep", "1.0,0.1", "--n", "32"}, "one"), 0);
  setenv("GELFAND_THREADS", "2", 1);
  ASSERT_EQ(call({"classify", "--rect-sweep", "1.0,0.1", "--n", "32"}, "two"), 0);
  unsetenv("GELFAND_THREADS");
  const std::string one = read("one/classify.csv");
  EXPECT_EQ(one, read("two/classify.csv"));
  const auto rows = csv_rows(one);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[0][0], rows[1][0]);
}

TEST_F(CliTest, OracleTables) {
  ASSERT_EQ(call({"oracle", "--alpha", "1,3"}), 0);
  const auto rows = csv_rows(read("oracle.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0][2], 2.0, 1e-11);
  EXPECT_NEAR(rows[1][5], -2.0, 1e-11);
  EXPECT_NE(read("appendix.csv").find("\"J_0(mu_1,1 r)"), std::string::npos);
}
