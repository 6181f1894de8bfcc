#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fucpm/cli.hpp>

#include "test_support.hpp"

namespace fucpm {
namespace {

namespace fs = std::filesystem;
using namespace fucpm::testing;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fucpm_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    const auto r = running_example();
    cli::write_file(path("db.txt"), serialize_database(r.db));
    cli::write_file(path("eut.txt"), serialize_utility_table(r.db, r.eut));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    diag_.str("");
    return cli::run(args, out_, diag_);
  }

  fs::path dir_;
  std::ostringstream out_, diag_;
};

TEST_F(CliTest, MineWritesResultsAndReport) {
  ASSERT_EQ(run({"mine", path("db.txt"), path("eut.txt"), "--xi", "0.25", "--out", path("r.txt")}), 0) << diag_.str();
  EXPECT_EQ(cli::read_file(path("r.txt"), "results"), "b f -1 #UTIL: 27\na -1 c -1 #UTIL: 36\n");
  const auto j = nlohmann::json::parse(out_.str());
  EXPECT_EQ(j["command"], "mine");
  EXPECT_EQ(j["db_utility"], 106);
  EXPECT_EQ(j["min_utility"], "26.5");
  EXPECT_EQ(j["stats"]["candidates"], 65);
  EXPECT_EQ(j["stats"]["hucsps"], 2);
  EXPECT_EQ(j["stats"]["esr"], "3.08%");
}

TEST_F(CliTest, MineReportToFile) {
  ASSERT_EQ(run({"mine", path("db.txt"), path("eut.txt"), "--xi", "25%", "--out", path("r.txt"), "--report",
                 path("rep.json")}),
            0);
  EXPECT_TRUE(out_.str().empty());
  const auto j = nlohmann::json::parse(cli::read_file(path("rep.json"), "report"));
  EXPECT_EQ(j["stats"]["hucsps"], 2);
}

TEST_F(CliTest, MissingUtilityTable) {
  EXPECT_EQ(run({"mine", path("db.txt"), path("nope.txt"), "--xi", "0.25", "--out", path("r.txt")}), 1);
  EXPECT_NE(diag_.str().find("missing external utility"), std::string::npos);
}

TEST_F(CliTest, ThresholdOutOfRange) {
  EXPECT_EQ(run({"mine", path("db.txt"), path("eut.txt"), "--xi", "1.5", "--out", path("r.txt")}), 1);
  EXPECT_NE(diag_.str().find("threshold out of range"), std::string::npos);
}

TEST_F(CliTest, ParseErrorIsInputError) {
  cli::write_file(path("bad.txt"), "a:1 -1\n");
  EXPECT_EQ(run({"mine", path("bad.txt"), path("eut.txt"), "--xi", "0.25", "--out", path("r.txt")}), 1);
}

TEST_F(CliTest, UnknownSubcommand) { EXPECT_EQ(run({"frobnicate"}), 1); }

TEST_F(CliTest, CheckAgrees) {
  EXPECT_EQ(run({"check", path("db.txt"), path("eut.txt"), "--xi", "0.25"}), 0) << diag_.str();
  EXPECT_EQ(run({"check", path("db.txt"), path("eut.txt"), "--xi", "0", "--no-luip", "--no-guip"}), 0);
  EXPECT_EQ(run({"check", path("db.txt"), path("eut.txt"), "--xi", "0.05", "--max-len", "2"}), 0);
}

TEST_F(CliTest, CheckDetectsCorruptedMiner) {
  const auto data = cli::load(path("db.txt"), path("eut.txt"));
  MiningConfig cfg;
  cfg.xi = "0.25";
  std::ostringstream diag;
  const int code = cli::check(data, cfg, kDefaultOracleCap, diag, [](const auto& db, const auto& eut, const auto& c) {
    return mine(db, eut, c, [](Utility u, const Threshold& t) { return !luip_admits(u, t); });
  });
  EXPECT_EQ(code, cli::kMismatch);
  EXPECT_NE(diag.str().find("oracle only"), std::string::npos);
}

TEST_F(CliTest, CheckOracleCap) {
  EXPECT_EQ(run({"check", path("db.txt"), path("eut.txt"), "--xi", "0.25", "--oracle-cap", "10"}), 3);
}

TEST_F(CliTest, AssertBoundsRunsClean) {
  EXPECT_EQ(run({"mine", path("db.txt"), path("eut.txt"), "--xi", "0", "--assert-bounds", "--out", path("r.txt")}), 0);
}

TEST_F(CliTest, GenIsDeterministicAndValid) {
  const std::vector<std::string> common = {"gen", "--sequences", "1000", "--items", "200", "--seed", "7"};
  auto args = common;
  args.insert(args.end(), {"--out-db", path("g1.txt"), "--out-eut", path("g1_eut.txt")});
  ASSERT_EQ(run(args), 0) << diag_.str();
  args = common;
  args.insert(args.end(), {"--out-db", path("g2.txt"), "--out-eut", path("g2_eut.txt")});
  ASSERT_EQ(run(args), 0);
  EXPECT_EQ(cli::read_file(path("g1.txt"), "db"), cli::read_file(path("g2.txt"), "db"));
  EXPECT_EQ(cli::read_file(path("g1_eut.txt"), "eut"), cli::read_file(path("g2_eut.txt"), "eut"));
  const auto data = cli::load(path("g1.txt"), path("g1_eut.txt"));
  EXPECT_EQ(data.db.sequences.size(), 1000u);
}

TEST_F(CliTest, GenRejectsZeroSequences) {
  EXPECT_EQ(run({"gen", "--sequences", "0", "--out-db", path("g.txt"), "--out-eut", path("g_eut.txt")}), 1);
  EXPECT_NE(diag_.str().find("sequence_count must be >= 1"), std::string::npos);
}

TEST_F(CliTest, BenchEmitsOneReportPerThreshold) {
  ASSERT_EQ(run({"bench", path("db.txt"), path("eut.txt"), "--xi", "0.1,0.25,0.5"}), 0) << diag_.str();
  std::istringstream lines(out_.str());
  std::vector<nlohmann::json> reports;
  for (std::string line; std::getline(lines, line);) reports.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0]["config"]["xi"], "0.1");
  for (std::size_t k = 1; k < reports.size(); ++k)
    EXPECT_LE(reports[k]["stats"]["candidates"].get<std::uint64_t>(),
              reports[k - 1]["stats"]["candidates"].get<std::uint64_t>());
}

TEST_F(CliTest, BenchNeedsThresholds) { EXPECT_EQ(run({"bench", path("db.txt"), path("eut.txt")}), 1); }

}  // namespace
}  // namespace fucpm
