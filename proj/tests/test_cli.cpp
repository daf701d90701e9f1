#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evc/cli.hpp"

namespace evc {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = cli_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string config(const std::string& name) { return std::string(EVC_SOURCE_DIR) + "/configs/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string c; std::getline(in, c, sep);) out.push_back(c);
  return out;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("evc-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

using Simulate = TempDir;

TEST_F(Simulate, HonestRunWritesEveryArtifact) {
  const fs::path tr = dir_ / "t.jsonl", hx = dir_ / "t.hex", lg = dir_ / "l.csv", au = dir_ / "a.jsonl";
  CliResult r = cli({"simulate", config("honest.json"), "--transcript", tr.string(), "--hexdump", hx.string(), "--ledger",
               lg.string(), "--audit", au.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("| pad accepts | 5 |"), std::string::npos);
  EXPECT_NE(r.out.find("| billed total | 15 |"), std::string::npos);

  auto events = lines(slurp(tr));
  ASSERT_FALSE(events.empty());
  for (const auto& l : events) {
    auto j = nlohmann::json::parse(l);
    EXPECT_TRUE(j.contains("clock") && j.contains("entity") && j.contains("event") && j.contains("phase_before") &&
                j.contains("phase_after") && j.contains("msg_tag"));
  }

  // tag dir src dst len hex
  auto hex = lines(slurp(hx));
  ASSERT_FALSE(hex.empty());
  for (const auto& l : hex) {
    auto cols = split(l, ' ');
    ASSERT_EQ(cols.size(), 6u) << l;
    EXPECT_EQ(cols[5].size(), 2 * std::stoul(cols[4])) << l;
  }
  EXPECT_EQ(hex.front().rfind("m1 ", 0), 0u);

  auto ledger = lines(slurp(lg));
  ASSERT_EQ(ledger.size(), 2u);
  EXPECT_EQ(ledger[0], "pid_hex,rsu_id,pads,rate,cost");
  EXPECT_EQ(ledger[1].substr(64), ",0,5,3,15");

  auto audit = lines(slurp(au));
  ASSERT_EQ(audit.size(), 1u);
  auto a = nlohmann::json::parse(audit[0]);
  EXPECT_EQ(a["accepts"], 5);
  EXPECT_EQ(a["terminated"], true);
}

TEST_F(Simulate, ExpectedDisputeAndAttacksExitZero) {
  for (const char* name : {"billing.json", "billing-inflated.json", "replay.json", "free-ride.json"}) {
    CliResult r = cli({"simulate", config(name)});
    EXPECT_EQ(r.code, kExitOk) << name << "\n" << r.out << r.err;
  }
  CliResult csv = cli({"simulate", config("billing.json"), "--format", "csv"});
  EXPECT_NE(csv.out.find("billed total,61,"), std::string::npos) << csv.out;
}

TEST_F(Simulate, UnmetExpectationExitsOne) {
  auto j = nlohmann::json::parse(slurp(config("honest.json")));
  j["expect"] = {{"adversarial", true}, {"errors", {"FreshnessError"}}};
  const fs::path p = dir_ / "unmet.json";
  std::ofstream(p) << j.dump();
  EXPECT_EQ(cli({"simulate", p.string()}).code, kExitDefenseFailed);

  // An undisclosed dispute also fails the run.
  j = nlohmann::json::parse(slurp(config("billing-inflated.json")));
  j.erase("expect");
  std::ofstream(p) << j.dump();
  EXPECT_EQ(cli({"simulate", p.string()}).code, kExitDefenseFailed);
}

TEST_F(Simulate, BadInputExitsTwo) {
  EXPECT_EQ(cli({"simulate"}).code, kExitUsage);
  EXPECT_EQ(cli({"simulate", (dir_ / "missing.json").string()}).code, kExitUsage);

  const fs::path garbage = dir_ / "garbage.json";
  std::ofstream(garbage) << "{ not json";
  CliResult r = cli({"simulate", garbage.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());

  const fs::path unknown = dir_ / "unknown.json";
  std::ofstream(unknown) << R"({"vehicles": [], "adversary": [{"action": "drop", "src": "EV-7"}]})";
  r = cli({"simulate", unknown.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("EV-7"), std::string::npos) << r.err;

  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"sizes", "--format", "xml"}).code, kExitUsage);
}

TEST(Sizes, TableMatchesEncodings) {
  CliResult r = cli({"sizes"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("| m5 | 32 + 64 + 8 | 104 |"), std::string::npos);
  EXPECT_NE(r.out.find("| m16 | 32 + 8 | 40 |"), std::string::npos);
  EXPECT_NE(r.out.find("| m7 | 32 + 32 + 64 + 32 + 8 | 168 |"), std::string::npos);
  EXPECT_NE(r.out.find("[1]"), std::string::npos);

  CliResult csv = cli({"sizes", "--format", "csv"});
  ASSERT_EQ(csv.code, kExitOk);
  auto rows = lines(csv.out);
  ASSERT_GE(rows.size(), 13u);
  EXPECT_EQ(rows[0], "message,fields,bytes,note");
  const std::vector<std::pair<std::string, std::string>> want = {
      {"m5", "104"}, {"m6", "136"}, {"m7", "168"}, {"m8", "72"},  {"m9", "104"}, {"m10", "72"},
      {"m11", "73"}, {"m12", "72"}, {"m13", "33"}, {"m14", "32"}, {"m15", "65"}, {"m16", "40"}};
  for (std::size_t i = 0; i < want.size(); ++i) {
    auto cols = split(rows[i + 1], ',');
    ASSERT_GE(cols.size(), 3u);
    EXPECT_EQ(cols[0], want[i].first);
    EXPECT_EQ(cols[2], want[i].second);
  }
}

TEST(Bench, ReportsFourOrderedRows) {
  CliResult r = cli({"bench", "-n", "3", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto rows = lines(r.out);
  ASSERT_GE(rows.size(), 5u);
  EXPECT_EQ(rows[0], "primitive,avg_ms,min_ms,max_ms");
  const std::vector<std::string> names = {"T_mul", "T_exp", "T_pair", "T_h"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto cols = split(rows[i + 1], ',');
    ASSERT_EQ(cols.size(), 4u);
    EXPECT_EQ(cols[0], names[i]);
    const double avg = std::stod(cols[1]), mn = std::stod(cols[2]), mx = std::stod(cols[3]);
    EXPECT_LE(mn, avg);
    EXPECT_LE(avg, mx);
    EXPECT_GT(mn, 0.0);
  }
  EXPECT_EQ(cli({"bench", "-n", "0"}).code, kExitUsage);
}

TEST(AttackSuiteCli, ExitCodeFollowsTheVerdicts) {
  CliResult ok = cli({"attack-suite", "--format", "csv"});
  EXPECT_EQ(ok.code, kExitOk);
  auto rows = lines(ok.out);
  ASSERT_GE(rows.size(), 7u);
  EXPECT_EQ(rows[0], "attack,defense,expected,observed,verdict");
  for (std::size_t i = 1; i <= 6; ++i) EXPECT_EQ(rows[i].substr(rows[i].rfind(',') + 1), "held") << rows[i];

  CliResult bad = cli({"attack-suite", "--disable-freshness"});
  EXPECT_EQ(bad.code, kExitDefenseFailed);
  EXPECT_NE(bad.out.find("replay"), std::string::npos);
}

}  // namespace
}  // namespace evc
