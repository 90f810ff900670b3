#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hems/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hems");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = hems::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hems_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST(Cli, ValidatePassesWithFixedSeed) {
  const auto r = cli({"validate", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS lp-vertex: 500 cases"), std::string::npos);
  EXPECT_NE(r.out.find("PASS ul-brute-force: 1000 cases"), std::string::npos);
  EXPECT_NE(r.out.find("PASS joint-decomposition: 200 cases"), std::string::npos);
  EXPECT_EQ(cli({"validate", "--seed", "7"}).out, r.out);
}

TEST(Cli, MissingConfigIsAConfigurationError) {
  const auto r = cli({"simulate-day", "--config", "/definitely/not/here.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST(Cli, UnknownFlagPrintsUsage) {
  const auto r = cli({"simulate-day", "--frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage: hems"), std::string::npos);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"case-grid", "--preset", "table9"}).code, 2);
}

TEST(Cli, InvalidConfigIsAConfigurationError) {
  const auto dir = temp_dir("invalid");
  std::ofstream(dir / "c.json") << R"({"building": {"windows": 2}})";
  const auto r = cli({"simulate-day", "--config", (dir / "c.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config.building.windows: unknown key"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, SimulateDayWritesResults) {
  const auto dir = temp_dir("day");
  std::ofstream(dir / "c.json") << R"({"building": {"variant": "HVAC"}, "comfort": {"preset": "flex"}})";
  const auto r = cli({"simulate-day", "--config", (dir / "c.json").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("start washing_machine at"), std::string::npos);
  EXPECT_EQ(line_count(dir / "out" / "trajectory.csv"), 193u);
  EXPECT_EQ(line_count(dir / "out" / "metrics.csv"), 2u);
  fs::remove_all(dir);
}

TEST(Cli, CaseGridWritesTwelveRows) {
  const auto dir = temp_dir("grid");
  const auto r = cli({"case-grid", "--days", "1", "--threads", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "metrics.csv"), 13u);
  const auto sweep = cli({"case-grid", "--preset", "ua-sweep", "--days", "1", "--out", dir.string()});
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  EXPECT_EQ(line_count(dir / "metrics.csv"), 5u);
  fs::remove_all(dir);
}

TEST(Cli, ExportLpWritesTheDayProblem) {
  const auto dir = temp_dir("lp");
  const auto r = cli({"export-lp", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "day.lp");
  std::string first;
  std::getline(in, first);
  EXPECT_FALSE(first.empty());
  const auto piped = cli({"export-lp"});
  EXPECT_NE(piped.out.find("dyn_room_0"), std::string::npos);
  fs::remove_all(dir);
}
