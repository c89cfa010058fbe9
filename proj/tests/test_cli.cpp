#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "pinflip");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = pinflip::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

std::string temp_path(const std::string& name) {
  const char* dir = std::getenv("TMPDIR");
  return std::string(dir ? dir : "/tmp") + "/pinflip_test_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, TwoSiteGapIsOne) {
  auto r = call({"gap", "--N", "2", "--lambda", "3", "--sigma", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_EQ(j["schema"], "pinflip/1");
  EXPECT_NEAR(j["gap"].get<double>(), 1.0, 1e-10);
}

TEST(Cli, RenewalCheck) {
  auto r = call({"exact", "--N", "10", "--lambda", "4", "--sigma", "1", "--renewal-check"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_LT(j["renewal_check"]["defect"].get<double>(), 1e-10);
  EXPECT_TRUE(j["renewal_check"]["ok"].get<bool>());
}

TEST(Cli, PhaseCsvColumns) {
  auto r = call({"phase", "--lambda", "1:4:1", "--sigma", "0.5:1:0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lambda,sigma,F,G,Gprime,E,beta_star,sigma0,static_regime,dynamic_regime");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
  }
  EXPECT_EQ(rows, 8);
}

TEST(Cli, SampleIsDeterministicGivenSeed) {
  const std::vector<std::string> args = {"sample", "--N", "8", "--lambda", "3", "--sigma", "1",
                                         "--seed", "42", "--replicas", "20", "--format", "csv"};
  auto a = call(args);
  auto b = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto more = args;
  more.insert(more.end(), {"--jobs", "3"});
  EXPECT_EQ(call(more).out, a.out);
  auto other = args;
  other[8] = "43";
  EXPECT_NE(call(other).out, a.out);
}

TEST(Cli, SimulateFilesAreDeterministic) {
  const std::string out1 = temp_path("sim1.csv"), out2 = temp_path("sim2.csv");
  const std::string ev1 = temp_path("ev1.bin"), ev2 = temp_path("ev2.bin");
  for (auto [out, ev] : {std::pair{out1, ev1}, std::pair{out2, ev2}}) {
    auto r = call({"simulate", "--N", "6", "--lambda", "3", "--sigma", "1", "--seed", "9", "--horizon", "20",
                   "--out", out, "--events", ev});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_FALSE(slurp(out1).empty());
  EXPECT_EQ(slurp(out1), slurp(out2));
  EXPECT_FALSE(slurp(ev1).empty());
  EXPECT_EQ(slurp(ev1), slurp(ev2));
  for (const auto& p : {out1, out2, ev1, ev2}) std::remove(p.c_str());
}

TEST(Cli, MissingSeedIsValidationError) {
  auto r = call({"sample", "--N", "4", "--lambda", "3", "--sigma", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(parse(r.err)["error"]["kind"], "validation");
}

TEST(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(call({"gap", "--N", "0", "--lambda", "1", "--sigma", "1"}).code, 2);
  EXPECT_EQ(call({"gap", "--N", "4", "--lambda", "-1", "--sigma", "1"}).code, 2);
  EXPECT_EQ(call({"exact", "--N", "4", "--lambda", "1", "--sigma", "1", "--format", "xml"}).code, 2);
  EXPECT_EQ(call({"nonsense"}).code, 2);
  // No barrier in the fast phase, so there is no metastable well.
  EXPECT_EQ(call({"metastable", "--N", "10", "--lambda", "1", "--sigma", "1", "--seed", "1"}).code, 2);
}

TEST(Cli, BudgetRefusalExitsThree) {
  auto r = call({"metastable", "--N", "200", "--lambda", "20", "--sigma", "2.5", "--seed", "1"});
  ASSERT_EQ(r.code, 3);
  auto e = parse(r.err)["error"];
  EXPECT_EQ(e["kind"], "capacity");
  EXPECT_GT(e["predicted_scale"].get<double>(), e["budget"].get<double>());
}

TEST(Cli, ConfigFileAndEnvironmentSeed) {
  const std::string cfg = temp_path("run.toml");
  {
    std::ofstream f(cfg);
    f << "N = 5\nlambda = 3\nsigma = 1\nseed = 11\nreplicas = 4\nformat = \"csv\"\n";
  }
  auto from_file = call({"sample", "--config", cfg});
  auto from_flags = call({"sample", "--N", "5", "--lambda", "3", "--sigma", "1", "--seed", "11", "--replicas", "4",
                          "--format", "csv"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, from_flags.out);
  std::remove(cfg.c_str());

  ::setenv("PINFLIP_SEED", "11", 1);
  auto from_env = call({"sample", "--N", "5", "--lambda", "3", "--sigma", "1", "--replicas", "4", "--format", "csv"});
  ::unsetenv("PINFLIP_SEED");
  EXPECT_EQ(from_env.out, from_flags.out);
}

TEST(Cli, GapSweepRows) {
  auto r = call({"gap", "--N", "2:6:2", "--lambda", "6", "--sigma", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(call({"--help"}).code, 0); }
