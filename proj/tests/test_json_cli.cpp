#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "credal/cli.hpp"
#include "credal/error.hpp"
#include "credal/json_io.hpp"

using namespace credal;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("credal_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    write("pair.json", R"({"kind": "explicit", "worlds": [1, 2], "propositions": [[1], [2]]})");
    write("c77.json", R"({"values": [0.7, 0.7]})");
    write("c55.json", R"({"values": [0.5, 0.5]})");
    write("brier.json", R"({"preset": "brier"})");
    write("walsh.json", R"({"preset": "walsh"})");
    write("tails.json", R"({"kind": "tails", "truncation": 16})");
    write("invsqrt.json", R"({"rule": "inv_sqrt"})");
    write("bad_value.json", R"({"values": [0.7, 1.5]})");
    write("broken.json", "{\"values\": [0.7,\n  }");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  struct Result {
    int code;
    std::string out;
    std::string err;
    json report() const { return json::parse(out); }
  };

  Result run(std::vector<std::string> args) const {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CoherenceReport) {
  const auto r = run({"coherence", "-c", path("c77.json"), "-s", path("pair.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  const auto j = r.report();
  EXPECT_EQ(j["verb"], "coherence");
  EXPECT_EQ(j["mode"], "float");
  EXPECT_EQ(j["coherence"]["status"], "incoherent");
}

TEST_F(Cli, DominanceRepairRational) {
  const auto r = run({"dominance", "-c", path("c77.json"), "-s", path("pair.json"), "-m", path("brier.json"), "--repair",
                      "--mode", "rational"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  const auto j = r.report();
  EXPECT_EQ(j["verdict"], "strongly_dominates");
  EXPECT_EQ(j["pi_c"], json::array({"1/2", "1/2"}));
  EXPECT_EQ(j["gap"], "2/25");
}

TEST_F(Cli, DominanceCompare) {
  const auto r = run({"dominance", "-c", path("c77.json"), "-d", path("c55.json"), "-s", path("pair.json"), "-m",
                      path("brier.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  EXPECT_EQ(r.report()["verdict"], "strongly_dominates");
}

TEST_F(Cli, ProjectReportsSlack) {
  const auto r = run({"project", "-c", path("c77.json"), "-s", path("pair.json"), "-m", path("walsh.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  const auto j = r.report();
  EXPECT_TRUE(j["pythagorean_holds"].get<bool>());
  EXPECT_EQ(j["pythagorean_slack"].size(), 2u);
}

TEST_F(Cli, ScoreDivergesOnTails) {
  const auto r = run({"score", "-c", path("invsqrt.json"), "-s", path("tails.json"), "-m", path("brier.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  for (const auto& row : r.report()["per_atom"]) {
    EXPECT_TRUE(row["score"]["inf"].get<bool>());
    EXPECT_EQ(row["score"]["tag"], "harmonic comparison");
  }
}

TEST_F(Cli, ScoreJobsDeterministic) {
  const std::vector<std::string> base = {"score", "-c", path("invsqrt.json"), "-s", path("tails.json"), "-m",
                                         path("walsh.json")};
  auto with_jobs = base;
  with_jobs.insert(with_jobs.end(), {"--jobs", "4"});
  EXPECT_EQ(run(base).out, run(with_jobs).out);
}

TEST_F(Cli, OutputIsByteIdentical) {
  const std::vector<std::string> args = {"stability", "-s", path("tails.json"), "--budget", "50", "--seed", "3"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST_F(Cli, SeedFromEnvironment) {
  const std::vector<std::string> args = {"reproduce", "walsh", "--samples", "10", "--seed", "1"};
  const auto a = run(args).report();
  ::setenv("CREDAL_SEED", "12345", 1);
  const auto b = run(args).report();
  ::unsetenv("CREDAL_SEED");
  EXPECT_EQ(a["data"]["seed"], 1);
  EXPECT_EQ(b["data"]["seed"], 12345);
}

TEST_F(Cli, CompactifyAndQuotient) {
  const auto c = run({"compactify", "-s", path("tails.json")});
  ASSERT_EQ(c.code, cli::kExitOk) << c.out;
  EXPECT_EQ(c.report()["compactness"], "compact_certified");
  EXPECT_EQ(c.report()["added_points"].size(), 1u);
  const auto q = run({"quotient", "-s", path("pair.json")});
  ASSERT_EQ(q.code, cli::kExitOk) << q.out;
  EXPECT_EQ(q.report()["atoms"].size(), 2u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"frobnicate", "-c", path("missing.json")}).code, cli::kExitParse);
  EXPECT_EQ(run({}).code, cli::kExitParse);

  const auto broken = run({"coherence", "-c", path("broken.json"), "-s", path("pair.json")});
  EXPECT_EQ(broken.code, cli::kExitParse);
  EXPECT_EQ(broken.report()["error"], "parse-error");
  EXPECT_NE(broken.report()["location"].get<std::string>().find("broken.json:"), std::string::npos);

  const auto bad = run({"score", "-c", path("bad_value.json"), "-s", path("pair.json"), "-m", path("brier.json")});
  EXPECT_EQ(bad.code, cli::kExitPrecondition);
  EXPECT_EQ(bad.report()["error"], "invalid-credence");

  EXPECT_EQ(run({"score", "-c", path("c77.json")}).code, cli::kExitParse);
  EXPECT_EQ(run({"coherence", "-c", path("c77.json"), "-s", path("pair.json"), "--mode", "fast"}).code,
            cli::kExitParse);
}

TEST_F(Cli, SchemaErrorsCarryPointer) {
  write("wrong.json", R"({"kind": "explicit", "worlds": [1, 2], "propositions": [[1], "x"]})");
  const auto r = run({"quotient", "-s", path("wrong.json")});
  EXPECT_EQ(r.code, cli::kExitParse);
  EXPECT_NE(r.report()["location"].get<std::string>().find("#/propositions/1"), std::string::npos);
}

TEST_F(Cli, BinaryMatchesInProcess) {
  const std::string out_file = path("out.json");
  const std::string cmd = std::string(CREDAL_CLI_PATH) + " quotient -s " + path("pair.json") + " > " + out_file +
                          " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), run({"quotient", "-s", path("pair.json")}).out);

  const int bad = std::system((std::string(CREDAL_CLI_PATH) + " nope >/dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), cli::kExitParse);
}

TEST(JsonIo, RationalNumbers) {
  EXPECT_EQ(io::number(Rational(2, 25), Mode::Rational), "2/25");
  const auto c = io::parse_credence(io::parse_text(R"({"values": [0.1, "1/3"]})", "inline"), "inline");
  EXPECT_EQ(c.exact_at(0), Rational(1, 10));
  EXPECT_EQ(c.exact_at(1), Rational(1, 3));
  // leading zeros are decimal, not octal
  EXPECT_EQ(parse_rational("0.055"), Rational(11, 200));
  EXPECT_EQ(parse_rational("010/08"), Rational(5, 4));
}

TEST(JsonIo, SpaceRoundTrip) {
  for (const auto& s : {OpinionSpace::explicit_finite({1, 2, 3}, {{1}, {2, 3}}), OpinionSpace::tail_sets(12),
                        OpinionSpace::partition(std::nullopt, 7), OpinionSpace::initial_segments(5)}) {
    const auto j = io::space_to_json(s);
    const auto back = io::parse_space(io::parse_text(io::dump(j), "rt"), "rt");
    EXPECT_EQ(back, s);
  }
}
