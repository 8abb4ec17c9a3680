#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "equid/cli.hpp"
#include "equid/corpus.hpp"

using namespace equid;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_file(const std::string& name) { return std::string(EQUID_DATA_DIR) + "/corpus/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("equid_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("EQUID_BUDGET");
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CheckReportsVerdict) {
  const auto r = run({"check", "--system", corpus_file("ab.json"), "--q", "12"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("equidistributed").get<bool>());

  const auto d = run({"check", "--system", corpus_file("t_2t1.json"), "--q", "2"});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  EXPECT_TRUE(json::parse(d.out).contains("equidistributed"));
}

TEST_F(CliTest, SnfPrintsInvariantFactors) {
  const auto r = run({"snf", "--system", corpus_file("t_t3.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("derivatives_independent").get<bool>());
  EXPECT_NE(r.out.find("\"3\""), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"check", "--system", corpus_file("ab.json"), "--q", "12", "--nope"}).code, kExitUsage);
  EXPECT_EQ(run({"check", "--system", corpus_file("ab.json")}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({"check", "--system", corpus_file("ab.json"), "--q", "1"}).code, kExitPrecondition);
  EXPECT_EQ(run({"check", "--system", path("missing.json"), "--q", "5"}).code, kExitPrecondition);
  EXPECT_EQ(run({"vcount", "--system", corpus_file("t_t3.json"), "--N", "5", "--q", "1009", "--budget", "1000"}).code,
            kExitBudget);
  EXPECT_EQ(run({"count", "--system", corpus_file("ab.json"), "--q", "5", "--x", "1e9", "--budget", "1e6"}).code,
            kExitBudget);
}

TEST_F(CliTest, EnvironmentBudgetOverridesFlag) {
  ::setenv("EQUID_BUDGET", "1000", 1);
  const auto r = run({"vcount", "--system", corpus_file("t_t3.json"), "--N", "5", "--q", "1009", "--budget", "1e12"});
  ::unsetenv("EQUID_BUDGET");
  EXPECT_EQ(r.code, kExitBudget);
}

TEST_F(CliTest, VcountMatchesLibrary) {
  const auto r = run({"vcount", "--system", corpus_file("t.json"), "--N", "2", "--q", "5", "--w", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out).at("count").get<u64>(), 3u);
  const auto t = run({"vcount", "--system", corpus_file("t.json"), "--N", "2", "--q", "5", "--full-table",
                      path("dist.csv")});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_EQ(slurp(path("dist.csv")), "#q=5,M=1,N=2,total=16\nw_1,count\n0,4\n1,3\n2,3\n3,3\n4,3\n");
}

TEST_F(CliTest, CharsumSingleAndSweep) {
  const auto r = run({"charsum", "--system", corpus_file("t.json"), "--mod", "5", "--r", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(json::parse(r.out).at("re").get<double>(), -1.0, 1e-12);
  const auto w = run({"charsum", "--system", corpus_file("t_t3.json"), "--mod", "7", "--sweep", "weil", "--out",
                      path("weil.csv")});
  ASSERT_EQ(w.code, kExitOk) << w.err;
  const auto csv = slurp(path("weil.csv"));
  EXPECT_EQ(csv.rfind("modulus,tuple,abs_Z,bound,ratio\n", 0), 0u);
  EXPECT_EQ(run({"charsum", "--system", corpus_file("t.json"), "--mod", "8", "--sweep", "weil"}).code,
            kExitPrecondition);
}

TEST_F(CliTest, CountWritesCsv) {
  const auto r = run({"count", "--system", corpus_file("t_t3.json"), "--q", "5", "--x", "1e4", "--restrict", "pk:2",
                      "--out", path("c.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto csv = slurp(path("c.csv"));
  EXPECT_EQ(csv.rfind("#x=10000,q=5,M=2,restriction=pk:2,total=", 0), 0u);
  EXPECT_NE(csv.find("\nb_1,b_2,count\n"), std::string::npos);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 2u + 25u);
}

TEST_F(CliTest, DryRunSkipsWork) {
  const auto r = run({"count", "--system", corpus_file("ab.json"), "--q", "5", "--x", "1e8", "--dry-run", "--out",
                      path("never.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(json::parse(r.out).at("dry_run").get<bool>());
  EXPECT_FALSE(fs::exists(path("never.csv")));
}

TEST_F(CliTest, ManifestRoundTripAndReplay) {
  const auto first = run({"count", "--system", corpus_file("ab.json"), "--q", "7", "--x", "50000", "--out",
                          path("a.csv"), "--manifest-out", path("m.json"), "--seed", "9"});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  const std::string csv1 = slurp(path("a.csv"));
  ASSERT_FALSE(csv1.empty());

  const auto m = ExperimentManifest::from_json(json::parse(slurp(path("m.json"))));
  EXPECT_EQ(m.command, (std::vector<std::string>{"count"}));
  EXPECT_EQ(m.seed, 9u);
  EXPECT_EQ(m.parameters.at("q"), "7");
  EXPECT_EQ(m.outputs.at("out"), path("a.csv"));
  EXPECT_EQ(ExperimentManifest::from_json(m.to_json()), m);

  fs::remove(path("a.csv"));
  const auto replay = run({"manifest", path("m.json")});
  ASSERT_EQ(replay.code, kExitOk) << replay.err;
  EXPECT_EQ(slurp(path("a.csv")), csv1);

  fs::remove(path("a.csv"));
  EXPECT_EQ(run({"manifest", path("m.json"), "--dry-run"}).code, kExitOk);
  EXPECT_FALSE(fs::exists(path("a.csv")));
}

TEST_F(CliTest, ManifestRejectsGarbage) {
  std::ofstream(path("bad.json")) << "{\"seed\": 1}";
  EXPECT_EQ(run({"manifest", path("bad.json")}).code, kExitPrecondition);
  std::ofstream(path("worse.json")) << "not json";
  EXPECT_EQ(run({"manifest", path("worse.json")}).code, kExitPrecondition);
}

TEST_F(CliTest, ExperimentSmoke) {
  const auto r = run({"experiment", "cex6.1", "--q", "11", "--x", "1e4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(json::parse(r.out).contains("ratio_restricted"));
  EXPECT_EQ(run({"experiment", "cex6.1", "--q", "10", "--x", "1e4"}).code, kExitPrecondition);
  EXPECT_EQ(run({"experiment", "nonsense", "--q", "11", "--x", "1e4"}).code, kExitPrecondition);
}

TEST(Corpus, FilesMatchBuiltIns) {
  for (const auto& spec : corpus()) EXPECT_FALSE(spec.functions.empty()) << spec.name;
  const auto file = load_system_file(corpus_file("t_t3.json"));
  const auto built = corpus_entry("T,T^3");
  EXPECT_EQ(file.polys(), built.polys());
  EXPECT_THROW(corpus_entry("no such system"), std::exception);
}

TEST(Json, PolyRoundTrip) {
  const IntPoly p{-1, 0, 0, 1};
  EXPECT_EQ(poly_to_json(p), json::parse(R"(["-1","0","0","1"])"));
  EXPECT_EQ(poly_from_json(poly_to_json(p)), p);
  EXPECT_EQ(poly_from_json(json::parse("[3, -2]")), (IntPoly{3, -2}));
}

TEST_F(CliTest, DiscrepancySweepWritesCsv) {
  const auto r = run({"discrepancy", "--system", corpus_file("ab.json"), "--qs", "3-5,7", "--x", "1e4", "--out",
                      path("d.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto csv = slurp(path("d.csv"));
  EXPECT_EQ(csv.rfind("#x=10000,M=1,restriction=none\nq,total,max_rel_dev\n3,10000,", 0), 0u);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 2u + 4u);
  EXPECT_EQ(run({"discrepancy", "--system", corpus_file("ab.json"), "--qs", "5-3", "--x", "1e4"}).code,
            kExitPrecondition);
}
