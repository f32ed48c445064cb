#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "lrpop/cp_json.h"
#include "lrpop/pipeline.h"
#include "test_util.h"

namespace lrpop {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("lrpop_cli_") + info->name() + "_" +
                                        std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  CliRun Cli(const std::string& args) const {
    const std::string out = Path("stdout.txt");
    const std::string err = Path("stderr.txt");
    const std::string cmd = std::string(LRPOP_CLI) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
  }

  void WriteText(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name)) << text;
  }

  fs::path dir_;
};

TEST_F(CliTest, SolveExample) {
  const CliRun r = Cli("solve " + test::data_path("five_var_r2.json") + " -k 3 --out " + Path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lower bound"), std::string::npos);
  const RunReport rep = parse_report(Slurp(Path("r.json")));
  const CPPoly f = read_cp_file(test::data_path("five_var_r2.json"));
  ASSERT_TRUE(rep.lower_bound.has_value());
  EXPECT_LE(*rep.lower_bound, test::sample_min(f, 10000, 5) + 1e-6);
  EXPECT_EQ(rep.order, 3);
  EXPECT_EQ(serialize_report(rep) + "\n", Slurp(Path("r.json")));
}

TEST_F(CliTest, SolveBernsteinFixture) {
  const CliRun r = Cli("solve " + test::data_path("bernstein_r2_n10.json") + " -k 2 -o " + Path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const RunReport rep = parse_report(Slurp(Path("r.json")));
  EXPECT_NEAR(*rep.lower_bound, 2.0, 1e-3);
}

TEST_F(CliTest, SolveGeneratedInstance) {
  const CliRun r = Cli("solve --family monomial --n 3 --r 2 --d 2 --seed 3 -k 3 --dense -o " + Path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const RunReport rep = parse_report(Slurp(Path("r.json")));
  EXPECT_EQ(rep.method, Method::Dense);
  EXPECT_TRUE(rep.instance.seed.has_value());
}

TEST_F(CliTest, MalformedJsonExitsTwoWithoutOutput) {
  WriteText("bad.json", "{\"n\": 2, \"r\": 1,");
  const CliRun r = Cli("solve " + Path("bad.json") + " -o " + Path("r.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(fs::exists(Path("r.json")));
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(CliTest, SchemaViolationsExitTwo) {
  WriteText("extra.json", R"({"n":1,"r":1,"basis":"monomial","factors":[[[0,1]]],"note":1})");
  EXPECT_EQ(Cli("solve " + Path("extra.json")).code, 2);
  EXPECT_EQ(Cli("solve " + Path("missing.json")).code, 2);
  EXPECT_EQ(Cli("solve --bogus-flag").code, 2);
  EXPECT_EQ(Cli("solve").code, 2);
  EXPECT_EQ(Cli("bench chebyshev").code, 2);
}

TEST_F(CliTest, OrderTooSmallExitsThree) {
  write_cp_file(gen_monomial_instance(3, 3, 1, 2), Path("d3.json"));
  EXPECT_EQ(Cli("solve " + Path("d3.json") + " -k 1").code, 3);
  EXPECT_EQ(Cli("solve " + Path("d3.json") + " -k 2 --strict-degree").code, 3);
  EXPECT_EQ(Cli("solve " + Path("d3.json") + " -k 2 --t-bounds").code, 0);
}

TEST_F(CliTest, SolverFailureExitsFour) {
  const CliRun r = Cli("solve --family bernstein --n 40 -k 2 --timeout 0.000001");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("time_limit"), std::string::npos);
}

TEST_F(CliTest, ExternalBackend) {
  const std::string cmd = std::string("--backend external --external-cmd 'python3 ") +
                          LRPOP_FAKE_BACKEND + " {input} {output} ";
  const CliRun ok = Cli("solve " + test::data_path("five_var_r2.json") + " -k 2 " + cmd +
                     "optimal -123.5' -o " + Path("r.json"));
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_DOUBLE_EQ(*parse_report(Slurp(Path("r.json"))).lower_bound, -123.5);
  const CliRun infeasible =
      Cli("solve " + test::data_path("five_var_r2.json") + " -k 2 " + cmd + "infeasible 0'");
  EXPECT_EQ(infeasible.code, 4);
  const CliRun crash = Cli("solve " + test::data_path("five_var_r2.json") + " -k 2 " + cmd + "crash 0'");
  EXPECT_EQ(crash.code, 4);
  EXPECT_EQ(Cli("solve " + test::data_path("five_var_r2.json") + " --backend external").code, 2);
}

TEST_F(CliTest, BenchTinyTimeout) {
  const CliRun r = Cli("bench bernstein --n 10,50 --timeout 0.001 -o " + Path("b.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Optimal values"), std::string::npos);
  EXPECT_EQ(r.out.find("2.0"), std::string::npos);
  const nlohmann::json doc = nlohmann::json::parse(Slurp(Path("b.json")));
  for (const auto& c : doc["cells"]) EXPECT_TRUE(c["timed_out"].get<bool>());
}

TEST_F(CliTest, BenchSmallGrid) {
  const CliRun r = Cli("bench monomial --n 2,3 --order 2,3 --d 2 --dense --jobs 2 --seed 1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("k_LR=3"), std::string::npos);
  EXPECT_NE(r.out.find("Dense"), std::string::npos);
}

TEST_F(CliTest, ExpandAndGraph) {
  const CliRun e = Cli("expand " + test::data_path("five_var_r2.json"));
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("x1"), std::string::npos);
  EXPECT_EQ(Cli("expand " + test::data_path("five_var_r2.json") + " --budget 3").code, 2);
  const CliRun g = Cli("graph --r 2 --n 5 --kind tree");
  ASSERT_EQ(g.code, 0);
  EXPECT_NE(g.out.find("t_2_3"), std::string::npos);
  EXPECT_EQ(Cli("graph " + test::data_path("five_var_r2.json") + " --kind chordal -o " + Path("g.dot")).code, 0);
  EXPECT_NE(Slurp(Path("g.dot")).find("graph"), std::string::npos);
  EXPECT_EQ(Cli("graph").code, 2);
  EXPECT_EQ(Cli("--help").code, 0);
}

}  // namespace
}  // namespace lrpop
