#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "slowvary/cli/cli.hpp"

namespace fs = std::filesystem;
using namespace slowvary::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  auto d = fs::temp_directory_path() / ("slowvary_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::create_directories(d);
  return d;
}

struct Golden {
  std::string stem;
  std::vector<std::string> args;
};

const Golden kGoldens[] = {
    {"heat-exchanger-linear_n4", {"--problem", "heat-exchanger-linear", "--order", "4"}},
    {"heat-exchanger-linear_n4_normal-form", {"--problem", "heat-exchanger-linear", "--order", "4", "--normal-form"}},
    {"heat-exchanger-nonlinear_n2", {"--problem", "heat-exchanger-nonlinear", "--order", "2", "--nonlinear"}},
    {"heat-exchanger-nonlinear_n2_direct", {"--problem", "heat-exchanger-nonlinear", "--order", "2", "--nonlinear", "--direct"}},
    {"swift-hohenberg-nonlinear_n2", {"--problem", "swift-hohenberg-nonlinear", "--order", "2", "--nonlinear"}},
    {"shear-dispersion_n3", {"--problem", "shear-dispersion", "--order", "3"}},
};

}  // namespace

TEST(Cli, ReportsMatchGoldenFiles) {
  const fs::path golden = SLOWVARY_GOLDEN_DIR;
  const auto dir = scratch_dir();
  for (const auto& g : kGoldens) {
    std::vector<std::string> args{"reduce"};
    args.insert(args.end(), g.args.begin(), g.args.end());
    args.insert(args.end(), {"--out", (dir / g.stem).string()});
    auto r = cli(args);
    ASSERT_EQ(r.code, kOk) << g.stem << ": " << r.err;
    EXPECT_EQ(slurp(dir / (g.stem + ".txt")), slurp(golden / (g.stem + ".txt"))) << g.stem;
    EXPECT_EQ(slurp(dir / (g.stem + ".json")), slurp(golden / (g.stem + ".json"))) << g.stem;
  }
  fs::remove_all(dir);
}

TEST(Cli, ReduceIsDeterministic) {
  auto a = cli({"reduce", "--problem", "swift-hohenberg-nonlinear", "--nonlinear"});
  auto b = cli({"reduce", "--problem", "swift-hohenberg-nonlinear", "--nonlinear"});
  ASSERT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, TextReportSections) {
  slowvary::ModelReport r;
  r.problem = "p";
  r.order = 1;
  r.construction = "linear";
  r.grading = "g";
  r.model = "c_t = c_xx";
  r.coefficients = {{"c:A2", "1"}};
  const std::string text = report_text(r);
  EXPECT_EQ(text.rfind("problem: p\norder: 1\n", 0), 0u);
  EXPECT_NE(text.find("tool: slowvary 0.1.0"), std::string::npos);
  EXPECT_NE(text.find("MODEL\n  c_t = c_xx\n"), std::string::npos);
  EXPECT_NE(text.find("MANIFOLD\n  (none)\n"), std::string::npos);
  for (const char* s : {"COEFFICIENTS", "EVOLUTION", "COUPLING_ERROR", "ESTIMATES", "TRANSIENT_TAG", "LOG"})
    EXPECT_NE(text.find(s), std::string::npos) << s;
  const std::string tree = report_tree(r);
  EXPECT_LT(tree.find("\"provenance\""), tree.find("\"model\""));
  EXPECT_LT(tree.find("\"model\""), tree.find("\"log\""));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"reduce", "--problem", "nosuch"}).code, kBadArguments);
  EXPECT_EQ(cli({"reduce", "--problem", "heat-exchanger-linear", "--order", "-1"}).code, kBadArguments);
  EXPECT_EQ(cli({"reduce", "--problem", "shear-dispersion", "--param", "Pe"}).code, kBadArguments);
  EXPECT_EQ(cli({"reduce", "--problem", "shear-dispersion", "--param", "Pe=1/0"}).code, kBadArguments);
  EXPECT_EQ(cli({"bogus"}).code, kBadArguments);
  EXPECT_EQ(cli({"verify", "nonsense", "--problem", "heat-exchanger-linear"}).code, kBadArguments);
  EXPECT_EQ(cli({"reduce", "--problem", "heat-exchanger-nonlinear", "--normal-form"}).code, kConstruction);
  EXPECT_EQ(cli({"reduce", "--problem", "shear-dispersion", "--order", "40"}).code, kConstruction);

  const auto dir = scratch_dir();
  std::ofstream(dir / "bad.ini") << "[problem]\nname = heat-exchanger-linear\n[bogus]\nx = 1\n";
  auto bad = cli({"reduce", "--problem", (dir / "bad.ini").string()});
  EXPECT_EQ(bad.code, kValidation);
  EXPECT_NE(bad.err.find("bogus"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, VerifyOutcomes) {
  auto ok = cli({"verify", "error-scaling", "--problem", "heat-exchanger-linear", "--order", "4"});
  EXPECT_EQ(ok.code, kOk) << ok.err;
  EXPECT_EQ(ok.out.rfind("k,lambda_full,lambda_model,abs_err\n", 0), 0u);
  EXPECT_NE(ok.out.find("-> PASS"), std::string::npos);

  auto miss = cli({"verify", "dispersion", "--problem", "heat-exchanger-linear", "--order", "4"});
  EXPECT_EQ(miss.code, kAcceptance);
  EXPECT_NE(miss.out.find("-> FAIL"), std::string::npos);

  auto sh = cli({"verify", "dispersion", "--problem", "swift-hohenberg-linear", "--order", "4", "--kmin", "-0.3",
                 "--kmax", "0.3", "--linear-spacing"});
  EXPECT_EQ(sh.code, kOk) << sh.out;
}

TEST(Cli, EmergenceSeedFromEnvironment) {
  const std::vector<std::string> args{"verify", "emergence", "--problem", "heat-exchanger-linear", "--order", "2",
                                      "--grid", "32", "--tmax", "3", "--t1", "3"};
  auto base = cli(args);
  ASSERT_EQ(base.code, kOk) << base.out << base.err;
  auto same = cli(args);
  EXPECT_EQ(base.out, same.out);
  ::setenv("SLOWVARY_SEED", "7", 1);
  auto seeded = cli(args);
  ::unsetenv("SLOWVARY_SEED");
  auto flagged = cli([&] {
    auto a = args;
    a.insert(a.end(), {"--seed", "7"});
    return a;
  }());
  EXPECT_EQ(seeded.out, flagged.out);
  EXPECT_NE(seeded.out, base.out);
}

TEST(Cli, ListsBuiltins) {
  auto r = cli({"list"});
  ASSERT_EQ(r.code, kOk);
  int lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  EXPECT_EQ(lines, 5);
  for (const char* n : {"heat-exchanger-linear", "heat-exchanger-nonlinear", "shear-dispersion", "swift-hohenberg-linear",
                        "swift-hohenberg-nonlinear"})
    EXPECT_NE(r.out.find(n), std::string::npos) << n;

  auto v = cli({"list", "--verbose"});
  EXPECT_NE(v.out.find("L1 = [[0, 1], [1, 0]]"), std::string::npos);
  auto one = cli({"list", "--problem", "shear-dispersion", "--verbose"});
  EXPECT_EQ(one.out.rfind("shear-dispersion", 0), 0u);
  EXPECT_EQ(one.out.find("heat-exchanger"), std::string::npos);
}
