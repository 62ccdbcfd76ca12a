#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "isovec/cli.hpp"

using namespace isovec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("isovec_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> f(1);
  for (char ch : line) {
    if (ch == ',') f.emplace_back();
    else f.back() += ch;
  }
  return f;
}

}  // namespace

TEST_F(CliTest, GenThenCheck) {
  const auto g = run({"gen", "--kind", "random-frame", "--dim", "3", "--m", "12", "--seed", "4", "--out", path("s.json")});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto j = io::json::parse(g.out);
  EXPECT_EQ(j.at("format_version"), 1);
  EXPECT_EQ(j.at("vectors").size(), 12u);

  const auto c = run({"check", path("s.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto r = io::json::parse(c.out);
  EXPECT_TRUE(r.at("is_isotropic").get<bool>());
  EXPECT_LE(r.at("tensor_residual").get<double>(), 1e-10);
}

TEST_F(CliTest, GammaPrintsValue) {
  const auto r = run({"gamma", "--dim", "2", "--m", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(r.out);
  EXPECT_NEAR(j.at("gamma").get<double>(), 1.5, 1e-14);
  EXPECT_NEAR(j.at("volume_bound").get<double>(), 0.75, 1e-14);
}

TEST_F(CliTest, P1FromProbabilities) {
  const auto r = run({"p1", "--probs", "0.25,0.25,0.25,0.25", "--dim", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(io::json::parse(r.out).at("p1").get<double>(), 0.75, 1e-15);
}

TEST_F(CliTest, ExpectWritesCsvWithinErrorBars) {
  const auto r = run({"expect", "--sampler", "gaussian", "--dim", "3", "--trials", "200000", "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::stringstream ss(r.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "seed,kind,d,m,trials,estimate,stderr,exact_reference,threshold");
  const auto f = csv_fields(row);
  ASSERT_EQ(f.size(), 9u);
  EXPECT_EQ(f[0], "9");
  EXPECT_EQ(f[1], "gaussian");
  const double est = std::stod(f[5]), se = std::stod(f[6]), ref = std::stod(f[7]);
  EXPECT_EQ(ref, 6.0);
  EXPECT_LE(std::abs(est - ref), 4 * se);
  EXPECT_EQ(f[3], "");
  EXPECT_EQ(f[8], "");
}

TEST_F(CliTest, RepeatRunsAreByteIdentical) {
  ASSERT_EQ(run({"gen", "--kind", "simplex", "--dim", "3", "--out", path("s.json")}).code, 0);
  const std::vector<std::string> args{"tail", "--in", path("s.json"), "--lambda", "0.5", "--trials", "5000", "--seed", "3"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto c = args;
  c.insert(c.end(), {"--threads", "3"});
  EXPECT_EQ(run(c).out, a.out);
}

TEST_F(CliTest, GenReduceCheckPipeline) {
  ASSERT_EQ(run({"gen", "--kind", "random-frame", "--dim", "3", "--m", "40", "--seed", "1", "--out", path("s.json")}).code, 0);
  const auto r = run({"reduce", "--in", path("s.json"), "--out", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(io::json::parse(r.out).at("vectors").size(), 6u);
  const auto c = run({"check", "--in", path("r.json"), "--tolerance", "1e-7"});
  EXPECT_TRUE(io::json::parse(c.out).at("is_isotropic").get<bool>());
  const auto s = run({"select", "--in", path("r.json"), "--best"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto j = io::json::parse(s.out);
  EXPECT_GE(j.at("best_subset").at("det_squared").get<double>(), j.at("volume_bound").get<double>() - 1e-12);
}

TEST_F(CliTest, MveeFromCsv) {
  io::write_file(path("p.csv"), "1,0\n-1,0\n0,1\n0,-1\n0.5,0.5\n");
  const auto r = run({"mvee", path("p.csv"), "--epsilon", "1e-9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sys = io::system_from_json(io::json::parse(r.out));
  EXPECT_EQ(sys.size(), 4u);
  for (double c : sys.weights()) EXPECT_NEAR(c, 0.5, 1e-8);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"gamma", "--dim", "3", "--m", "2"}).code, 2);
  EXPECT_EQ(run({"expect", "--sampler", "gaussian", "--dim", "2", "--trials", "1000"}).code, 2);  // no seed
  EXPECT_EQ(run({"gen", "--kind", "cube", "--dim", "2"}).code, 2);
  EXPECT_EQ(run({"check", path("missing.json")}).code, 4);

  io::write_file(path("bad.json"), R"({"dim":2,"vectors":[[1,0],[0,1]],"weights":[2,1]})");
  const auto sel = run({"select", path("bad.json")});
  EXPECT_EQ(sel.code, 3);
  EXPECT_NE(sel.err.find("error"), std::string::npos);

  io::write_file(path("flat.csv"), "1,0\n2,0\n-1,0\n");
  EXPECT_EQ(run({"mvee", path("flat.csv")}).code, 3);
  io::write_file(path("garbage.json"), "{not json");
  EXPECT_EQ(run({"check", path("garbage.json")}).code, 2);
}
