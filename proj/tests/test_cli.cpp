#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  CliRun r;
  const std::string cmd = std::string(PHAD_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t k;
  while ((k = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), k);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string count_of(const std::string& args) {
  return nlohmann::json::parse(run(args).out).at("count_decimal").get<std::string>();
}

}  // namespace

TEST(Cli, CountExamples) {
  EXPECT_EQ(count_of("count --n 3 --cols 4"), "384");
  EXPECT_EQ(count_of("count --n 3 --cols 5"), "0");
  EXPECT_EQ(count_of("count --n 1 --cols 7"), "128");
  EXPECT_EQ(count_of("count --n 3 --cols 4 --method brute"), "384");
  EXPECT_EQ(count_of("count --n 3 --cols 8 --method mitm"), "645120");
}

TEST(Cli, RefusalHasReasonAndExitCode) {
  const CliRun r = run("count --n 7 --cols 40");
  EXPECT_EQ(r.status, 3);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("error"), "refused");
  EXPECT_EQ(j.at("reason"), "dp_state_budget");
  EXPECT_EQ(run("count --n 5 --cols 9 --method brute").status, 3);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("count --n 3").status, 2);
  EXPECT_EQ(run("count --n 0 --cols 3").status, 2);
  EXPECT_EQ(run("integrate --n 2 --t 1 --samples 10").status, 2);  // --seed missing
  EXPECT_EQ(run("verify --n-max 3").status, 2);
  EXPECT_EQ(run("report --n 2 --mode mc").status, 2);
  EXPECT_EQ(run("").status, 2);
}

TEST(Cli, IntegrateIsDeterministicAndAccurate) {
  const CliRun a = run("integrate --n 2 --t 1 --samples 100000 --seed 7");
  const CliRun b = run("integrate --n 2 --t 1 --samples 100000 --seed 7 --jobs 3");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_NEAR(j.at("value").get<double>(), 0.375, 3 * j.at("std_error").get<double>());
}

TEST(Cli, IntegrateDecomposedBrackets) {
  const CliRun a = run("integrate --n 3 --t 2 --decomposed --seed 5 --samples 50000 --paper-defaults");
  ASSERT_EQ(a.status, 0);
  const auto j = nlohmann::json::parse(a.out);
  const double exact = 645120.0 / 16777216.0;
  EXPECT_LE(std::abs(j.at("value").get<double>() - exact),
            j.at("residual_bound").get<double>() + 3 * j.at("std_error").get<double>());
  EXPECT_TRUE(j.contains("delta_clamped"));
}

TEST(Cli, ReportCsv) {
  const CliRun r = run("report --n 2 --t-min 1 --t-max 8 --format csv");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,t,N,A,ratio,predicted_ratio,t_times_gap");
  double prev = 0;
  std::size_t pos = r.out.find('\n') + 1;
  int rows = 0;
  while (pos < r.out.size()) {
    const std::string line = r.out.substr(pos, r.out.find('\n', pos) - pos);
    pos = r.out.find('\n', pos) + 1;
    std::array<std::string, 7> f;
    std::size_t a = 0;
    for (int k = 0; k < 7; ++k) {
      const std::size_t b = line.find(',', a);
      f[static_cast<std::size_t>(k)] = line.substr(a, b - a);
      a = b + 1;
    }
    const double ratio = std::stod(f[4]);
    EXPECT_GT(ratio, prev);
    prev = ratio;
    ++rows;
  }
  EXPECT_EQ(rows, 8);
  const CliRun r3 = run("report --n 3 --t-min 1 --t-max 1 --format csv");
  EXPECT_NE(r3.out.find("3,1,384,"), std::string::npos);
  EXPECT_NE(r3.out.find(",0.738"), std::string::npos);
}

TEST(Cli, VerifyPassesAndLatticeSummary) {
  const CliRun v = run("verify --n-min 2 --n-max 4 --samples 2000 --seed 3");
  EXPECT_EQ(v.status, 0);
  const auto j = nlohmann::json::parse(v.out);
  EXPECT_TRUE(j.at("all_passed").get<bool>());
  for (const auto& c : j.at("checks"))
    if (c.at("name") == "cosine_product[n=2]") EXPECT_NEAR(c.at("worst_margin").get<double>(), 0.0, 1e-12);

  const CliRun l = run("lattice --n 3 --dump");
  EXPECT_EQ(l.status, 0);
  const auto lj = nlohmann::json::parse(l.out);
  EXPECT_EQ(lj.at("lattice_size"), 16);
  EXPECT_EQ(lj.at("points").size(), 16U);
}

TEST(Cli, CumulantsAndOutputFile) {
  const CliRun c = run("cumulants --n 4 --lambda 1,1,1,1,1,1");
  ASSERT_EQ(c.status, 0);
  const auto j = nlohmann::json::parse(c.out);
  EXPECT_DOUBLE_EQ(j.at("quartic_form").get<double>(), 2.5);
  EXPECT_DOUBLE_EQ(j.at("cycle_form_c4").get<double>(), 24.0);

  const std::string path = testing::TempDir() + "phad_cli_out.json";
  ASSERT_EQ(run("count --n 2 --cols 4 -o " + path).status, 0);
  FILE* f = std::fopen(path.c_str(), "r");
  ASSERT_NE(f, nullptr);
  std::string text(4096, '\0');
  text.resize(std::fread(text.data(), 1, text.size(), f));
  std::fclose(f);
  EXPECT_EQ(nlohmann::json::parse(text).at("count_decimal"), "96");
}
