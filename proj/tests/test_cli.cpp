#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qkdfinite/cli/commands.hpp"
#include "qkdfinite/cli/csv.hpp"

namespace qkdfinite::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "qkdfinite");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Quick search settings keep each command well under a second.
const std::vector<std::string> kQuick = {"--grid-points", "4", "--refine-rounds", "20",
                                         "--multistart", "2", "--tolerance", "1e-6"};

std::vector<std::string> with_quick(std::vector<std::string> args) {
  args.insert(args.end(), kQuick.begin(), kQuick.end());
  return args;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qkdfinite_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(Csv, FormatRealRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 5.43e-123, 1e10, -2.5e-7, 0.57502940602397349}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(join_row({"a", "b"}), "a,b\n");
}

TEST(Csv, HeaderOrder) {
  EXPECT_EQ(result_header(),
            "N,protocol,bound,drift_model,theta_step,r_raw,r,p_z,w_pa,w_bar,w_pe,"
            "w_def,m,k,q_obs,c_obs,q_prime,c_prime,log2_inv_eps_col,status\n");
}

TEST(Rate, DefaultPointPositive) {
  const Outcome o = run_args(with_quick({"rate", "--protocol", "rfi", "--bound",
                                         "postselection", "--N", "1e10", "--q", "0.05",
                                         "--c0", "1.72", "--drift", "fixed",
                                         "--eps-coh", "1e-5"}));
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto lines = split(o.out, '\n');
  ASSERT_EQ(lines.size(), 2u);
  const auto fields = split(lines[1], ',');
  ASSERT_EQ(fields.size(), result_columns().size());
  EXPECT_EQ(fields[0], "10000000000");
  EXPECT_GT(std::stod(fields[6]), 0.0);
  EXPECT_EQ(fields.back(), "ok");
  const auto manifest = nlohmann::json::parse(o.err);
  EXPECT_EQ(manifest["command"], "rate");
  EXPECT_EQ(manifest["rng"], "splitmix64");
  EXPECT_EQ(manifest["parameters"]["q"], 0.05);
}

TEST(Rate, InvalidInputs) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"rate", "--q", "0.2"},
           {"rate", "--N", "0"},
           {"rate", "--N", "1.5"},
           {"rate", "--bogus", "1"},
           {"rate", "--protocol", "b92"},
           {"rate", "--eps-coh", "0"},
           {"rate", "--pz", "1"},
           {"rate", "--drift", "constant", "--theta-step", "4"},
           {"rate", "--grid-points", "2"},
           {},
           {"rate", "sweep"},
       }) {
    const Outcome o = run_args(args);
    EXPECT_EQ(o.code, kExitInvalidInput) << o.err;
    EXPECT_NE(o.err.find("error"), std::string::npos);
  }
  const Outcome q = run_args({"rate", "--q", "0.2"});
  EXPECT_NE(q.err.find("--q"), std::string::npos);
  EXPECT_TRUE(q.out.empty());
}

TEST(Rate, NonPositiveStillPrintsRow) {
  const Outcome o = run_args(with_quick({"rate", "--N", "1e4"}));
  EXPECT_EQ(o.code, kExitNonPositiveRate);
  EXPECT_EQ(split(o.out, '\n').size(), 2u);
}

TEST(Rate, HelpExitsZero) {
  const Outcome o = run_args({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("optimal-n"), std::string::npos);
}

TEST_F(CliTest, ConfigFileBelowFlags) {
  const fs::path cfg = dir_ / "run.ini";
  std::ofstream(cfg) << "# comment\nq = 0.03\nN = 1e9\nprotocol = bb84\nbound = collective\n";
  const Outcome from_file = run_args(with_quick({"rate", "--config", cfg.string()}));
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  const auto file_fields = split(split(from_file.out, '\n')[1], ',');
  EXPECT_EQ(file_fields[0], "1000000000");
  EXPECT_EQ(file_fields[1], "bb84");
  EXPECT_EQ(std::stod(file_fields[14]), 0.03);

  const Outcome flagged =
      run_args(with_quick({"rate", "--config", cfg.string(), "--q", "0.04"}));
  ASSERT_EQ(flagged.code, kExitOk);
  EXPECT_EQ(std::stod(split(split(flagged.out, '\n')[1], ',')[14]), 0.04);
}

TEST_F(CliTest, SweepWritesCsvAndManifest) {
  const fs::path out = dir_ / "sweep.csv";
  const Outcome o = run_args(with_quick({"sweep", "--protocol", "bb84", "--bound",
                                         "collective", "--n-min", "1e4", "--n-max", "1e8",
                                         "--points", "5", "--out", out.string()}));
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_TRUE(o.out.empty());
  const auto lines = split(slurp(out), '\n');
  EXPECT_EQ(lines.size(), 6u);
  const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  EXPECT_EQ(manifest["command"], "sweep");
  EXPECT_EQ(manifest["status"].size(), 5u);
  EXPECT_TRUE(manifest.contains("timestamp"));
  EXPECT_TRUE(manifest.contains("version"));
}

TEST_F(CliTest, ReplayFromManifestIsBitIdentical) {
  const fs::path first = dir_ / "a.csv";
  const Outcome o = run_args(with_quick({"sweep", "--protocol", "rfi", "--drift", "walk",
                                         "--theta-step", "1e-7", "--n-min", "1e5",
                                         "--n-max", "1e12", "--points", "4", "--seed", "9",
                                         "--out", first.string()}));
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto manifest = nlohmann::json::parse(slurp(first.string() + ".manifest.json"));

  const fs::path second = dir_ / "b.csv";
  std::vector<std::string> args = {manifest["command"].get<std::string>()};
  for (const auto& [key, value] : manifest["parameters"].items()) {
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>()
                                     : value.is_number_float()
                                           ? format_real(value.get<double>())
                                           : value.dump());
  }
  args.push_back("--out");
  args.push_back(second.string());
  const Outcome replay = run_args(args);
  ASSERT_EQ(replay.code, kExitOk) << replay.err;
  EXPECT_EQ(slurp(first), slurp(second));
}

TEST_F(CliTest, UnwritableOutput) {
  const Outcome o = run_args(with_quick(
      {"rate", "--N", "1e9", "--out", (dir_ / "missing" / "x.csv").string()}));
  EXPECT_EQ(o.code, kExitIoFailure);
}

TEST(OptimalN, FixedFramesBoundaryRow) {
  const Outcome o = run_args(with_quick({"optimal-n", "--n-min", "1e6", "--n-max", "1e9"}));
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto fields = split(split(o.out, '\n')[1], ',');
  EXPECT_EQ(fields[0], "1000000000");
  EXPECT_EQ(fields.back(), "boundary");
}

TEST(OptimalN, NoPositiveRate) {
  const Outcome o = run_args(with_quick({"optimal-n", "--drift", "constant",
                                         "--theta-step", "1", "--n-min", "1e4",
                                         "--n-max", "1e6"}));
  EXPECT_EQ(o.code, kExitNonPositiveRate);
}

TEST(ValidateDrift, PassesWithSmallTrialCount) {
  const Outcome o = run_args({"validate-drift", "--trials", "2000", "--seed", "7"});
  EXPECT_EQ(o.code, kExitOk) << o.out;
  const auto lines = split(o.out, '\n');
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "check,worst,tolerance,passed");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    EXPECT_EQ(split(lines[i], ',').back(), "true");
  }
}

TEST(Fig2, ColumnsAndReconstructionFlag) {
  const Outcome o = run_args(with_quick({"fig2", "--n-min", "1e6", "--n-max", "1e10",
                                         "--points", "3"}));
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto lines = split(o.out, '\n');
  EXPECT_EQ(lines[0], "N,r_collective,r_postselection,r_definetti");
  EXPECT_EQ(lines.size(), 4u);
  const auto manifest = nlohmann::json::parse(o.err);
  EXPECT_EQ(manifest["reconstruction"], true);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    EXPECT_GE(std::stod(f[1]), std::stod(f[2]));
    EXPECT_GE(std::stod(f[2]), std::stod(f[3]));
  }
}

TEST(Fig3, Columns) {
  const Outcome o = run_args(with_quick({"fig3", "--n-min", "1e6", "--n-max", "1e12",
                                         "--points", "4"}));
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto lines = split(o.out, '\n');
  EXPECT_EQ(lines[0], "N,r_constant_drift,r_fixed,r_random_walk");
  double previous = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double fixed = std::stod(split(lines[i], ',')[2]);
    EXPECT_GE(fixed, previous);
    previous = fixed;
  }
}

TEST(Binary, ExitCodesFromProcess) {
  const std::string bin = QKDFINITE_BINARY;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("rate --q 0.2"), kExitInvalidInput);
  EXPECT_EQ(status("--unknown"), kExitInvalidInput);
  EXPECT_EQ(status("rate --N 1e9 --grid-points 3 --refine-rounds 5 --multistart 1"), kExitOk);
}

}  // namespace
}  // namespace qkdfinite::cli
