#include "silfs_cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace silfs;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "silfs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("silfs_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Writes a simulated dataset to CSV and returns its path.
  std::string simulated_csv(const std::string& name, const SyntheticDataset& d) const {
    std::ofstream f(path(name));
    write_dataset_csv(f, d.dataset);
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

// --- CSV ingest --------------------------------------------------------------------------

TEST(Csv, ParsesSmallFile) {
  std::istringstream in("y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset d = parse_dataset_csv(in);
  EXPECT_EQ(d.n(), 3);
  EXPECT_EQ(d.p(), 2);
  EXPECT_EQ(d.response[2], 7.0);
  EXPECT_EQ(d.design(1, 1), 6.0);
}

TEST(Csv, NonFiniteCellIsNamed) {
  std::istringstream in("y,x1,x2\n1,2,3\n4,NaN,6\n");
  try {
    parse_dataset_csv(in);
    FAIL() << "expected a DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("\"x1\""), std::string::npos) << msg;
  }
}

TEST(Csv, RejectsMalformedFiles) {
  std::istringstream no_y("a,x1\n1,2\n3,4\n");
  EXPECT_THROW(parse_dataset_csv(no_y), DataError);
  std::istringstream ragged("y,x1\n1,2\n3\n");
  EXPECT_THROW(parse_dataset_csv(ragged), DataError);
  std::istringstream text("y,x1\n1,2\n3,abc\n");
  EXPECT_THROW(parse_dataset_csv(text), DataError);
  std::istringstream one_row("y,x1\n1,2\n");
  EXPECT_THROW(parse_dataset_csv(one_row), DataError);
  EXPECT_THROW(ingest_csv("/nonexistent/file.csv"), DataError);
}

TEST(Csv, RoundTripIsBitwise) {
  const SyntheticDataset d = generate_scenario_ab(Scenario::A, 3.0, 30, 12, 4, 77);
  std::stringstream buf;
  write_dataset_csv(buf, d.dataset);
  const Dataset back = parse_dataset_csv(buf);
  EXPECT_TRUE(back.response == d.dataset.response);
  EXPECT_TRUE(back.design == d.dataset.design);
}

// --- CLI -----------------------------------------------------------------------------------

using Cli = TempDir;

TEST_F(Cli, BenchTableHasEveryMetric) {
  const CliResult r = run_cli({"bench", "--scenario", "A", "--reps", "2", "--n", "40", "--p", "15",
                               "--methods", "l2,scar", "--k-grid", "1,2,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["methods"].size(), 2u);
  for (const auto& row : doc["methods"]) {
    for (const char* key : {"RMSE_alpha", "RMSE_beta", "K_hat_mean", "Freq", "RI", "Sensitivity",
                            "Specificity"}) {
      EXPECT_TRUE(row.contains(key)) << key;
    }
    EXPECT_EQ(row["replications"].size(), 2u);
    EXPECT_FALSE(row.contains("wall_time_ms"));
  }
  EXPECT_TRUE(doc["provenance"].contains("versions"));
  EXPECT_EQ(doc["provenance"]["seed"], 1);
}

TEST_F(Cli, BenchCsvTable) {
  const CliResult r = run_cli({"bench", "--reps", "1", "--n", "40", "--p", "15", "--k", "2",
                               "--format", "csv", "--output", path("bench"), "--timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = slurp(path("bench/table.csv"));
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "method,RMSE_alpha,RMSE_beta,K_hat_mean,Freq,RI,Sensitivity,Specificity,failures,wall_time_ms");
  EXPECT_TRUE(fs::exists(path("bench/summary.json")));
}

TEST_F(Cli, FitWritesOneLabelPerSubject) {
  const SyntheticDataset d = generate_scenario_ab(Scenario::A, 3.0, 50, 20, 4, 5);
  const std::string input = simulated_csv("data.csv", d);
  const CliResult r = run_cli({"fit", "--input", input, "--solver", "l2-ccd", "--k-grid", "1,2,3",
                               "--r", "4", "--format", "csv", "--output", path("fit")});
  ASSERT_TRUE(r.code == 0 || r.code == 5) << r.err;
  std::ifstream labels(path("fit/labels.csv"));
  std::string line;
  std::getline(labels, line);
  EXPECT_EQ(line, "i,label");
  const auto summary = nlohmann::json::parse(slurp(path("fit/summary.json")));
  const int k = summary["fit"]["k"];
  int rows = 0;
  while (std::getline(labels, line)) {
    const int label = std::stoi(line.substr(line.find(',') + 1));
    EXPECT_GE(label, 1);
    EXPECT_LE(label, k);
    ++rows;
  }
  EXPECT_EQ(rows, 50);
}

TEST_F(Cli, FitJsonWithFixedChoicesUsesAdmm) {
  const SyntheticDataset d = generate_scenario_ab(Scenario::A, 5.0, 40, 15, 4, 6);
  const std::string input = simulated_csv("data.csv", d);
  const CliResult r = run_cli({"fit", "--input", input, "--solver", "l1-admm", "--k", "2", "--r", "2",
                               "--lambda1", "0.1", "--lambda2", "0.05"});
  ASSERT_TRUE(r.code == 0 || r.code == 5) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["fit"]["distance"], "absolute");
  EXPECT_EQ(doc["fit"]["labels"].size(), 40u);
  EXPECT_EQ(doc["num_factors"], 2);
}

TEST_F(Cli, FactorsOnEquicorrelatedData) {
  const std::string input = simulated_csv("toy.csv", generate_toy(0.9, 100, 100, 3));
  const CliResult r = run_cli({"factors", "--input", input});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_GT(doc["explained_variance"][0].get<double>(), 0.4);
  EXPECT_GE(doc["r_hat"].get<int>(), 1);
}

TEST_F(Cli, SeededCommandsAreByteIdentical) {
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--scenario", "B", "--reps", "2", "--n", "30", "--p", "12", "--seed", "9"},
      {"bench", "--scenario", "toy", "--reps", "2", "--n", "30", "--p", "12", "--k-grid", "1,2"},
  };
  for (const auto& cmd : commands) {
    const CliResult a = run_cli(cmd);
    const CliResult b = run_cli(cmd);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
  for (const char* dir : {"s1", "s2"}) {
    ASSERT_EQ(run_cli({"simulate", "--reps", "2", "--n", "30", "--p", "12", "--format", "csv",
                       "--output", path(dir)})
                  .code,
              0);
  }
  for (const auto& entry : fs::directory_iterator(path("s1"))) {
    EXPECT_EQ(slurp(entry.path()), slurp(path("s2") + "/" + entry.path().filename().string()));
  }
}

TEST_F(Cli, SimulatedCsvRoundTripsThroughIngest) {
  ASSERT_EQ(run_cli({"simulate", "--seed", "4", "--n", "25", "--p", "10", "--format", "csv",
                     "--output", path("sim")})
                .code,
            0);
  const Dataset back = ingest_csv(path("sim/data_seed4.csv"));
  const SyntheticDataset d = generate_scenario_ab(Scenario::A, 3.0, 25, 10, 4, 4);
  EXPECT_TRUE(back.response == d.dataset.response);
  EXPECT_TRUE(back.design == d.dataset.design);
}

TEST_F(Cli, ExitCodesAndErrorDocuments) {
  // Unknown flag and conflicting options: configuration errors.
  EXPECT_EQ(run_cli({"fit", "--bogus"}).code, cli::kConfigError);
  const CliResult both = run_cli({"bench", "--k", "2", "--k-grid", "1,2"});
  EXPECT_EQ(both.code, cli::kConfigError);
  const auto err = nlohmann::json::parse(both.err);
  EXPECT_EQ(err["error"]["code"], cli::kConfigError);
  EXPECT_EQ(run_cli({"bench", "--r", "2", "--r-auto"}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"fit"}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"simulate", "--scenario", "Z"}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"simulate", "--format", "csv"}).code, cli::kConfigError);

  // Bad data: data errors.
  {
    std::ofstream f(path("bad.csv"));
    f << "y,x1\n1,2\n3,NaN\n";
  }
  const CliResult bad = run_cli({"factors", "--input", path("bad.csv")});
  EXPECT_EQ(bad.code, cli::kDataError);
  EXPECT_NE(bad.err.find("x1"), std::string::npos);
  EXPECT_EQ(run_cli({"factors", "--input", path("missing.csv")}).code, cli::kDataError);

  // A one-sweep cap stops before convergence; the estimates are still written.
  const std::string input = simulated_csv("data.csv", generate_scenario_ab(Scenario::A, 3.0, 40, 15, 4, 8));
  const CliResult capped = run_cli({"fit", "--input", input, "--k", "2", "--r", "2", "--lambda1", "0.01",
                                    "--lambda2", "0.001", "--max-iter", "1", "--output", path("fit.json")});
  EXPECT_EQ(capped.code, cli::kNotConverged);
  EXPECT_FALSE(nlohmann::json::parse(slurp(path("fit.json")))["fit"]["converged"].get<bool>());

  EXPECT_EQ(run_cli({"--version"}).code, 0);
}
