#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "records.hpp"

using namespace protmeas;
using namespace protmeas::cli;

namespace {

const char* kQubit = R"({
  "system": {"preset": "pauli-z"},
  "observable": {"preset": "pauli-x"},
  "schedule": {"dyadic": {"base": "resonance-free", "first": 3, "last": 10}},
  "run": {"base_seed": 5}
})";

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("protmeas_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_protmeas(std::vector<std::string> args) {
  args.insert(args.begin(), "protmeas");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<ResultRecord> parse_lines(const std::string& text) {
  std::istringstream in(text);
  return read_json_lines(in);
}

}  // namespace

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_config("{\n  \"system\": {\"preset\": \"pauli-z\",}\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.where(), "line 2, column 34");
  }
}

TEST(Config, FieldErrorsCarryPointer) {
  auto where = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  EXPECT_EQ(where(R"({"system": {"preset": "pauli-q"}, "observable": {"preset": "pauli-x"}, "schedule": {"T": 1}})"),
            "/system/preset");
  EXPECT_EQ(where(R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"}, "schedule": {"T": [1, -2]}})"),
            "/schedule/T/1");
  EXPECT_EQ(where(R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"}, "apparatus": {"sigma": "wide"}, "schedule": {"T": 1}})"),
            "/apparatus/sigma");
  EXPECT_EQ(where(R"({"system": {"preset": "pauli-z"}, "observable": {"matrix": [[1,0,0],[0,1,0],[0,0,1]]}, "schedule": {"T": 1}})"),
            "/observable");
  EXPECT_EQ(where(R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"}, "schedule": {"T": 1}, "extra": 1})"),
            "/extra");
  EXPECT_EQ(where(R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"}})"), "/schedule");
  EXPECT_EQ(where(R"({"system": {"matrix": [[[1,0],[1,0]],[[0,0],[2,0]]]}, "observable": {"preset": "pauli-x"}, "schedule": {"T": 1}})"),
            "/system");
}

TEST(Config, PresetsAndLiteralsResolveToSameHash) {
  const ExperimentConfig a = parse_config(kQubit);
  const ExperimentConfig b = parse_config(R"({"run":{"base_seed":5},
      "observable": {"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]},
      "system": {"matrix": [[1, 0], [0, -1]], "n_index": 0},
      "schedule": {"dyadic": {"first": 3, "last": 10}},
      "apparatus": {"d_A": 128, "p_max": 16}})");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.schedule.size(), 8U);
}

TEST(Config, HashTracksSemanticFields) {
  const std::string h = parse_config(kQubit).hash();
  std::string spaced = kQubit;
  spaced.insert(1, "\n\n   ");
  EXPECT_EQ(parse_config(spaced).hash(), h);
  std::string seed = kQubit;
  seed.replace(seed.find("\"base_seed\": 5"), 14, "\"base_seed\": 6");
  EXPECT_NE(parse_config(seed).hash(), h);
  std::string sigma = kQubit;
  sigma.insert(1, R"("apparatus": {"sigma": 1.5},)");
  EXPECT_NE(parse_config(sigma).hash(), h);
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Config, MatrixFileAndProjectorPreset) {
  TempDir dir;
  dir.write("h.json", R"({"matrix": [[[2,0],[0,0]],[[0,0],[-2,0]]]})");
  const std::string cfg = dir.write("c.json", R"({
      "system": {"file": "h.json"},
      "observable": {"preset": "projector", "psi": [[1,0],[1,0]], "gap": 1},
      "schedule": {"T": [3, 1, 2]}})");
  const ExperimentConfig c = load_config(cfg);
  EXPECT_NEAR(c.hamiltonian->matrix()(0, 0).real(), 2.0, 0.0);
  EXPECT_NEAR(c.observable->matrix()(0, 1).real(), -0.5, 1e-15);
  EXPECT_EQ(c.schedule, (std::vector<double>{1, 2, 3}));
}

TEST(Records, JsonRoundTripAndCsvOrder) {
  ResultRecord r = make_record("simulate", "00ff", 18446744073709551615ULL);
  r.set("pert_error", 1.0 / 3.0).set("T", 12.5).set("flag", true).set("note", std::string("a,b")).set("none", Value{});
  EXPECT_EQ(parse_json_line(to_json_line(r)), r);

  std::ostringstream csv;
  write_records(csv, {r}, Format::Csv);
  std::string header;
  std::istringstream in(csv.str());
  std::getline(in, header);
  EXPECT_EQ(header.rfind("T,pointer_shift,expectation_target,disturbance_prob,entropy_bits,pert_error,validity_indicator,", 0), 0U);
  std::string row;
  std::getline(in, row);
  EXPECT_NE(row.find("\"a,b\""), std::string::npos);
}

TEST(Cli, SimulateEmitsOneRecordPerT) {
  TempDir dir;
  const CliRun r = run_protmeas({"simulate", "--config", dir.write("c.json", kQubit)});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = parse_lines(r.out);
  ASSERT_EQ(recs.size(), 8U);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(std::get<std::uint64_t>(*recs[i].find("schema_version")), kSchemaVersion);
    EXPECT_EQ(std::get<std::uint64_t>(*recs[i].find("seed")), 5U);
    if (i > 0) {
      EXPECT_LT(recs[i].number("validity_indicator"), recs[i - 1].number("validity_indicator"));
      EXPECT_GT(recs[i].number("T"), recs[i - 1].number("T"));
    }
  }
  // Emitted lines re-serialize identically.
  std::ostringstream again;
  write_records(again, recs, Format::Json);
  EXPECT_EQ(again.str(), r.out);
}

TEST(Cli, CommutingPresetHasZeroDisturbance) {
  TempDir dir;
  const CliRun r = run_protmeas({"simulate", "--config",
                     dir.write("c.json", R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-z"}, "schedule": {"T": 10}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_lines(r.out).at(0).number("disturbance_prob"), 0.0);
}

TEST(Cli, SweepFitOnDefaultQubitPreset) {
  TempDir dir;
  const std::string cfg = dir.write("c.json", R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"},
      "schedule": {"dyadic": {"first": 3, "last": 14}}})");
  const CliRun sim = run_protmeas({"simulate", "--config", cfg});
  ASSERT_EQ(sim.code, 0);
  const CliRun fit = run_protmeas({"sweep-fit", "--records", dir.write("r.jsonl", sim.out)});
  ASSERT_EQ(fit.code, 0) << fit.err;
  const double slope = parse_lines(fit.out).at(0).number("slope");
  EXPECT_GE(slope, -2.1);
  EXPECT_LE(slope, -1.9);
  const CliRun direct = run_protmeas({"sweep-fit", "--config", cfg});
  EXPECT_EQ(direct.out, fit.out);
}

TEST(Cli, SweepFitSyntheticPowerLaws) {
  TempDir dir;
  std::ostringstream two;
  for (int k = 0; k < 6; ++k) {
    const double T = std::ldexp(10.0, k);
    ResultRecord r = make_record("synthetic", "0", 0);
    r.set("T", T).set("validity_indicator", 0.01).set("disturbance_prob", 3.0 / (T * T)).set("pert_error", 3.0 / T);
    two << to_json_line(r) << '\n';
  }
  const std::string path = dir.write("s.jsonl", two.str());
  const CliRun a = run_protmeas({"sweep-fit", "--records", path});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NEAR(parse_lines(a.out).at(0).number("slope"), -2.0, 1e-9);
  const CliRun b = run_protmeas({"sweep-fit", "--records", path, "--field", "pert_error"});
  EXPECT_NEAR(parse_lines(b.out).at(0).number("slope"), -1.0, 1e-9);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_protmeas({}).code, kUsage);
  EXPECT_EQ(run_protmeas({"simulate"}).code, kUsage);
  EXPECT_EQ(run_protmeas({"simulate", "--config", dir.write("bad.json", "{")}).code, kConfig);
  const CliRun missing = run_protmeas({"simulate", "--config", (std::filesystem::temp_directory_path() / "absent.json").string()});
  EXPECT_EQ(missing.code, kConfig);
  EXPECT_TRUE(missing.out.empty());
  const CliRun big = run_protmeas({"simulate", "--config",
                       dir.write("big.json", R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"},
                           "apparatus": {"d_A": 8192, "p_max": 1024}, "schedule": {"T": 3}})")});
  EXPECT_EQ(big.code, kResource);
  EXPECT_NE(big.err.find("cap"), std::string::npos);
  const CliRun few = run_protmeas({"sweep-fit", "--config",
                       dir.write("few.json", R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"}, "schedule": {"T": [1, 2]}})")});
  EXPECT_EQ(few.code, kInsufficientRange);
  EXPECT_NE(few.err.find("insufficient adiabatic range"), std::string::npos);
}

TEST(Cli, TomographyIdealAndSampled) {
  TempDir dir;
  const std::string ideal = dir.write("t.json", R"({"schedule": {"dyadic": {"first": 9, "last": 10}},
      "tomography": {"state": "plus"}})");
  const CliRun r = run_protmeas({"tomography", "--config", ideal});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = parse_lines(r.out);
  ASSERT_EQ(recs.size(), 8U);
  EXPECT_NEAR(recs.back().number("nx"), 1.0, 1e-3);
  EXPECT_GE(recs.back().number("fidelity_true"), recs[3].number("fidelity_true") - 1e-12);

  const std::string sampled = dir.write("s.json", R"({"schedule": {"T": 5},
      "tomography": {"state": "plus-i", "mode": "sampled"}, "run": {"base_seed": 3}})");
  const CliRun a = run_protmeas({"tomography", "--config", sampled});
  const CliRun b = run_protmeas({"tomography", "--config", sampled});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(run_protmeas({"tomography", "--config", sampled, "--seed", "4"}).out, a.out);
}

TEST(Cli, MonteCarloSummaryAndTrials) {
  TempDir dir;
  const std::string cfg = dir.write("m.json", R"({"system": {"preset": "pauli-z"}, "observable": {"preset": "pauli-x"},
      "schedule": {"T": [2, 1]}, "run": {"trials": 50, "emit_trials": true}})");
  const CliRun r = run_protmeas({"monte-carlo", "--config", cfg, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = parse_lines(r.out);
  ASSERT_EQ(recs.size(), 102U);
  EXPECT_EQ(recs[0].number("T"), 1.0);
  EXPECT_EQ(std::get<std::string>(*recs[0].find("record")), "summary");
  EXPECT_EQ(recs[50].number("trial"), 49.0);
  EXPECT_EQ(recs[51].number("T"), 2.0);
}

TEST(Cli, ScalingAnchors) {
  const CliRun one = run_protmeas({"scaling", "-N", "1"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(std::get<std::string>(*parse_lines(one.out).at(0).find("count_general")), "3");
  const CliRun two = run_protmeas({"scaling", "-N", "2"});
  EXPECT_EQ(std::get<std::string>(*parse_lines(two.out).at(0).find("count_general")), "15");
  const CliRun hundred = run_protmeas({"scaling", "-N", "100", "--pure", "--Tper", "1e-5"});
  EXPECT_GE(parse_lines(hundred.out).at(0).number("orders_of_magnitude"), 7.0);
  EXPECT_EQ(run_protmeas({"scaling", "-N", "0"}).code, kUsage);
}

TEST(Cli, OutFileAndCsv) {
  TempDir dir;
  const std::string out = dir.write("o.csv", "");
  const CliRun r = run_protmeas({"simulate", "--config", dir.write("c.json", kQubit), "--format", "csv", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("T,pointer_shift,", 0), 0U);
}
