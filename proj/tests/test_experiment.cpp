#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qwalk/experiment.hpp"

using namespace qwalk;

namespace {

const std::string kCli = QWALK_CLI_PATH;
const std::string kTmp = QWALK_TEST_TMP;

int cli(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = kCli + " " + args + " > " + stdout_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::vector<double> column(const std::string& csv, std::size_t index) {
  std::vector<double> out;
  const auto rows = lines(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::string cell;
    for (std::size_t c = 0; c <= index; ++c) std::getline(ss, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

ExperimentSpec run_spec(std::size_t n, std::size_t k) {
  ExperimentSpec spec;
  spec.n_vertices = n;
  spec.k_marked = k;
  return spec;
}

}  // namespace

TEST(ParsePhase, SymbolicTokensAreExact) {
  EXPECT_EQ(parse_phase("pi/2").factor(), cplx(0.0, 1.0));
  EXPECT_EQ(parse_phase("pi").factor(), cplx(-1.0));
  EXPECT_EQ(parse_phase("-pi/4").factor(), parse_phase("7pi/4").factor());
  EXPECT_TRUE(parse_phase("pi/2").is_half_pi());
  EXPECT_EQ(parse_phase("0").factor(), cplx(1.0));
  EXPECT_NEAR(parse_phase("0.7").angle(), 0.7, 0.0);
  EXPECT_NEAR(parse_phase("pi/3").angle(), std::numbers::pi / 3.0, 1e-15);
  for (const char* bad : {"", "pie", "pi/", "pi/0", "xpi", "1.5x", "nan"}) {
    EXPECT_THROW(parse_phase(bad), InvalidSpec) << bad;
  }
}

TEST(ParseRange, Forms) {
  const auto r = parse_range("10:50:20");
  EXPECT_EQ(r.first, 10u);
  EXPECT_EQ(r.last, 50u);
  EXPECT_EQ(r.step, 20u);
  EXPECT_EQ(parse_range("4:6").step, 1u);
  for (const char* bad : {"10", "5:4", "1:2:0", "a:b", "1:2:3:4"}) {
    EXPECT_THROW(parse_range(bad), InvalidSpec) << bad;
  }
}

TEST(ParseMarkedList, ListsAndErrors) {
  EXPECT_EQ(parse_marked_list("0,4,7"), (std::vector<std::size_t>{0, 4, 7}));
  EXPECT_THROW(parse_marked_list("1,,2"), InvalidSpec);
  EXPECT_THROW(parse_marked_list("1,-2"), InvalidSpec);
  auto spec = run_spec(8, 2);
  spec.marked_list = std::vector<std::size_t>{1, 2, 3};
  EXPECT_THROW(make_config(spec, 8, Phase::half_pi()), InvalidSpec);
  spec.k_marked.reset();
  spec.marked_list = std::vector<std::size_t>{1, 9};
  EXPECT_THROW(make_config(spec, 8, Phase::half_pi()), InvalidSpec);
}

TEST(RunExperiment, AutoStepsRowCount) {
  const auto r = run_experiment(WalkConfig::first_k(50, 2, Phase::half_pi()),
                                Engine::reduced, std::nullopt);
  ASSERT_EQ(r.rows.size(), 28u);
  EXPECT_EQ(r.summary.n_opt, 27u);
  EXPECT_EQ(r.summary.oracle_calls_quantum, 54u);
  EXPECT_EQ(r.rows.front().step, 0u);
  EXPECT_EQ(r.rows.back().step, 27u);
  for (const auto& row : r.rows) {
    double total = row.residual * row.residual;
    for (double p : row.p_w) total += p;
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_GE(row.p_marked, 0.0);
    EXPECT_LE(row.p_marked, 1.0);
  }
}

TEST(RunExperiment, EnginesAgreeAtN100) {
  const auto config = WalkConfig::first_k(100, 2, Phase::half_pi());
  const auto full = run_experiment(config, Engine::full, std::nullopt);
  const auto reduced = run_experiment(config, Engine::reduced, std::nullopt);
  const auto oracle = run_experiment(config, Engine::oracle, 20);
  ASSERT_EQ(full.rows.size(), reduced.rows.size());
  for (std::size_t i = 0; i < full.rows.size(); ++i) {
    EXPECT_NEAR(full.rows[i].p_marked, reduced.rows[i].p_marked, 1e-9);
    EXPECT_LT(full.rows[i].residual, 1e-10);
  }
  for (std::size_t i = 0; i < oracle.rows.size(); ++i) {
    EXPECT_NEAR(oracle.rows[i].p_marked, full.rows[i].p_marked, 1e-12);
  }
  EXPECT_EQ(oracle.summary.oracle_calls_quantum, 40u);
  EXPECT_NEAR(reduced.rows.back().p_marked, 0.98010858251134451, 1e-10);
  EXPECT_NEAR(reduced.summary.classical_queries_expected, 4951.0 / 2.0, 1e-9);
}

TEST(RunExperiment, EngineAndPhaseRestrictions) {
  const auto pi = WalkConfig::first_k(20, 2, Phase::pi());
  EXPECT_THROW(run_experiment(pi, Engine::oracle, 5), std::invalid_argument);
  EXPECT_THROW(run_experiment(pi, Engine::reduced, std::nullopt), std::invalid_argument);
  EXPECT_NO_THROW(run_experiment(pi, Engine::reduced, 5));
  const auto k1 = WalkConfig::first_k(20, 1, Phase::half_pi());
  EXPECT_THROW(run_experiment(k1, Engine::reduced, 5), std::invalid_argument);
  const auto full = run_experiment(k1, Engine::full, 3);
  EXPECT_TRUE(std::isnan(full.rows[1].p_w[0]));
  EXPECT_TRUE(std::isnan(full.rows[1].residual));
}

TEST(CmdRun, CsvLayoutAndSummarySidecar) {
  auto spec = run_spec(50, 2);
  spec.out = kTmp + "/run50.csv";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(spec, out, err), kExitOk) << err.str();
  const auto rows = lines(slurp(spec.out));
  ASSERT_EQ(rows.size(), 29u);
  EXPECT_EQ(rows[0], kStepHeader);
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
  const auto summary = lines(slurp(spec.out + ".summary.csv"));
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0], kRunSummaryHeader);
  EXPECT_EQ(summary[1].substr(0, 5), "50,2,");
}

TEST(CmdRun, SweepWritesOneSummaryPerN) {
  auto spec = run_spec(0, 2);
  spec.n_vertices.reset();
  spec.n_range = NRange{10, 50, 20};
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(spec, out, err), kExitOk) << err.str();
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].substr(0, 3), "10,");
  EXPECT_EQ(rows[2].substr(0, 3), "30,");
  EXPECT_EQ(rows[3].substr(0, 3), "50,");
}

TEST(CmdRun, JsonDocument) {
  auto spec = run_spec(30, 3);
  spec.format = OutputFormat::json;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(spec, out, err), kExitOk);
  const auto doc = nlohmann::json::parse(out.str());
  ASSERT_TRUE(doc.contains("spec") && doc.contains("rows") && doc.contains("summary"));
  EXPECT_EQ(doc["spec"]["phase"], "pi/2");
  EXPECT_EQ(doc["spec"]["steps"], "auto");
  const auto n_opt = doc["summary"]["n_opt"].get<std::size_t>();
  EXPECT_EQ(doc["rows"].size(), n_opt + 1);
  for (const char* key : {"step", "p_marked", "p_w1", "p_w2", "p_w3", "p_w4", "residual",
                          "norm_error"}) {
    EXPECT_TRUE(doc["rows"][0].contains(key)) << key;
  }
  EXPECT_EQ(doc["summary"]["oracle_calls_quantum"].get<std::size_t>(), 2 * n_opt);
}

TEST(CmdRun, InvalidSpecNamesField) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(run_spec(8, 9), out, err), kExitInvalidInput);
  EXPECT_NE(err.str().find("--k"), std::string::npos);
  auto spec = run_spec(20, 2);
  spec.phase_token = "pi";
  err.str("");
  EXPECT_EQ(cmd_run(spec, out, err), kExitInvalidInput);  // auto steps need pi/2
  spec.steps = 10;
  EXPECT_EQ(cmd_run(spec, out, err), kExitOk);
}

TEST(CmdRun, WriteFailureExitsThree) {
  auto spec = run_spec(20, 2);
  spec.out = kTmp + "/no/such/dir/out.csv";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(spec, out, err), kExitIoFailure);
}

TEST(CmdStats, ExactRows) {
  ExperimentSpec spec;
  spec.k_marked = 3;
  spec.runs = 2;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_stats(spec, out, err), kExitOk);
  EXPECT_NE(out.str().find("j=3: 0.66666666666666663 (2/3)"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("expected_runs_to_cover: 2.5"), std::string::npos);

  spec.k_marked = 4;
  spec.runs = 3;
  std::ostringstream out4;
  ASSERT_EQ(cmd_stats(spec, out4, err), kExitOk);
  EXPECT_NE(out4.str().find("(19/36)"), std::string::npos);
  EXPECT_NE(out4.str().find("(4/9)"), std::string::npos);
}

TEST(CmdStats, MonteCarloMode) {
  ExperimentSpec spec;
  spec.k_marked = 3;
  spec.runs = 2;
  spec.mode = StatsMode::mc;
  spec.n_vertices = 2000;
  spec.trials = 100000;
  spec.out = kTmp + "/stats_mc.csv";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_stats(spec, out, err), kExitOk) << err.str();
  const auto csv = slurp(spec.out);
  const auto js = column(csv, 0);
  const auto ps = column(csv, 1);
  double p3 = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) if (js[i] == 3.0) p3 = ps[i];
  EXPECT_NEAR(p3, 2.0 / 3.0, 0.01);
  EXPECT_NE(out.str().find("success_rate"), std::string::npos);
  EXPECT_NE(slurp(spec.out + ".summary.csv").find("simulated"), std::string::npos);

  spec.n_vertices.reset();
  EXPECT_EQ(cmd_stats(spec, out, err), kExitInvalidInput);
}

TEST(CmdStats, InvalidParameters) {
  ExperimentSpec spec;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_stats(spec, out, err), kExitInvalidInput);
  spec.k_marked = 1;
  EXPECT_EQ(cmd_stats(spec, out, err), kExitInvalidInput);
  spec.k_marked = 5;
  spec.runs = 9;  // enumeration too large
  EXPECT_EQ(cmd_stats(spec, out, err), kExitInvalidInput);
  spec.runs = 0;
  EXPECT_EQ(cmd_stats(spec, out, err), kExitInvalidInput);
}

TEST(Cli, ByteIdenticalCsv) {
  const std::string a = kTmp + "/det_a.csv", b = kTmp + "/det_b.csv";
  const std::string args = "run --n 40 --k 3 --phase pi/2 --steps 60 --engine full --seed 9 --out ";
  ASSERT_EQ(cli(args + a), 0);
  ASSERT_EQ(cli(args + b), 0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a + ".summary.csv"), slurp(b + ".summary.csv"));

  const std::string s1 = kTmp + "/det_s1.txt", s2 = kTmp + "/det_s2.txt";
  const std::string stats = "stats --k 3 --runs 2 --mode mc --n 300 --trials 2000 --seed 4";
  ASSERT_EQ(cli(stats, s1), 0);
  ASSERT_EQ(cli(stats, s2), 0);
  EXPECT_EQ(slurp(s1), slurp(s2));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("run --n 8 --k 9"), 2);
  EXPECT_EQ(cli("run --n 8 --k 2 --phase banana"), 2);
  EXPECT_EQ(cli("run --n 8 --k 2 --engine warp"), 2);
  EXPECT_EQ(cli("run --n 8 --k 2 --steps many"), 2);
  EXPECT_EQ(cli("bogus"), 2);
  EXPECT_EQ(cli("run --n 20 --k 2 --out /nonexistent-dir/x.csv"), 3);
  EXPECT_EQ(cli("verify"), 0);
  EXPECT_EQ(cli("verify --inject-fault reflection"), 1);
  EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, StatsExactOutput) {
  const std::string path = kTmp + "/stats_exact.txt";
  ASSERT_EQ(cli("stats --k 3 --runs 2 --mode exact", path), 0);
  EXPECT_NE(slurp(path).find("j=3: 0.666666"), std::string::npos);
  ASSERT_EQ(cli("stats --k 4 --runs 3 --mode exact", path), 0);
  const auto text = slurp(path);
  EXPECT_NE(text.find("19/36"), std::string::npos);
  EXPECT_NE(text.find("4/9"), std::string::npos);
}

TEST(Cli, FaultReportNamesCase) {
  const std::string path = kTmp + "/verify_fault.txt";
  ASSERT_EQ(cli("verify --inject-fault reflection", path), 1);
  const auto text = slurp(path);
  EXPECT_NE(text.find("FAIL unitarity"), std::string::npos);
  EXPECT_NE(text.find("N=3, K=0, phi=0"), std::string::npos);
}
