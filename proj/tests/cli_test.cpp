#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "genlab/csv.hpp"
#include "genlab/experiment.hpp"

using namespace genlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("genlab_cli_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

bool rows_match_ignoring_time(const std::vector<ResultRow>& a,
                              const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].run_id != b[i].run_id || a[i].seed != b[i].seed ||
        a[i].width != b[i].width || a[i].n_train != b[i].n_train ||
        a[i].final_risk_mean != b[i].final_risk_mean ||
        a[i].train_acc != b[i].train_acc || a[i].test_acc != b[i].test_acc ||
        a[i].robust_acc != b[i].robust_acc || a[i].q_hat != b[i].q_hat ||
        a[i].bound_raw != b[i].bound_raw ||
        a[i].bound_clamped != b[i].bound_clamped)
      return false;
  }
  return true;
}

const char* kSmokeConfig =
    "distribution = blob_pair\n"
    "n = 3\n"
    "blob_margin = 0.3\n"
    "blob_spread = 0.05\n"
    "widths = 4, 8\n"
    "repeats = 2\n"
    "n_train = 40\n"
    "test_m = 200\n"
    "epochs = 5\n"
    "learning_rate = 0.3\n"
    "base_seed = 11\n";

}  // namespace

TEST_CASE("config parser handles comments, blanks, and spacing") {
  const Config cfg = Config::parse_string(
      "# leading comment\n"
      "\n"
      "alpha = 3.5\n"
      "  name =  spaced value \n"
      "flag = true\n"
      "items = 1, 2,3 ,4\n");
  CHECK(cfg.get_double("alpha", 0.0) == 3.5);
  CHECK(cfg.get_string("name", "") == "spaced value");
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_u64_list("items", {}) ==
        std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(cfg.get_int("missing", -7) == -7);
  CHECK_FALSE(cfg.has("absent"));
}

TEST_CASE("config parser reports the offending line") {
  try {
    Config::parse_string("ok = 1\nthis line has no equals sign\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("typed getters reject malformed values") {
  const Config cfg = Config::parse_string(
      "num = abc\nint = 1.5\nflag = yes\nlist = 1, x\n");
  CHECK_THROWS_AS(cfg.get_double("num", 0.0), ParseError);
  CHECK_THROWS_AS(cfg.get_int("int", 0), ParseError);
  CHECK_THROWS_AS(cfg.get_bool("flag", false), ParseError);
  CHECK_THROWS_AS(cfg.get_u64_list("list", {}), ParseError);
  CHECK_THROWS_AS(cfg.require_string("gone"), ContractError);
}

TEST_CASE("config files round trip through the filesystem") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "genlab_cfg_roundtrip.cfg")
          .string();
  {
    std::ofstream out(path);
    out << "key = value\n";
  }
  const Config cfg = Config::parse_file(path);
  CHECK(cfg.get_string("key", "") == "value");
  std::remove(path.c_str());
  CHECK_THROWS_AS(Config::parse_file(path), IoError);
}

TEST_CASE("csv formatting is minimal and round trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-3.0) == "-3");
  CHECK(format_u64(18446744073709551615ull) == "18446744073709551615");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_line({"a", "b,c"}) == "a,\"b,c\"\r\n");
}

TEST_CASE("experiment config picks bound inputs from the expresser") {
  const Config cfg = Config::parse_string(
      "distribution = two_point\nn = 4\nwidths = 8\n");
  const ExperimentConfig ec =
      parse_experiment_config(cfg, ExperimentKind::kSweepWidth);
  CHECK(ec.bound_w0 == 2);
  CHECK(ec.bound_c == 0.5);
  CHECK(ec.bound_lp == 1.0);
  CHECK(ec.widths == std::vector<std::uint64_t>{8});
  CHECK(ec.train.epochs == 120);
  CHECK(ec.loss.kind == LossKind::kCrossEntropy);
}

TEST_CASE("experiment config rejects bad names and ranges") {
  CHECK_THROWS_AS(
      parse_experiment_config(Config::parse_string("distribution = pareto\n"),
                              ExperimentKind::kSweepWidth),
      ParseError);
  CHECK_THROWS_AS(
      parse_experiment_config(Config::parse_string("loss = hinge\n"),
                              ExperimentKind::kSweepWidth),
      ParseError);
  CHECK_THROWS_AS(
      parse_experiment_config(Config::parse_string("fractions = 0.0, 1.0\n"),
                              ExperimentKind::kSweepData),
      ContractError);
  CHECK_THROWS_AS(
      parse_experiment_config(Config::parse_string("repeats = 0\n"),
                              ExperimentKind::kSweepWidth),
      ContractError);
  CHECK_THROWS_AS(parse_experiment_config(Config::parse_string(""),
                                          ExperimentKind::kMnistSweep),
                  ContractError);
}

TEST_CASE("width sweep smoke run produces ordered well formed rows") {
  const ExperimentConfig ec = parse_experiment_config(
      Config::parse_string(kSmokeConfig), ExperimentKind::kSweepWidth);
  const std::vector<ResultRow> rows = run_sweep_width(ec);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    CHECK(r.run_id == i);
    CHECK(r.experiment == "SWEEP_WIDTH");
    CHECK(r.n_train == 40);
    CHECK(r.train_acc >= 0.0);
    CHECK(r.train_acc <= 1.0);
    CHECK(r.test_acc >= 0.0);
    CHECK(r.test_acc <= 1.0);
    CHECK(r.robust_acc <= r.test_acc);
    CHECK(r.test_acc_ci == doctest::Approx(hoeffding_half_width(200)));
    CHECK(r.q_hat >= 0.0);
    CHECK(r.bound_clamped >= 0.0);
    CHECK(r.bound_clamped <= 1.0);
    CHECK(r.bound_raw <= r.bound_clamped + 1e-15);
  }
  CHECK(rows[0].width == 4);
  CHECK(rows[1].width == 4);
  CHECK(rows[2].width == 8);
  CHECK(rows[3].width == 8);
  CHECK(rows[0].seed != rows[1].seed);
}

TEST_CASE("sweeps are deterministic and job count does not matter") {
  ExperimentConfig ec = parse_experiment_config(
      Config::parse_string(kSmokeConfig), ExperimentKind::kSweepWidth);
  const std::vector<ResultRow> serial = run_sweep_width(ec);
  const std::vector<ResultRow> again = run_sweep_width(ec);
  CHECK(rows_match_ignoring_time(serial, again));

  ec.jobs = 3;
  const std::vector<ResultRow> parallel = run_sweep_width(ec);
  CHECK(rows_match_ignoring_time(serial, parallel));

  const std::string dir_a = scratch_dir("det_a");
  const std::string dir_b = scratch_dir("det_b");
  emit_outputs(serial, ec, dir_a);
  emit_outputs(parallel, ec, dir_b);
  CHECK(slurp(dir_a + "/results.csv") == slurp(dir_b + "/results.csv"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("data sweep fixes the width and varies the sample count") {
  const ExperimentConfig ec = parse_experiment_config(
      Config::parse_string("distribution = blob_pair\n"
                           "n = 3\n"
                           "blob_margin = 0.3\n"
                           "blob_spread = 0.05\n"
                           "widths = 4\n"
                           "fractions = 0.5, 1.0\n"
                           "repeats = 2\n"
                           "n_train = 40\n"
                           "test_m = 100\n"
                           "epochs = 5\n"),
      ExperimentKind::kSweepData);
  const std::vector<ResultRow> rows = run_sweep_data(ec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].n_train == 20);
  CHECK(rows[1].n_train == 20);
  CHECK(rows[2].n_train == 40);
  CHECK(rows[3].n_train == 40);
  for (const ResultRow& r : rows) CHECK(r.width == 4);
}

TEST_CASE("trend and saturation helpers on synthetic rows") {
  std::vector<ResultRow> rows;
  const double means[] = {0.6, 0.8, 0.81};
  const std::uint64_t sizes[] = {10, 20, 30};
  for (int g = 0; g < 3; ++g) {
    for (int rep = 0; rep < 2; ++rep) {
      ResultRow r;
      r.width = 4;
      r.n_train = sizes[g];
      r.test_acc = means[g] + (rep == 0 ? -0.01 : 0.01);
      rows.push_back(r);
    }
  }
  CHECK(sweep_trend_rho(rows, false) == doctest::Approx(1.0));
  CHECK(sweep_saturation(rows));

  for (ResultRow& r : rows) r.test_acc = 1.0 - r.test_acc;
  CHECK(sweep_trend_rho(rows, false) == doctest::Approx(-1.0));

  rows.resize(2);
  CHECK_THROWS_AS(sweep_saturation(rows), ContractError);
}

TEST_CASE("the pathological loss demo pins risk and accuracy exactly") {
  const ExperimentConfig ec = parse_experiment_config(
      Config::parse_string("distribution = two_point\n"
                           "n = 3\n"
                           "widths = 4\n"
                           "badloss_width = 4\n"
                           "n_train = 10\n"
                           "candidate_trials = 300\n"
                           "repeats = 1\n"
                           "epochs = 20\n"),
      ExperimentKind::kBadlossDemo);
  const BadlossReport report = run_badloss_demo(ec);
  CHECK(report.expected_risk_mean == -6.0);
  CHECK(report.constructed_risk_mean == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(report.distribution_accuracy == 0.5);
  CHECK(report.best_random_risk >= report.constructed_risk_mean - 1e-9);
  CHECK(report.best_trained_risk >= report.constructed_risk_mean - 1e-9);
  CHECK(report.sample_count == 10);
  REQUIRE(report.result_rows.size() == 1);
  CHECK(report.result_rows[0].test_acc == 0.5);
  CHECK(report.result_rows[0].train_acc == 0.5);
}

TEST_CASE("the robustness demo aligns accuracies, radii, and bounds") {
  const ExperimentConfig ec = parse_experiment_config(
      Config::parse_string("distribution = blob_pair\n"
                           "n = 2\n"
                           "blob_margin = 0.4\n"
                           "blob_spread = 0.05\n"
                           "widths = 4\n"
                           "n_train = 30\n"
                           "robust_test_m = 40\n"
                           "epochs = 40\n"
                           "learning_rate = 0.4\n"
                           "eps_grid = 0.0, 0.05, 0.1\n"
                           "attack_restarts = 2\n"
                           "attack_steps = 15\n"),
      ExperimentKind::kRobustDemo);
  const RobustDemoReport report = run_robust_demo(ec);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.w0 == 2);
  CHECK(report.width == 4);
  CHECK(report.c0 >= 0.0);
  CHECK(report.rows[0].eps == 0.0);
  CHECK(report.rows[0].robust_acc == doctest::Approx(report.clean_acc));
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    CHECK(report.rows[i].robust_acc <= report.rows[i - 1].robust_acc);

  for (const RobustDemoRow& row : report.rows) {
    RobustnessInputs in;
    in.n = 2;
    in.W0 = report.w0;
    in.W = report.width;
    in.N0 = 2 * ec.n_train;
    in.c0 = report.c0;
    in.c1 = row.c1;
    in.delta = ec.bound_delta;
    in.Lp = 1.0;
    const BoundReport bound = robustness_upper_bound(in);
    CHECK(row.bound_raw == bound.raw);
    CHECK(row.bound_clamped == bound.clamped);
  }
  CHECK(report.result_rows.size() == report.rows.size());
}

TEST_CASE("the bounds table echoes the closed forms it names") {
  const Config raw = Config::parse_string(
      "n = 4\nw0 = 2\nc = 1\nw = 200\nn_train = 100000\n"
      "rademacher_a = 1\nvc_d = 100\nsine_n = 10\neps = 0.3\n");
  const ExperimentConfig ec =
      parse_experiment_config(raw, ExperimentKind::kBoundsTable);
  const BoundsTable table = run_bounds_table(ec);

  auto value_of = [&](const std::string& name) {
    for (const auto& [key, value] : table.entries)
      if (key == name) return value;
    FAIL(("missing table entry " + name));
    return 0.0;
  };

  Th1Inputs in;
  in.n = 4;
  in.W0 = 2;
  in.c = 1.0;
  in.W = 200;
  in.N = 100000;
  const BoundReport th1 = th1_lower_bound(in);
  CHECK(value_of("th1_raw") == th1.raw);
  CHECK(value_of("th1_clamped") == th1.clamped);
  CHECK(value_of("th1_width_term") == th1.terms[0].value);
  CHECK(value_of("rademacher") == rademacher_bound(1.0, 4, 200, 1.0, 100000));
  CHECK(value_of("vc_uniform") == vc_uniform_bound(100, 100000, 0.05));
  CHECK(value_of("sine_sample_threshold") == 29.0);
  CHECK(value_of("required_width") == 435.0);
}

TEST_CASE("emitted outputs are complete and carriage return delimited") {
  ExperimentConfig ec = parse_experiment_config(
      Config::parse_string(kSmokeConfig), ExperimentKind::kSweepWidth);
  const std::string dir = scratch_dir("emit");

  emit_outputs({}, ec, dir);
  const std::string empty_csv = slurp(dir + "/results.csv");
  CHECK(empty_csv == csv_line(result_header()));

  ResultRow row;
  row.run_id = 3;
  row.experiment = "SWEEP_WIDTH";
  row.width = 8;
  row.wall_time = 1.25;
  emit_outputs({row, row}, ec, dir);
  const std::string csv = slurp(dir + "/results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\r\n") != std::string::npos);
  // timing stays zeroed unless explicitly requested
  CHECK(csv.find("1.25") == std::string::npos);
  ec.emit_timing = true;
  emit_outputs({row}, ec, dir);
  CHECK(slurp(dir + "/results.csv").find("1.25") != std::string::npos);

  const std::string manifest = slurp(dir + "/manifest.txt");
  CHECK(manifest.find("artifact = genlab 1.0.0") != std::string::npos);
  CHECK(manifest.find("experiment = SWEEP_WIDTH") != std::string::npos);
  CHECK(manifest.find("seed.3 = ") != std::string::npos);
  CHECK(manifest.find("config.widths = 4, 8") != std::string::npos);
  CHECK(slurp(dir + "/plot.gp").find("results.csv") != std::string::npos);
  std::filesystem::remove_all(dir);
}
