#pragma once

// Config-driven experiment runner: width and data sweeps, the
// robustness and loss-pathology demonstrations, bound tables, and the
// CSV / plot-script / manifest emission. Every experiment is a pure
// function of its config, so replays are byte-identical.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "genlab/attack.hpp"
#include "genlab/bounds.hpp"
#include "genlab/config.hpp"
#include "genlab/construct.hpp"
#include "genlab/csv.hpp"
#include "genlab/data.hpp"
#include "genlab/error.hpp"
#include "genlab/mnist.hpp"
#include "genlab/net.hpp"
#include "genlab/rng.hpp"
#include "genlab/stats.hpp"
#include "genlab/train.hpp"

namespace genlab {

enum class ExperimentKind {
  kSweepWidth,
  kSweepData,
  kRobustDemo,
  kBadlossDemo,
  kBoundsTable,
  kMnistSweep,
};

inline const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSweepWidth: return "SWEEP_WIDTH";
    case ExperimentKind::kSweepData: return "SWEEP_DATA";
    case ExperimentKind::kRobustDemo: return "ROBUST_DEMO";
    case ExperimentKind::kBadlossDemo: return "BADLOSS_DEMO";
    case ExperimentKind::kBoundsTable: return "BOUNDS_TABLE";
    case ExperimentKind::kMnistSweep: return "MNIST_SWEEP";
  }
  return "?";
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSweepWidth;
  DistributionSpec dist;
  std::vector<std::uint64_t> widths{4, 8, 16, 32, 64, 128};
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};
  std::uint64_t n_train = 512;
  std::uint64_t test_m = 2000;
  int repeats = 5;
  std::uint64_t base_seed = 1;
  TrainConfig train;
  LossFn loss;
  std::string output_dir = "out";

  int bound_w0 = 1;
  double bound_c = 1.0;
  double bound_delta = 0.05;
  double bound_lp = 1.0;

  std::vector<double> eps_grid{0.0, 0.05, 0.1, 0.2, 0.4};
  AttackConfig attack;
  std::uint64_t robust_test_m = 256;

  std::uint64_t badloss_width = 8;
  std::uint64_t candidate_trials = 10000;

  std::string mnist_train_images;
  std::string mnist_train_labels;
  std::string mnist_test_images;
  std::string mnist_test_labels;

  int jobs = 1;
  bool emit_timing = false;
  Config raw;
};

inline DistributionSpec parse_distribution(const Config& cfg) {
  const std::string name = cfg.get_string("distribution", "blob_pair");
  const int n = static_cast<int>(cfg.get_int("n", 8));
  if (name == "blob_pair")
    return blob_pair(n, cfg.get_double("blob_margin", 0.2),
                     cfg.get_double("blob_spread", 0.1));
  if (name == "parity_diagonal") return parity_diagonal(n);
  if (name == "two_point") return two_point(n);
  if (name == "outlier_mix")
    return outlier_mix(n, cfg.get_double("outlier_c", 0.2));
  throw ParseError("unknown distribution: " + name);
}

inline ExperimentConfig parse_experiment_config(const Config& cfg,
                                               ExperimentKind kind) {
  ExperimentConfig out;
  out.kind = kind;
  out.raw = cfg;
  if (kind != ExperimentKind::kMnistSweep &&
      kind != ExperimentKind::kBoundsTable)
    out.dist = parse_distribution(cfg);

  out.widths = cfg.get_u64_list("widths", out.widths);
  out.fractions = cfg.get_double_list("fractions", out.fractions);
  out.n_train = cfg.get_u64("n_train", out.n_train);
  out.test_m = cfg.get_u64("test_m", out.test_m);
  out.repeats = static_cast<int>(cfg.get_int("repeats", out.repeats));
  out.base_seed = cfg.get_u64("base_seed", out.base_seed);
  out.output_dir = cfg.get_string("output_dir", out.output_dir);
  out.jobs = static_cast<int>(cfg.get_int("jobs", 1));
  out.emit_timing = cfg.get_bool("emit_timing", false);

  require(!out.widths.empty(), "config: widths list must be non-empty");
  require(!out.fractions.empty(), "config: fractions list must be non-empty");
  require(out.repeats >= 1, "config: repeats must be at least 1");
  require(out.jobs >= 1, "config: jobs must be at least 1");
  for (const std::uint64_t w : out.widths)
    require(w >= 1, "config: widths must be positive");
  for (const double f : out.fractions)
    require(f > 0 && f <= 1, "config: fractions must lie in (0,1]");

  out.train.learning_rate = cfg.get_double("learning_rate", 0.3);
  out.train.epochs = static_cast<int>(cfg.get_int("epochs", 120));
  out.train.batch_size =
      static_cast<Eigen::Index>(cfg.get_u64("batch_size", 0));
  out.train.clip_box = cfg.get_bool("clip_box", true);
  out.train.init_scale = cfg.get_double("init_scale", 0.5);

  const std::string loss_name = cfg.get_string("loss", "cross_entropy");
  if (loss_name == "cross_entropy")
    out.loss = {LossKind::kCrossEntropy, false};
  else if (loss_name == "abs")
    out.loss = {LossKind::kAbsError, false};
  else if (loss_name == "abs_squared")
    out.loss = {LossKind::kAbsError, true};
  else if (loss_name == "neg_margin")
    out.loss = {LossKind::kNegMargin, false};
  else
    throw ParseError("unknown loss: " + loss_name);

  if (kind != ExperimentKind::kMnistSweep &&
      kind != ExperimentKind::kBoundsTable) {
    const Expresser ref = distribution_expresser(out.dist);
    out.bound_w0 = static_cast<int>(cfg.get_int("bound_w0", ref.width));
    out.bound_c = cfg.get_double("bound_c", ref.margin);
    out.bound_lp = cfg.get_double(
        "bound_lp", activation_lipschitz(ref.net.act));
  } else {
    out.bound_w0 = static_cast<int>(cfg.get_int("bound_w0", 1));
    out.bound_c = cfg.get_double("bound_c", 1.0);
    out.bound_lp = cfg.get_double("bound_lp", 1.0);
  }
  out.bound_delta = cfg.get_double("bound_delta", 0.05);
  require(out.bound_w0 >= 1, "config: bound_w0 must be at least 1");
  require(out.bound_c > 0, "config: bound_c must be positive");

  out.eps_grid = cfg.get_double_list("eps_grid", out.eps_grid);
  out.attack.restarts =
      static_cast<int>(cfg.get_int("attack_restarts", out.attack.restarts));
  out.attack.steps =
      static_cast<int>(cfg.get_int("attack_steps", out.attack.steps));
  out.attack.step_size = cfg.get_double("attack_step_size", 0.0);
  out.robust_test_m = cfg.get_u64("robust_test_m", out.robust_test_m);

  out.badloss_width = cfg.get_u64("badloss_width", out.badloss_width);
  out.candidate_trials = cfg.get_u64("candidate_trials", out.candidate_trials);

  out.mnist_train_images = cfg.get_string("mnist_train_images", "");
  out.mnist_train_labels = cfg.get_string("mnist_train_labels", "");
  out.mnist_test_images = cfg.get_string("mnist_test_images", "");
  out.mnist_test_labels = cfg.get_string("mnist_test_labels", "");
  if (kind == ExperimentKind::kMnistSweep) {
    require(!out.mnist_train_images.empty() &&
                !out.mnist_train_labels.empty() &&
                !out.mnist_test_images.empty() &&
                !out.mnist_test_labels.empty(),
            "config: MNIST sweep needs the four IDX file paths");
  }
  return out;
}

struct ResultRow {
  std::uint64_t run_id = 0;
  std::uint64_t seed = 0;
  std::string experiment;
  std::uint64_t width = 0;
  std::uint64_t n_train = 0;
  double final_risk_mean = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double test_acc_ci = 0.0;
  double robust_acc = 0.0;
  double q_hat = 0.0;
  double bound_raw = 0.0;
  double bound_clamped = 0.0;
  double wall_time = 0.0;
};

inline std::vector<std::string> result_header() {
  return {"run_id",      "seed",        "experiment",  "width",
          "n_train",     "final_risk_mean", "train_acc", "test_acc",
          "test_acc_ci", "robust_acc",  "q_hat",       "bound_raw",
          "bound_clamped", "wall_time"};
}

inline std::vector<std::string> result_fields(const ResultRow& r,
                                              bool emit_timing) {
  return {format_u64(r.run_id),
          format_u64(r.seed),
          r.experiment,
          format_u64(r.width),
          format_u64(r.n_train),
          format_double(r.final_risk_mean),
          format_double(r.train_acc),
          format_double(r.test_acc),
          format_double(r.test_acc_ci),
          format_double(r.robust_acc),
          format_double(r.q_hat),
          format_double(r.bound_raw),
          format_double(r.bound_clamped),
          format_double(emit_timing ? r.wall_time : 0.0)};
}

namespace detail {

// The accuracy bound takes an approximation factor of at least 1; a
// measured ratio below 1 means the trained net beat the constructive
// reference, and feeding 1 instead only loosens the bound.
inline double bound_q(double q_hat) { return std::max(1.0, q_hat); }

struct RunTask {
  std::uint64_t run_id = 0;
  std::uint64_t width = 0;
  double fraction = 1.0;
};

inline ResultRow execute_synthetic_run(const ExperimentConfig& cfg,
                                       const RunTask& task) {
  const auto started = std::chrono::steady_clock::now();
  ResultRow row;
  row.run_id = task.run_id;
  row.seed = run_seed(cfg.base_seed, task.run_id);
  row.experiment = experiment_name(cfg.kind);
  row.width = task.width;

  Rng root(row.seed);
  Rng data_rng = root.fork("data");
  const LabeledDataset full = sample_dataset(
      cfg.dist, static_cast<Eigen::Index>(cfg.n_train), data_rng);
  LabeledDataset train_ds = full;
  if (task.fraction < 1.0) {
    Rng fraction_rng = root.fork("fraction");
    train_ds = data_fraction(full, task.fraction, fraction_rng);
  }
  row.n_train = static_cast<std::uint64_t>(train_ds.count());

  Rng init_rng = root.fork("init");
  const TwoLayerNet net0 =
      random_net(cfg.dist.n, static_cast<Eigen::Index>(task.width),
                 Activation::kRelu, cfg.train.init_scale, init_rng);
  TrainConfig tc = cfg.train;
  Rng train_rng = root.fork("train");
  tc.seed = train_rng();
  auto [net, report] = train_erm(net0, train_ds, cfg.loss, tc);

  row.final_risk_mean = report.final_risk_mean;
  row.train_acc = accuracy(net, train_ds);

  Rng test_rng = root.fork("test");
  const LabeledDataset test_ds = sample_dataset(
      cfg.dist, static_cast<Eigen::Index>(cfg.test_m), test_rng);
  row.test_acc = accuracy(net, test_ds);
  row.test_acc_ci = hoeffding_half_width(cfg.test_m);
  row.robust_acc = strict_accuracy(net, test_ds);

  row.q_hat = effective_q(report.final_risk_sum, row.n_train, task.width,
                          cfg.bound_w0, cfg.bound_c);
  Th1Inputs in;
  in.n = cfg.dist.n;
  in.W0 = cfg.bound_w0;
  in.c = cfg.bound_c;
  in.W = task.width;
  in.N = row.n_train;
  in.delta = cfg.bound_delta;
  in.Lp = cfg.bound_lp;
  in.q = bound_q(row.q_hat);
  const BoundReport bound = th1_lower_bound(in);
  row.bound_raw = bound.raw;
  row.bound_clamped = bound.clamped;
  row.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return row;
}

inline ResultRow execute_mnist_run(const ExperimentConfig& cfg,
                                   const LabeledDataset& train_full,
                                   const LabeledDataset& test_ds,
                                   const RunTask& task) {
  const auto started = std::chrono::steady_clock::now();
  ResultRow row;
  row.run_id = task.run_id;
  row.seed = run_seed(cfg.base_seed, task.run_id);
  row.experiment = experiment_name(cfg.kind);
  row.width = task.width;

  Rng root(row.seed);
  LabeledDataset train_ds = train_full;
  if (task.fraction < 1.0) {
    Rng fraction_rng = root.fork("fraction");
    train_ds = data_fraction(train_full, task.fraction, fraction_rng);
  }
  row.n_train = static_cast<std::uint64_t>(train_ds.count());

  Rng init_rng = root.fork("init");
  const TwoLayerNet net0 =
      random_net(train_ds.dim(), static_cast<Eigen::Index>(task.width),
                 Activation::kRelu, cfg.train.init_scale, init_rng);
  TrainConfig tc = cfg.train;
  Rng train_rng = root.fork("train");
  tc.seed = train_rng();
  auto [net, report] = train_erm(net0, train_ds, cfg.loss, tc);

  row.final_risk_mean = report.final_risk_mean;
  row.train_acc = accuracy(net, train_ds);
  row.test_acc = accuracy(net, test_ds);
  row.test_acc_ci =
      hoeffding_half_width(static_cast<std::uint64_t>(test_ds.count()));
  row.robust_acc = strict_accuracy(net, test_ds);
  row.q_hat = effective_q(report.final_risk_sum, row.n_train, task.width,
                          cfg.bound_w0, cfg.bound_c);
  Th1Inputs in;
  in.n = static_cast<int>(train_ds.dim());
  in.W0 = cfg.bound_w0;
  in.c = cfg.bound_c;
  in.W = task.width;
  in.N = row.n_train;
  in.delta = cfg.bound_delta;
  in.Lp = cfg.bound_lp;
  in.q = bound_q(row.q_hat);
  const BoundReport bound = th1_lower_bound(in);
  row.bound_raw = bound.raw;
  row.bound_clamped = bound.clamped;
  row.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return row;
}

template <typename Fn>
inline std::vector<ResultRow> run_tasks(const std::vector<RunTask>& tasks,
                                        int jobs, Fn&& execute) {
  std::vector<ResultRow> rows(tasks.size());
  if (jobs <= 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) rows[i] = execute(tasks[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    const int workers =
        std::min<int>(jobs, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          try {
            rows[i] = execute(tasks[i]);
          } catch (...) {
            const std::lock_guard<std::mutex> hold(failure_lock);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return a.run_id < b.run_id;
                   });
  return rows;
}

}  // namespace detail

inline std::vector<ResultRow> run_sweep_width(const ExperimentConfig& cfg) {
  std::vector<detail::RunTask> tasks;
  std::uint64_t run_id = 0;
  for (const std::uint64_t width : cfg.widths)
    for (int rep = 0; rep < cfg.repeats; ++rep)
      tasks.push_back({run_id++, width, 1.0});
  return detail::run_tasks(tasks, cfg.jobs, [&](const detail::RunTask& t) {
    return detail::execute_synthetic_run(cfg, t);
  });
}

inline std::vector<ResultRow> run_sweep_data(const ExperimentConfig& cfg) {
  const std::uint64_t width = cfg.widths.front();
  std::vector<detail::RunTask> tasks;
  std::uint64_t run_id = 0;
  for (const double fraction : cfg.fractions)
    for (int rep = 0; rep < cfg.repeats; ++rep)
      tasks.push_back({run_id++, width, fraction});
  return detail::run_tasks(tasks, cfg.jobs, [&](const detail::RunTask& t) {
    return detail::execute_synthetic_run(cfg, t);
  });
}

inline std::vector<ResultRow> run_mnist_sweep(const ExperimentConfig& cfg) {
  const LabeledDataset train_full =
      mnist_load(cfg.mnist_train_images, cfg.mnist_train_labels);
  const LabeledDataset test_ds =
      mnist_load(cfg.mnist_test_images, cfg.mnist_test_labels);
  std::vector<detail::RunTask> tasks;
  std::uint64_t run_id = 0;
  for (const std::uint64_t width : cfg.widths)
    for (int rep = 0; rep < cfg.repeats; ++rep)
      tasks.push_back({run_id++, width, 1.0});
  return detail::run_tasks(tasks, cfg.jobs, [&](const detail::RunTask& t) {
    return detail::execute_mnist_run(cfg, train_full, test_ds, t);
  });
}

// Mean of a column grouped by a key column, sorted by key.
inline std::vector<std::pair<double, double>> group_means(
    const std::vector<ResultRow>& rows, bool by_width) {
  std::map<std::uint64_t, std::pair<double, int>> acc;
  for (const ResultRow& r : rows) {
    auto& slot = acc[by_width ? r.width : r.n_train];
    slot.first += r.test_acc;
    slot.second += 1;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [key, slot] : acc)
    out.emplace_back(static_cast<double>(key), slot.first / slot.second);
  return out;
}

inline double sweep_trend_rho(const std::vector<ResultRow>& rows,
                              bool by_width) {
  const auto means = group_means(rows, by_width);
  std::vector<double> keys, values;
  for (const auto& [k, v] : means) {
    keys.push_back(k);
    values.push_back(v);
  }
  return spearman_rho(keys, values);
}

// True when the last fraction step gains less test accuracy than the
// first one: the diminishing-returns signature of a width-limited model.
inline bool sweep_saturation(const std::vector<ResultRow>& rows) {
  const auto means = group_means(rows, false);
  require(means.size() >= 3, "sweep_saturation: need at least 3 fractions");
  const double first_gain = means[1].second - means[0].second;
  const double last_gain =
      means[means.size() - 1].second - means[means.size() - 2].second;
  return last_gain < first_gain;
}

struct RobustDemoRow {
  double eps = 0.0;
  double robust_acc = 0.0;
  double c1 = 0.0;
  double bound_raw = 0.0;
  double bound_clamped = 0.0;
};

struct RobustDemoReport {
  double clean_acc = 0.0;
  double c0 = 0.0;
  int w0 = 0;
  std::uint64_t width = 0;
  std::vector<RobustDemoRow> rows;
  std::vector<ResultRow> result_rows;
};

inline RobustDemoReport run_robust_demo(const ExperimentConfig& cfg) {
  for (const double eps : cfg.eps_grid)
    require(eps >= 0, "robust demo: radii must be nonnegative");
  for (std::size_t i = 1; i < cfg.eps_grid.size(); ++i)
    require(cfg.eps_grid[i] >= cfg.eps_grid[i - 1],
            "robust demo: radius grid must be non-decreasing");
  require(!cfg.eps_grid.empty(), "robust demo: empty radius grid");

  RobustDemoReport report;
  const std::uint64_t width = cfg.widths.front();
  report.width = width;

  Rng root(cfg.base_seed);
  Rng data_rng = root.fork("data");
  const LabeledDataset train_ds = sample_dataset(
      cfg.dist, static_cast<Eigen::Index>(cfg.n_train), data_rng);

  Rng init_rng = root.fork("init");
  const TwoLayerNet net0 =
      random_net(cfg.dist.n, static_cast<Eigen::Index>(width),
                 Activation::kRelu, cfg.train.init_scale, init_rng);
  TrainConfig tc = cfg.train;
  Rng train_rng = root.fork("train");
  tc.seed = train_rng();
  auto [net, train_report] = train_erm(net0, train_ds, cfg.loss, tc);

  Rng test_rng = root.fork("test");
  const LabeledDataset test_ds = sample_dataset(
      cfg.dist, static_cast<Eigen::Index>(cfg.robust_test_m), test_rng);
  report.clean_acc = accuracy(net, test_ds);

  const Expresser ref = distribution_expresser(cfg.dist);
  report.w0 = ref.width;
  report.c0 = std::max(0.0, min_margin(ref.net, train_ds));

  Rng narrow_init = root.fork("narrow-init");
  const TwoLayerNet narrow0 =
      random_net(cfg.dist.n, ref.width, Activation::kRelu,
                 cfg.train.init_scale, narrow_init);
  TrainConfig narrow_tc = cfg.train;
  Rng narrow_rng = root.fork("narrow-train");
  narrow_tc.seed = narrow_rng();
  auto [narrow_fit, narrow_report] =
      train_erm(narrow0, train_ds, cfg.loss, narrow_tc);

  Rng attack_rng = root.fork("attack");
  const std::vector<double> robust_accs =
      robust_accuracy_sweep(net, test_ds, cfg.eps_grid, cfg.attack,
                            attack_rng);

  for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
    const double eps = cfg.eps_grid[i];
    Rng margin_rng = root.fork("narrow-attack-" + std::to_string(i));
    const double c1 = std::max(
        0.0, mean_attacked_margin(narrow_fit, train_ds, eps, cfg.attack,
                                  margin_rng));
    RobustnessInputs in;
    in.n = cfg.dist.n;
    in.W0 = ref.width;
    in.W = width;
    in.N0 = 2 * cfg.n_train;
    in.c0 = report.c0;
    in.c1 = c1;
    in.delta = cfg.bound_delta;
    in.Lp = 1.0;
    const BoundReport bound = robustness_upper_bound(in);
    report.rows.push_back({eps, robust_accs[i], c1, bound.raw, bound.clamped});

    ResultRow row;
    row.run_id = static_cast<std::uint64_t>(i);
    row.seed = cfg.base_seed;
    row.experiment = experiment_name(cfg.kind);
    row.width = width;
    row.n_train = cfg.n_train;
    row.final_risk_mean = train_report.final_risk_mean;
    row.train_acc = accuracy(net, train_ds);
    row.test_acc = report.clean_acc;
    row.test_acc_ci = hoeffding_half_width(cfg.robust_test_m);
    row.robust_acc = robust_accs[i];
    row.q_hat = effective_q(train_report.final_risk_sum,
                            static_cast<std::uint64_t>(train_ds.count()),
                            width, cfg.bound_w0, cfg.bound_c);
    row.bound_raw = bound.raw;
    row.bound_clamped = bound.clamped;
    report.result_rows.push_back(std::move(row));
  }
  return report;
}

struct BadlossReport {
  int n = 0;
  std::uint64_t width = 0;
  Eigen::Index sample_count = 0;
  double constructed_risk_mean = 0.0;
  double expected_risk_mean = 0.0;
  double best_random_risk = 0.0;
  double best_trained_risk = 0.0;
  double distribution_accuracy = 0.0;
  std::uint64_t random_trials = 0;
  int trained_candidates = 0;
  std::vector<ResultRow> result_rows;
};

// Balanced two-atom sample: risk under the margin-linear loss is then
// minimized by the all-ones construction, which still misclassifies half
// the distribution.
inline LabeledDataset badloss_dataset(int n, Eigen::Index count) {
  require(count >= 2 && count % 2 == 0,
          "badloss_dataset: need an even sample count");
  LabeledDataset ds = make_dataset(count, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (i < count / 2) {
      ds.X.row(i).setOnes();
      ds.y[i] = 1;
    } else {
      ds.X.row(i).setZero();
      ds.y[i] = -1;
    }
  }
  return ds;
}

inline BadlossReport run_badloss_demo(const ExperimentConfig& cfg) {
  require(cfg.dist.kind == DistKind::kTwoPoint,
          "badloss demo: needs the two-point distribution");
  const LossFn loss{LossKind::kNegMargin, false};
  const int n = cfg.dist.n;
  const std::uint64_t W = cfg.badloss_width;
  require(W >= 1, "badloss demo: width must be positive");

  BadlossReport report;
  report.n = n;
  report.width = W;
  Eigen::Index count = static_cast<Eigen::Index>(cfg.n_train);
  if (count % 2 != 0) ++count;
  if (count < 2) count = 2;
  report.sample_count = count;
  const LabeledDataset ds = badloss_dataset(n, count);

  const TwoLayerNet constructed = badloss_net(n, W);
  report.constructed_risk_mean = empirical_risk(constructed, ds, loss).mean;
  report.expected_risk_mean =
      -static_cast<double>(W) * static_cast<double>(n) / 2.0;

  Rng root(cfg.base_seed);
  Rng candidate_rng = root.fork("candidates");
  double best_random = std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < cfg.candidate_trials; ++t) {
    const TwoLayerNet candidate =
        random_net(n, static_cast<Eigen::Index>(W), Activation::kRelu, 1.0,
                   candidate_rng);
    const double risk = empirical_risk(candidate, ds, loss).mean;
    hard_assert(risk >= report.constructed_risk_mean - 1e-9,
                "badloss demo: a random candidate beat the constructed "
                "minimizer");
    best_random = std::min(best_random, risk);
  }
  report.best_random_risk = best_random;
  report.random_trials = cfg.candidate_trials;

  double best_trained = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    Rng init_rng = root.fork("train-init-" + std::to_string(rep));
    const TwoLayerNet net0 =
        random_net(n, static_cast<Eigen::Index>(W), Activation::kRelu,
                   cfg.train.init_scale, init_rng);
    TrainConfig tc = cfg.train;
    tc.clip_box = true;
    Rng seed_rng = root.fork("train-seed-" + std::to_string(rep));
    tc.seed = seed_rng();
    auto [trained, trained_report] = train_erm(net0, ds, loss, tc);
    const double risk = trained_report.final_risk_mean;
    hard_assert(risk >= report.constructed_risk_mean - 1e-9,
                "badloss demo: a trained candidate beat the constructed "
                "minimizer");
    best_trained = std::min(best_trained, risk);
  }
  report.best_trained_risk = best_trained;
  report.trained_candidates = cfg.repeats;
  report.distribution_accuracy =
      distribution_accuracy_exact(constructed, cfg.dist);

  ResultRow row;
  row.run_id = 0;
  row.seed = cfg.base_seed;
  row.experiment = experiment_name(ExperimentKind::kBadlossDemo);
  row.width = W;
  row.n_train = static_cast<std::uint64_t>(count);
  row.final_risk_mean = report.constructed_risk_mean;
  row.train_acc = accuracy(constructed, ds);
  row.test_acc = report.distribution_accuracy;
  row.test_acc_ci = 0.0;
  row.robust_acc = 0.0;
  row.q_hat = 0.0;
  row.bound_raw = 0.0;
  row.bound_clamped = 0.0;
  report.result_rows.push_back(std::move(row));
  return report;
}

struct BoundsTable {
  std::vector<std::pair<std::string, double>> entries;
};

inline BoundsTable run_bounds_table(const ExperimentConfig& cfg) {
  const Config& raw = cfg.raw;
  Th1Inputs in;
  in.n = static_cast<int>(raw.get_int("n", 4));
  in.W0 = static_cast<int>(raw.get_int("w0", 1));
  in.c = raw.get_double("c", 1.0);
  in.W = raw.get_u64("w", 100);
  in.N = raw.get_u64("n_train", 10000);
  in.delta = raw.get_double("delta", 0.05);
  in.Lp = raw.get_double("lp", 1.0);
  in.q = raw.get_double("q", 1.0);
  const BoundReport th1 = th1_lower_bound(in);

  BoundsTable table;
  for (const BoundTerm& term : th1.terms)
    table.entries.emplace_back("th1_" + term.name + "_term", term.value);
  table.entries.emplace_back("th1_raw", th1.raw);
  table.entries.emplace_back("th1_clamped", th1.clamped);

  if (raw.has("rademacher_a"))
    table.entries.emplace_back(
        "rademacher",
        rademacher_bound(in.Lp, in.n, in.W, raw.get_double("rademacher_a", 1.0),
                         in.N));
  if (raw.has("vc_d"))
    table.entries.emplace_back(
        "vc_uniform",
        vc_uniform_bound(raw.get_u64("vc_d", 1), in.N, in.delta));
  if (raw.has("sine_n"))
    table.entries.emplace_back(
        "sine_sample_threshold",
        static_cast<double>(sine_sample_threshold(
            static_cast<int>(raw.get_int("sine_n", 3)), in.delta)));
  if (raw.has("eps")) {
    const Requirements req = cor44_requirements(
        in.n, in.W0, in.c, in.Lp, raw.get_double("eps", 0.1), in.delta);
    table.entries.emplace_back("required_width",
                               static_cast<double>(req.W_min));
    table.entries.emplace_back("required_samples",
                               static_cast<double>(req.N_min));
  }
  return table;
}

inline void emit_outputs(const std::vector<ResultRow>& rows,
                         const ExperimentConfig& cfg,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const ResultRow& r : rows)
    cells.push_back(result_fields(r, cfg.emit_timing));
  write_csv(out_dir + "/results.csv", result_header(), cells);

  const bool by_width = cfg.kind != ExperimentKind::kSweepData;
  std::ofstream plot(out_dir + "/plot.gp", std::ios::binary);
  if (!plot) throw IoError("cannot write plot script");
  plot << "set datafile separator \",\"\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output \"accuracy.png\"\n"
       << "set xlabel \"" << (by_width ? "width" : "training samples")
       << "\"\n"
       << "set ylabel \"accuracy\"\n"
       << "plot \"results.csv\" using " << (by_width ? 4 : 5)
       << ":8 with points title \"test accuracy\", \\\n"
       << "     \"results.csv\" using " << (by_width ? 4 : 5)
       << ":13 with points title \"accuracy bound\"\n";
  plot.flush();
  if (!plot) throw IoError("write failed: plot.gp");

  std::ofstream manifest(out_dir + "/manifest.txt", std::ios::binary);
  if (!manifest) throw IoError("cannot write manifest");
  manifest << "artifact = genlab 1.0.0\n";
  manifest << "experiment = " << experiment_name(cfg.kind) << "\n";
  manifest << "base_seed = " << cfg.base_seed << "\n";
  for (const auto& [key, value] : cfg.raw.entries())
    manifest << "config." << key << " = " << value << "\n";
  for (const ResultRow& r : rows)
    manifest << "seed." << r.run_id << " = " << r.seed << "\n";
  double total = 0.0;
  for (const ResultRow& r : rows) total += r.wall_time;
  manifest << "total_run_seconds = " << format_double(total) << "\n";
  manifest.flush();
  if (!manifest) throw IoError("write failed: manifest.txt");
}

}  // namespace genlab
