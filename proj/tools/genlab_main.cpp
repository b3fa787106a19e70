// genlab: config-driven experiment runner and bound calculator for the
// two-layer generalization laboratory.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "genlab/experiment.hpp"
#include "genlab/oracles.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool csv = false;
};

genlab::Config load_config(const CommonOptions& opts) {
  genlab::Config cfg;
  if (!opts.config_path.empty())
    cfg = genlab::Config::parse_file(opts.config_path);
  if (opts.seed) cfg.set("base_seed", std::to_string(*opts.seed));
  if (!opts.out_dir.empty()) cfg.set("output_dir", opts.out_dir);
  return cfg;
}

void add_common(CLI::App* sub, CommonOptions& opts, bool config_required) {
  auto* config =
      sub->add_option("--config", opts.config_path, "config file (key = value)");
  if (config_required) config->required();
  sub->add_option("--out", opts.out_dir, "output directory override");
  sub->add_option("--seed", opts.seed, "base seed override");
}

int run_sweep(const CommonOptions& opts, genlab::ExperimentKind kind) {
  const genlab::Config raw = load_config(opts);
  const genlab::ExperimentConfig cfg =
      genlab::parse_experiment_config(raw, kind);
  std::vector<genlab::ResultRow> rows;
  switch (kind) {
    case genlab::ExperimentKind::kSweepWidth:
      rows = genlab::run_sweep_width(cfg);
      break;
    case genlab::ExperimentKind::kSweepData:
      rows = genlab::run_sweep_data(cfg);
      break;
    case genlab::ExperimentKind::kMnistSweep:
      rows = genlab::run_mnist_sweep(cfg);
      break;
    default:
      throw genlab::ContractError("run_sweep: not a sweep experiment");
  }
  genlab::emit_outputs(rows, cfg, cfg.output_dir);
  const bool by_width = kind != genlab::ExperimentKind::kSweepData;
  std::printf("%zu runs -> %s/results.csv\n", rows.size(),
              cfg.output_dir.c_str());
  std::printf("test-accuracy trend rho = %.4f\n",
              genlab::sweep_trend_rho(rows, by_width));
  if (kind == genlab::ExperimentKind::kSweepData)
    std::printf("saturation = %s\n",
                genlab::sweep_saturation(rows) ? "yes" : "no");
  return 0;
}

int run_bounds(const CommonOptions& opts) {
  const genlab::Config raw = load_config(opts);
  const genlab::ExperimentConfig cfg = genlab::parse_experiment_config(
      raw, genlab::ExperimentKind::kBoundsTable);
  const genlab::BoundsTable table = genlab::run_bounds_table(cfg);
  for (const auto& [name, value] : table.entries) {
    if (opts.csv)
      std::printf("%s,%s\n", name.c_str(),
                  genlab::format_double(value).c_str());
    else
      std::printf("%-24s = %.12g\n", name.c_str(), value);
  }
  return 0;
}

int run_robust(const CommonOptions& opts) {
  const genlab::Config raw = load_config(opts);
  const genlab::ExperimentConfig cfg = genlab::parse_experiment_config(
      raw, genlab::ExperimentKind::kRobustDemo);
  const genlab::RobustDemoReport report = genlab::run_robust_demo(cfg);
  genlab::emit_outputs(report.result_rows, cfg, cfg.output_dir);
  std::printf("width %llu, reference width %d, clean accuracy %.4f, "
              "c0 %.6f\n",
              static_cast<unsigned long long>(report.width), report.w0,
              report.clean_acc, report.c0);
  std::printf("%8s %12s %12s %12s %12s\n", "eps", "robust_acc", "c1",
              "bound_raw", "bound");
  for (const genlab::RobustDemoRow& row : report.rows)
    std::printf("%8.3f %12.4f %12.6f %12.4f %12.4f\n", row.eps,
                row.robust_acc, row.c1, row.bound_raw, row.bound_clamped);
  return 0;
}

int run_badloss(const CommonOptions& opts) {
  const genlab::Config raw = load_config(opts);
  const genlab::ExperimentConfig cfg = genlab::parse_experiment_config(
      raw, genlab::ExperimentKind::kBadlossDemo);
  const genlab::BadlossReport report = genlab::run_badloss_demo(cfg);
  genlab::emit_outputs(report.result_rows, cfg, cfg.output_dir);
  std::printf("width %llu over %lld balanced samples\n",
              static_cast<unsigned long long>(report.width),
              static_cast<long long>(report.sample_count));
  std::printf("constructed risk   %.9f (expected %.9f)\n",
              report.constructed_risk_mean, report.expected_risk_mean);
  std::printf("best of %llu random candidates  %.9f\n",
              static_cast<unsigned long long>(report.random_trials),
              report.best_random_risk);
  std::printf("best of %d trained candidates  %.9f\n",
              report.trained_candidates, report.best_trained_risk);
  std::printf("distribution accuracy %.1f\n", report.distribution_accuracy);
  return 0;
}

int run_verify(const CommonOptions& opts) {
  const std::uint64_t seed = opts.seed.value_or(17);
  genlab::Rng root(seed);

  for (const int M : {1, 2}) {
    for (const int N : {4, 6}) {
      const genlab::AlternatingLineSpec spec =
          genlab::equispaced_alternating_line(2, N);
      genlab::Rng rng = root.fork("altline");
      const genlab::AltlineSearchResult result =
          genlab::altline_search(spec, M, 2000, rng);
      std::printf("altline M=%d N=%d: best %d of cap %d\n", M, N,
                  result.best_correct, result.cap);
    }
  }

  {
    genlab::Rng rng = root.fork("coprime");
    const genlab::CoprimeEstimate est = genlab::coprime_mc(10, 29, 20000, rng);
    const double lower = genlab::coprime_prob_lower(10, 29);
    std::printf("coprime n=10 N=29: frequency %.4f (3sigma %.4f), lower "
                "bound %.4f\n",
                est.frequency, est.half_width_3sigma, lower);
    genlab::hard_assert(est.frequency >= lower - est.half_width_3sigma,
                        "verify: coprime frequency fell below the bound");
  }

  {
    genlab::Rng rng = root.fork("patterns");
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(rng.below(4));
      const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.below(32));
      const genlab::TwoLayerNet net = genlab::random_net(
          n, rows, genlab::Activation::kRelu, 1.0, rng);
      const Eigen::Index N = 1 + static_cast<Eigen::Index>(rng.below(16));
      genlab::LabeledDataset ds = genlab::make_dataset(N, n);
      for (Eigen::Index i = 0; i < N; ++i) {
        for (int j = 0; j < n; ++j) ds.X(i, j) = rng.uniform01();
        ds.y[i] = rng.below(2) == 0 ? -1 : 1;
      }
      const std::uint64_t count = genlab::pattern_count(net, ds);
      const double bound = genlab::pattern_count_bound(
          n, static_cast<std::uint64_t>(N));
      genlab::hard_assert(static_cast<double>(count) <= bound,
                          "verify: pattern count exceeded its bound");
    }
    std::printf("pattern-count bound held over 200 random trials\n");
  }

  {
    genlab::Rng rng = root.fork("gradcheck");
    const genlab::TwoLayerNet net =
        genlab::random_net(3, 6, genlab::Activation::kSinePi, 0.9, rng);
    genlab::LabeledDataset ds = genlab::make_dataset(12, 3);
    for (Eigen::Index i = 0; i < 12; ++i) {
      for (int j = 0; j < 3; ++j) ds.X(i, j) = rng.uniform01();
      ds.y[i] = rng.below(2) == 0 ? -1 : 1;
    }
    const double err = genlab::fd_gradcheck(
        net, ds, {genlab::LossKind::kCrossEntropy, false}, 1e-5);
    std::printf("gradient check worst relative error %.3e\n", err);
    genlab::hard_assert(err <= 1e-4, "verify: gradient check failed");
  }

  std::printf("all oracle checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalization-bound laboratory"};
  app.require_subcommand(1);

  CommonOptions bounds_opts, verify_opts, width_opts, data_opts, robust_opts,
      badloss_opts, mnist_opts;

  CLI::App* bounds = app.add_subcommand("bounds", "evaluate bound formulas");
  add_common(bounds, bounds_opts, false);
  bounds->add_flag("--csv", bounds_opts.csv, "emit name,value CSV");

  CLI::App* verify =
      app.add_subcommand("verify", "run the oracle verification suite");
  add_common(verify, verify_opts, false);

  CLI::App* sweep_width =
      app.add_subcommand("sweep-width", "accuracy across widths");
  add_common(sweep_width, width_opts, true);

  CLI::App* sweep_data =
      app.add_subcommand("sweep-data", "accuracy across training fractions");
  add_common(sweep_data, data_opts, true);

  CLI::App* robust =
      app.add_subcommand("robust-demo", "adversarial robustness table");
  add_common(robust, robust_opts, true);

  CLI::App* badloss =
      app.add_subcommand("badloss-demo", "loss-pathology demonstration");
  add_common(badloss, badloss_opts, true);

  CLI::App* mnist = app.add_subcommand("mnist", "width sweep on IDX data");
  add_common(mnist, mnist_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds->parsed()) return run_bounds(bounds_opts);
    if (verify->parsed()) return run_verify(verify_opts);
    if (sweep_width->parsed())
      return run_sweep(width_opts, genlab::ExperimentKind::kSweepWidth);
    if (sweep_data->parsed())
      return run_sweep(data_opts, genlab::ExperimentKind::kSweepData);
    if (robust->parsed()) return run_robust(robust_opts);
    if (badloss->parsed()) return run_badloss(badloss_opts);
    if (mnist->parsed())
      return run_sweep(mnist_opts, genlab::ExperimentKind::kMnistSweep);
  } catch (const genlab::HardAssertionError& e) {
    std::fprintf(stderr, "hard assertion failed: %s\n", e.what());
    return 2;
  } catch (const genlab::TrainingDiverged& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
