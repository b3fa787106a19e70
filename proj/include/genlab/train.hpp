#pragma once

// Losses, closed-form gradients, projected-gradient training with weight
// clipping, accuracy estimators, and the effective approximation factor
// connecting measured risk to the width-based generalization bound.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genlab/construct.hpp"
#include "genlab/data.hpp"
#include "genlab/error.hpp"
#include "genlab/net.hpp"
#include "genlab/rng.hpp"

namespace genlab {

enum class LossKind { kCrossEntropy, kAbsError, kNegMargin };

struct LossFn {
  LossKind kind = LossKind::kCrossEntropy;
  bool squared_abs = false;  // ABS_ERROR only: use (f-y)^2 instead of |f-y|
};

inline const char* loss_name(const LossFn& fn) {
  switch (fn.kind) {
    case LossKind::kCrossEntropy: return "cross_entropy";
    case LossKind::kAbsError: return fn.squared_abs ? "abs_squared" : "abs";
    case LossKind::kNegMargin: return "neg_margin";
  }
  return "?";
}

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double loss_value(const LossFn& fn, double f, int y) {
  require(y == 1 || y == -1, "loss: label must be +-1");
  require(std::isfinite(f), "loss: non-finite prediction");
  switch (fn.kind) {
    case LossKind::kCrossEntropy: {
      const double m = f * y;
      return std::max(-m, 0.0) + std::log1p(std::exp(-std::abs(m)));
    }
    case LossKind::kAbsError: {
      const double d = f - y;
      return fn.squared_abs ? d * d : std::abs(d);
    }
    case LossKind::kNegMargin:
      return -static_cast<double>(y) * f;
  }
  return 0.0;
}

// Derivative with respect to the prediction f.
inline double loss_slope(const LossFn& fn, double f, int y) {
  switch (fn.kind) {
    case LossKind::kCrossEntropy:
      return -static_cast<double>(y) * sigmoid(-f * y);
    case LossKind::kAbsError: {
      const double d = f - y;
      if (fn.squared_abs) return 2.0 * d;
      return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
    }
    case LossKind::kNegMargin:
      return -static_cast<double>(y);
  }
  return 0.0;
}

struct RiskValue {
  double mean = 0.0;
  double sum = 0.0;
};

inline RiskValue empirical_risk(const TwoLayerNet& net,
                                const LabeledDataset& ds, const LossFn& fn) {
  require(ds.count() >= 1, "empirical_risk: empty dataset");
  const Eigen::VectorXd f = net.eval_batch(ds.X);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ds.count(); ++i)
    sum += loss_value(fn, f[i], ds.y[i]);
  return {sum / static_cast<double>(ds.count()), sum};
}

struct GradientRecord {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
  Eigen::VectorXd outer;
  double outer_bias = 0.0;
};

namespace detail {

// Gradient of the mean loss over the given rows. Replicated copies of a
// stored unit share parameters, so their contributions accumulate into
// one gradient entry.
inline GradientRecord mean_gradient(const TwoLayerNet& net,
                                    const Eigen::MatrixXd& X,
                                    const Eigen::VectorXi& y,
                                    const LossFn& fn) {
  const Eigen::Index B = X.rows();
  const Eigen::Index R = net.stored_rows();
  GradientRecord g;
  g.weights = Eigen::MatrixXd::Zero(R, net.input_dim());
  g.biases = Eigen::VectorXd::Zero(R);
  g.outer = Eigen::VectorXd::Zero(R);

  Eigen::VectorXd f;
  Eigen::MatrixXd S;
  if (R > 0) {
    Eigen::MatrixXd Z =
        (X * net.weights.transpose()).rowwise() + net.biases.transpose();
    S = Z;
    Eigen::MatrixXd D = Z;
    for (Eigen::Index i = 0; i < Z.size(); ++i) {
      S.data()[i] = activation_value(net.act, Z.data()[i]);
      D.data()[i] = activation_slope(net.act, Z.data()[i]);
    }
    f = S * net.effective_outer();
    f.array() += net.outer_bias;

    Eigen::VectorXd slope(B);
    for (Eigen::Index b = 0; b < B; ++b)
      slope[b] = loss_slope(fn, f[b], y[b]) / static_cast<double>(B);

    const Eigen::MatrixXd G = D.array().colwise() * slope.array();
    const Eigen::VectorXd eo = net.effective_outer();
    g.outer = S.transpose() * slope;
    for (Eigen::Index r = 0; r < R; ++r)
      g.outer[r] *= static_cast<double>(net.counts[static_cast<std::size_t>(r)]);
    g.biases = (G.colwise().sum().transpose().array() * eo.array()).matrix();
    g.weights = (G.transpose() * X).array().colwise() * eo.array();
    g.outer_bias = slope.sum();
  } else {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < B; ++b)
      acc += loss_slope(fn, net.outer_bias, y[b]) / static_cast<double>(B);
    g.outer_bias = acc;
  }
  return g;
}

}  // namespace detail

inline GradientRecord grad(const TwoLayerNet& net, const LabeledDataset& ds,
                           const LossFn& fn) {
  require(ds.count() >= 1, "grad: empty dataset");
  return detail::mean_gradient(net, ds.X, ds.y, fn);
}

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 100;
  Eigen::Index batch_size = 0;  // 0 means full batch
  bool clip_box = true;
  std::uint64_t seed = 1;
  double init_scale = 0.5;
};

struct TrainReport {
  std::vector<double> risk_trajectory;  // per-epoch mean risk
  double final_risk_sum = 0.0;
  double final_risk_mean = 0.0;
  double margin_min = 0.0;
  double margin_mean = 0.0;
  std::optional<double> effective_q;
  double wall_time = 0.0;
  int epochs_run = 0;
};

class TrainingDiverged : public std::runtime_error {
public:
  TrainingDiverged(std::string msg, TwoLayerNet snapshot, int epoch)
      : std::runtime_error(std::move(msg)),
        snapshot_(std::move(snapshot)),
        epoch_(epoch) {}
  const TwoLayerNet& snapshot() const { return snapshot_; }
  int epoch() const { return epoch_; }

private:
  TwoLayerNet snapshot_;
  int epoch_;
};

namespace detail {

inline void clip_to_box(TwoLayerNet& net) {
  net.weights = net.weights.cwiseMax(-1.0).cwiseMin(1.0);
  net.biases = net.biases.cwiseMax(-1.0).cwiseMin(1.0);
  net.outer = net.outer.cwiseMax(-1.0).cwiseMin(1.0);
  net.outer_bias = std::clamp(net.outer_bias, -1.0, 1.0);
}

inline bool all_finite(const TwoLayerNet& net) {
  return net.weights.allFinite() && net.biases.allFinite() &&
         net.outer.allFinite() && std::isfinite(net.outer_bias);
}

}  // namespace detail

inline std::pair<TwoLayerNet, TrainReport> train_erm(const TwoLayerNet& net0,
                                                     const LabeledDataset& ds,
                                                     const LossFn& fn,
                                                     const TrainConfig& cfg) {
  require(cfg.learning_rate > 0, "train: learning rate must be positive");
  require(cfg.epochs >= 1, "train: epochs must be at least 1");
  require(cfg.batch_size >= 0, "train: negative batch size");
  require(ds.count() >= 1, "train: empty dataset");
  require(ds.dim() == net0.input_dim(), "train: dimension mismatch");
  if (cfg.clip_box)
    require(box_constrained(net0), "train: initial net must be in the box");

  const auto started = std::chrono::steady_clock::now();
  const Eigen::Index N = ds.count();
  const Eigen::Index B =
      cfg.batch_size == 0 ? N : std::min(cfg.batch_size, N);

  Rng rng(cfg.seed);
  TwoLayerNet net = net0;
  TrainReport report;
  report.risk_trajectory.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const TwoLayerNet epoch_start = net;
    if (B < N) rng.shuffle(order);

    for (Eigen::Index at = 0; at < N; at += B) {
      const Eigen::Index take = std::min(B, N - at);
      Eigen::MatrixXd Xb(take, ds.dim());
      Eigen::VectorXi yb(take);
      for (Eigen::Index i = 0; i < take; ++i) {
        Xb.row(i) = ds.X.row(order[static_cast<std::size_t>(at + i)]);
        yb[i] = ds.y[order[static_cast<std::size_t>(at + i)]];
      }
      const GradientRecord g = detail::mean_gradient(net, Xb, yb, fn);
      net.weights -= cfg.learning_rate * g.weights;
      net.biases -= cfg.learning_rate * g.biases;
      net.outer -= cfg.learning_rate * g.outer;
      net.outer_bias -= cfg.learning_rate * g.outer_bias;

      if (cfg.clip_box) {
        detail::clip_to_box(net);
        hard_assert(box_constrained(net),
                    "train: box constraint violated after a clipped step");
      } else if (!detail::all_finite(net)) {
        throw TrainingDiverged("train: parameters diverged to non-finite values",
                               epoch_start, epoch);
      }
    }

    const Eigen::VectorXd f = net.eval_batch(ds.X);
    if (!f.allFinite())
      throw TrainingDiverged("train: predictions diverged to non-finite values",
                             epoch_start, epoch);
    double risk_sum = 0.0;
    for (Eigen::Index i = 0; i < N; ++i)
      risk_sum += loss_value(fn, f[i], ds.y[i]);
    const double risk_mean = risk_sum / static_cast<double>(N);
    if (!std::isfinite(risk_mean))
      throw TrainingDiverged("train: risk diverged to a non-finite value",
                             epoch_start, epoch);
    report.risk_trajectory.push_back(risk_mean);
    report.epochs_run = epoch + 1;
  }

  const RiskValue final_risk = empirical_risk(net, ds, fn);
  report.final_risk_mean = final_risk.mean;
  report.final_risk_sum = final_risk.sum;

  const Eigen::VectorXd f = net.eval_batch(ds.X);
  double min_margin = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double m = static_cast<double>(ds.y[i]) * f[i];
    min_margin = std::min(min_margin, m);
    total += m;
  }
  report.margin_min = min_margin;
  report.margin_mean = total / static_cast<double>(N);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return {std::move(net), std::move(report)};
}

inline double min_margin(const TwoLayerNet& net, const LabeledDataset& ds) {
  require(ds.count() >= 1, "min_margin: empty dataset");
  const Eigen::VectorXd f = net.eval_batch(ds.X);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ds.count(); ++i)
    best = std::min(best, static_cast<double>(ds.y[i]) * f[i]);
  return best;
}

inline double accuracy(const TwoLayerNet& net, const LabeledDataset& ds) {
  require(ds.count() >= 1, "accuracy: empty dataset");
  const Eigen::VectorXd f = net.eval_batch(ds.X);
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < ds.count(); ++i)
    if (sign_decision(f[i]) == ds.y[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.count());
}

// Fraction classified correctly with strictly positive margin; the
// eps -> 0 limit of robust accuracy.
inline double strict_accuracy(const TwoLayerNet& net,
                              const LabeledDataset& ds) {
  require(ds.count() >= 1, "strict_accuracy: empty dataset");
  const Eigen::VectorXd f = net.eval_batch(ds.X);
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < ds.count(); ++i)
    if (static_cast<double>(ds.y[i]) * f[i] > 0.0) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.count());
}

// Two-sided Hoeffding half-width at 99% confidence.
inline double hoeffding_half_width(std::uint64_t M) {
  require(M >= 1, "hoeffding_half_width: M must be positive");
  return std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(M)));
}

struct AccuracyEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
};

inline AccuracyEstimate population_accuracy(const TwoLayerNet& net,
                                            const DistributionSpec& spec,
                                            std::uint64_t M, Rng& rng) {
  require(M >= 100, "population_accuracy: need at least 100 draws");
  const LabeledDataset ds =
      sample_dataset(spec, static_cast<Eigen::Index>(M), rng);
  return {accuracy(net, ds), hoeffding_half_width(M)};
}

// Exact distribution accuracy for the finite-support distributions.
inline double distribution_accuracy_exact(const TwoLayerNet& net,
                                          const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistKind::kTwoPoint: {
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(spec.n);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(spec.n);
      double acc = 0.0;
      if (sign_decision(net.eval(zero)) == -1) acc += 0.5;
      if (sign_decision(net.eval(ones)) == 1) acc += 0.5;
      return acc;
    }
    case DistKind::kParityDiagonal: {
      double acc = 0.0;
      for (int i = 1; i <= spec.n; ++i) {
        const Eigen::VectorXd x =
            Eigen::VectorXd::Constant(spec.n, static_cast<double>(i) / spec.n);
        const int y = (i % 2 == 1) ? 1 : -1;
        if (sign_decision(net.eval(x)) == y) acc += 1.0 / spec.n;
      }
      return acc;
    }
    default:
      throw ContractError(
          "distribution_accuracy_exact: only finite-support distributions");
  }
}

// q-hat: measured risk sum divided by the constructive upper bound
// N * ln(1 + exp(-c * floor(W/(W0+1)))) on the class minimum. Underflow
// of the denominator yields the +infinity sentinel.
inline double effective_q(double risk_sum, std::uint64_t N, std::uint64_t W,
                          int W0, double c) {
  require(W0 >= 1, "effective_q: W0 must be at least 1");
  require(c > 0, "effective_q: confidence must be positive");
  require(W >= static_cast<std::uint64_t>(W0) + 1,
          "effective_q: W must be at least W0+1");
  require(N >= 1, "effective_q: N must be positive");
  require(risk_sum >= 0, "effective_q: negative risk sum");
  const std::uint64_t k = W / (static_cast<std::uint64_t>(W0) + 1);
  const double per_sample = std::log1p(std::exp(-c * static_cast<double>(k)));
  const double denominator = static_cast<double>(N) * per_sample;
  if (denominator == 0.0) return std::numeric_limits<double>::infinity();
  return risk_sum / denominator;
}

}  // namespace genlab
