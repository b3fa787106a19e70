#pragma once

// Explicit network constructions: bias absorption, replication, exact
// clamping as a deeper net, interpolation of finite point sets, width
// expansion back into the box, unit merging by activation pattern, and
// the canonical expressers for the synthetic distributions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "genlab/data.hpp"
#include "genlab/error.hpp"
#include "genlab/layered.hpp"
#include "genlab/net.hpp"

namespace genlab {

inline constexpr std::uint64_t kMaxMaterializedUnits = 1'000'000;

inline TwoLayerNet negate(TwoLayerNet net) {
  net.outer = -net.outer;
  net.outer_bias = -net.outer_bias;
  return net;
}

// One stored row per copy, all counts 1. Refuses nets whose expanded
// width is too large to hold in memory.
inline TwoLayerNet expand_counts(const TwoLayerNet& net) {
  const std::uint64_t width = net.width();
  require(width <= kMaxMaterializedUnits,
          "expand_counts: net too wide to materialize");
  TwoLayerNet out(net.input_dim(), static_cast<Eigen::Index>(width), net.act);
  out.outer_bias = net.outer_bias;
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < net.stored_rows(); ++r) {
    for (std::uint64_t k = 0; k < net.counts[static_cast<std::size_t>(r)]; ++k) {
      out.weights.row(at) = net.weights.row(r);
      out.biases[at] = net.biases[r];
      out.outer[at] = net.outer[r];
      ++at;
    }
  }
  return out;
}

// Moves the output bias into an extra RELU unit: sign(c) * RELU(|c|) = c
// since the unit has zero inner weights.
inline TwoLayerNet absorb_bias(const TwoLayerNet& net) {
  require(net.act == Activation::kRelu,
          "absorb_bias: construction requires a RELU net");
  TwoLayerNet out = net;
  const double c = net.outer_bias;
  out.append_unit(c >= 0 ? 1.0 : -1.0,
                  Eigen::VectorXd::Zero(net.input_dim()), std::abs(c));
  out.outer_bias = 0.0;
  return out;
}

// k = floor(target / width) copies of every unit, computing k * F.
inline TwoLayerNet replicate(const TwoLayerNet& net,
                             std::uint64_t target_width) {
  require(net.outer_bias == 0.0,
          "replicate: absorb the output bias first");
  const std::uint64_t width = net.width();
  require(width >= 1, "replicate: empty net");
  require(target_width >= width,
          "replicate: target width below current width");
  const std::uint64_t k = target_width / width;
  TwoLayerNet out = net;
  for (auto& c : out.counts) c *= k;
  return out;
}

inline double clamp_eval(const TwoLayerNet& net, double level,
                         const Eigen::VectorXd& x) {
  require(level > 0, "clamp_eval: clamp level must be positive");
  return std::clamp(net.eval(x), -level, level);
}

// Exact clamp as a depth-3 net:
//   k * RELU((F(x)+a)/k) - k * RELU((F(x)-a)/k) - a = min(max(F(x),-a),a).
// The k-way split spreads the middle layer across 2k rows whose row norms
// shrink by 1/k, which is what the complexity bookkeeping consumes.
inline LayeredNet clamp_as_network(const TwoLayerNet& net, double level,
                                   std::uint64_t k) {
  require(level > 0, "clamp_as_network: clamp level must be positive");
  require(k >= 1, "clamp_as_network: split factor must be at least 1");
  const TwoLayerNet flat = expand_counts(net);
  const Eigen::Index width = flat.stored_rows();

  LayeredNet out;
  LayeredNet::Layer first;
  first.weights = flat.weights;
  first.biases = flat.biases;
  first.act = flat.act;
  out.hidden.push_back(std::move(first));

  const auto rows = static_cast<Eigen::Index>(2 * k);
  LayeredNet::Layer second;
  second.weights.resize(rows, width);
  second.biases.resize(rows);
  second.act = Activation::kRelu;
  const double inv_k = 1.0 / static_cast<double>(k);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) {
    second.weights.row(j) = flat.outer.transpose() * inv_k;
    second.biases[j] = (flat.outer_bias + level) * inv_k;
    second.weights.row(static_cast<Eigen::Index>(k) + j) =
        flat.outer.transpose() * inv_k;
    second.biases[static_cast<Eigen::Index>(k) + j] =
        (flat.outer_bias - level) * inv_k;
  }
  out.hidden.push_back(std::move(second));

  out.out_weights.resize(rows);
  out.out_weights.head(static_cast<Eigen::Index>(k)).setOnes();
  out.out_weights.tail(static_cast<Eigen::Index>(k)).setConstant(-1.0);
  out.out_bias = -level;
  return out;
}

// Width-1 sine net expressing the diagonal parity distribution: at the
// support point (i/n) * ones the preactivation is i - 0.5, and
// sin(pi * (i - 0.5)) alternates exactly between +1 and -1.
inline TwoLayerNet sine_expresser(int n) {
  require(n >= 1, "sine_expresser: n must be positive");
  TwoLayerNet net(n, 1, Activation::kSinePi);
  net.weights.row(0).setOnes();
  net.biases[0] = -0.5;
  net.outer[0] = 1.0;
  net.outer_bias = 0.0;
  return net;
}

class SeparationFailure : public ContractError {
public:
  SeparationFailure(const std::string& msg, double achieved_gap)
      : ContractError(msg), achieved_gap_(achieved_gap) {}
  double achieved_gap() const { return achieved_gap_; }

private:
  double achieved_gap_;
};

// Interpolates (x_i, y_i) with three RELU units per point: a sharp hat of
// half-width delta and height y_i centered on the projection of x_i onto
// a random direction. The direction is resampled until the projections
// separate; it is then shrunk so every hat center sits strictly inside
// [-1,1] and the inner parameters stay in the box. delta is the largest
// power of two that keeps the hats disjoint, capped at 1/16; powers of
// two make the later outer-weight split exact for +-1 labels.
inline TwoLayerNet memorize(const Eigen::MatrixXd& points,
                            const Eigen::VectorXd& labels, Rng& rng,
                            int max_retries = 64) {
  const Eigen::Index N = points.rows();
  const Eigen::Index n = points.cols();
  require(N >= 1, "memorize: need at least one point");
  require(n >= 1, "memorize: dimension must be positive");
  require(labels.size() == N, "memorize: one label per point required");
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i + 1; j < N; ++j)
      require((points.row(i) - points.row(j)).norm() > 0,
              "memorize: points must be pairwise distinct");

  const double formula_delta = 0.01 / (4.0 * std::pow(static_cast<double>(N), 4) *
                                       static_cast<double>(n)) *
                               std::sqrt(8.0 / std::numbers::pi);

  double last_gap = 0.0;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    const Eigen::VectorXd direction = rng.unit_vector(n);
    const Eigen::VectorXd proj = points * direction;

    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = i + 1; j < N; ++j)
        gap = std::min(gap, std::abs(proj[i] - proj[j]));
    last_gap = std::max(last_gap, gap);
    if (gap < 2.0 * formula_delta) continue;

    auto down_to_power_of_two = [](double v) {
      return std::pow(2.0, std::floor(std::log2(v)));
    };
    const double provisional =
        down_to_power_of_two(std::min(gap / 2.0, 1.0 / 16.0));

    const double max_abs = proj.cwiseAbs().maxCoeff();
    const double scale =
        max_abs > 1.0 - 2.0 * provisional
            ? (1.0 - 2.0 * provisional) / max_abs
            : 1.0;
    const Eigen::VectorXd w = scale * direction;
    const Eigen::VectorXd centers = scale * proj;
    const double scaled_gap = scale * gap;
    const double delta = std::min(
        provisional, down_to_power_of_two(std::min(scaled_gap / 2.0, 1.0 / 16.0)));
    if (delta < 1e-12)
      throw ContractError(
          "memorize: required hat half-width fell below 1e-12");

    TwoLayerNet net(n, 3 * N, Activation::kRelu);
    for (Eigen::Index i = 0; i < N; ++i) {
      const double a = labels[i] / delta;
      net.weights.row(3 * i) = w.transpose();
      net.biases[3 * i] = -(centers[i] - delta);
      net.outer[3 * i] = a;
      net.weights.row(3 * i + 1) = w.transpose();
      net.biases[3 * i + 1] = -(centers[i] + delta);
      net.outer[3 * i + 1] = a;
      net.weights.row(3 * i + 2) = w.transpose();
      net.biases[3 * i + 2] = -centers[i];
      net.outer[3 * i + 2] = -2.0 * a;
    }
    return net;
  }
  throw SeparationFailure(
      "memorize: retries exhausted without a separating direction "
      "(achieved projection gap " + std::to_string(last_gap) + ")",
      last_gap);
}

// Restores the outer-weight box constraint by splitting every unit with
// |a| > 1 into ceil(|a|) identical copies carrying a/ceil(|a|).
inline TwoLayerNet split_units(const TwoLayerNet& net) {
  for (Eigen::Index r = 0; r < net.stored_rows(); ++r)
    require(std::abs(net.biases[r]) <= 1.0 &&
                net.weights.row(r).cwiseAbs().maxCoeff() <= 1.0,
            "split_units: inner parameters must already lie in [-1,1]");
  TwoLayerNet out = net;
  for (Eigen::Index r = 0; r < out.stored_rows(); ++r) {
    const double a = out.outer[r];
    if (std::abs(a) <= 1.0) continue;
    const double copies = std::ceil(std::abs(a));
    out.outer[r] = a / copies;
    out.counts[static_cast<std::size_t>(r)] *=
        static_cast<std::uint64_t>(copies);
  }
  return out;
}

// Divides every parameter by A = max(1, largest magnitude) and the output
// bias by A^2; positive homogeneity of RELU makes the result compute
// F/A^2, preserving signs everywhere.
inline std::pair<TwoLayerNet, double> rescale_into_box(const TwoLayerNet& net) {
  require(net.act == Activation::kRelu,
          "rescale_into_box: construction requires a RELU net");
  double biggest = std::abs(net.outer_bias);
  for (Eigen::Index r = 0; r < net.stored_rows(); ++r) {
    biggest = std::max(biggest, std::abs(net.outer[r]));
    biggest = std::max(biggest, std::abs(net.biases[r]));
    biggest = std::max(biggest, net.weights.row(r).cwiseAbs().maxCoeff());
  }
  const double A = std::max(1.0, biggest);
  TwoLayerNet out = net;
  out.weights /= A;
  out.biases /= A;
  out.outer /= A;
  out.outer_bias /= A * A;
  return {out, A};
}

struct PatternMergeResult {
  TwoLayerNet net;
  std::uint64_t distinct_patterns = 0;
};

namespace detail {

inline std::vector<char> activation_pattern(const TwoLayerNet& net,
                                            Eigen::Index row,
                                            const LabeledDataset& ds) {
  std::vector<char> bits(static_cast<std::size_t>(ds.count()));
  for (Eigen::Index j = 0; j < ds.count(); ++j) {
    const double z = net.weights.row(row).dot(ds.X.row(j)) + net.biases[row];
    bits[static_cast<std::size_t>(j)] = z >= 0.0 ? 1 : 0;
  }
  return bits;
}

}  // namespace detail

// Number of distinct preactivation sign patterns over the dataset.
inline std::uint64_t pattern_count(const TwoLayerNet& net,
                                   const LabeledDataset& ds) {
  require(net.act == Activation::kRelu, "pattern_count: RELU nets only");
  std::set<std::vector<char>> patterns;
  for (Eigen::Index r = 0; r < net.stored_rows(); ++r)
    patterns.insert(detail::activation_pattern(net, r, ds));
  return patterns.size();
}

// Merges units sharing an activation pattern on the dataset into copies
// of their average. Averaging is done separately for the two outer-weight
// signs within a pattern: the merged unit (sum count*|a|*W / S, outer
// weight +-1) then reproduces the group's contribution exactly at every
// dataset point, which a sign-mixed average would not. The distinct
// pattern count is the reported complexity quantity.
inline PatternMergeResult pattern_merge(const TwoLayerNet& net,
                                        const LabeledDataset& ds) {
  require(net.act == Activation::kRelu, "pattern_merge: RELU nets only");
  require(box_constrained(net), "pattern_merge: net must be box-constrained");
  require(ds.dim() == net.input_dim(), "pattern_merge: dimension mismatch");

  struct Group {
    Eigen::VectorXd weighted_w;
    double weighted_b = 0.0;
    std::uint64_t total = 0;
  };
  std::map<std::pair<std::vector<char>, int>, Group> groups;
  std::set<std::vector<char>> patterns;

  for (Eigen::Index r = 0; r < net.stored_rows(); ++r) {
    auto bits = detail::activation_pattern(net, r, ds);
    patterns.insert(bits);
    const int sign = net.outer[r] >= 0.0 ? 1 : -1;
    auto& g = groups[{std::move(bits), sign}];
    if (g.total == 0) g.weighted_w = Eigen::VectorXd::Zero(net.input_dim());
    const auto count = net.counts[static_cast<std::size_t>(r)];
    const double mass = static_cast<double>(count) * std::abs(net.outer[r]);
    g.weighted_w += mass * net.weights.row(r).transpose();
    g.weighted_b += mass * net.biases[r];
    g.total += count;
  }

  PatternMergeResult result;
  result.distinct_patterns = patterns.size();
  TwoLayerNet merged(net.input_dim(),
                     static_cast<Eigen::Index>(groups.size()), net.act);
  merged.outer_bias = net.outer_bias;
  Eigen::Index row = 0;
  for (const auto& [key, g] : groups) {
    const double size = static_cast<double>(g.total);
    merged.weights.row(row) = (g.weighted_w / size).transpose();
    merged.biases[row] = g.weighted_b / size;
    merged.outer[row] = static_cast<double>(key.second);
    merged.counts[static_cast<std::size_t>(row)] = g.total;
    ++row;
  }
  result.net = std::move(merged);
  return result;
}

// Canonical expresser of a synthetic distribution together with its
// width and guaranteed margin, used to seed bound inputs.
struct Expresser {
  TwoLayerNet net;
  int width = 0;
  double margin = 0.0;
};

inline Expresser distribution_expresser(const DistributionSpec& spec) {
  const int n = spec.n;
  const double root_n = std::sqrt(static_cast<double>(n));
  switch (spec.kind) {
    case DistKind::kTwoPoint:
    case DistKind::kBlobPair: {
      // RELU(s - 1/2) - RELU(1/2 - s) = s - 1/2 with s the coordinate mean.
      TwoLayerNet net(n, 2, Activation::kRelu);
      net.weights.row(0).setConstant(1.0 / n);
      net.biases[0] = -0.5;
      net.outer[0] = 1.0;
      net.weights.row(1).setConstant(-1.0 / n);
      net.biases[1] = 0.5;
      net.outer[1] = -1.0;
      const double margin = spec.kind == DistKind::kTwoPoint
                                ? 0.5
                                : spec.blob_margin / (2.0 * root_n);
      return {std::move(net), 2, margin};
    }
    case DistKind::kParityDiagonal:
      return {sine_expresser(n), 1, 1.0};
    case DistKind::kOutlierMix: {
      // A hat of half-width c/n in the coordinate mean, centered on the
      // positive slice, minus half the hat height.
      const double c = spec.outlier_c;
      const double h = c / n;
      const double t0 = 0.5 + c / n;
      TwoLayerNet net(n, 4, Activation::kRelu);
      const double signs[4] = {1.0, -1.0, -1.0, 1.0};
      const double shifts[4] = {h, 0.0, 0.0, -h};
      for (int u = 0; u < 4; ++u) {
        net.weights.row(u).setConstant(1.0 / n);
        net.biases[u] = -t0 + shifts[u];
        net.outer[u] = signs[u];
      }
      net.outer_bias = -h / 2.0;
      return {std::move(net), 4, h / 2.0};
    }
  }
  throw ContractError("distribution_expresser: unknown distribution");
}

// The loss-pathology witness: W units computing RELU(sum x + 1) with all
// weights at the box ceiling, plus output bias 1. Stored as one counted
// row since the copies are identical.
inline TwoLayerNet badloss_net(int n, std::uint64_t width) {
  require(n >= 1 && width >= 1, "badloss_net: bad shape");
  TwoLayerNet net(n, 1, Activation::kRelu);
  net.weights.row(0).setOnes();
  net.biases[0] = 1.0;
  net.outer[0] = 1.0;
  net.counts[0] = width;
  net.outer_bias = 1.0;
  return net;
}

}  // namespace genlab
