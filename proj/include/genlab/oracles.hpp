#pragma once

// Independent verification harnesses: a local-search falsifier for the
// alternating-line expressiveness cap, Monte Carlo and exhaustive
// estimates of the coprime-difference event, finite-difference gradient
// checks, and a tiny-scale grid minimizer for cross-checking trained
// risk values.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "genlab/construct.hpp"
#include "genlab/data.hpp"
#include "genlab/error.hpp"
#include "genlab/net.hpp"
#include "genlab/rng.hpp"
#include "genlab/train.hpp"

namespace genlab {

inline int altline_cap(int M, int N) {
  require(M >= 0, "altline_cap: negative width");
  require(N >= 1, "altline_cap: need at least one knot");
  return M + N / 2;
}

struct AltlineSearchResult {
  int best_correct = 0;
  int cap = 0;
  std::uint64_t zero_outputs = 0;  // exact-zero knot evals among kept nets
};

namespace detail {

struct AltlineScore {
  int correct = 0;
  int zeros = 0;
};

// Width-M RELU net evaluated on the diagonal: parameters are laid out
// as (a, b, w_1..w_n) per unit followed by the output shift.
inline AltlineScore altline_eval(const std::vector<double>& params, int M,
                                 int n, const std::vector<double>& knots,
                                 const std::vector<int>& labels) {
  AltlineScore score;
  for (std::size_t j = 0; j < knots.size(); ++j) {
    const double t = knots[j];
    double f = params.back();
    for (int u = 0; u < M; ++u) {
      const std::size_t at = static_cast<std::size_t>(u) *
                             (static_cast<std::size_t>(n) + 2);
      const double a = params[at];
      const double b = params[at + 1];
      double slope = 0.0;
      for (int k = 0; k < n; ++k) slope += params[at + 2 + k];
      f += a * std::max(t * slope + b, 0.0);
    }
    if (f == 0.0) ++score.zeros;
    if (sign_decision(f) == labels[j]) ++score.correct;
  }
  return score;
}

}  // namespace detail

inline AltlineSearchResult altline_search(const AlternatingLineSpec& spec,
                                          int M, std::uint64_t trials,
                                          Rng& rng) {
  require(M >= 0, "altline_search: negative width");
  require(trials >= 1, "altline_search: need at least one trial");
  const int N = static_cast<int>(spec.knots.size());
  AltlineSearchResult result;
  result.cap = altline_cap(M, N);

  std::vector<double> knots(spec.knots.begin(), spec.knots.end());
  std::vector<int> labels(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) labels[static_cast<std::size_t>(j)] =
      (j % 2 == 0) ? 1 : -1;

  const std::size_t P =
      static_cast<std::size_t>(M) * (static_cast<std::size_t>(spec.n) + 2) + 1;
  static constexpr double kDeltas[] = {0.6, 0.3, 0.1, 0.03,
                                       -0.6, -0.3, -0.1, -0.03};
  std::vector<double> params(P);

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    for (double& p : params) p = rng.uniform(-1.0, 1.0);
    detail::AltlineScore score =
        detail::altline_eval(params, M, spec.n, knots, labels);
    for (int pass = 0; pass < 3; ++pass) {
      bool improved = false;
      for (std::size_t p = 0; p < P; ++p) {
        for (const double delta : kDeltas) {
          const double saved = params[p];
          const double moved = std::clamp(saved + delta, -1.0, 1.0);
          if (moved == saved) continue;
          params[p] = moved;
          const detail::AltlineScore cand =
              detail::altline_eval(params, M, spec.n, knots, labels);
          if (cand.correct > score.correct) {
            score = cand;
            improved = true;
          } else {
            params[p] = saved;
          }
        }
      }
      if (!improved) break;
    }
    if (M >= 1)
      hard_assert(score.correct <= result.cap,
                  "altline_search: expressiveness cap exceeded; this is an "
                  "implementation bug, not a refutation");
    result.best_correct = std::max(result.best_correct, score.correct);
    result.zero_outputs += static_cast<std::uint64_t>(score.zeros);
  }
  return result;
}

namespace detail {

inline bool coprime_block_success(const int* m) {
  const int d1 = m[0] - m[1];
  const int d2 = m[2] - m[3];
  if (d1 == 0 || d2 == 0) return false;
  return std::gcd(std::abs(d1), std::abs(d2)) == 1;
}

}  // namespace detail

struct CoprimeEstimate {
  double frequency = 0.0;
  double half_width_3sigma = 0.0;
};

// Fraction of N-draw batches containing a consecutive disjoint block of
// four values whose pairwise differences are nonzero and coprime.
inline CoprimeEstimate coprime_mc(int n, int N, std::uint64_t trials,
                                  Rng& rng) {
  require(n >= 3, "coprime_mc: dimension must be at least 3");
  require(N >= 4, "coprime_mc: need at least 4 draws");
  require(trials >= 1, "coprime_mc: need at least one trial");
  std::vector<int> draws(static_cast<std::size_t>(N));
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (int& m : draws)
      m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    bool hit = false;
    for (int at = 0; at + 4 <= N; at += 4) {
      if (detail::coprime_block_success(&draws[static_cast<std::size_t>(at)])) {
        hit = true;
        break;
      }
    }
    if (hit) ++successes;
  }
  const double f =
      static_cast<double>(successes) / static_cast<double>(trials);
  const double sigma = std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
  return {f, 3.0 * sigma};
}

// Exact success probability by enumerating all n^N sequences.
inline double coprime_exhaustive(int n, int N) {
  require(n >= 3, "coprime_exhaustive: dimension must be at least 3");
  require(N >= 4, "coprime_exhaustive: need at least 4 draws");
  double total = 1.0;
  for (int i = 0; i < N; ++i) total *= n;
  require(total <= 5e6, "coprime_exhaustive: state space too large");
  const std::uint64_t count = static_cast<std::uint64_t>(total);
  std::vector<int> draws(static_cast<std::size_t>(N), 1);
  std::uint64_t successes = 0;
  for (std::uint64_t seq = 0; seq < count; ++seq) {
    std::uint64_t rest = seq;
    for (int i = 0; i < N; ++i) {
      draws[static_cast<std::size_t>(i)] =
          1 + static_cast<int>(rest % static_cast<std::uint64_t>(n));
      rest /= static_cast<std::uint64_t>(n);
    }
    for (int at = 0; at + 4 <= N; at += 4) {
      if (detail::coprime_block_success(&draws[static_cast<std::size_t>(at)])) {
        ++successes;
        break;
      }
    }
  }
  return static_cast<double>(successes) / total;
}

// Smallest distance from any pre-activation to the RELU kink; gradient
// checks on RELU nets are only meaningful when this clears h.
inline double min_kink_distance(const TwoLayerNet& net,
                                const LabeledDataset& ds) {
  require(ds.count() >= 1, "min_kink_distance: empty dataset");
  if (net.stored_rows() == 0) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    const Eigen::VectorXd z = net.preactivations(ds.point(i));
    best = std::min(best, z.cwiseAbs().minCoeff());
  }
  return best;
}

// Central-difference check of the analytic mean-risk gradient; returns
// the worst relative error across all parameters.
inline double fd_gradcheck(const TwoLayerNet& net, const LabeledDataset& ds,
                           const LossFn& fn, double h) {
  require(h > 0, "fd_gradcheck: step must be positive");
  const GradientRecord analytic = grad(net, ds, fn);

  double worst = 0.0;
  const auto check = [&](double analytic_value, auto&& bump) {
    TwoLayerNet plus = net;
    TwoLayerNet minus = net;
    bump(plus, h);
    bump(minus, -h);
    const double fd = (empirical_risk(plus, ds, fn).mean -
                       empirical_risk(minus, ds, fn).mean) /
                      (2.0 * h);
    const double scale = std::max({1.0, std::abs(fd), std::abs(analytic_value)});
    worst = std::max(worst, std::abs(fd - analytic_value) / scale);
  };

  for (Eigen::Index r = 0; r < net.stored_rows(); ++r) {
    for (Eigen::Index k = 0; k < net.input_dim(); ++k)
      check(analytic.weights(r, k),
            [r, k](TwoLayerNet& m, double d) { m.weights(r, k) += d; });
    check(analytic.biases[r],
          [r](TwoLayerNet& m, double d) { m.biases[r] += d; });
    check(analytic.outer[r],
          [r](TwoLayerNet& m, double d) { m.outer[r] += d; });
  }
  check(analytic.outer_bias,
        [](TwoLayerNet& m, double d) { m.outer_bias += d; });
  return worst;
}

// Minimum cross-entropy risk over a full parameter grid; tiny scale
// only. grid_resolution counts subdivisions per axis, so doubling it
// keeps every old grid point and the value cannot increase.
inline double brute_force_min_risk(const LabeledDataset& ds, int W,
                                   int grid_resolution) {
  require(ds.dim() == 1, "brute_force_min_risk: one-dimensional inputs only");
  require(W >= 0 && W <= 2, "brute_force_min_risk: width at most 2");
  require(grid_resolution >= 1, "brute_force_min_risk: bad resolution");
  require(ds.count() >= 1, "brute_force_min_risk: empty dataset");

  const int R = grid_resolution;
  std::vector<double> axis(static_cast<std::size_t>(R) + 1);
  for (int i = 0; i <= R; ++i)
    axis[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / R;

  const Eigen::Index N = ds.count();
  const LossFn ce{LossKind::kCrossEntropy, false};
  std::vector<double> partial(static_cast<std::size_t>(N), 0.0);
  double best = std::numeric_limits<double>::infinity();

  const auto score_with_shift = [&]() {
    for (const double c : axis) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < N; ++i)
        sum += loss_value(ce, partial[static_cast<std::size_t>(i)] + c,
                          ds.y[i]);
      best = std::min(best, sum / static_cast<double>(N));
    }
  };

  const auto unit_level = [&](auto&& self, int depth) -> void {
    if (depth == W) {
      score_with_shift();
      return;
    }
    std::vector<double> saved = partial;
    for (const double a : axis) {
      for (const double w : axis) {
        for (const double b : axis) {
          for (Eigen::Index i = 0; i < N; ++i)
            partial[static_cast<std::size_t>(i)] =
                saved[static_cast<std::size_t>(i)] +
                a * std::max(w * ds.X(i, 0) + b, 0.0);
          self(self, depth + 1);
        }
      }
    }
    partial = saved;
  };
  unit_level(unit_level, 0);
  return best;
}

}  // namespace genlab
