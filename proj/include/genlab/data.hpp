#pragma once

// Labeled datasets over the unit box, the synthetic distributions used by
// the experiments, perturbation clouds, and small dataset utilities.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "genlab/error.hpp"
#include "genlab/rng.hpp"

namespace genlab {

struct LabeledDataset {
  Eigen::MatrixXd X;   // N x n, every coordinate in [0,1]
  Eigen::VectorXi y;   // entries in {-1,+1}

  Eigen::Index count() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }

  Eigen::VectorXd point(Eigen::Index i) const { return X.row(i).transpose(); }
  int label(Eigen::Index i) const { return y[i]; }
};

inline LabeledDataset make_dataset(Eigen::Index count, Eigen::Index dim) {
  require(dim >= 1, "dataset: dimension must be positive");
  LabeledDataset ds;
  ds.X = Eigen::MatrixXd::Zero(count, dim);
  ds.y = Eigen::VectorXi::Zero(count);
  return ds;
}

// Samplers promise coordinates in [0,1]; violations are artifact bugs.
// Exact rounding overshoot below 1e-12 is squashed back to the boundary.
inline void enforce_box(LabeledDataset& ds) {
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      double& v = ds.X(i, j);
      hard_assert(v >= -1e-12 && v <= 1.0 + 1e-12,
                  "sampler produced a coordinate outside [0,1]");
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
    }
    hard_assert(ds.y[i] == 1 || ds.y[i] == -1,
                "sampler produced a label outside {-1,+1}");
  }
}

enum class DistKind { kTwoPoint, kParityDiagonal, kBlobPair, kOutlierMix };

inline const char* dist_kind_name(DistKind k) {
  switch (k) {
    case DistKind::kTwoPoint: return "two_point";
    case DistKind::kParityDiagonal: return "parity_diagonal";
    case DistKind::kBlobPair: return "blob_pair";
    case DistKind::kOutlierMix: return "outlier_mix";
  }
  return "?";
}

struct DistributionSpec {
  DistKind kind = DistKind::kBlobPair;
  int n = 2;
  double blob_margin = 0.2;   // BLOB_PAIR: guaranteed cross-class distance
  double blob_spread = 0.1;   // BLOB_PAIR: ball radius around each center
  double outlier_c = 0.2;     // OUTLIER_MIX: slice offset parameter
};

inline DistributionSpec two_point(int n) {
  require(n >= 1, "two_point: n must be positive");
  return {DistKind::kTwoPoint, n, 0, 0, 0};
}

inline DistributionSpec parity_diagonal(int n) {
  require(n >= 1, "parity_diagonal: n must be positive");
  return {DistKind::kParityDiagonal, n, 0, 0, 0};
}

inline DistributionSpec blob_pair(int n, double margin, double spread) {
  require(n >= 1, "blob_pair: n must be positive");
  require(margin > 0, "blob_pair: margin must be positive");
  require(spread >= 0, "blob_pair: spread must be nonnegative");
  const double half_gap = (margin + 2.0 * spread) / 2.0;
  require(half_gap / std::sqrt(static_cast<double>(n)) + spread <= 0.5,
          "blob_pair: margin+spread too large for the unit box");
  return {DistKind::kBlobPair, n, margin, spread, 0};
}

inline DistributionSpec outlier_mix(int n, double c) {
  require(n >= 2, "outlier_mix: n must be at least 2");
  require(c > 0, "outlier_mix: c must be positive");
  require(c < static_cast<double>(n) / 6.0,
          "outlier_mix: c must be below n/6 so the slices stay separated");
  return {DistKind::kOutlierMix, n, 0, 0, c};
}

namespace detail {

// Uniform draw from {x in [lo,hi]^n : sum x = s}: map to the unit box,
// scale an exponential vector onto the target-sum simplex, reject
// coordinates above 1. Slices with target sum above n/2 are reflected
// first so the rejection rate stays harmless.
inline Eigen::VectorXd slice_uniform(int n, double s, double lo, double hi,
                                     Rng& rng) {
  const double span = hi - lo;
  require(span > 0, "slice sampler: empty coordinate range");
  double target = (s - n * lo) / span;
  require(target > 0 && target < n, "slice sampler: unreachable target sum");
  const bool reflect = target > n / 2.0;
  if (reflect) target = n - target;
  Eigen::VectorXd z(n);
  for (int tries = 0; tries < 100000; ++tries) {
    double total = 0;
    for (int i = 0; i < n; ++i) {
      z[i] = -std::log(1.0 - rng.uniform01());
      total += z[i];
    }
    z *= target / total;
    if (z.maxCoeff() <= 1.0) {
      if (reflect) z = Eigen::VectorXd::Ones(n) - z;
      return Eigen::VectorXd::Constant(n, lo) + span * z;
    }
  }
  throw ContractError("slice sampler: rejection loop failed to accept");
}

}  // namespace detail

inline void sample_into(const DistributionSpec& spec, LabeledDataset& ds,
                        Eigen::Index row, Rng& rng) {
  const int n = spec.n;
  switch (spec.kind) {
    case DistKind::kTwoPoint: {
      const bool plus = rng.uniform01() < 0.5;
      ds.X.row(row) = plus ? Eigen::RowVectorXd::Ones(n)
                           : Eigen::RowVectorXd::Zero(n);
      ds.y[row] = plus ? 1 : -1;
      return;
    }
    case DistKind::kParityDiagonal: {
      const auto i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n))) + 1;
      ds.X.row(row).setConstant(static_cast<double>(i) / n);
      ds.y[row] = (i % 2 == 1) ? 1 : -1;
      return;
    }
    case DistKind::kBlobPair: {
      const bool plus = rng.uniform01() < 0.5;
      const double d = spec.blob_margin + 2.0 * spec.blob_spread;
      const double center_shift = (d / 2.0) / std::sqrt(static_cast<double>(n));
      Eigen::VectorXd x =
          Eigen::VectorXd::Constant(n, plus ? 0.5 + center_shift
                                            : 0.5 - center_shift);
      if (spec.blob_spread > 0) x += rng.in_ball(n, spec.blob_spread);
      ds.X.row(row) = x.transpose();
      ds.y[row] = plus ? 1 : -1;
      return;
    }
    case DistKind::kOutlierMix: {
      const double c = spec.outlier_c;
      const double u = rng.uniform01();
      if (u < 99.0 / 200.0) {
        ds.X.row(row) =
            detail::slice_uniform(n, n / 2.0 + c, 2.0 * c / n, 1.0, rng)
                .transpose();
        ds.y[row] = 1;
      } else if (u < 99.0 / 100.0) {
        ds.X.row(row) =
            detail::slice_uniform(n, n / 2.0 - c, 0.0, 1.0 - 2.0 * c / n, rng)
                .transpose();
        ds.y[row] = -1;
      } else {
        ds.X.row(row) =
            detail::slice_uniform(n, n - c, 0.0, 1.0, rng).transpose();
        ds.y[row] = -1;
      }
      return;
    }
  }
  throw ContractError("sample_into: unknown distribution");
}

inline LabeledDataset sample_dataset(const DistributionSpec& spec,
                                     Eigen::Index N, Rng& rng) {
  require(N >= 1, "sample_dataset: N must be positive");
  LabeledDataset ds = make_dataset(N, spec.n);
  for (Eigen::Index i = 0; i < N; ++i) sample_into(spec, ds, i, rng);
  enforce_box(ds);
  return ds;
}

// Minimum Euclidean distance across differently labeled pairs;
// +infinity when only one label is present.
inline double separation(const LabeledDataset& ds) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ds.count(); ++i)
    for (Eigen::Index j = i + 1; j < ds.count(); ++j)
      if (ds.y[i] != ds.y[j])
        best = std::min(best, (ds.X.row(i) - ds.X.row(j)).norm());
  return best;
}

// Originals followed by perturbed copies with the original labels. The
// perturbed points are clipped back into the unit box.
inline LabeledDataset perturb_cloud(const LabeledDataset& ds, double eps,
                                    const std::vector<Eigen::VectorXd>& perturbations) {
  require(eps >= 0, "perturb_cloud: eps must be nonnegative");
  require(static_cast<Eigen::Index>(perturbations.size()) == ds.count(),
          "perturb_cloud: one perturbation per sample required");
  LabeledDataset out = make_dataset(2 * ds.count(), ds.dim());
  out.X.topRows(ds.count()) = ds.X;
  out.y.head(ds.count()) = ds.y;
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    const Eigen::VectorXd& p = perturbations[static_cast<std::size_t>(i)];
    require(p.size() == ds.dim(), "perturb_cloud: perturbation dimension mismatch");
    require(p.norm() <= eps + 1e-12, "perturb_cloud: perturbation norm exceeds eps");
    Eigen::VectorXd moved = ds.point(i) + p;
    for (Eigen::Index j = 0; j < moved.size(); ++j)
      moved[j] = std::min(1.0, std::max(0.0, moved[j]));
    out.X.row(ds.count() + i) = moved.transpose();
    out.y[ds.count() + i] = ds.y[i];
  }
  return out;
}

struct AlternatingLineSpec {
  int n = 1;
  std::vector<double> knots;  // strictly increasing, inside [0,1]
};

// Points t_i * ones(n) with labels +1, -1, +1, ... in knot order.
inline LabeledDataset alternating_line_dataset(const AlternatingLineSpec& spec) {
  require(spec.n >= 1, "alternating line: n must be positive");
  require(!spec.knots.empty(), "alternating line: need at least one knot");
  for (std::size_t i = 0; i < spec.knots.size(); ++i) {
    require(spec.knots[i] >= 0.0 && spec.knots[i] <= 1.0,
            "alternating line: knots must lie in [0,1]");
    require(i == 0 || spec.knots[i] > spec.knots[i - 1],
            "alternating line: knots must be strictly increasing");
  }
  LabeledDataset ds =
      make_dataset(static_cast<Eigen::Index>(spec.knots.size()), spec.n);
  for (std::size_t i = 0; i < spec.knots.size(); ++i) {
    ds.X.row(static_cast<Eigen::Index>(i)).setConstant(spec.knots[i]);
    ds.y[static_cast<Eigen::Index>(i)] = (i % 2 == 0) ? 1 : -1;
  }
  return ds;
}

inline AlternatingLineSpec equispaced_alternating_line(int n, int N) {
  require(N >= 1, "alternating line: N must be positive");
  AlternatingLineSpec spec;
  spec.n = n;
  spec.knots.resize(static_cast<std::size_t>(N));
  if (N == 1) {
    spec.knots[0] = 0.5;
  } else {
    for (int i = 0; i < N; ++i)
      spec.knots[static_cast<std::size_t>(i)] = 0.1 + 0.8 * i / (N - 1);
  }
  return spec;
}

// Uniform subsample without replacement of size round(fraction * N).
inline LabeledDataset data_fraction(const LabeledDataset& ds, double fraction,
                                    Rng& rng) {
  require(fraction > 0.0 && fraction <= 1.0,
          "data_fraction: fraction must lie in (0,1]");
  const auto target = static_cast<Eigen::Index>(
      std::llround(fraction * static_cast<double>(ds.count())));
  require(target >= 1, "data_fraction: subsample would be empty");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(ds.count()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  rng.shuffle(idx);
  LabeledDataset out = make_dataset(target, ds.dim());
  for (Eigen::Index i = 0; i < target; ++i) {
    out.X.row(i) = ds.X.row(idx[static_cast<std::size_t>(i)]);
    out.y[i] = ds.y[idx[static_cast<std::size_t>(i)]];
  }
  return out;
}

}  // namespace genlab
