#pragma once

// Multi-restart projected gradient attack inside the intersection of an
// L2 ball around the clean point and the [0,1] input box. Reported
// robust accuracies are upper bounds: the attack only ever finds
// certificates of non-robustness.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "genlab/data.hpp"
#include "genlab/error.hpp"
#include "genlab/net.hpp"
#include "genlab/rng.hpp"

namespace genlab {

struct AttackConfig {
  int restarts = 8;
  int steps = 40;
  double step_size = 0.0;  // 0 picks 2.5 * eps / steps
};

struct AttackResult {
  double margin = 0.0;          // worst y * F found
  Eigen::VectorXd x_adv;        // point achieving it
  bool misclassified = false;   // sign decision at x_adv disagrees with y
};

namespace detail {

inline void project_ball_box(Eigen::VectorXd& x, const Eigen::VectorXd& center,
                             double eps) {
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd d = x - center;
    const double norm = d.norm();
    if (norm > eps) x = center + d * (eps / norm);
    x = x.cwiseMax(0.0).cwiseMin(1.0);
  }
}

}  // namespace detail

inline AttackResult attack_min_margin(const TwoLayerNet& net,
                                      const Eigen::VectorXd& x, int y,
                                      double eps, const AttackConfig& cfg,
                                      Rng& rng) {
  require(y == 1 || y == -1, "attack: label must be +-1");
  require(eps >= 0, "attack: radius must be nonnegative");
  require(cfg.restarts >= 1 && cfg.steps >= 1, "attack: bad configuration");
  require(x.size() == net.input_dim(), "attack: dimension mismatch");

  AttackResult best;
  best.x_adv = x;
  best.margin = static_cast<double>(y) * net.eval(x);
  best.misclassified = sign_decision(net.eval(x)) != y;
  if (eps == 0.0 || best.misclassified) return best;

  const double alpha =
      cfg.step_size > 0 ? cfg.step_size : 2.5 * eps / cfg.steps;
  const Eigen::Index n = x.size();

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Eigen::VectorXd cur = x;
    if (restart > 0) {
      cur += rng.in_ball(n, eps);
      detail::project_ball_box(cur, x, eps);
    }
    for (int step = 0; step < cfg.steps; ++step) {
      Eigen::VectorXd g = static_cast<double>(y) * net.input_gradient(cur);
      const double norm = g.norm();
      if (norm < 1e-12) {
        // flat spot; nudge in a random direction
        g = rng.unit_vector(n);
      } else {
        g /= norm;
      }
      cur -= alpha * g;
      detail::project_ball_box(cur, x, eps);
      const double value = net.eval(cur);
      const double margin = static_cast<double>(y) * value;
      if (margin < best.margin) {
        best.margin = margin;
        best.x_adv = cur;
      }
      if (sign_decision(value) != y) {
        best.misclassified = true;
        best.margin = std::min(best.margin, margin);
        best.x_adv = cur;
        return best;
      }
    }
  }
  return best;
}

inline double robust_accuracy_upper(const TwoLayerNet& net,
                                    const LabeledDataset& ds, double eps,
                                    const AttackConfig& cfg, Rng& rng) {
  require(ds.count() >= 1, "robust_accuracy_upper: empty dataset");
  Eigen::Index robust = 0;
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    const AttackResult r =
        attack_min_margin(net, ds.point(i), ds.y[i], eps, cfg, rng);
    if (!r.misclassified) ++robust;
  }
  return static_cast<double>(robust) / static_cast<double>(ds.count());
}

inline double robust_accuracy_upper(const TwoLayerNet& net,
                                    const DistributionSpec& spec,
                                    std::uint64_t M, double eps,
                                    const AttackConfig& cfg, Rng& rng) {
  const LabeledDataset ds =
      sample_dataset(spec, static_cast<Eigen::Index>(M), rng);
  return robust_accuracy_upper(net, ds, eps, cfg, rng);
}

// One attack sweep across an increasing radius grid. An adversarial
// example found at a smaller radius remains valid at every larger one,
// so the reported accuracies are non-increasing by construction.
inline std::vector<double> robust_accuracy_sweep(
    const TwoLayerNet& net, const LabeledDataset& ds,
    const std::vector<double>& eps_grid, const AttackConfig& cfg, Rng& rng) {
  require(ds.count() >= 1, "robust_accuracy_sweep: empty dataset");
  for (std::size_t k = 1; k < eps_grid.size(); ++k)
    require(eps_grid[k] >= eps_grid[k - 1],
            "robust_accuracy_sweep: radii must be non-decreasing");
  std::vector<char> broken(static_cast<std::size_t>(ds.count()), 0);
  std::vector<double> out;
  out.reserve(eps_grid.size());
  for (const double eps : eps_grid) {
    require(eps >= 0, "robust_accuracy_sweep: negative radius");
    Eigen::Index robust = 0;
    for (Eigen::Index i = 0; i < ds.count(); ++i) {
      auto& flag = broken[static_cast<std::size_t>(i)];
      if (!flag) {
        const AttackResult r =
            attack_min_margin(net, ds.point(i), ds.y[i], eps, cfg, rng);
        if (r.misclassified) flag = 1;
      }
      if (!flag) ++robust;
    }
    out.push_back(static_cast<double>(robust) /
                  static_cast<double>(ds.count()));
  }
  return out;
}

// Mean margin of the net at the attack-found worst points; used to
// calibrate the perturbed-margin constant in the robustness bound.
inline double mean_attacked_margin(const TwoLayerNet& net,
                                   const LabeledDataset& ds, double eps,
                                   const AttackConfig& cfg, Rng& rng) {
  require(ds.count() >= 1, "mean_attacked_margin: empty dataset");
  double total = 0.0;
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    const AttackResult r =
        attack_min_margin(net, ds.point(i), ds.y[i], eps, cfg, rng);
    total += r.margin;
  }
  return total / static_cast<double>(ds.count());
}

}  // namespace genlab
