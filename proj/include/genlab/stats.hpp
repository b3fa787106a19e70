#pragma once

// Rank correlation and exact binomial tails for the sweep-trend and
// bound-consistency checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "genlab/error.hpp"

namespace genlab {

// Average ranks: ties share the mean of the rank positions they occupy.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values[a] < values[b];
                   });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) /
                              2.0 +
                          1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

inline double spearman_rho(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  require(xs.size() == ys.size(), "spearman_rho: length mismatch");
  require(xs.size() >= 2, "spearman_rho: need at least two points");
  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  require(sxx > 0 && syy > 0, "spearman_rho: a sequence is constant");
  return sxy / std::sqrt(sxx * syy);
}

// P(Binomial(trials, p) >= k), exact via log factorials.
inline double binomial_tail_geq(std::uint64_t trials, std::uint64_t k,
                                double p) {
  require(p >= 0 && p <= 1, "binomial_tail_geq: p must be in [0,1]");
  require(k <= trials + 1, "binomial_tail_geq: k out of range");
  if (k == 0) return 1.0;
  if (k > trials) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double n = static_cast<double>(trials);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double tail = 0.0;
  for (std::uint64_t i = k; i <= trials; ++i) {
    const double x = static_cast<double>(i);
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) -
                            std::lgamma(n - x + 1.0) + x * lp + (n - x) * lq;
    tail += std::exp(log_term);
  }
  return std::min(tail, 1.0);
}

inline double mean_of(const std::vector<double>& values) {
  require(!values.empty(), "mean_of: empty input");
  double total = 0.0;
  for (const double v : values) total += v;
  return total / static_cast<double>(values.size());
}

}  // namespace genlab
